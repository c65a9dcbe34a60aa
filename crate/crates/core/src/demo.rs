//! A small seeded end-to-end setup: a synthetic library, an engine over it,
//! and a classifier trained on pairs from a separate synthetic corpus.
//!
//! Used by the examples and the integration tests.

use crate::classifier::{EpochStats, TrainConfig};
use crate::corpus::{build_dataset, PairCounts, ParaphraseProvider, Segment, SynthConfig, SynthCorpus};
use crate::embed::EmbeddingProviderConfig;
use crate::error::Result;
use crate::rng::derive_seed;
use crate::service::{Engine, EngineConfig, IndexSettings, IngestMode};
use crate::vecindex::Strategy;

pub const DEMO_DIMENSION: usize = 64;

/// Hash embeddings of width 64, an IVF index with 16 lists, and a classifier
/// trained with batch 128 for 20 epochs.
pub fn demo_config(seed: u64) -> EngineConfig {
    EngineConfig {
        seed,
        provider: EmbeddingProviderConfig::hash(DEMO_DIMENSION, seed),
        index: IndexSettings {
            strategy: Strategy::Ivf,
            nlist: 16,
            nprobe: 8,
            ..IndexSettings::default()
        },
        classifier: TrainConfig {
            batch_size: 128,
            max_epochs: 20,
            ..TrainConfig::default()
        },
    }
}

/// The library the demo engine indexes: 40 documents of 5 segments.
pub fn demo_library(seed: u64) -> Vec<Segment> {
    SynthCorpus::generate(&SynthConfig::with_size(40, 5, derive_seed(seed, 0x91, 0)))
        .expect("valid synthetic config")
        .segments()
}

/// Training pairs from 300 documents of 10 segments: per segment one shuffle,
/// one paraphrase, one plain negative and two disguised negatives.
pub fn demo_training_pairs(seed: u64) -> Result<Vec<crate::corpus::TextPair>> {
    let segments = SynthCorpus::generate(&SynthConfig::with_size(300, 10, derive_seed(seed, 0x92, 0)))?.segments();
    build_dataset(
        &segments,
        &ParaphraseProvider::rule_stub(derive_seed(seed, 0x93, 0)),
        derive_seed(seed, 0x94, 0),
        PairCounts {
            disguised_negative: 2,
            ..PairCounts::default()
        },
    )
}

/// Builds the demo engine: ingests [`demo_library`] and trains on
/// [`demo_training_pairs`].
pub fn demo_engine(seed: u64, on_epoch: impl FnMut(&EpochStats)) -> Result<Engine> {
    let mut engine = Engine::new(demo_config(seed))?;
    engine.ingest(demo_library(seed), IngestMode::Replace)?;
    engine.train(&demo_training_pairs(seed)?, on_epoch)?;
    Ok(engine)
}

#![allow(dead_code)]

use std::path::Path;

use plagdet::classifier::TrainConfig;
use plagdet::corpus::{build_dataset, PairCounts, ParaphraseProvider, Segment, SynthConfig, SynthCorpus, TextPair};
use plagdet::embed::EmbeddingProviderConfig;
use plagdet::service::{Engine, EngineConfig, IndexSettings, IngestMode};
use plagdet::vecindex::Strategy;

/// Small and quick: 32-dim hash embeddings, IVF with 4 lists, 3 epochs.
pub fn small_config(seed: u64) -> EngineConfig {
    EngineConfig {
        seed,
        provider: EmbeddingProviderConfig::hash(32, seed),
        index: IndexSettings {
            strategy: Strategy::Ivf,
            nlist: 4,
            nprobe: 2,
            ..IndexSettings::default()
        },
        classifier: TrainConfig {
            batch_size: 32,
            max_epochs: 3,
            hidden: 16,
            ..TrainConfig::default()
        },
    }
}

pub fn library(docs: usize, per_doc: usize, seed: u64) -> Vec<Segment> {
    SynthCorpus::generate(&SynthConfig::with_size(docs, per_doc, seed))
        .expect("valid synthetic config")
        .segments()
}

pub fn pairs(segments: &[Segment], seed: u64) -> Vec<TextPair> {
    build_dataset(
        segments,
        &ParaphraseProvider::rule_stub(seed),
        seed,
        PairCounts::default(),
    )
    .expect("dataset")
}

/// Ingested and trained engine over 6 documents of 5 segments.
pub fn trained_engine(seed: u64) -> Engine {
    let lib = library(6, 5, seed);
    let mut engine = Engine::new(small_config(seed)).expect("config");
    engine.ingest(lib.clone(), IngestMode::Replace).expect("ingest");
    engine.train(&pairs(&lib, seed), |_| {}).expect("train");
    engine
}

pub fn write(path: &Path, text: &str) {
    std::fs::write(path, text).expect("write fixture");
}

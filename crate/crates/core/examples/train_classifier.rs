//! Trains the pair classifier on synthetic data and reports held-out metrics.
//!
//! ```text
//! cargo run --release --example train_classifier
//! ```

use plagdet::classifier::{train_with_callback, LabeledPair, PlagiarismLabel, TrainConfig};
use plagdet::corpus::{build_dataset, split_dataset, PairCounts, ParaphraseProvider, SynthConfig, SynthCorpus};
use plagdet::embed::EmbeddingProviderConfig;
use plagdet::metrics::evaluate_classifier;

fn main() -> plagdet::Result<()> {
    let segments = SynthCorpus::generate(&SynthConfig::with_size(5, 134, 7))?.segments();
    let pairs = build_dataset(&segments, &ParaphraseProvider::rule_stub(1), 3, PairCounts::default())?;

    let embedder = EmbeddingProviderConfig::hash(768, 0).build()?;
    let t1: Vec<&str> = pairs.iter().map(|p| p.t1.as_str()).collect();
    let t2: Vec<&str> = pairs.iter().map(|p| p.t2.as_str()).collect();
    let labeled: Vec<LabeledPair> = embedder
        .embed_batch(&t1)?
        .into_iter()
        .zip(embedder.embed_batch(&t2)?)
        .zip(&pairs)
        .map(|((h1, h2), p)| LabeledPair {
            h1: h1.into_values(),
            h2: h2.into_values(),
            label: p.label,
        })
        .collect();
    let (train, test) = split_dataset(&labeled, 0.8, 5)?;
    println!("{} pairs: {} train, {} test", labeled.len(), train.len(), test.len());

    let config = TrainConfig {
        batch_size: 128,
        max_epochs: 20,
        seed: 2,
        ..TrainConfig::default()
    };
    let outcome = train_with_callback(&train, &config, |s| println!("{s}"))?;

    let report = evaluate_classifier(&outcome.params, &test)?;
    println!(
        "\ntest accuracy {:.4}  precision {:.4}  recall {:.4}  f1 {:.4}",
        report.accuracy, report.precision, report.recall, report.f1
    );
    for m in &report.per_class {
        let label = PlagiarismLabel::from_index(m.class).expect("three classes");
        println!(
            "  {:<20} p {:.3} r {:.3} f1 {:.3} (n={})",
            label.to_string(),
            m.precision,
            m.recall,
            m.f1,
            m.support
        );
    }
    Ok(())
}

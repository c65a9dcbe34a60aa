//! Retrieval benchmark: a synthetic corpus, one shuffled-sentence query per
//! sampled segment, success rate and mean latency of each index strategy.
//!
//! ```text
//! cargo run --release --example retrieval_benchmark -- [documents] [queries]
//! ```

use plagdet::corpus::{SynthConfig, SynthCorpus};
use plagdet::service::{EngineConfig, RetrievalBench};
use plagdet::vecindex::Strategy;

fn main() -> plagdet::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<usize>().expect("numeric argument"));
    let documents = args.next().unwrap_or(250);
    let queries = args.next().unwrap_or(1000);

    let segments = SynthCorpus::generate(&SynthConfig::with_size(documents, 20, 7))?.segments();
    let config = EngineConfig {
        seed: 7,
        ..EngineConfig::default()
    };
    let bench = RetrievalBench::prepare(&segments, &config, Some(queries))?;
    println!(
        "{} segments, {} queries, nlist {} nprobe {} k {}",
        segments.len(),
        bench.queries.len(),
        config.index.nlist,
        config.index.nprobe,
        config.index.k
    );
    println!(
        "{:<8} {:>8} {:>10} {:>5} {:>12}",
        "strategy", "success", "ms/query", "dim", "bytes/vector"
    );
    for strategy in [Strategy::Flat, Strategy::Ivf, Strategy::IvfPq] {
        let r = bench.run(strategy, &config)?;
        println!(
            "{:<8} {:>7.2}% {:>10.4} {:>5} {:>12}",
            format!("{strategy:?}"),
            100.0 * r.success_rate,
            r.time_ms_per_vector,
            r.dim,
            r.stored_bytes_per_vector
        );
    }
    Ok(())
}

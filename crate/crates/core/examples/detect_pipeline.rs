//! The whole pipeline in one process: build the demo engine, paraphrase a
//! library segment and ask the engine where it came from.
//!
//! ```text
//! cargo run --release --example detect_pipeline
//! ```

use plagdet::corpus::ParaphraseProvider;
use plagdet::demo::{demo_engine, demo_library};

fn main() -> plagdet::Result<()> {
    let engine = demo_engine(1, |s| eprintln!("{s}"))?;
    let source = &demo_library(1)[17];
    let query = ParaphraseProvider::rule_stub(7).paraphrase(&source.text)?;
    println!("source #{} ({}):\n  {}\n", source.id, source.doc_id, source.text);
    println!("query:\n  {query}\n");

    let report = engine.detect(&query, Some(10), None)?;
    println!(
        "{:>4} {:>5} {:>8}  {:<20} {:>6} {:>6} {:>6}",
        "rank", "id", "score", "label", "p(no)", "p(imi)", "p(shu)"
    );
    for c in &report.candidates {
        let p = &c.probabilities;
        let mark = if c.segment_id == source.id { " <- source" } else { "" };
        println!(
            "{:>4} {:>5} {:>8.4}  {:<20} {:>6.2} {:>6.2} {:>6.2}{mark}",
            c.rank, c.segment_id, c.score, c.label_name, p[0], p[1], p[2]
        );
    }
    println!(
        "\nembed {:.2} ms, retrieve {:.2} ms, classify {:.2} ms",
        report.timings.embed_ms, report.timings.retrieve_ms, report.timings.classify_ms
    );
    Ok(())
}

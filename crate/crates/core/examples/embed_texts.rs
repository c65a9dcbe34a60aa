//! Hash-embeds a few sentences and prints their pairwise cosine similarity.
//!
//! ```text
//! cargo run --example embed_texts
//! ```

use plagdet::embed::{tokenize, EmbeddingProviderConfig};

fn main() -> plagdet::Result<()> {
    let texts = [
        "The committee approved the new budget after a long debate.",
        "After a long debate the committee approved the new budget.",
        "The committee accepted the fresh budget after a lengthy debate.",
        "Migratory birds return to the lake every spring.",
    ];
    let embedder = EmbeddingProviderConfig::hash(768, 0).build()?;
    let vectors = embedder.embed_batch(&texts)?;

    for (text, v) in texts.iter().zip(&vectors) {
        println!("{:>2} tokens, norm {:.6}: {text}", tokenize(text).count(), v.norm());
    }
    println!();
    for i in 0..texts.len() {
        let row: Vec<String> = (0..texts.len())
            .map(|j| format!("{:.3}", vectors[i].cosine(&vectors[j])))
            .collect();
        println!("[{i}] {}", row.join("  "));
    }
    Ok(())
}

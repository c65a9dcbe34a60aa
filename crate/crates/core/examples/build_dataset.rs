//! Segments a small corpus and builds labeled pairs from it: sentence
//! shuffles, rule-based paraphrases and cross-document negatives.

use plagdet::corpus::{build_dataset, segment_corpus, split_dataset, PairCounts, ParaphraseProvider};

const DOCS: [(&str, &str); 3] = [
    (
        "rivers",
        "The river floods the valley every spring. Farmers build new walls to protect the fields. \
         The water brings rich soil to the land.\n\nOld maps show the river in a different place. \
         It moved slowly over many years. People still tell stories about the great flood.",
    ),
    (
        "trains",
        "The first train left the station at dawn. It carried mail and a few travelers. \
         The journey took most of the day.\n\nLater the line was extended to the coast. \
         Fast trains now cover the distance in an hour. The old station became a museum.",
    ),
    (
        "bees",
        "Bees visit many flowers in a single morning. They carry pollen back to the hive. \
         A strong colony can make a lot of honey.\n\nBeekeepers check the hives every week. \
         They look for signs of disease. A healthy queen is important for the colony.",
    ),
];

fn main() -> plagdet::Result<()> {
    let segments = segment_corpus(DOCS, 40);
    println!("{} segments", segments.len());
    for s in &segments {
        println!("  #{} [{}] {} tokens", s.id, s.doc_id, s.token_count);
    }

    let provider = ParaphraseProvider::rule_stub(1);
    let pairs = build_dataset(&segments, &provider, 9, PairCounts::default())?;
    for p in pairs.iter().take(3) {
        println!("\n{}\n  t1: {}\n  t2: {}", p.label, p.t1, p.t2);
    }

    let (train, test) = split_dataset(&pairs, 0.8, 9)?;
    println!("\n{} pairs -> {} train / {} test", pairs.len(), train.len(), test.len());
    Ok(())
}

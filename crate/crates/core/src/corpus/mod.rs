//! Segmentation and synthetic `(t1, t2, label)` dataset construction.

mod generate;
mod paraphrase;
mod segment;
mod synonyms;
mod synth;

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub use generate::{build_dataset, negative_sample, negative_sample_n, shuffle_plagiarize, split_dataset, PairCounts};
pub use paraphrase::{paraphrase, ParaphraseKind, ParaphraseProvider, SynonymTable};
pub use segment::{segment_document, sentence_ranges, split_sentences};
pub use synth::{SynthConfig, SynthCorpus};

use crate::embed::count_tokens;
use crate::error::{Error, Result};

/// A piece of a source document that fits the encoder's token limit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub id: u64,
    pub doc_id: String,
    pub text: String,
    #[serde(default, skip_serializing)]
    pub token_count: usize,
}

impl Segment {
    pub fn new(id: u64, doc_id: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        Segment {
            id,
            doc_id: doc_id.into(),
            token_count: count_tokens(&text),
            text,
        }
    }
}

/// Segments several documents, numbering segments globally in input order.
pub fn segment_corpus<'a>(docs: impl IntoIterator<Item = (&'a str, &'a str)>, max_tokens: usize) -> Vec<Segment> {
    let mut out = Vec::new();
    for (doc_id, text) in docs {
        for mut seg in segment_document(doc_id, text, max_tokens) {
            seg.id = out.len() as u64;
            out.push(seg);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextPair {
    pub t1: String,
    pub t2: String,
    pub label: crate::classifier::PlagiarismLabel,
}

pub fn write_jsonl<T: Serialize>(path: impl AsRef<Path>, items: &[T]) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    for item in items {
        serde_json::to_writer(&mut w, item).map_err(|e| Error::InvalidInput(e.to_string()))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads one JSON value per non-blank line. Errors name the offending line.
pub fn read_jsonl<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|e| Error::InvalidInput(format!("line {}: {e}", n + 1)))?;
        out.push(item);
    }
    Ok(out)
}

/// Reads a corpus file and recomputes token counts.
pub fn read_segments(path: impl AsRef<Path>) -> Result<Vec<Segment>> {
    let mut segs: Vec<Segment> = read_jsonl(path)?;
    for s in &mut segs {
        s.token_count = count_tokens(&s.text);
    }
    Ok(segs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::PlagiarismLabel;

    #[test]
    fn jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let segs = segment_corpus([("a", "One. Two.\n\nThree."), ("b", "Four five.")], 512);
        assert_eq!(segs.iter().map(|s| s.id).collect::<Vec<_>>(), vec![0, 1, 2]);
        let p = dir.path().join("c.jsonl");
        write_jsonl(&p, &segs).unwrap();
        let line = std::fs::read_to_string(&p).unwrap();
        assert_eq!(
            line.lines().next().unwrap(),
            r#"{"id":0,"doc_id":"a","text":"One. Two."}"#
        );
        assert_eq!(read_segments(&p).unwrap(), segs);

        let pairs = vec![TextPair {
            t1: "x".into(),
            t2: "y".into(),
            label: PlagiarismLabel::ImitationPlagiarism,
        }];
        let q = dir.path().join("d.jsonl");
        write_jsonl(&q, &pairs).unwrap();
        assert_eq!(
            std::fs::read_to_string(&q).unwrap(),
            "{\"t1\":\"x\",\"t2\":\"y\",\"label\":1}\n"
        );
        assert_eq!(read_jsonl::<TextPair>(&q).unwrap(), pairs);
    }

    #[test]
    fn bad_line_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.jsonl");
        std::fs::write(
            &p,
            "{\"t1\":\"a\",\"t2\":\"b\",\"label\":0}\n\n{\"t1\":\"a\",\"t2\":\"b\",\"label\":7}\n",
        )
        .unwrap();
        let err = read_jsonl::<TextPair>(&p).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
    }
}

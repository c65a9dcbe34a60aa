use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::synonyms::SYNONYMS;
use super::{segment_corpus, Segment};
use crate::embed::MAX_TOKENS;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded, SeededRng};

const POOL_STREAM: u64 = 0x41;
const DOC_STREAM: u64 = 0x42;

const ONSETS: &[&str] = &[
    "b", "c", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "cl", "dr", "gr", "pl", "st",
    "tr", "sk",
];
const VOWELS: &[&str] = &["a", "e", "i", "o", "u", "ai", "ou", "ea"];
const CODAS: &[&str] = &["", "", "", "n", "r", "s", "l", "m", "x"];

const FUNCTION_WORDS: &[&str] = &[
    "the", "a", "of", "and", "to", "in", "is", "for", "with", "on", "by", "as", "this", "that", "these", "those",
    "also", "it", "we", "are", "from", "which",
];

/// Shape of a synthetic corpus of topic-coherent documents.
///
/// Each document draws its own vocabulary of invented words plus words from
/// the paraphraser's synonym table, so segments of one document resemble each
/// other, segments of different documents barely overlap, and the rule
/// paraphraser has material to rewrite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub documents: usize,
    pub segments_per_document: usize,
    pub sentences_per_segment: (usize, usize),
    pub words_per_sentence: (usize, usize),
    pub topic_words: usize,
    pub synonym_words: usize,
    pub function_word_rate: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            documents: 250,
            segments_per_document: 20,
            sentences_per_segment: (3, 6),
            words_per_sentence: (8, 16),
            topic_words: 40,
            synonym_words: 25,
            function_word_rate: 0.3,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn with_size(documents: usize, segments_per_document: usize, seed: u64) -> Self {
        SynthConfig {
            documents,
            segments_per_document,
            seed,
            ..SynthConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (s0, s1) = self.sentences_per_segment;
        let (w0, w1) = self.words_per_sentence;
        if self.documents == 0 || self.segments_per_document == 0 {
            return Err(Error::InvalidConfig(
                "documents and segments_per_document must be positive".into(),
            ));
        }
        if s0 == 0 || s0 > s1 || w0 == 0 || w0 > w1 {
            return Err(Error::InvalidConfig(
                "sentence and word ranges must be nonempty and positive".into(),
            ));
        }
        if s1 * w1 > MAX_TOKENS {
            return Err(Error::InvalidConfig(format!(
                "segments could exceed {MAX_TOKENS} tokens"
            )));
        }
        if self.topic_words + self.synonym_words == 0 || self.synonym_words > SYNONYMS.len() {
            return Err(Error::InvalidConfig("bad vocabulary sizes".into()));
        }
        if !(0.0..1.0).contains(&self.function_word_rate) {
            return Err(Error::InvalidConfig("function_word_rate must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

/// Generated documents as `(doc_id, text)`; paragraphs are separated by blank
/// lines and each becomes one segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthCorpus {
    pub documents: Vec<(String, String)>,
}

impl SynthCorpus {
    pub fn generate(config: &SynthConfig) -> Result<Self> {
        config.validate()?;
        let pool = word_pool(config.documents * config.topic_words / 2 + 500, config.seed);
        let documents = (0..config.documents)
            .map(|d| {
                let mut rng = seeded(derive_seed(config.seed, DOC_STREAM, d as u64));
                let mut vocab: Vec<&str> = pool
                    .choose_multiple(&mut rng, config.topic_words)
                    .map(String::as_str)
                    .collect();
                vocab.extend(
                    SYNONYMS
                        .choose_multiple(&mut rng, config.synonym_words)
                        .map(|(k, _)| *k),
                );
                let paragraphs: Vec<String> = (0..config.segments_per_document)
                    .map(|_| paragraph(&mut rng, &vocab, config))
                    .collect();
                (format!("doc{d:04}"), paragraphs.join("\n\n"))
            })
            .collect();
        Ok(SynthCorpus { documents })
    }

    pub fn segments(&self) -> Vec<Segment> {
        segment_corpus(
            self.documents.iter().map(|(id, t)| (id.as_str(), t.as_str())),
            MAX_TOKENS,
        )
    }
}

fn paragraph(rng: &mut SeededRng, vocab: &[&str], cfg: &SynthConfig) -> String {
    let n = rng.gen_range(cfg.sentences_per_segment.0..=cfg.sentences_per_segment.1);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(cfg.words_per_sentence.0..=cfg.words_per_sentence.1);
            let words: Vec<&str> = (0..len)
                .map(|_| {
                    if rng.gen_bool(cfg.function_word_rate) {
                        FUNCTION_WORDS[rng.gen_range(0..FUNCTION_WORDS.len())]
                    } else {
                        vocab[rng.gen_range(0..vocab.len())]
                    }
                })
                .collect();
            let mut s = words.join(" ");
            if let Some(first) = s.get(..1) {
                s.replace_range(..1, &first.to_uppercase());
            }
            s.push('.');
            s
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// `n` distinct pronounceable invented words that avoid real table entries.
fn word_pool(n: usize, seed: u64) -> Vec<String> {
    let mut rng = seeded(derive_seed(seed, POOL_STREAM, 0));
    let reserved: HashSet<&str> = SYNONYMS
        .iter()
        .flat_map(|(k, v)| std::iter::once(*k).chain(v.iter().copied()))
        .chain(FUNCTION_WORDS.iter().copied())
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let syllables = rng.gen_range(2..=3);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push_str(ONSETS.choose(&mut rng).copied().unwrap_or("b"));
            w.push_str(VOWELS.choose(&mut rng).copied().unwrap_or("a"));
        }
        w.push_str(CODAS.choose(&mut rng).copied().unwrap_or(""));
        if !reserved.contains(w.as_str()) && seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::split_sentences;

    #[test]
    fn shape_matches_config() {
        let cfg = SynthConfig::with_size(6, 4, 1);
        let corpus = SynthCorpus::generate(&cfg).unwrap();
        let segs = corpus.segments();
        assert_eq!(corpus.documents.len(), 6);
        assert_eq!(segs.len(), 24);
        for s in &segs {
            let n = split_sentences(&s.text).len();
            assert!((3..=6).contains(&n), "{n} sentences");
            assert!(s.token_count >= 24 && s.token_count <= 96);
            assert!(s.text.ends_with('.'));
        }
        assert_eq!(segs[4].doc_id, "doc0001");
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let cfg = SynthConfig::with_size(3, 2, 9);
        assert_eq!(
            SynthCorpus::generate(&cfg).unwrap(),
            SynthCorpus::generate(&cfg).unwrap()
        );
        let other = SynthCorpus::generate(&SynthConfig { seed: 10, ..cfg }).unwrap();
        assert_ne!(SynthCorpus::generate(&cfg).unwrap(), other);
    }

    #[test]
    fn pool_words_are_unique_and_fresh() {
        let pool = word_pool(3000, 0);
        assert_eq!(pool.iter().collect::<HashSet<_>>().len(), 3000);
        assert!(pool.iter().all(|w| !SYNONYMS.iter().any(|(k, _)| k == w)));
    }

    #[test]
    fn rejects_oversized_segments() {
        let cfg = SynthConfig {
            words_per_sentence: (100, 200),
            ..SynthConfig::default()
        };
        assert!(matches!(SynthCorpus::generate(&cfg), Err(Error::InvalidConfig(_))));
    }
}

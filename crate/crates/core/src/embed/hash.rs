use std::collections::HashMap;

use super::{EmbeddingVector, TokenSequence};
use crate::rng::hash_bytes;

const UNIGRAM_TAG: &[u8] = b"u";
const BIGRAM_TAG: &[u8] = b"b";
const BIGRAM_WEIGHT: f64 = 0.5;

/// Signed feature hashing of unigrams plus half-weight bigrams, with
/// sublinear term frequency `1 + ln(tf)`. Returns the raw (unnormalized)
/// accumulator.
pub fn hash_embed_raw(tokens: &TokenSequence, dimension: usize, seed: u64) -> Vec<f64> {
    assert!(dimension > 0, "dimension must be positive");
    let mut acc = vec![0.0f64; dimension];
    let toks = tokens.tokens();

    let mut add = |parts: &[&[u8]], tf: usize, weight: f64| {
        let h = hash_bytes(seed, parts);
        let bucket = (h % dimension as u64) as usize;
        let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
        acc[bucket] += sign * weight * (1.0 + (tf as f64).ln());
    };

    for (tok, tf) in term_counts(toks.iter().map(|t| (t.as_str(), ""))) {
        add(&[UNIGRAM_TAG, tok.0.as_bytes()], tf, 1.0);
    }
    let bigrams = toks.windows(2).map(|w| (w[0].as_str(), w[1].as_str()));
    for ((a, b), tf) in term_counts(bigrams) {
        add(&[BIGRAM_TAG, a.as_bytes(), b.as_bytes()], tf, BIGRAM_WEIGHT);
    }
    acc
}

/// Distinct terms in first-occurrence order with their counts, so that the
/// floating-point accumulation order is fixed.
fn term_counts<'a>(terms: impl Iterator<Item = (&'a str, &'a str)>) -> Vec<((&'a str, &'a str), usize)> {
    let mut index: HashMap<(&str, &str), usize> = HashMap::new();
    let mut out: Vec<((&str, &str), usize)> = Vec::new();
    for term in terms {
        match index.get(&term) {
            Some(&i) => out[i].1 += 1,
            None => {
                index.insert(term, out.len());
                out.push((term, 1));
            }
        }
    }
    out
}

/// Deterministic stand-in for a sentence encoder. Output is L2-normalized;
/// an empty token list yields the zero vector with `normalized == false`.
pub fn hash_embed(tokens: &TokenSequence, dimension: usize, seed: u64) -> EmbeddingVector {
    EmbeddingVector::from_f64_normalized(&hash_embed_raw(tokens, dimension, seed))
}

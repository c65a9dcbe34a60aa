//! Text to fixed-dimension vectors.
//!
//! The encoder is a pluggable provider. [`HashEmbedder`] is a deterministic
//! feature-hashing embedder that needs no model download; [`RemoteEmbedder`]
//! calls an external sentence-embedding service.

mod hash;
mod remote;
mod tokenize;

use serde::{Deserialize, Serialize};

pub use hash::{hash_embed, hash_embed_raw};
pub use remote::RemoteEmbedder;
pub use tokenize::{count_tokens, token_spans, tokenize, tokenize_with_limit, TokenSequence, MAX_TOKENS};

use crate::error::{Error, Result};

pub const DEFAULT_DIMENSION: usize = 768;

/// Dense embedding of one text segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    values: Vec<f32>,
    normalized: bool,
}

impl EmbeddingVector {
    pub fn new(values: Vec<f32>) -> Self {
        EmbeddingVector {
            values,
            normalized: false,
        }
    }

    /// Scales to unit L2 norm in double precision. A zero input stays zero and
    /// is not flagged as normalized.
    pub fn from_f64_normalized(raw: &[f64]) -> Self {
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return EmbeddingVector {
                values: vec![0.0; raw.len()],
                normalized: false,
            };
        }
        EmbeddingVector {
            values: raw.iter().map(|&x| (x / norm) as f32).collect(),
            normalized: true,
        }
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f32> {
        self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn dot(&self, other: &EmbeddingVector) -> f64 {
        dot_f32(&self.values, &other.values)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Cosine similarity; 0 when either side is the zero vector.
    pub fn cosine(&self, other: &EmbeddingVector) -> f64 {
        let denom = self.norm() * other.norm();
        if denom == 0.0 {
            0.0
        } else {
            self.dot(other) / denom
        }
    }
}

pub(crate) fn dot_f32(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    Hash,
    Remote,
}

/// Selects and parameterizes an embedding provider.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingProviderConfig {
    pub kind: ProviderKind,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    #[serde(default = "default_true")]
    pub normalize: bool,
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default)]
    pub seed: u64,
}

fn default_dimension() -> usize {
    DEFAULT_DIMENSION
}

fn default_true() -> bool {
    true
}

impl Default for EmbeddingProviderConfig {
    fn default() -> Self {
        EmbeddingProviderConfig::hash(DEFAULT_DIMENSION, 0)
    }
}

impl EmbeddingProviderConfig {
    pub fn hash(dimension: usize, seed: u64) -> Self {
        EmbeddingProviderConfig {
            kind: ProviderKind::Hash,
            dimension,
            normalize: true,
            endpoint: None,
            seed,
        }
    }

    pub fn remote(endpoint: impl Into<String>, dimension: usize) -> Self {
        EmbeddingProviderConfig {
            kind: ProviderKind::Remote,
            dimension,
            normalize: true,
            endpoint: Some(endpoint.into()),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::InvalidConfig("embedding dimension must be positive".into()));
        }
        match (self.kind, &self.endpoint) {
            (ProviderKind::Remote, None) => Err(Error::InvalidConfig("remote provider requires an endpoint".into())),
            (ProviderKind::Hash, Some(_)) => Err(Error::InvalidConfig("hash provider takes no endpoint".into())),
            _ => Ok(()),
        }
    }

    pub fn build(&self) -> Result<Embedder> {
        self.validate()?;
        Ok(match self.kind {
            ProviderKind::Hash => Embedder::Hash(HashEmbedder {
                dimension: self.dimension,
                seed: self.seed,
                normalize: self.normalize,
            }),
            ProviderKind::Remote => Embedder::Remote(RemoteEmbedder::new(
                self.endpoint.clone().unwrap_or_default(),
                self.dimension,
                self.normalize,
            )),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashEmbedder {
    pub dimension: usize,
    pub seed: u64,
    pub normalize: bool,
}

impl HashEmbedder {
    pub fn embed(&self, text: &str) -> EmbeddingVector {
        let tokens = tokenize(text);
        if self.normalize {
            hash_embed(&tokens, self.dimension, self.seed)
        } else {
            let raw = hash_embed_raw(&tokens, self.dimension, self.seed);
            EmbeddingVector::new(raw.into_iter().map(|x| x as f32).collect())
        }
    }
}

/// An immutable, thread-safe embedding provider.
#[derive(Debug, Clone)]
pub enum Embedder {
    Hash(HashEmbedder),
    Remote(RemoteEmbedder),
}

impl Embedder {
    pub fn dimension(&self) -> usize {
        match self {
            Embedder::Hash(h) => h.dimension,
            Embedder::Remote(r) => r.dimension(),
        }
    }

    pub fn embed(&self, text: &str) -> Result<EmbeddingVector> {
        Ok(self.embed_batch(&[text])?.pop().expect("one vector per text"))
    }

    pub fn embed_batch(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>> {
        match self {
            Embedder::Hash(h) => {
                use rayon::prelude::*;
                Ok(texts.par_iter().map(|t| h.embed(t)).collect())
            }
            Embedder::Remote(r) => r.embed_batch(texts),
        }
    }
}

/// Embeds one text with a provider built from `config`.
pub fn embed_text(text: &str, config: &EmbeddingProviderConfig) -> Result<EmbeddingVector> {
    config.build()?.embed(text)
}

/// Batched call against a remote embedding endpoint.
pub fn remote_embed(texts: &[&str], endpoint: &str, dimension: usize) -> Result<Vec<EmbeddingVector>> {
    RemoteEmbedder::new(endpoint, dimension, false).embed_batch(texts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embed_text_is_deterministic_and_unit_norm() {
        let cfg = EmbeddingProviderConfig::hash(768, 42);
        let a = embed_text("Plagiarism detection with vectors.", &cfg).unwrap();
        let b = embed_text("Plagiarism detection with vectors.", &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dim(), 768);
        assert!((a.dot(&a) - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn normalize_off_keeps_raw_scale() {
        let mut cfg = EmbeddingProviderConfig::hash(64, 1);
        cfg.normalize = false;
        let v = embed_text("repeat repeat repeat other", &cfg).unwrap();
        assert!(!v.is_normalized());
        assert!(v.norm() > 1.0);
    }

    #[test]
    fn config_validation() {
        assert!(EmbeddingProviderConfig::hash(0, 0).validate().is_err());
        let mut remote = EmbeddingProviderConfig::remote("http://x", 8);
        assert!(remote.validate().is_ok());
        remote.endpoint = None;
        assert!(matches!(remote.validate(), Err(Error::InvalidConfig(_))));
        let mut hash = EmbeddingProviderConfig::hash(8, 0);
        hash.endpoint = Some("http://x".into());
        assert!(hash.validate().is_err());
    }

    #[test]
    fn zero_texts_make_no_request() {
        // unroutable endpoint: any request would fail
        let out = remote_embed(&[], "http://127.0.0.1:1/embed", 768).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn unreachable_remote_is_reported() {
        let err = remote_embed(&["x"], "http://127.0.0.1:1/embed", 768).unwrap_err();
        assert!(matches!(err, Error::RemoteUnavailable(_)), "{err:?}");
    }

    #[test]
    fn cosine_of_zero_vector_is_zero() {
        let z = EmbeddingVector::new(vec![0.0; 4]);
        let v = EmbeddingVector::new(vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(z.cosine(&v), 0.0);
        assert!((v.cosine(&v) - 1.0).abs() < 1e-12);
    }
}

//! Text plagiarism detection.
//!
//! The pipeline embeds text segments, retrieves candidate sources from an
//! inverted-file / product-quantization vector index, and classifies every
//! (source, suspect) pair with a small MLP into one of three labels:
//! no plagiarism, imitation (rewording), or shuffle (sentence reordering).
//!
//! Modules, bottom-up:
//!
//! - [`embed`]: tokenizer, deterministic feature-hash embedder, remote client.
//! - [`vecindex`]: flat search, k-means, inverted lists, product quantization,
//!   index persistence.
//! - [`classifier`]: MLP forward/backward, Adam, mini-batch training.
//! - [`metrics`]: confusion matrix, precision/recall/F1, retrieval success rate.
//! - [`corpus`]: segmentation, synthetic corpora, plagiarism pair generators.
//! - [`service`]: the end-to-end engine, HTTP API and CLI commands.
//! - [`demo`]: a seeded library plus trained engine for trying things out.

pub mod binio;
pub mod classifier;
pub mod corpus;
pub mod demo;
pub mod embed;
pub mod error;
pub mod metrics;
pub mod rng;
pub mod service;
pub mod vecindex;

pub use error::{Error, Result};

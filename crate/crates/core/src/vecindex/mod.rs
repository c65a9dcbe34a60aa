//! Vector similarity search built from scratch.
//!
//! - [`FlatIndex`]: exact linear scan.
//! - [`kmeans`]: seeded Lloyd's algorithm with k-means++ initialization.
//! - [`IvfPqIndex`]: coarse k-means partition into inverted lists; stores
//!   either full vectors or product-quantized codes scored with asymmetric
//!   distance tables.
//!
//! Vectors are stored as `f32`; every score is accumulated in `f64`. Ties in
//! ranking always go to the smaller id (or smaller centroid index).

mod flat;
mod ivf;
pub mod kmeans;
mod persist;
mod pq;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

pub use flat::FlatIndex;
pub use ivf::{CoarseQuantizer, IvfConfig, IvfPqIndex};
pub use kmeans::{kmeans_train, KMeans, KMeansModel};
pub use pq::{adc_score, pq_train, AdcTable, PqCodebook, PqParams};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Higher is better.
    #[default]
    InnerProduct,
    /// Squared Euclidean distance; lower is better.
    L2,
}

impl Metric {
    pub fn score(self, a: &[f32], b: &[f32]) -> f64 {
        match self {
            Metric::InnerProduct => a.iter().zip(b).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum(),
            Metric::L2 => l2_sq(a, b),
        }
    }

    /// Sort key where smaller ranks first, with -0.0 folded into 0.0.
    fn rank_key(self, score: f64) -> f64 {
        match self {
            Metric::InnerProduct => -score + 0.0,
            Metric::L2 => score + 0.0,
        }
    }

    /// Ranking order of two scored entries: `Less` means `a` ranks first.
    pub fn compare(self, a: (f64, u64), b: (f64, u64)) -> Ordering {
        self.rank_key(a.0).total_cmp(&self.rank_key(b.0)).then(a.1.cmp(&b.1))
    }

    pub(crate) fn to_byte(self) -> u8 {
        match self {
            Metric::InnerProduct => 0,
            Metric::L2 => 1,
        }
    }

    pub(crate) fn from_byte(b: u8) -> Option<Metric> {
        match b {
            0 => Some(Metric::InnerProduct),
            1 => Some(Metric::L2),
            _ => None,
        }
    }
}

pub(crate) fn l2_sq(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = f64::from(x) - f64::from(y);
            d * d
        })
        .sum()
}

/// Index of the row in `rows` (row-major, `dim` wide) ranking first for
/// `metric` against `v`; ties go to the smaller index.
pub(crate) fn nearest_row(metric: Metric, rows: &[f32], dim: usize, v: &[f32]) -> (usize, f64) {
    let mut best = (0usize, metric.score(&rows[..dim], v));
    for (i, row) in rows.chunks_exact(dim).enumerate().skip(1) {
        let s = metric.score(row, v);
        if metric.compare((s, i as u64), (best.1, best.0 as u64)) == Ordering::Less {
            best = (i, s);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub id: u64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub hits: Vec<Hit>,
    pub k_requested: usize,
}

impl SearchResult {
    pub fn ids(&self) -> Vec<u64> {
        self.hits.iter().map(|h| h.id).collect()
    }

    pub fn contains(&self, id: u64) -> bool {
        self.hits.iter().any(|h| h.id == id)
    }

    /// True when hits are in ranking order for `metric`.
    pub fn is_ordered(&self, metric: Metric) -> bool {
        self.hits
            .windows(2)
            .all(|w| metric.compare((w[0].score, w[0].id), (w[1].score, w[1].id)) != Ordering::Greater)
    }
}

/// Keeps the best `k` of a stream of (score, id) pairs.
pub(crate) struct TopK {
    metric: Metric,
    k: usize,
    heap: BinaryHeap<Ranked>,
}

struct Ranked {
    metric: Metric,
    score: f64,
    id: u64,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    // max-heap top = worst retained entry
    fn cmp(&self, other: &Self) -> Ordering {
        self.metric.compare((self.score, self.id), (other.score, other.id))
    }
}

impl TopK {
    pub(crate) fn new(metric: Metric, k: usize) -> Self {
        TopK {
            metric,
            k,
            heap: BinaryHeap::with_capacity(k + 1),
        }
    }

    pub(crate) fn push(&mut self, score: f64, id: u64) {
        let cand = Ranked {
            metric: self.metric,
            score,
            id,
        };
        if self.heap.len() < self.k {
            self.heap.push(cand);
        } else if let Some(worst) = self.heap.peek() {
            if cand < *worst {
                self.heap.pop();
                self.heap.push(cand);
            }
        }
    }

    pub(crate) fn into_result(self) -> SearchResult {
        let k = self.k;
        let hits = self
            .heap
            .into_sorted_vec()
            .into_iter()
            .map(|r| Hit {
                id: r.id,
                score: r.score,
            })
            .collect();
        SearchResult { hits, k_requested: k }
    }
}

/// Retrieval strategy of an index, as compared in the retrieval evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Flat,
    Ivf,
    IvfPq,
}

/// Common query surface of [`FlatIndex`] and [`IvfPqIndex`].
pub trait VectorSearch: Send + Sync {
    fn dim(&self) -> usize;
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn metric(&self) -> Metric;
    fn strategy(&self) -> Strategy;
    /// Per-vector width reported next to retrieval results: the full
    /// dimension, or the PQ sub-vector dimension.
    fn reported_dim(&self) -> usize;
    fn stored_bytes_per_vector(&self) -> usize;
    /// `nprobe` is ignored by exhaustive indexes.
    fn search(&self, query: &[f32], k: usize, nprobe: Option<usize>) -> Result<SearchResult>;
}

pub(crate) fn check_query(dim: usize, query: &[f32], k: usize) -> Result<()> {
    if query.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: query.len(),
        });
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    Ok(())
}

pub(crate) fn check_rows(dim: usize, ids: &[u64], data: &[f32]) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    if data.len() != ids.len() * dim {
        return Err(Error::ShapeMismatch(format!(
            "{} ids but {} floats for dimension {dim}",
            ids.len(),
            data.len()
        )));
    }
    if let Some(bad) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite value in row {}", bad / dim)));
    }
    Ok(())
}

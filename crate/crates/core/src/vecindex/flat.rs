use std::collections::HashSet;
use std::path::Path;

use super::{check_query, check_rows, ivf, Metric, SearchResult, Strategy, TopK, VectorSearch};
use crate::error::{Error, Result};

/// Exhaustive index: every query is scored against every stored vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatIndex {
    dim: usize,
    metric: Metric,
    ids: Vec<u64>,
    data: Vec<f32>,
    seen: HashSet<u64>,
}

impl FlatIndex {
    pub fn new(dim: usize, metric: Metric) -> Self {
        FlatIndex {
            dim,
            metric,
            ids: Vec::new(),
            data: Vec::new(),
            seen: HashSet::new(),
        }
    }

    pub fn from_rows(dim: usize, metric: Metric, ids: &[u64], data: &[f32]) -> Result<Self> {
        let mut idx = FlatIndex::new(dim, metric);
        idx.add(ids, data)?;
        Ok(idx)
    }

    pub fn add(&mut self, ids: &[u64], data: &[f32]) -> Result<()> {
        check_rows(self.dim, ids, data)?;
        let mut fresh = HashSet::with_capacity(ids.len());
        for &id in ids {
            if self.seen.contains(&id) || !fresh.insert(id) {
                return Err(Error::DuplicateId(id));
            }
        }
        self.seen.extend(fresh);
        self.ids.extend_from_slice(ids);
        self.data.extend_from_slice(data);
        Ok(())
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn vector(&self, pos: usize) -> &[f32] {
        &self.data[pos * self.dim..(pos + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = (u64, &[f32])> {
        self.ids.iter().copied().zip(self.data.chunks_exact(self.dim))
    }

    /// Exact top-k.
    pub fn search(&self, query: &[f32], k: usize) -> Result<SearchResult> {
        if self.ids.is_empty() {
            return Err(Error::EmptyIndex);
        }
        check_query(self.dim, query, k)?;
        let mut top = TopK::new(self.metric, k);
        for (id, row) in self.rows() {
            top.push(self.metric.score(row, query), id);
        }
        Ok(top.into_result())
    }

    /// Written as a single-list index file with no quantizer.
    pub fn save(&self, path: &Path) -> Result<()> {
        ivf::write_flat_as_single_list(self, path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let idx = super::IvfPqIndex::load(path)?;
        idx.into_flat()
    }
}

impl VectorSearch for FlatIndex {
    fn dim(&self) -> usize {
        self.dim
    }
    fn len(&self) -> usize {
        self.ids.len()
    }
    fn metric(&self) -> Metric {
        self.metric
    }
    fn strategy(&self) -> Strategy {
        Strategy::Flat
    }
    fn reported_dim(&self) -> usize {
        self.dim
    }
    fn stored_bytes_per_vector(&self) -> usize {
        self.dim * std::mem::size_of::<f32>()
    }
    fn search(&self, query: &[f32], k: usize, _nprobe: Option<usize>) -> Result<SearchResult> {
        FlatIndex::search(self, query, k)
    }
}

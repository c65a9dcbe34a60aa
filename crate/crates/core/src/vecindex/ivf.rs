use std::collections::HashSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kmeans::{KMeans, DEFAULT_MAX_ITERS};
use super::pq::{pq_train, PqCodebook, PqParams};
use super::{check_query, check_rows, nearest_row, FlatIndex, Metric, SearchResult, Strategy, TopK, VectorSearch};
use crate::error::{Error, Result};
use crate::rng::derive_seed;

const COARSE_SEED_STREAM: u64 = 0x1F;
const PQ_SEED_STREAM: u64 = 0x2F;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IvfConfig {
    pub nlist: usize,
    pub nprobe: usize,
    pub metric: Metric,
    pub pq: Option<PqParams>,
    pub kmeans_iters: usize,
    pub seed: u64,
}

impl Default for IvfConfig {
    fn default() -> Self {
        IvfConfig {
            nlist: 100,
            nprobe: 20,
            metric: Metric::InnerProduct,
            pq: None,
            kmeans_iters: DEFAULT_MAX_ITERS,
            seed: 0,
        }
    }
}

/// k-means centroids partitioning the vector space into inverted lists.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseQuantizer {
    pub dim: usize,
    pub nlist: usize,
    /// `nlist * dim`, row-major.
    pub centroids: Vec<f32>,
}

impl CoarseQuantizer {
    pub fn centroid(&self, c: usize) -> &[f32] {
        &self.centroids[c * self.dim..(c + 1) * self.dim]
    }

    /// The `nprobe` cells ranking first for `metric`.
    pub fn probe(&self, metric: Metric, query: &[f32], nprobe: usize) -> Vec<usize> {
        let mut scored: Vec<(f64, usize)> = self
            .centroids
            .chunks_exact(self.dim)
            .enumerate()
            .map(|(c, cent)| (metric.score(cent, query), c))
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| metric.compare((a.0, a.1 as u64), (b.0, b.1 as u64));
        let nprobe = nprobe.min(scored.len());
        if nprobe < scored.len() {
            scored.select_nth_unstable_by(nprobe, cmp);
            scored.truncate(nprobe);
        }
        scored.sort_by(cmp);
        scored.into_iter().map(|(_, c)| c).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Payload {
    Full(Vec<f32>),
    Codes(Vec<u8>),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct InvertedList {
    pub ids: Vec<u64>,
    pub payload: Payload,
}

/// Inverted-file index over full vectors or PQ codes.
#[derive(Debug, Clone, PartialEq)]
pub struct IvfPqIndex {
    pub(crate) dim: usize,
    pub(crate) metric: Metric,
    pub(crate) coarse: CoarseQuantizer,
    pub(crate) lists: Vec<InvertedList>,
    pub(crate) pq: Option<PqCodebook>,
    pub(crate) nprobe_default: usize,
    pub(crate) seen: HashSet<u64>,
}

impl IvfPqIndex {
    /// Trains the coarse quantizer (and the PQ codebooks, on raw vectors when
    /// requested), then adds every row.
    pub fn build(config: &IvfConfig, dim: usize, ids: &[u64], data: &[f32]) -> Result<Self> {
        check_rows(dim, ids, data)?;
        if config.nlist == 0 {
            return Err(Error::InvalidConfig("nlist must be at least 1".into()));
        }
        if ids.len() < config.nlist {
            return Err(Error::InsufficientVectors {
                needed: config.nlist,
                got: ids.len(),
            });
        }
        if let Some(p) = &config.pq {
            p.check(dim)?;
        }

        let coarse = KMeans::new(config.nlist, derive_seed(config.seed, COARSE_SEED_STREAM, 0))
            .with_max_iters(config.kmeans_iters.max(1))
            .fit(data, dim)?;
        let pq = match &config.pq {
            Some(p) => Some(pq_train(
                data,
                dim,
                p.m,
                p.ks,
                derive_seed(config.seed, PQ_SEED_STREAM, 0),
            )?),
            None => None,
        };
        let mut index = IvfPqIndex::empty(
            config.metric,
            CoarseQuantizer {
                dim,
                nlist: config.nlist,
                centroids: coarse.centroids,
            },
            pq,
            config.nprobe,
        );
        index.add(ids, data)?;
        Ok(index)
    }

    pub(crate) fn empty(
        metric: Metric,
        coarse: CoarseQuantizer,
        pq: Option<PqCodebook>,
        nprobe_default: usize,
    ) -> Self {
        let lists = (0..coarse.nlist)
            .map(|_| InvertedList {
                ids: Vec::new(),
                payload: if pq.is_some() {
                    Payload::Codes(Vec::new())
                } else {
                    Payload::Full(Vec::new())
                },
            })
            .collect();
        IvfPqIndex {
            dim: coarse.dim,
            metric,
            coarse,
            lists,
            pq,
            nprobe_default: nprobe_default.max(1),
            seen: HashSet::new(),
        }
    }

    /// Assigns each row to the cell whose centroid ranks first under the
    /// index metric.
    pub fn add(&mut self, ids: &[u64], data: &[f32]) -> Result<()> {
        check_rows(self.dim, ids, data)?;
        let mut fresh = HashSet::with_capacity(ids.len());
        for &id in ids {
            if self.seen.contains(&id) || !fresh.insert(id) {
                return Err(Error::DuplicateId(id));
            }
        }
        let dim = self.dim;
        let metric = self.metric;
        let coarse = &self.coarse;
        let pq = &self.pq;
        let placed: Vec<(usize, Option<Vec<u8>>)> = data
            .par_chunks_exact(dim)
            .map(|row| {
                let (cell, _) = nearest_row(metric, &coarse.centroids, dim, row);
                (cell, pq.as_ref().map(|cb| cb.encode_unchecked(row)))
            })
            .collect();

        for ((&id, row), (cell, code)) in ids.iter().zip(data.chunks_exact(dim)).zip(placed) {
            let list = &mut self.lists[cell];
            list.ids.push(id);
            match (&mut list.payload, code) {
                (Payload::Full(v), None) => v.extend_from_slice(row),
                (Payload::Codes(c), Some(code)) => c.extend_from_slice(&code),
                _ => unreachable!("payload kind is fixed at construction"),
            }
        }
        self.seen.extend(fresh);
        Ok(())
    }

    pub fn nlist(&self) -> usize {
        self.coarse.nlist
    }

    pub fn nprobe_default(&self) -> usize {
        self.nprobe_default
    }

    pub fn set_nprobe_default(&mut self, nprobe: usize) {
        self.nprobe_default = nprobe.max(1);
    }

    pub fn coarse(&self) -> &CoarseQuantizer {
        &self.coarse
    }

    pub fn pq(&self) -> Option<&PqCodebook> {
        self.pq.as_ref()
    }

    pub fn list_lengths(&self) -> Vec<usize> {
        self.lists.iter().map(|l| l.ids.len()).collect()
    }

    pub fn count(&self) -> usize {
        self.lists.iter().map(|l| l.ids.len()).sum()
    }

    /// Scans the `nprobe` best cells; PQ payloads are scored through an
    /// asymmetric lookup table built once per query.
    pub fn search(&self, query: &[f32], k: usize, nprobe: usize) -> Result<SearchResult> {
        if self.count() == 0 {
            return Err(Error::EmptyIndex);
        }
        check_query(self.dim, query, k)?;
        if nprobe == 0 {
            return Err(Error::InvalidInput("nprobe must be at least 1".into()));
        }
        let cells = self.coarse.probe(self.metric, query, nprobe);
        let table = match &self.pq {
            Some(cb) => Some(cb.adc_table(query, self.metric)?),
            None => None,
        };
        let mut top = TopK::new(self.metric, k);
        for cell in cells {
            let list = &self.lists[cell];
            match &list.payload {
                Payload::Full(v) => {
                    for (&id, row) in list.ids.iter().zip(v.chunks_exact(self.dim)) {
                        top.push(self.metric.score(row, query), id);
                    }
                }
                Payload::Codes(c) => {
                    let table = table.as_ref().expect("codes imply a codebook");
                    let m = self.pq.as_ref().map_or(0, |cb| cb.m);
                    for (&id, code) in list.ids.iter().zip(c.chunks_exact(m)) {
                        top.push(table.score_unchecked(code), id);
                    }
                }
            }
        }
        Ok(top.into_result())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        super::persist::save(self, path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        super::persist::load(path)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        super::persist::to_bytes(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        super::persist::from_bytes(bytes)
    }

    /// Unwraps a single-list index without quantizer into a [`FlatIndex`].
    pub fn into_flat(self) -> Result<FlatIndex> {
        if self.coarse.nlist != 1 || self.pq.is_some() {
            return Err(Error::InvalidInput(
                "only a single-list index without PQ converts to a flat index".into(),
            ));
        }
        let list = self.lists.into_iter().next().expect("one list");
        match list.payload {
            Payload::Full(data) => FlatIndex::from_rows(self.dim, self.metric, &list.ids, &data),
            Payload::Codes(_) => unreachable!(),
        }
    }
}

pub(crate) fn write_flat_as_single_list(flat: &FlatIndex, path: &Path) -> Result<()> {
    let dim = flat.dim();
    let n = flat.ids().len();
    let mut mean = vec![0.0f64; dim];
    for (_, row) in flat.rows() {
        for (m, &x) in mean.iter_mut().zip(row) {
            *m += f64::from(x);
        }
    }
    let centroid: Vec<f32> = mean
        .iter()
        .map(|&s| if n == 0 { 0.0 } else { (s / n as f64) as f32 })
        .collect();
    let mut idx = IvfPqIndex::empty(
        flat.metric(),
        CoarseQuantizer {
            dim,
            nlist: 1,
            centroids: centroid,
        },
        None,
        1,
    );
    let data: Vec<f32> = flat.rows().flat_map(|(_, r)| r.iter().copied()).collect();
    idx.add(flat.ids(), &data)?;
    idx.save(path)
}

impl VectorSearch for IvfPqIndex {
    fn dim(&self) -> usize {
        self.dim
    }
    fn len(&self) -> usize {
        self.count()
    }
    fn metric(&self) -> Metric {
        self.metric
    }
    fn strategy(&self) -> Strategy {
        if self.pq.is_some() {
            Strategy::IvfPq
        } else {
            Strategy::Ivf
        }
    }
    fn reported_dim(&self) -> usize {
        self.pq.as_ref().map_or(self.dim, |cb| cb.dsub)
    }
    fn stored_bytes_per_vector(&self) -> usize {
        match &self.pq {
            Some(cb) => cb.m,
            None => self.dim * std::mem::size_of::<f32>(),
        }
    }
    fn search(&self, query: &[f32], k: usize, nprobe: Option<usize>) -> Result<SearchResult> {
        IvfPqIndex::search(self, query, k, nprobe.unwrap_or(self.nprobe_default))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    fn unit_data(n: usize, dim: usize, seed: u64) -> Vec<f32> {
        let mut rng = seeded(seed);
        let mut out = Vec::with_capacity(n * dim);
        for _ in 0..n {
            let row: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            out.extend(row.iter().map(|x| (x / norm) as f32));
        }
        out
    }

    fn config(nlist: usize, pq: Option<PqParams>) -> IvfConfig {
        IvfConfig {
            nlist,
            nprobe: nlist,
            pq,
            seed: 3,
            ..IvfConfig::default()
        }
    }

    #[test]
    fn single_list_matches_flat() {
        let dim = 16;
        let data = unit_data(200, dim, 1);
        let ids: Vec<u64> = (0..200).collect();
        let ivf = IvfPqIndex::build(&config(1, None), dim, &ids, &data).unwrap();
        assert_eq!(ivf.list_lengths(), vec![200]);
        let flat = FlatIndex::from_rows(dim, Metric::InnerProduct, &ids, &data).unwrap();
        for q in unit_data(20, dim, 2).chunks(dim) {
            assert_eq!(ivf.search(q, 7, 1).unwrap(), flat.search(q, 7).unwrap());
        }
    }

    #[test]
    fn nprobe_one_self_retrieval() {
        let dim = 16;
        let data = unit_data(300, dim, 4);
        let ids: Vec<u64> = (1000..1300).collect();
        let ivf = IvfPqIndex::build(&config(10, None), dim, &ids, &data).unwrap();
        assert_eq!(ivf.count(), 300);
        for (i, q) in data.chunks(dim).enumerate().step_by(17) {
            let r = ivf.search(q, 1, 1).unwrap();
            assert_eq!(r.hits[0].id, ids[i]);
        }
    }

    #[test]
    fn pq_index_stores_m_bytes() {
        let dim = 32;
        let data = unit_data(300, dim, 5);
        let ids: Vec<u64> = (0..300).collect();
        let pq = PqParams::with_dsub(dim, 16, 16).unwrap();
        let ivf = IvfPqIndex::build(&config(4, Some(pq)), dim, &ids, &data).unwrap();
        assert_eq!(ivf.stored_bytes_per_vector(), 2);
        assert_eq!(ivf.reported_dim(), 16);
        assert_eq!(ivf.strategy(), Strategy::IvfPq);
        let r = ivf.search(&data[..dim], 5, 4).unwrap();
        assert_eq!(r.hits.len(), 5);
        assert!(r.is_ordered(Metric::InnerProduct));
    }

    #[test]
    fn build_errors() {
        let dim = 8;
        let data = unit_data(5, dim, 6);
        let ids: Vec<u64> = (0..5).collect();
        assert!(matches!(
            IvfPqIndex::build(&config(6, None), dim, &ids, &data),
            Err(Error::InsufficientVectors { needed: 6, got: 5 })
        ));
        let bad = PqParams { m: 3, dsub: 2, ks: 2 };
        assert!(matches!(
            IvfPqIndex::build(&config(2, Some(bad)), dim, &ids, &data),
            Err(Error::BadPqShape(_))
        ));
        let idx = IvfPqIndex::build(&config(2, None), dim, &ids, &data).unwrap();
        assert!(matches!(idx.search(&data[..dim], 1, 0), Err(Error::InvalidInput(_))));
        let mut idx = idx;
        assert!(matches!(idx.add(&[3], &data[..dim]), Err(Error::DuplicateId(3))));
    }

    #[test]
    fn empty_list_index_reports_empty() {
        let idx = IvfPqIndex::empty(
            Metric::L2,
            CoarseQuantizer {
                dim: 2,
                nlist: 1,
                centroids: vec![0.0, 0.0],
            },
            None,
            1,
        );
        assert!(matches!(idx.search(&[0.0, 0.0], 1, 1), Err(Error::EmptyIndex)));
    }
}

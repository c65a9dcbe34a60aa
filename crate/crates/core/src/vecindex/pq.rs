//! Product quantization: per-segment k-means codebooks, one byte per segment.

use rayon::prelude::*;

use super::kmeans::{KMeans, DEFAULT_MAX_ITERS};
use super::{l2_sq, Metric};
use crate::error::{Error, Result};
use crate::rng::derive_seed;

const PQ_SEED_STREAM: u64 = 0x5051;

/// Requested quantizer shape: `m` segments of `dsub` dimensions, `ks`
/// centroids per segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PqParams {
    pub m: usize,
    pub dsub: usize,
    pub ks: usize,
}

impl PqParams {
    /// Derives `m = dim / dsub`.
    pub fn with_dsub(dim: usize, dsub: usize, ks: usize) -> Result<Self> {
        if dsub == 0 || !dim.is_multiple_of(dsub) {
            return Err(Error::BadPqShape(format!(
                "dimension {dim} is not divisible by dsub {dsub}"
            )));
        }
        Ok(PqParams {
            m: dim / dsub,
            dsub,
            ks,
        })
    }

    pub fn check(&self, dim: usize) -> Result<()> {
        if self.m == 0 || self.dsub == 0 || self.m * self.dsub != dim {
            return Err(Error::BadPqShape(format!(
                "m {} x dsub {} != dimension {dim}",
                self.m, self.dsub
            )));
        }
        if self.ks == 0 || self.ks > 256 {
            return Err(Error::BadPqShape(format!("ks {} must be in 1..=256", self.ks)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PqCodebook {
    pub m: usize,
    pub dsub: usize,
    pub ks: usize,
    /// `m * ks * dsub`: segment-major, then centroid, then coordinate.
    pub centroids: Vec<f32>,
}

impl PqCodebook {
    pub fn from_parts(m: usize, dsub: usize, ks: usize, centroids: Vec<f32>) -> Result<Self> {
        PqParams { m, dsub, ks }.check(m * dsub)?;
        if centroids.len() != m * ks * dsub {
            return Err(Error::BadPqShape(format!(
                "expected {} codebook floats, got {}",
                m * ks * dsub,
                centroids.len()
            )));
        }
        Ok(PqCodebook { m, dsub, ks, centroids })
    }

    pub fn dim(&self) -> usize {
        self.m * self.dsub
    }

    pub fn centroid(&self, segment: usize, j: usize) -> &[f32] {
        let start = (segment * self.ks + j) * self.dsub;
        &self.centroids[start..start + self.dsub]
    }

    fn check_vector(&self, v: &[f32]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::BadPqShape(format!(
                "vector has {} dimensions, codebook expects {}",
                v.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    fn check_code(&self, code: &[u8]) -> Result<()> {
        if code.len() != self.m {
            return Err(Error::BadPqShape(format!(
                "code has {} bytes, expected {}",
                code.len(),
                self.m
            )));
        }
        if let Some(&bad) = code.iter().find(|&&c| usize::from(c) >= self.ks) {
            return Err(Error::CodeOutOfRange { code: bad, ks: self.ks });
        }
        Ok(())
    }

    /// Nearest centroid per segment by L2; ties to the smaller index.
    pub fn encode(&self, v: &[f32]) -> Result<Vec<u8>> {
        self.check_vector(v)?;
        Ok(self.encode_unchecked(v))
    }

    pub(crate) fn encode_unchecked(&self, v: &[f32]) -> Vec<u8> {
        (0..self.m)
            .map(|s| {
                let sub = &v[s * self.dsub..(s + 1) * self.dsub];
                let mut best = (0usize, f64::INFINITY);
                for j in 0..self.ks {
                    let d = l2_sq(self.centroid(s, j), sub);
                    if d < best.1 {
                        best = (j, d);
                    }
                }
                best.0 as u8
            })
            .collect()
    }

    /// Concatenation of the indexed centroids.
    pub fn decode(&self, code: &[u8]) -> Result<Vec<f32>> {
        self.check_code(code)?;
        let mut out = Vec::with_capacity(self.dim());
        for (s, &c) in code.iter().enumerate() {
            out.extend_from_slice(self.centroid(s, usize::from(c)));
        }
        Ok(out)
    }

    /// Per-segment partial scores of `query` against every centroid.
    pub fn adc_table(&self, query: &[f32], metric: Metric) -> Result<AdcTable> {
        self.check_vector(query)?;
        let mut table = Vec::with_capacity(self.m * self.ks);
        for s in 0..self.m {
            let sub = &query[s * self.dsub..(s + 1) * self.dsub];
            for j in 0..self.ks {
                table.push(metric.score(self.centroid(s, j), sub));
            }
        }
        Ok(AdcTable {
            m: self.m,
            ks: self.ks,
            table,
        })
    }
}

/// Lookup table for asymmetric distance: a raw query against PQ codes.
#[derive(Debug, Clone)]
pub struct AdcTable {
    m: usize,
    ks: usize,
    table: Vec<f64>,
}

impl AdcTable {
    pub fn score(&self, code: &[u8]) -> Result<f64> {
        if code.len() != self.m {
            return Err(Error::BadPqShape(format!(
                "code has {} bytes, expected {}",
                code.len(),
                self.m
            )));
        }
        if let Some(&bad) = code.iter().find(|&&c| usize::from(c) >= self.ks) {
            return Err(Error::CodeOutOfRange { code: bad, ks: self.ks });
        }
        Ok(self.score_unchecked(code))
    }

    /// Caller guarantees a well-formed code (as stored in a built index).
    #[inline]
    pub(crate) fn score_unchecked(&self, code: &[u8]) -> f64 {
        code.iter()
            .enumerate()
            .map(|(s, &c)| self.table[s * self.ks + usize::from(c)])
            .sum()
    }
}

/// Trains `m` independent k-means codebooks with `ks` centroids each.
pub fn pq_train(data: &[f32], dim: usize, m: usize, ks: usize, seed: u64) -> Result<PqCodebook> {
    if m == 0 || !dim.is_multiple_of(m) {
        return Err(Error::BadPqShape(format!("dimension {dim} is not divisible by m {m}")));
    }
    let params = PqParams { m, dsub: dim / m, ks };
    params.check(dim)?;
    if !data.len().is_multiple_of(dim) {
        return Err(Error::ShapeMismatch("training data is not whole rows".into()));
    }
    let n = data.len() / dim;
    if n < ks {
        return Err(Error::InsufficientVectors { needed: ks, got: n });
    }
    let dsub = params.dsub;

    let books: Vec<Vec<f32>> = (0..m)
        .into_par_iter()
        .map(|s| {
            let sub: Vec<f32> = data
                .chunks_exact(dim)
                .flat_map(|row| row[s * dsub..(s + 1) * dsub].iter().copied())
                .collect();
            KMeans::new(ks, derive_seed(seed, PQ_SEED_STREAM, s as u64))
                .with_max_iters(DEFAULT_MAX_ITERS)
                .fit(&sub, dsub)
                .map(|model| model.centroids)
        })
        .collect::<Result<_>>()?;

    Ok(PqCodebook {
        m,
        dsub,
        ks,
        centroids: books.concat(),
    })
}

/// Scores `query` against one code via a freshly built lookup table.
pub fn adc_score(codebook: &PqCodebook, query: &[f32], code: &[u8], metric: Metric) -> Result<f64> {
    codebook.adc_table(query, metric)?.score(code)
}

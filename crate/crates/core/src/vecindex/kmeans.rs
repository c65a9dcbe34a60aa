//! Seeded Lloyd's k-means with k-means++ seeding.
//!
//! Clustering always uses squared Euclidean distance. Empty clusters are
//! re-seeded with the point of the largest cluster farthest from its
//! centroid, which keeps inertia nonincreasing across iterations.

use rand::Rng;
use rayon::prelude::*;

use super::l2_sq;
use crate::error::{Error, Result};
use crate::rng::seeded;

pub const DEFAULT_MAX_ITERS: usize = 25;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeans {
    pub k: usize,
    pub max_iters: usize,
    /// Stop once no centroid moves farther than this (Euclidean).
    pub tolerance: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansModel {
    pub dim: usize,
    pub k: usize,
    /// `k * dim`, row-major.
    pub centroids: Vec<f32>,
    /// Assignment inertia at the start of every Lloyd iteration, followed by
    /// the inertia against the final centroids.
    pub inertia_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl KMeansModel {
    pub fn centroid(&self, c: usize) -> &[f32] {
        &self.centroids[c * self.dim..(c + 1) * self.dim]
    }

    pub fn inertia(&self) -> f64 {
        *self.inertia_history.last().unwrap_or(&0.0)
    }

    /// Nearest centroid by squared L2; ties go to the smaller index.
    pub fn assign(&self, v: &[f32]) -> (usize, f64) {
        nearest_l2(&self.centroids, self.dim, v)
    }
}

impl KMeans {
    pub fn new(k: usize, seed: u64) -> Self {
        KMeans {
            k,
            max_iters: DEFAULT_MAX_ITERS,
            tolerance: DEFAULT_TOLERANCE,
            seed,
        }
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    /// Clusters `data` (row-major, `dim` wide).
    pub fn fit(&self, data: &[f32], dim: usize) -> Result<KMeansModel> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Error::ShapeMismatch(format!(
                "{} floats is not a whole number of {dim}-dimensional rows",
                data.len()
            )));
        }
        let n = data.len() / dim;
        if self.k == 0 {
            return Err(Error::InvalidInput("k must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidInput("max_iters must be at least 1".into()));
        }
        if n < self.k {
            return Err(Error::InsufficientVectors { needed: self.k, got: n });
        }

        let k = self.k;
        let mut centroids = self.init_plus_plus(data, dim, n);
        let mut history = Vec::with_capacity(self.max_iters + 1);
        let mut iterations = 0;
        let mut converged = false;

        while iterations < self.max_iters {
            iterations += 1;
            let (labels, dists) = assign_all(&centroids, data, dim);
            history.push(dists.iter().sum::<f64>());

            let mut sums = vec![0.0f64; k * dim];
            let mut counts = vec![0usize; k];
            for (i, &c) in labels.iter().enumerate() {
                counts[c] += 1;
                let row = &data[i * dim..(i + 1) * dim];
                for (s, &x) in sums[c * dim..(c + 1) * dim].iter_mut().zip(row) {
                    *s += f64::from(x);
                }
            }
            reseed_empty(&mut sums, &mut counts, &labels, &dists, data, dim);

            let mut shift = 0.0f64;
            for c in 0..k {
                let old = &mut centroids[c * dim..(c + 1) * dim];
                let inv = 1.0 / counts[c] as f64;
                let mut moved = 0.0f64;
                for (o, &s) in old.iter_mut().zip(&sums[c * dim..(c + 1) * dim]) {
                    let next = (s * inv) as f32;
                    let d = f64::from(next) - f64::from(*o);
                    moved += d * d;
                    *o = next;
                }
                shift = shift.max(moved.sqrt());
            }
            if shift < self.tolerance {
                converged = true;
                break;
            }
        }

        let (_, dists) = assign_all(&centroids, data, dim);
        history.push(dists.iter().sum::<f64>());

        Ok(KMeansModel {
            dim,
            k,
            centroids,
            inertia_history: history,
            iterations,
            converged,
        })
    }

    /// k-means++ seeding: the first center uniformly, then proportional to
    /// squared distance from the chosen set. Once every remaining point
    /// coincides with a chosen center, fall back to uniform draws among
    /// unchosen points.
    fn init_plus_plus(&self, data: &[f32], dim: usize, n: usize) -> Vec<f32> {
        let mut rng = seeded(self.seed);
        let mut chosen = vec![false; n];
        let mut centroids = Vec::with_capacity(self.k * dim);
        let row = |i: usize| &data[i * dim..(i + 1) * dim];

        let first = rng.gen_range(0..n);
        chosen[first] = true;
        centroids.extend_from_slice(row(first));
        let mut d2: Vec<f64> = (0..n).into_par_iter().map(|i| l2_sq(row(i), row(first))).collect();

        for _ in 1..self.k {
            let total: f64 = d2.iter().sum();
            let pick = if total > 0.0 {
                let target = rng.gen::<f64>() * total;
                let mut acc = 0.0;
                let mut pick = None;
                for (i, &d) in d2.iter().enumerate() {
                    if d <= 0.0 || chosen[i] {
                        continue;
                    }
                    acc += d;
                    pick = Some(i);
                    if acc > target {
                        break;
                    }
                }
                pick.expect("positive mass implies a candidate")
            } else {
                let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
                free[rng.gen_range(0..free.len())]
            };
            chosen[pick] = true;
            centroids.extend_from_slice(row(pick));
            let c = row(pick);
            d2.par_iter_mut().enumerate().for_each(|(i, d)| {
                let nd = l2_sq(row(i), c);
                if nd < *d {
                    *d = nd;
                }
            });
        }
        centroids
    }
}

fn nearest_l2(centroids: &[f32], dim: usize, v: &[f32]) -> (usize, f64) {
    let mut best = (0usize, f64::INFINITY);
    for (c, cent) in centroids.chunks_exact(dim).enumerate() {
        let d = l2_sq(cent, v);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn assign_all(centroids: &[f32], data: &[f32], dim: usize) -> (Vec<usize>, Vec<f64>) {
    data.par_chunks_exact(dim)
        .map(|row| nearest_l2(centroids, dim, row))
        .unzip()
}

fn reseed_empty(sums: &mut [f64], counts: &mut [usize], labels: &[usize], dists: &[f64], data: &[f32], dim: usize) {
    let k = counts.len();
    let mut taken = vec![false; labels.len()];
    for empty in 0..k {
        if counts[empty] != 0 {
            continue;
        }
        let largest = (0..k)
            .max_by(|&a, &b| counts[a].cmp(&counts[b]).then(b.cmp(&a)))
            .unwrap();
        let far = (0..labels.len())
            .filter(|&i| labels[i] == largest && !taken[i])
            .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)))
            .expect("largest cluster has an untaken member");
        taken[far] = true;
        let row = &data[far * dim..(far + 1) * dim];
        for (j, &x) in row.iter().enumerate() {
            sums[largest * dim + j] -= f64::from(x);
            sums[empty * dim + j] = f64::from(x);
        }
        counts[largest] -= 1;
        counts[empty] = 1;
    }
}

/// Convenience wrapper: [`KMeans`] with the default tolerance.
pub fn kmeans_train(data: &[f32], dim: usize, k: usize, max_iters: usize, seed: u64) -> Result<KMeansModel> {
    KMeans::new(k, seed).with_max_iters(max_iters).fit(data, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    fn random_data(n: usize, dim: usize, seed: u64) -> Vec<f32> {
        let mut rng = seeded(seed);
        (0..n * dim).map(|_| rng.gen_range(-1.0f32..1.0)).collect()
    }

    #[test]
    fn k_equals_n_memorizes_inputs() {
        let data = random_data(12, 3, 1);
        let m = kmeans_train(&data, 3, 12, 10, 5).unwrap();
        assert_eq!(m.inertia(), 0.0);
        let mut got: Vec<Vec<u32>> = m
            .centroids
            .chunks(3)
            .map(|c| c.iter().map(|x| x.to_bits()).collect())
            .collect();
        let mut want: Vec<Vec<u32>> = data
            .chunks(3)
            .map(|c| c.iter().map(|x| x.to_bits()).collect())
            .collect();
        got.sort();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn k_one_gives_the_mean() {
        let data = random_data(50, 4, 2);
        let m = kmeans_train(&data, 4, 1, 10, 3).unwrap();
        for j in 0..4 {
            let mean: f64 = data.chunks(4).map(|r| f64::from(r[j])).sum::<f64>() / 50.0;
            assert!((f64::from(m.centroids[j]) - mean).abs() < 1e-6);
        }
        assert!(m.converged);
    }

    #[test]
    fn two_obvious_clusters() {
        let data = [0.0f32, 0.0, 0.0, 1.0, 10.0, 0.0, 10.0, 1.0];
        let m = kmeans_train(&data, 2, 2, 25, 11).unwrap();
        let mut cents: Vec<(f32, f32)> = m.centroids.chunks(2).map(|c| (c[0], c[1])).collect();
        cents.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert_eq!(cents, vec![(0.0, 0.5), (10.0, 0.5)]);
        assert!((m.inertia() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let data = random_data(3, 2, 0);
        assert!(matches!(
            kmeans_train(&data, 2, 4, 5, 0),
            Err(Error::InsufficientVectors { needed: 4, got: 3 })
        ));
        assert!(kmeans_train(&data, 2, 0, 5, 0).is_err());
        assert!(kmeans_train(&data, 2, 2, 0, 0).is_err());
        assert!(kmeans_train(&data[..5], 2, 1, 5, 0).is_err());
    }

    #[test]
    fn duplicate_points_still_yield_k_centroids() {
        // 3 distinct points repeated; k = 5 forces empty-cluster handling
        let base = [0.0f32, 0.0, 5.0, 5.0, -5.0, 5.0];
        let data: Vec<f32> = base.iter().cycle().take(6 * 4).copied().collect();
        let m = kmeans_train(&data, 2, 5, 25, 9).unwrap();
        assert_eq!(m.centroids.len(), 10);
        assert!(m.centroids.iter().all(|v| v.is_finite()));
        assert!(m.inertia() < 1e-9);
    }

    #[test]
    fn inertia_is_nonincreasing_and_deterministic() {
        for seed in 0..5 {
            let data = random_data(400, 6, 100 + seed);
            let m = kmeans_train(&data, 6, 12, 50, seed).unwrap();
            for w in m.inertia_history.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-9), "{:?}", m.inertia_history);
            }
            assert_eq!(m, kmeans_train(&data, 6, 12, 50, seed).unwrap());
        }
    }
}

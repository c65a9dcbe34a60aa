//! Confusion-matrix classification metrics and the retrieval success-rate
//! protocol.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{predict, LabeledPair, MlpParams, PlagiarismLabel};
use crate::error::{Error, Result};
use crate::vecindex::{Strategy, VectorSearch};

pub const WARMUP_QUERIES: usize = 10;

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    classes: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(classes: usize) -> Self {
        ConfusionMatrix {
            classes,
            counts: vec![0; classes * classes],
        }
    }

    /// Row-major `classes × classes` counts.
    pub fn from_counts(classes: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != classes * classes {
            return Err(Error::ShapeMismatch(format!(
                "{} counts for {classes} classes",
                counts.len()
            )));
        }
        Ok(ConfusionMatrix { classes, counts })
    }

    /// Two-class matrix with class 1 as the positive class.
    pub fn from_binary(tp: u64, tn: u64, fp: u64, fn_: u64) -> Self {
        ConfusionMatrix {
            classes: 2,
            counts: vec![tn, fp, fn_, tp],
        }
    }

    pub fn from_labels(classes: usize, truth: &[usize], predicted: &[usize]) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} true labels but {} predictions",
                truth.len(),
                predicted.len()
            )));
        }
        let mut m = ConfusionMatrix::new(classes);
        for (&t, &p) in truth.iter().zip(predicted) {
            m.accumulate(t, p)?;
        }
        Ok(m)
    }

    pub fn accumulate(&mut self, truth: usize, predicted: usize) -> Result<()> {
        for label in [truth, predicted] {
            if label >= self.classes {
                return Err(Error::LabelOutOfRange {
                    label,
                    classes: self.classes,
                });
            }
        }
        self.counts[truth * self.classes + predicted] += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if other.classes != self.classes {
            return Err(Error::ShapeMismatch(format!(
                "cannot merge {}-class and {}-class matrices",
                self.classes, other.classes
            )));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth * self.classes + predicted]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.classes).map(|c| self.get(c, c)).sum()
    }

    pub fn accuracy(&self) -> Result<f64> {
        match self.total() {
            0 => Err(Error::EmptyMatrix),
            n => Ok(self.trace() as f64 / n as f64),
        }
    }

    /// One-vs-rest counts `(tp, fp, fn)` for class `c`.
    pub fn one_vs_rest(&self, c: usize) -> (u64, u64, u64) {
        let tp = self.get(c, c);
        let predicted: u64 = (0..self.classes).map(|t| self.get(t, c)).sum();
        let actual: u64 = (0..self.classes).map(|p| self.get(c, p)).sum();
        (tp, predicted - tp, actual - tp)
    }

    pub fn precision_recall_f1(&self, aggregation: Aggregation) -> Result<MetricsReport> {
        let total = self.total();
        if total == 0 {
            return Err(Error::EmptyMatrix);
        }
        let per_class: Vec<ClassMetrics> = (0..self.classes)
            .map(|c| {
                let (tp, fp, fn_) = self.one_vs_rest(c);
                let (precision, precision_undefined) = ratio(tp, tp + fp);
                let (recall, recall_undefined) = ratio(tp, tp + fn_);
                let f1 = if precision + recall > 0.0 {
                    2.0 * precision * recall / (precision + recall)
                } else {
                    0.0
                };
                ClassMetrics {
                    class: c,
                    precision,
                    recall,
                    f1,
                    support: tp + fn_,
                    precision_undefined,
                    recall_undefined,
                }
            })
            .collect();

        let (precision, recall, f1) = match aggregation {
            Aggregation::Weighted => {
                let w = |f: fn(&ClassMetrics) -> f64| {
                    per_class.iter().map(|m| m.support as f64 * f(m)).sum::<f64>() / total as f64
                };
                (w(|m| m.precision), w(|m| m.recall), w(|m| m.f1))
            }
            Aggregation::Macro => {
                let n = self.classes as f64;
                let w = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / n;
                (w(|m| m.precision), w(|m| m.recall), w(|m| m.f1))
            }
            Aggregation::Binary => {
                if self.classes != 2 {
                    return Err(Error::InvalidInput(format!(
                        "binary aggregation needs 2 classes, matrix has {}",
                        self.classes
                    )));
                }
                let m = &per_class[1];
                (m.precision, m.recall, m.f1)
            }
        };
        let zero_division = per_class.iter().any(|m| m.precision_undefined || m.recall_undefined);
        Ok(MetricsReport {
            accuracy: self.trace() as f64 / total as f64,
            precision,
            recall,
            f1,
            per_class,
            aggregation,
            zero_division,
            total,
        })
    }
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

/// How per-class scores are combined. `Binary` reports class 1 of a
/// two-class matrix as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    #[default]
    Weighted,
    Macro,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    pub precision_undefined: bool,
    pub recall_undefined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_class: Vec<ClassMetrics>,
    pub aggregation: Aggregation,
    /// Set when some class had no predictions or no true samples.
    pub zero_division: bool,
    pub total: u64,
}

pub fn predict_all(params: &MlpParams, pairs: &[LabeledPair]) -> Result<Vec<PlagiarismLabel>> {
    pairs
        .par_iter()
        .map(|p| predict(params, &p.h1, &p.h2).map(|(label, _)| label))
        .collect()
}

/// Support-weighted metrics of `params` on `pairs`.
pub fn evaluate_classifier(params: &MlpParams, pairs: &[LabeledPair]) -> Result<MetricsReport> {
    evaluate_classifier_with(params, pairs, Aggregation::Weighted).map(|(report, _)| report)
}

/// Metrics plus the confusion matrix they came from.
pub fn evaluate_classifier_with(
    params: &MlpParams,
    pairs: &[LabeledPair],
    aggregation: Aggregation,
) -> Result<(MetricsReport, ConfusionMatrix)> {
    if pairs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let predicted = predict_all(params, pairs)?;
    let mut m = ConfusionMatrix::new(PlagiarismLabel::COUNT);
    for (pair, pred) in pairs.iter().zip(&predicted) {
        m.accumulate(pair.label.index(), pred.index())?;
    }
    Ok((m.precision_recall_f1(aggregation)?, m))
}

/// A query vector derived from the stored vector with id `original_id`.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalQuery {
    pub original_id: u64,
    pub vector: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalEvalResult {
    pub success_rate: f64,
    pub time_ms_per_vector: f64,
    pub strategy: Strategy,
    /// Full dimension, or the PQ sub-vector dimension.
    pub dim: usize,
    pub stored_bytes_per_vector: usize,
    pub queries: usize,
    pub successes: usize,
    pub k: usize,
}

/// A query succeeds when its original id is among the top `k` hits.
///
/// Queries run one at a time on the calling thread. The first
/// [`WARMUP_QUERIES`] queries are run once untimed before the timed pass over
/// all queries.
pub fn evaluate_retrieval(
    index: &dyn VectorSearch,
    queries: &[RetrievalQuery],
    k: usize,
    nprobe: Option<usize>,
) -> Result<RetrievalEvalResult> {
    if index.is_empty() {
        return Err(Error::EmptyIndex);
    }
    if queries.is_empty() {
        return Err(Error::EmptyQuerySet);
    }
    for q in queries.iter().take(WARMUP_QUERIES) {
        index.search(&q.vector, k, nprobe)?;
    }
    let mut successes = 0;
    let mut elapsed = 0.0;
    for q in queries {
        let start = Instant::now();
        let result = index.search(&q.vector, k, nprobe)?;
        elapsed += start.elapsed().as_secs_f64();
        if result.contains(q.original_id) {
            successes += 1;
        }
    }
    Ok(RetrievalEvalResult {
        success_rate: successes as f64 / queries.len() as f64,
        time_ms_per_vector: (elapsed * 1000.0 / queries.len() as f64).max(f64::MIN_POSITIVE),
        strategy: index.strategy(),
        dim: index.reported_dim(),
        stored_bytes_per_vector: index.stored_bytes_per_vector(),
        queries: queries.len(),
        successes,
        k,
    })
}

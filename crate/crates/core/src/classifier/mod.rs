//! Pair classifier: a two-layer MLP over `concat(h_original, h_suspect)`
//! trained with softmax cross-entropy and Adam. The encoder stays frozen;
//! only the MLP parameters are learned.

mod adam;
mod mlp;
mod train;

use serde::{Deserialize, Serialize};

pub use adam::{adam_update, AdamConfig, AdamState};
pub use mlp::{
    backward, batch_gradients, cross_entropy, cross_entropy_dist, forward, predict, relu, softmax, BatchPass,
    ForwardCache, MlpParams, MlpShape, LOG_FLOOR, PARAMS_MAGIC,
};
pub use train::{train, train_with_callback, EpochStats, LabeledPair, TrainConfig, TrainOutcome};

/// The three pair labels, numbered as in the dataset files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum PlagiarismLabel {
    /// Unrelated texts (negative sampling).
    NoPlagiarism = 0,
    /// Reworded source (synonyms, grammar changes).
    ImitationPlagiarism = 1,
    /// Source with its sentences reordered.
    ShufflePlagiarism = 2,
}

impl PlagiarismLabel {
    pub const COUNT: usize = 3;
    pub const ALL: [PlagiarismLabel; 3] = [
        PlagiarismLabel::NoPlagiarism,
        PlagiarismLabel::ImitationPlagiarism,
        PlagiarismLabel::ShufflePlagiarism,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            PlagiarismLabel::NoPlagiarism => "No Plagiarism",
            PlagiarismLabel::ImitationPlagiarism => "Imitation Plagiarism",
            PlagiarismLabel::ShufflePlagiarism => "Shuffle Plagiarism",
        }
    }
}

impl From<PlagiarismLabel> for u8 {
    fn from(l: PlagiarismLabel) -> u8 {
        l as u8
    }
}

impl TryFrom<u8> for PlagiarismLabel {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, String> {
        PlagiarismLabel::from_index(usize::from(v)).ok_or_else(|| format!("label {v} is not 0, 1 or 2"))
    }
}

impl std::fmt::Display for PlagiarismLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Class probabilities from the softmax output layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PredictedDistribution {
    p: Vec<f64>,
}

impl PredictedDistribution {
    pub fn new(p: Vec<f64>) -> Self {
        PredictedDistribution { p }
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    /// First index of the maximum.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.p.iter().enumerate() {
            if v > self.p[best] {
                best = i;
            }
        }
        best
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.p.iter().all(|&v| (0.0..=1.0).contains(&v)) && (self.p.iter().sum::<f64>() - 1.0).abs() <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_ties_go_to_smaller_class() {
        assert_eq!(PredictedDistribution::new(vec![0.9, 0.05, 0.05]).argmax(), 0);
        assert_eq!(PredictedDistribution::new(vec![0.5, 0.5, 0.0]).argmax(), 0);
        assert_eq!(PredictedDistribution::new(vec![0.2, 0.4, 0.4]).argmax(), 1);
    }

    #[test]
    fn label_serializes_as_integer() {
        assert_eq!(serde_json::to_string(&PlagiarismLabel::ShufflePlagiarism).unwrap(), "2");
        let l: PlagiarismLabel = serde_json::from_str("1").unwrap();
        assert_eq!(l, PlagiarismLabel::ImitationPlagiarism);
        assert!(serde_json::from_str::<PlagiarismLabel>("3").is_err());
    }
}

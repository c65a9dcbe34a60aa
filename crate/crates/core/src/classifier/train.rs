use std::fmt;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{batch_gradients, AdamConfig, AdamState, MlpParams, MlpShape, PlagiarismLabel};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded};

const INIT_STREAM: u64 = 0x11;
const SHUFFLE_STREAM: u64 = 0x12;

/// One training example: embeddings of the original and the suspect text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub h1: Vec<f32>,
    pub h2: Vec<f32>,
    pub label: PlagiarismLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub hidden: usize,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.001,
            batch_size: 1024,
            max_epochs: 20,
            hidden: 512,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0 || !self.learning_rate.is_finite() {
            return Err(Error::InvalidConfig("learning_rate must be positive".into()));
        }
        if self.batch_size == 0 || self.max_epochs == 0 || self.hidden == 0 {
            return Err(Error::InvalidConfig(
                "batch_size, max_epochs and hidden must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            beta1: self.adam_beta1,
            beta2: self.adam_beta2,
            eps: self.adam_eps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean cross-entropy over the epoch, measured before each batch update.
    pub mean_loss: f64,
    pub train_accuracy: f64,
}

impl fmt::Display for EpochStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "epoch {} loss {:.6} accuracy {:.4}",
            self.epoch, self.mean_loss, self.train_accuracy
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub params: MlpParams,
    pub history: Vec<EpochStats>,
}

pub fn train(dataset: &[LabeledPair], config: &TrainConfig) -> Result<TrainOutcome> {
    train_with_callback(dataset, config, |_| {})
}

/// Mini-batch Adam on mean cross-entropy. Each epoch reshuffles with a seed
/// derived from `config.seed`; the last batch of an epoch may be short.
/// Final parameters are snapped to `f32` so they survive a save/load cycle
/// unchanged.
pub fn train_with_callback(
    dataset: &[LabeledPair],
    config: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochStats),
) -> Result<TrainOutcome> {
    config.validate()?;
    let first = dataset.first().ok_or(Error::EmptyDataset)?;
    let dim = first.h1.len();
    if dim == 0 {
        return Err(Error::ShapeMismatch("empty embedding".into()));
    }
    if let Some(bad) = dataset.iter().find(|p| p.h1.len() != dim || p.h2.len() != dim) {
        return Err(Error::ShapeMismatch(format!(
            "pair with embedding sizes {} and {}, expected {dim}",
            bad.h1.len(),
            bad.h2.len()
        )));
    }

    let shape = MlpShape::for_embedding_dim(dim, config.hidden);
    let mut params = MlpParams::init(shape, derive_seed(config.seed, INIT_STREAM, 0));
    let mut adam = AdamState::new(&params, config.adam());
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut history = Vec::with_capacity(config.max_epochs);

    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut seeded(derive_seed(config.seed, SHUFFLE_STREAM, epoch as u64)));
        let mut loss_sum = 0.0;
        let mut correct = 0;
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<(&[f32], &[f32], usize)> = chunk
                .iter()
                .map(|&i| {
                    let p = &dataset[i];
                    (p.h1.as_slice(), p.h2.as_slice(), p.label.index())
                })
                .collect();
            let pass = batch_gradients(&params, &batch)?;
            loss_sum += pass.loss * chunk.len() as f64;
            correct += pass.correct;
            adam.step(&mut params, &pass.grads);
        }
        let stats = EpochStats {
            epoch,
            mean_loss: loss_sum / dataset.len() as f64,
            train_accuracy: correct as f64 / dataset.len() as f64,
        };
        on_epoch(&stats);
        history.push(stats);
    }

    params.round_to_f32();
    if !params.is_finite() {
        return Err(Error::InvalidInput("training diverged to non-finite parameters".into()));
    }
    Ok(TrainOutcome { params, history })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{cross_entropy, forward, predict};

    fn pair(h1: &[f32], h2: &[f32], label: PlagiarismLabel) -> LabeledPair {
        LabeledPair {
            h1: h1.to_vec(),
            h2: h2.to_vec(),
            label,
        }
    }

    #[test]
    fn empty_dataset_rejected() {
        assert!(matches!(train(&[], &TrainConfig::default()), Err(Error::EmptyDataset)));
    }

    #[test]
    fn invalid_config_rejected() {
        let data = [pair(&[1.0], &[1.0], PlagiarismLabel::NoPlagiarism)];
        let cfg = TrainConfig {
            batch_size: 0,
            ..TrainConfig::default()
        };
        assert!(matches!(train(&data, &cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn memorizes_a_single_sample() {
        let data = [pair(
            &[0.3, -0.1, 0.8],
            &[0.5, 0.5, 0.0],
            PlagiarismLabel::ShufflePlagiarism,
        )];
        let cfg = TrainConfig {
            learning_rate: 0.01,
            batch_size: 1,
            max_epochs: 400,
            hidden: 16,
            ..TrainConfig::default()
        };
        let out = train(&data, &cfg).unwrap();
        let (p, _) = forward(&out.params, &data[0].h1, &data[0].h2).unwrap();
        assert!(cross_entropy(&p, 2) < 1e-3, "loss {}", cross_entropy(&p, 2));
        assert!(out.history.last().unwrap().mean_loss < out.history[0].mean_loss);
        assert_eq!(
            predict(&out.params, &data[0].h1, &data[0].h2).unwrap().0,
            PlagiarismLabel::ShufflePlagiarism
        );
    }

    #[test]
    fn deterministic_given_seed() {
        let data: Vec<LabeledPair> = (0..30)
            .map(|i| {
                let x = i as f32 / 30.0;
                pair(
                    &[x, 1.0 - x],
                    &[x * x, 0.5],
                    PlagiarismLabel::from_index(i % 3).unwrap(),
                )
            })
            .collect();
        let cfg = TrainConfig {
            batch_size: 7,
            max_epochs: 3,
            hidden: 8,
            seed: 5,
            ..TrainConfig::default()
        };
        let a = train(&data, &cfg).unwrap();
        let b = train(&data, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.history.len(), 3);
        let c = train(&data, &TrainConfig { seed: 6, ..cfg }).unwrap();
        assert_ne!(a.params, c.params);
    }
}

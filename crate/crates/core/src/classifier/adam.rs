use serde::{Deserialize, Serialize};

use super::MlpParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// One bias-corrected Adam update of `params` in place. `step` starts at 1.
pub fn adam_update(params: &mut [f64], grads: &[f64], m: &mut [f64], v: &mut [f64], step: u64, cfg: &AdamConfig) {
    assert!(step >= 1, "Adam steps are 1-based");
    let t = step as i32;
    let c1 = 1.0 - cfg.beta1.powi(t);
    let c2 = 1.0 - cfg.beta2.powi(t);
    for i in 0..params.len() {
        let g = grads[i];
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
        let m_hat = m[i] / c1;
        let v_hat = v[i] / c2;
        params[i] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.eps);
    }
}

/// First and second moment estimates for every MLP parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub m: MlpParams,
    pub v: MlpParams,
    pub step: u64,
}

impl AdamState {
    pub fn new(params: &MlpParams, config: AdamConfig) -> Self {
        AdamState {
            config,
            m: MlpParams::zeros(params.shape),
            v: MlpParams::zeros(params.shape),
            step: 0,
        }
    }

    pub fn step(&mut self, params: &mut MlpParams, grads: &MlpParams) {
        self.step += 1;
        let step = self.step;
        let cfg = self.config;
        let targets = params.tensors_mut();
        let ms = self.m.tensors_mut();
        let vs = self.v.tensors_mut();
        for (((p, g), m), v) in targets.into_iter().zip(grads.tensors()).zip(ms).zip(vs) {
            adam_update(p, g, m, v, step, &cfg);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params_unchanged() {
        let mut p = vec![1.0, -2.0];
        let (mut m, mut v) = (vec![0.0; 2], vec![0.0; 2]);
        adam_update(&mut p, &[0.0, 0.0], &mut m, &mut v, 1, &AdamConfig::default());
        assert_eq!(p, vec![1.0, -2.0]);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let cfg = AdamConfig::default();
        let mut p = vec![0.0; 4];
        let g = [3.0, -0.01, 250.0, -7.5];
        let (mut m, mut v) = (vec![0.0; 4], vec![0.0; 4]);
        adam_update(&mut p, &g, &mut m, &mut v, 1, &cfg);
        for (pi, gi) in p.iter().zip(g) {
            assert!((pi + cfg.learning_rate * gi.signum()).abs() < 1e-9, "{pi}");
        }
    }

    #[test]
    fn minimizes_squared_norm() {
        // f(w) = |w|^2, grad = 2w, from (5, 5)
        let cfg = AdamConfig {
            learning_rate: 0.1,
            ..AdamConfig::default()
        };
        let mut w = vec![5.0, 5.0];
        let (mut m, mut v) = (vec![0.0; 2], vec![0.0; 2]);
        for t in 1..=200 {
            let g: Vec<f64> = w.iter().map(|x| 2.0 * x).collect();
            adam_update(&mut w, &g, &mut m, &mut v, t, &cfg);
        }
        let norm = (w[0] * w[0] + w[1] * w[1]).sqrt();
        assert!(norm < 0.1, "norm {norm}");
    }
}

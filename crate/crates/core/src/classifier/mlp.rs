use std::fs;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{PlagiarismLabel, PredictedDistribution};
use crate::binio::{Reader, Writer};
use crate::error::{Error, Result};
use crate::rng::seeded;

pub const PARAMS_MAGIC: &[u8; 4] = b"SSMP";
pub const PARAMS_VERSION: u32 = 1;

/// Floor applied to probabilities before taking the log.
pub const LOG_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpShape {
    /// Width of `concat(h1, h2)`, i.e. twice the embedding dimension.
    pub input: usize,
    pub hidden: usize,
    pub classes: usize,
}

impl MlpShape {
    pub fn for_embedding_dim(dim: usize, hidden: usize) -> Self {
        MlpShape {
            input: 2 * dim,
            hidden,
            classes: PlagiarismLabel::COUNT,
        }
    }
}

/// Two-layer perceptron: `p = softmax(relu(u W1 + b1) W2 + b2)`.
///
/// `w1` is `input x hidden` and `w2` is `hidden x classes`, both row-major.
/// The same struct holds gradients and Adam moments.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    pub shape: MlpShape,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl MlpParams {
    pub fn zeros(shape: MlpShape) -> Self {
        MlpParams {
            shape,
            w1: vec![0.0; shape.input * shape.hidden],
            b1: vec![0.0; shape.hidden],
            w2: vec![0.0; shape.hidden * shape.classes],
            b2: vec![0.0; shape.classes],
        }
    }

    /// Glorot-uniform weights, zero biases.
    pub fn init(shape: MlpShape, seed: u64) -> Self {
        let mut rng = seeded(seed);
        let mut p = MlpParams::zeros(shape);
        let a1 = (6.0 / (shape.input + shape.hidden) as f64).sqrt();
        p.w1.iter_mut().for_each(|w| *w = rng.gen_range(-a1..a1));
        let a2 = (6.0 / (shape.hidden + shape.classes) as f64).sqrt();
        p.w2.iter_mut().for_each(|w| *w = rng.gen_range(-a2..a2));
        p
    }

    pub fn embedding_dim(&self) -> usize {
        self.shape.input / 2
    }

    pub fn num_params(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    pub(crate) fn tensors(&self) -> [&[f64]; 4] {
        [&self.w1, &self.b1, &self.w2, &self.b2]
    }

    pub(crate) fn tensors_mut(&mut self) -> [&mut Vec<f64>; 4] {
        [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2]
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }

    /// Snaps every entry to the nearest `f32`, the precision of the file format.
    pub fn round_to_f32(&mut self) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|v| *v = f64::from(*v as f32));
        }
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.shape;
        if self.w1.len() != s.input * s.hidden
            || self.b1.len() != s.hidden
            || self.w2.len() != s.hidden * s.classes
            || self.b2.len() != s.classes
        {
            return Err(Error::ShapeMismatch("parameter tensors disagree with shape".into()));
        }
        Ok(())
    }

    /// `SSMP` file: magic, version u32, input/hidden/classes u32, then w1, b1,
    /// w2, b2 as f32, then CRC32. Values are stored at `f32` precision.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(PARAMS_MAGIC);
        w.u32(PARAMS_VERSION);
        w.u32(self.shape.input as u32);
        w.u32(self.shape.hidden as u32);
        w.u32(self.shape.classes as u32);
        for t in self.tensors() {
            w.f32s(t.iter().map(|&v| v as f32));
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::open(bytes, PARAMS_MAGIC)?;
        let version = r.u32()?;
        if version != PARAMS_VERSION {
            return Err(Error::CorruptFile(format!("unsupported version {version}")));
        }
        let shape = MlpShape {
            input: r.u32()? as usize,
            hidden: r.u32()? as usize,
            classes: r.u32()? as usize,
        };
        if shape.input == 0 || !shape.input.is_multiple_of(2) || shape.hidden == 0 || shape.classes == 0 {
            return Err(Error::CorruptFile("invalid network shape".into()));
        }
        let mut read = |n: usize| -> Result<Vec<f64>> { Ok(r.f32s(n)?.into_iter().map(f64::from).collect()) };
        let p = MlpParams {
            shape,
            w1: read(shape.input * shape.hidden)?,
            b1: read(shape.hidden)?,
            w2: read(shape.hidden * shape.classes)?,
            b2: read(shape.classes)?,
        };
        r.expect_end()?;
        p.validate()?;
        if !p.is_finite() {
            return Err(Error::CorruptFile("non-finite parameter".into()));
        }
        Ok(p)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        MlpParams::from_bytes(&fs::read(path)?)
    }
}

pub fn relu(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v.max(0.0)).collect()
}

/// `exp(z_i) / sum_j exp(z_j)`, shifted by `max(z)` for stability.
pub fn softmax(z: &[f64]) -> PredictedDistribution {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    PredictedDistribution::new(exps.into_iter().map(|e| e / sum).collect())
}

/// `-sum_i q_i ln(max(p_i, 1e-12))` for a one-hot `q` given by its class.
pub fn cross_entropy(p: &PredictedDistribution, label: usize) -> f64 {
    -p.probs()[label].max(LOG_FLOOR).ln()
}

/// Same as [`cross_entropy`] for an arbitrary target distribution `q`.
pub fn cross_entropy_dist(p: &PredictedDistribution, q: &[f64]) -> f64 {
    -p.probs()
        .iter()
        .zip(q)
        .map(|(&pi, &qi)| if qi == 0.0 { 0.0 } else { qi * pi.max(LOG_FLOOR).ln() })
        .sum::<f64>()
}

/// Intermediates of one forward pass, enough for [`backward`].
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardCache {
    /// `concat(h1, h2)`.
    pub u: Vec<f64>,
    /// Post-activation hidden layer.
    pub hidden: Vec<f64>,
    pub logits: Vec<f64>,
    pub probs: PredictedDistribution,
}

fn concat_input(params: &MlpParams, h1: &[f32], h2: &[f32]) -> Result<Vec<f64>> {
    let half = params.embedding_dim();
    if h1.len() != half || h2.len() != half {
        return Err(Error::ShapeMismatch(format!(
            "expected two {half}-dimensional embeddings, got {} and {}",
            h1.len(),
            h2.len()
        )));
    }
    Ok(h1.iter().chain(h2).map(|&v| f64::from(v)).collect())
}

fn forward_u(params: &MlpParams, u: Vec<f64>) -> ForwardCache {
    let MlpShape { hidden, classes, .. } = params.shape;
    let mut pre = params.b1.clone();
    for (&ui, row) in u.iter().zip(params.w1.chunks_exact(hidden)) {
        if ui != 0.0 {
            for (p, &w) in pre.iter_mut().zip(row) {
                *p += ui * w;
            }
        }
    }
    let hidden_act = relu(&pre);
    let mut logits = params.b2.clone();
    for (&hj, row) in hidden_act.iter().zip(params.w2.chunks_exact(classes)) {
        if hj != 0.0 {
            for (l, &w) in logits.iter_mut().zip(row) {
                *l += hj * w;
            }
        }
    }
    let probs = softmax(&logits);
    ForwardCache {
        u,
        hidden: hidden_act,
        logits,
        probs,
    }
}

pub fn forward(params: &MlpParams, h1: &[f32], h2: &[f32]) -> Result<(PredictedDistribution, ForwardCache)> {
    let u = concat_input(params, h1, h2)?;
    let cache = forward_u(params, u);
    Ok((cache.probs.clone(), cache))
}

/// Softmax + cross-entropy logit gradient `p - q`.
fn logit_grad(cache: &ForwardCache, label: usize) -> Vec<f64> {
    let mut d = cache.probs.probs().to_vec();
    d[label] -= 1.0;
    d
}

fn hidden_grad(params: &MlpParams, cache: &ForwardCache, dlogits: &[f64]) -> Vec<f64> {
    let classes = params.shape.classes;
    params
        .w2
        .chunks_exact(classes)
        .zip(&cache.hidden)
        .map(|(row, &h)| {
            if h > 0.0 {
                row.iter().zip(dlogits).map(|(w, d)| w * d).sum()
            } else {
                0.0
            }
        })
        .collect()
}

/// Gradients of the single-sample cross-entropy w.r.t. every parameter.
pub fn backward(params: &MlpParams, cache: &ForwardCache, label: usize) -> Result<MlpParams> {
    let s = params.shape;
    if label >= s.classes {
        return Err(Error::LabelOutOfRange {
            label,
            classes: s.classes,
        });
    }
    if cache.u.len() != s.input || cache.hidden.len() != s.hidden || cache.logits.len() != s.classes {
        return Err(Error::ShapeMismatch("forward cache does not match parameters".into()));
    }
    let dlogits = logit_grad(cache, label);
    let dhidden = hidden_grad(params, cache, &dlogits);

    let mut g = MlpParams::zeros(s);
    for (row, &ui) in g.w1.chunks_exact_mut(s.hidden).zip(&cache.u) {
        for (gw, &dh) in row.iter_mut().zip(&dhidden) {
            *gw = ui * dh;
        }
    }
    g.b1.copy_from_slice(&dhidden);
    for (row, &hj) in g.w2.chunks_exact_mut(s.classes).zip(&cache.hidden) {
        for (gw, &dl) in row.iter_mut().zip(&dlogits) {
            *gw = hj * dl;
        }
    }
    g.b2.copy_from_slice(&dlogits);
    Ok(g)
}

/// Result of one mini-batch pass.
pub struct BatchPass {
    /// Mean gradient over the batch.
    pub grads: MlpParams,
    /// Mean cross-entropy over the batch.
    pub loss: f64,
    /// Samples whose argmax matched the label.
    pub correct: usize,
}

/// Mean loss gradient over a batch of `(h1, h2, label)`. Work is spread over
/// threads but every reduction runs in a fixed order, so the result does not
/// depend on the thread count.
pub fn batch_gradients(params: &MlpParams, batch: &[(&[f32], &[f32], usize)]) -> Result<BatchPass> {
    let s = params.shape;
    if batch.is_empty() {
        return Err(Error::EmptyDataset);
    }
    for &(_, _, label) in batch {
        if label >= s.classes {
            return Err(Error::LabelOutOfRange {
                label,
                classes: s.classes,
            });
        }
    }
    let passes: Vec<(ForwardCache, Vec<f64>, Vec<f64>)> = batch
        .par_iter()
        .map(|&(h1, h2, label)| {
            let cache = forward_u(params, concat_input(params, h1, h2)?);
            let dlogits = logit_grad(&cache, label);
            let dhidden = hidden_grad(params, &cache, &dlogits);
            Ok((cache, dlogits, dhidden))
        })
        .collect::<Result<_>>()?;

    let scale = 1.0 / batch.len() as f64;
    let mut g = MlpParams::zeros(s);

    g.w1.par_chunks_exact_mut(s.hidden).enumerate().for_each(|(i, row)| {
        for (cache, _, dhidden) in &passes {
            let ui = cache.u[i];
            if ui != 0.0 {
                for (gw, &dh) in row.iter_mut().zip(dhidden) {
                    *gw += ui * dh;
                }
            }
        }
        row.iter_mut().for_each(|v| *v *= scale);
    });

    let mut loss = 0.0;
    let mut correct = 0;
    for ((cache, dlogits, dhidden), &(_, _, label)) in passes.iter().zip(batch) {
        for (gb, &d) in g.b1.iter_mut().zip(dhidden) {
            *gb += d;
        }
        for (row, &hj) in g.w2.chunks_exact_mut(s.classes).zip(&cache.hidden) {
            for (gw, &dl) in row.iter_mut().zip(dlogits) {
                *gw += hj * dl;
            }
        }
        for (gb, &d) in g.b2.iter_mut().zip(dlogits) {
            *gb += d;
        }
        loss += cross_entropy(&cache.probs, label);
        if cache.probs.argmax() == label {
            correct += 1;
        }
    }
    for t in [&mut g.b1, &mut g.w2, &mut g.b2] {
        t.iter_mut().for_each(|v| *v *= scale);
    }
    Ok(BatchPass {
        grads: g,
        loss: loss * scale,
        correct,
    })
}

/// Argmax label (ties to the smaller class) and the full distribution.
pub fn predict(params: &MlpParams, h1: &[f32], h2: &[f32]) -> Result<(PlagiarismLabel, PredictedDistribution)> {
    if params.shape.classes != PlagiarismLabel::COUNT {
        return Err(Error::ShapeMismatch(format!(
            "classifier has {} classes, expected {}",
            params.shape.classes,
            PlagiarismLabel::COUNT
        )));
    }
    let (p, _) = forward(params, h1, h2)?;
    let label = PlagiarismLabel::from_index(p.argmax()).expect("three classes");
    Ok((label, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> MlpParams {
        MlpParams {
            shape: MlpShape {
                input: 4,
                hidden: 2,
                classes: 3,
            },
            w1: vec![0.1, -0.2, 0.3, 0.4, -0.5, 0.6, 0.7, -0.8],
            b1: vec![0.05, -0.1],
            w2: vec![0.2, -0.3, 0.4, -0.5, 0.6, 0.1],
            b2: vec![0.01, 0.02, -0.03],
        }
    }

    #[test]
    fn relu_definition() {
        assert_eq!(relu(&[-2.0, 0.0, 3.0]), vec![0.0, 0.0, 3.0]);
        assert_eq!(relu(&[1.0, 2.5]), vec![1.0, 2.5]);
    }

    #[test]
    fn softmax_values() {
        let p = softmax(&[0.0, 0.0, 0.0]);
        for &v in p.probs() {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        // high-precision reference values
        let p = softmax(&[1.0, 2.0, 3.0]);
        let want = [
            0.090_030_573_170_380_46,
            0.244_728_471_054_797_65,
            0.665_240_955_774_821_9,
        ];
        for (a, b) in p.probs().iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        let shifted = softmax(&[1001.0, 1002.0, 1003.0]);
        for (a, b) in shifted.probs().iter().zip(p.probs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cross_entropy_values() {
        let exact = PredictedDistribution::new(vec![1.0, 0.0, 0.0]);
        assert_eq!(cross_entropy(&exact, 0), 0.0);
        let uniform = softmax(&[0.0; 3]);
        for c in 0..3 {
            assert!((cross_entropy(&uniform, c) - 3f64.ln()).abs() < 1e-12);
        }
        let p = PredictedDistribution::new(vec![0.7, 0.2, 0.1]);
        assert!((cross_entropy(&p, 0) - 0.356_674_943_938_732_4).abs() < 1e-12);
        assert!((cross_entropy_dist(&p, &[1.0, 0.0, 0.0]) - cross_entropy(&p, 0)).abs() < 1e-15);
        // floored
        assert!((cross_entropy(&exact, 1) - (-(1e-12f64).ln())).abs() < 1e-9);
    }

    #[test]
    fn hand_traced_forward() {
        let (p, cache) = forward(&tiny(), &[0.5, -1.0], &[2.0, 0.25]).unwrap();
        // step-by-step high-precision trace
        assert_eq!(cache.hidden[0], 0.0);
        assert!((cache.hidden[1] - 0.4).abs() < 1e-12);
        let want_logits = [-0.19, 0.26, 0.01];
        for (a, b) in cache.logits.iter().zip(want_logits) {
            assert!((a - b).abs() < 1e-12);
        }
        let want = [
            0.263_872_089_291_438_24,
            0.413_833_813_046_512_5,
            0.322_294_097_662_049_3,
        ];
        for (a, b) in p.probs().iter().zip(want) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_output_layer_is_uniform() {
        let mut params = MlpParams::init(
            MlpShape {
                input: 6,
                hidden: 4,
                classes: 3,
            },
            3,
        );
        params.w2.iter_mut().for_each(|w| *w = 0.0);
        let (p, _) = forward(&params, &[1.0, -2.0, 3.0], &[0.5, 0.5, 0.5]).unwrap();
        assert_eq!(p.probs(), &[1.0 / 3.0; 3]);
    }

    #[test]
    fn perfect_prediction_has_zero_logit_gradient() {
        let cache = ForwardCache {
            u: vec![0.0; 4],
            hidden: vec![0.0; 2],
            logits: vec![0.0; 3],
            probs: PredictedDistribution::new(vec![0.0, 1.0, 0.0]),
        };
        let g = backward(&tiny(), &cache, 1).unwrap();
        assert_eq!(g.b2, vec![0.0; 3]);
    }

    #[test]
    fn batch_mean_matches_per_sample_backward() {
        let params = MlpParams::init(
            MlpShape {
                input: 6,
                hidden: 5,
                classes: 3,
            },
            8,
        );
        let a1 = [0.3f32, -0.2, 0.9];
        let a2 = [0.1f32, 0.4, -0.7];
        let b1 = [-0.5f32, 0.2, 0.2];
        let b2 = [0.6f32, 0.0, 0.1];
        let batch: Vec<(&[f32], &[f32], usize)> = vec![(&a1, &a2, 2), (&b1, &b2, 0), (&a1, &a2, 2)];
        let pass = batch_gradients(&params, &batch).unwrap();

        let (_, ca) = forward(&params, &a1, &a2).unwrap();
        let (_, cb) = forward(&params, &b1, &b2).unwrap();
        let ga = backward(&params, &ca, 2).unwrap();
        let gb = backward(&params, &cb, 0).unwrap();
        for (t, (ta, tb)) in pass.grads.tensors().iter().zip(ga.tensors().iter().zip(gb.tensors())) {
            for i in 0..t.len() {
                // the duplicated sample counts twice
                let want = (2.0 * ta[i] + tb[i]) / 3.0;
                assert!((t[i] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn shape_errors() {
        let params = tiny();
        assert!(matches!(
            forward(&params, &[0.0; 3], &[0.0; 2]),
            Err(Error::ShapeMismatch(_))
        ));
        let (_, cache) = forward(&params, &[0.0; 2], &[0.0; 2]).unwrap();
        assert!(matches!(
            backward(&params, &cache, 3),
            Err(Error::LabelOutOfRange { .. })
        ));
        let other = MlpParams::zeros(MlpShape {
            input: 6,
            hidden: 2,
            classes: 3,
        });
        assert!(matches!(backward(&other, &cache, 0), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn params_file_round_trip_and_damage() {
        let mut params = MlpParams::init(
            MlpShape {
                input: 8,
                hidden: 3,
                classes: 3,
            },
            1,
        );
        params.round_to_f32();
        let bytes = params.to_bytes();
        assert_eq!(&bytes[..4], b"SSMP");
        assert_eq!(MlpParams::from_bytes(&bytes).unwrap(), params);
        let mut bad = bytes.clone();
        bad[30] ^= 0xFF;
        assert!(matches!(MlpParams::from_bytes(&bad), Err(Error::CorruptFile(_))));
        assert!(matches!(
            MlpParams::from_bytes(&bytes[..bytes.len() - 6]),
            Err(Error::CorruptFile(_))
        ));
    }
}

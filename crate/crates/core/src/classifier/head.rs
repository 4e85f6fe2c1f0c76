use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::probability::softmax;
use super::{ClassifierError, ProbabilityVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeadConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub seed: u64,
}

impl Default for HeadConfig {
    fn default() -> Self {
        HeadConfig {
            epochs: 1000,
            batch_size: 20,
            learning_rate: 1e-3,
            weight_decay: 1e-2,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            seed: 0,
        }
    }
}

/// Linear layer followed by softmax: `p = softmax(W s + c)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftmaxHead {
    /// `classes × latent_dim`, row-major.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeadGradient {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl SoftmaxHead {
    pub fn zeros(classes: usize, dim: usize) -> Self {
        SoftmaxHead {
            weights: vec![vec![0.0; dim]; classes],
            bias: vec![0.0; classes],
        }
    }

    /// Uniform `±1/√dim` initialization.
    pub fn random<R: Rng>(classes: usize, dim: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (dim as f64).sqrt();
        let mut draw = || rng.random_range(-bound..bound);
        let weights = (0..classes)
            .map(|_| (0..dim).map(|_| draw()).collect())
            .collect();
        let bias = (0..classes).map(|_| draw()).collect();
        SoftmaxHead { weights, bias }
    }

    pub fn classes(&self) -> usize {
        self.bias.len()
    }

    pub fn dim(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn logits(&self, s: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(row, c)| row.iter().zip(s).map(|(w, x)| w * x).sum::<f64>() + c)
            .collect()
    }

    pub fn forward(&self, s: &[f64]) -> ProbabilityVector {
        ProbabilityVector::from_raw_unchecked(softmax(&self.logits(s)))
    }

    /// Mean cross-entropy over `samples` and its gradient.
    pub fn loss_and_gradient(&self, latents: &[&[f64]], labels: &[usize]) -> (f64, HeadGradient) {
        let mut grad = HeadGradient {
            weights: vec![vec![0.0; self.dim()]; self.classes()],
            bias: vec![0.0; self.classes()],
        };
        let n = latents.len() as f64;
        let mut loss = 0.0;
        for (s, &y) in latents.iter().zip(labels) {
            let z = self.logits(s);
            loss += neg_log_softmax(&z, y);
            let p = softmax(&z);
            for (k, &pk) in p.iter().enumerate() {
                let delta = (pk - if k == y { 1.0 } else { 0.0 }) / n;
                grad.bias[k] += delta;
                for (g, x) in grad.weights[k].iter_mut().zip(s.iter()) {
                    *g += delta * x;
                }
            }
        }
        (loss / n, grad)
    }

    pub fn loss(&self, latents: &[&[f64]], labels: &[usize]) -> f64 {
        let n = latents.len() as f64;
        latents
            .iter()
            .zip(labels)
            .map(|(s, &y)| neg_log_softmax(&self.logits(s), y))
            .sum::<f64>()
            / n
    }
}

fn neg_log_softmax(z: &[f64], y: usize) -> f64 {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
    lse - z[y]
}

/// Adam with decoupled weight decay over a flat parameter vector.
#[derive(Debug, Clone)]
pub struct AdamW {
    config: HeadConfig,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl AdamW {
    pub fn new(params: usize, config: HeadConfig) -> Self {
        AdamW {
            config,
            m: vec![0.0; params],
            v: vec![0.0; params],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        let c = &self.config;
        self.t += 1;
        let bias1 = 1.0 - c.beta1.powi(self.t);
        let bias2 = 1.0 - c.beta2.powi(self.t);
        for k in 0..params.len() {
            params[k] -= c.learning_rate * c.weight_decay * params[k];
            self.m[k] = c.beta1 * self.m[k] + (1.0 - c.beta1) * grad[k];
            self.v[k] = c.beta2 * self.v[k] + (1.0 - c.beta2) * grad[k] * grad[k];
            let m_hat = self.m[k] / bias1;
            let v_hat = self.v[k] / bias2;
            params[k] -= c.learning_rate * m_hat / (v_hat.sqrt() + c.eps);
        }
    }
}

fn flatten(weights: &[Vec<f64>], bias: &[f64]) -> Vec<f64> {
    let mut flat: Vec<f64> = weights.iter().flatten().copied().collect();
    flat.extend_from_slice(bias);
    flat
}

fn unflatten(flat: &[f64], head: &mut SoftmaxHead) {
    let dim = head.dim();
    for (k, row) in head.weights.iter_mut().enumerate() {
        row.copy_from_slice(&flat[k * dim..(k + 1) * dim]);
    }
    let off = head.classes() * dim;
    head.bias.copy_from_slice(&flat[off..]);
}

/// Trained head plus the full-dataset loss after every epoch (`losses[0]` is
/// the loss at initialization).
#[derive(Debug, Clone)]
pub struct HeadTraining {
    pub head: SoftmaxHead,
    pub losses: Vec<f64>,
}

/// Minibatch cross-entropy training with AdamW, reshuffled every epoch.
pub fn train_head(
    latents: &[&[f64]],
    labels: &[usize],
    classes: usize,
    config: &HeadConfig,
) -> Result<HeadTraining, ClassifierError> {
    if latents.is_empty() {
        return Err(ClassifierError::EmptyDataset);
    }
    if latents.len() != labels.len() {
        return Err(ClassifierError::LengthMismatch {
            features: latents.len(),
            labels: labels.len(),
        });
    }
    let dim = latents[0].len();
    if let Some(s) = latents.iter().find(|s| s.len() != dim) {
        return Err(ClassifierError::DimensionMismatch {
            expected: dim,
            got: s.len(),
        });
    }
    if let Some(&y) = labels.iter().find(|&&y| y >= classes) {
        return Err(ClassifierError::DimensionMismatch {
            expected: classes,
            got: y + 1,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut head = SoftmaxHead::random(classes, dim, &mut rng);
    let mut params = flatten(&head.weights, &head.bias);
    let mut opt = AdamW::new(params.len(), *config);
    let mut order: Vec<usize> = (0..latents.len()).collect();
    let mut losses = Vec::with_capacity(config.epochs + 1);
    losses.push(head.loss(latents, labels));
    if !losses[0].is_finite() {
        return Err(ClassifierError::Diverged(0));
    }

    let batch_size = config.batch_size.max(1);
    let mut batch_s: Vec<&[f64]> = Vec::with_capacity(batch_size);
    let mut batch_y: Vec<usize> = Vec::with_capacity(batch_size);
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch_size) {
            batch_s.clear();
            batch_y.clear();
            for &i in chunk {
                batch_s.push(latents[i]);
                batch_y.push(labels[i]);
            }
            let (_, grad) = head.loss_and_gradient(&batch_s, &batch_y);
            opt.step(&mut params, &flatten(&grad.weights, &grad.bias));
            unflatten(&params, &mut head);
        }
        let loss = head.loss(latents, labels);
        if !loss.is_finite() {
            return Err(ClassifierError::Diverged(epoch + 1));
        }
        losses.push(loss);
    }
    Ok(HeadTraining { head, losses })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_head_is_uniform() {
        let head = SoftmaxHead::zeros(9, 36);
        let p = head.forward(&[0.3; 36]);
        assert!(p.as_slice().iter().all(|&v| (v - 1.0 / 9.0).abs() < 1e-15));
    }

    #[test]
    fn empty_dataset_is_error() {
        assert!(matches!(
            train_head(&[], &[], 3, &HeadConfig::default()),
            Err(ClassifierError::EmptyDataset)
        ));
    }

    #[test]
    fn non_finite_loss_is_divergence() {
        let s = [vec![f64::NAN, 0.0], vec![0.0, 1.0]];
        let refs: Vec<&[f64]> = s.iter().map(|v| v.as_slice()).collect();
        assert!(matches!(
            train_head(&refs, &[0, 1], 2, &HeadConfig::default()),
            Err(ClassifierError::Diverged(0))
        ));
    }

    #[test]
    fn adamw_first_step_is_signed_learning_rate() {
        let cfg = HeadConfig {
            weight_decay: 0.0,
            ..HeadConfig::default()
        };
        let mut opt = AdamW::new(2, cfg);
        let mut p = vec![1.0, 1.0];
        opt.step(&mut p, &[0.5, -2.0]);
        assert!((p[0] - (1.0 - 1e-3)).abs() < 1e-9);
        assert!((p[1] - (1.0 + 1e-3)).abs() < 1e-9);
    }
}

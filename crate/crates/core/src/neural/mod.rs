//! Dense ReLU network with hand-written backpropagation, an L1 temporal
//! difference loss with L2 weight decay, and Adam.

mod adam;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use adam::Adam;

pub const INIT_STD: f64 = 0.01;
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum NeuralError {
    #[error("input has length {got}, network expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("network shapes differ: {0:?} vs {1:?}")]
    ShapeMismatch(Vec<usize>, Vec<usize>),
    #[error("training diverged: loss is {0}")]
    Diverged(f64),
    #[error("empty batch")]
    EmptyBatch,
    #[error("bad checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// One training example: a network input and the full target vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub input: Vec<f64>,
    pub target: Vec<f64>,
}

/// Fully connected network. Parameters live in one flat vector; layer `l`
/// stores its `out x in` weights row-major, then its `out` biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QNetwork {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    sizes: Vec<usize>,
    params: Vec<f64>,
}

impl QNetwork {
    /// Layers `[n_in, n_in, n_in, n_out]` with N(0, 0.01) weights and zero biases.
    pub fn new(n_in: usize, n_out: usize, seed: u64) -> Self {
        Self::with_sizes(&[n_in, n_in, n_in, n_out], seed)
    }

    pub fn with_sizes(sizes: &[usize], seed: u64) -> Self {
        assert!(sizes.len() >= 2 && sizes.iter().all(|&n| n >= 1), "bad layer sizes {sizes:?}");
        let mut net = Self::zeros(sizes);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, INIT_STD).expect("valid normal");
        for l in 0..net.layer_count() {
            let (w, _) = net.layer_ranges(l);
            for p in &mut net.params[w] {
                *p = rng.sample(normal);
            }
        }
        net
    }

    pub fn zeros(sizes: &[usize]) -> Self {
        let n = sizes.windows(2).map(|w| w[1] * (w[0] + 1)).sum();
        QNetwork { sizes: sizes.to_vec(), params: vec![0.0; n] }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_len(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_len(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn layer_count(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Index ranges of layer `l`'s weights and biases in [`Self::params`].
    pub fn layer_ranges(&self, l: usize) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        let start: usize = self.sizes.windows(2).take(l).map(|w| w[1] * (w[0] + 1)).sum();
        let (i, o) = (self.sizes[l], self.sizes[l + 1]);
        (start..start + o * i, start + o * i..start + o * (i + 1))
    }

    pub fn weights(&self, l: usize) -> &[f64] {
        &self.params[self.layer_ranges(l).0]
    }

    pub fn biases(&self, l: usize) -> &[f64] {
        &self.params[self.layer_ranges(l).1]
    }

    pub fn weights_mut(&mut self, l: usize) -> &mut [f64] {
        let r = self.layer_ranges(l).0;
        &mut self.params[r]
    }

    pub fn biases_mut(&mut self, l: usize) -> &mut [f64] {
        let r = self.layer_ranges(l).1;
        &mut self.params[r]
    }

    /// Sum of squared weights (biases excluded).
    pub fn weight_norm_sq(&self) -> f64 {
        (0..self.layer_count()).map(|l| self.weights(l).iter().map(|w| w * w).sum::<f64>()).sum()
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>, NeuralError> {
        self.check_input(input)?;
        Ok(self.activations(input).pop().unwrap())
    }

    fn check_input(&self, input: &[f64]) -> Result<(), NeuralError> {
        if input.len() != self.input_len() {
            return Err(NeuralError::DimensionMismatch { expected: self.input_len(), got: input.len() });
        }
        Ok(())
    }

    /// Post-activation values of every layer, input included.
    fn activations(&self, input: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = vec![input.to_vec()];
        let last = self.layer_count() - 1;
        for l in 0..=last {
            let (w, b) = (self.weights(l), self.biases(l));
            let a = acts.last().unwrap();
            let n_in = a.len();
            let z: Vec<f64> = b
                .iter()
                .enumerate()
                .map(|(o, &bias)| {
                    let z = bias + w[o * n_in..(o + 1) * n_in].iter().zip(a).map(|(w, a)| w * a).sum::<f64>();
                    if l < last {
                        z.max(0.0)
                    } else {
                        z
                    }
                })
                .collect();
            acts.push(z);
        }
        acts
    }

    /// `Σ |Q(s) - target| + l2 · Σ w²`.
    pub fn loss(&self, batch: &[Sample], l2: f64) -> Result<f64, NeuralError> {
        let mut total = 0.0;
        for s in batch {
            let out = self.forward(&s.input)?;
            total += out.iter().zip(&s.target).map(|(p, t)| (p - t).abs()).sum::<f64>();
        }
        Ok(total + l2 * self.weight_norm_sq())
    }

    /// Loss and its (sub)gradient with respect to [`Self::params`]. The L1
    /// subgradient at zero error is taken as zero.
    pub fn loss_and_gradient(&self, batch: &[Sample], l2: f64) -> Result<(f64, Vec<f64>), NeuralError> {
        let mut grad = vec![0.0; self.params.len()];
        let mut total = 0.0;
        let last = self.layer_count() - 1;
        for s in batch {
            self.check_input(&s.input)?;
            if s.target.len() != self.output_len() {
                return Err(NeuralError::DimensionMismatch { expected: self.output_len(), got: s.target.len() });
            }
            let acts = self.activations(&s.input);
            let out = &acts[last + 1];
            let mut delta: Vec<f64> = out
                .iter()
                .zip(&s.target)
                .map(|(p, t)| {
                    total += (p - t).abs();
                    sign(p - t)
                })
                .collect();
            for l in (0..=last).rev() {
                let (wr, br) = self.layer_ranges(l);
                let a = &acts[l];
                let n_in = a.len();
                for (o, &d) in delta.iter().enumerate() {
                    if d == 0.0 {
                        continue;
                    }
                    grad[br.start + o] += d;
                    let row = wr.start + o * n_in;
                    for (g, &ai) in grad[row..row + n_in].iter_mut().zip(a) {
                        *g += d * ai;
                    }
                }
                if l == 0 {
                    break;
                }
                let w = &self.params[wr];
                delta = (0..n_in)
                    .map(|i| {
                        if a[i] <= 0.0 {
                            return 0.0;
                        }
                        delta.iter().enumerate().map(|(o, d)| d * w[o * n_in + i]).sum()
                    })
                    .collect();
            }
        }
        if l2 != 0.0 {
            for l in 0..=last {
                let r = self.layer_ranges(l).0;
                for i in r {
                    grad[i] += 2.0 * l2 * self.params[i];
                }
            }
        }
        Ok((total + l2 * self.weight_norm_sq(), grad))
    }

    /// Copies parameters into a network of identical shape.
    pub fn clone_into(&self, dst: &mut QNetwork) -> Result<(), NeuralError> {
        if self.sizes != dst.sizes {
            return Err(NeuralError::ShapeMismatch(self.sizes.clone(), dst.sizes.clone()));
        }
        dst.params.copy_from_slice(&self.params);
        Ok(())
    }

    /// `{"version": 1, "sizes": [...], "params": [...]}` with parameters in
    /// the flat layout described on [`QNetwork`].
    pub fn to_json(&self) -> String {
        let c = Checkpoint { version: CHECKPOINT_VERSION, sizes: self.sizes.clone(), params: self.params.clone() };
        serde_json::to_string(&c).expect("checkpoint serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, NeuralError> {
        let c: Checkpoint = serde_json::from_str(text)?;
        if c.version != CHECKPOINT_VERSION {
            return Err(NeuralError::Checkpoint(format!("unsupported version {}", c.version)));
        }
        if c.sizes.len() < 2 || c.sizes.contains(&0) {
            return Err(NeuralError::Checkpoint(format!("bad sizes {:?}", c.sizes)));
        }
        let net = QNetwork::zeros(&c.sizes);
        if net.params.len() != c.params.len() {
            return Err(NeuralError::Checkpoint(format!("{} parameters for sizes {:?}", c.params.len(), c.sizes)));
        }
        Ok(QNetwork { sizes: c.sizes, params: c.params })
    }
}

fn sign(d: f64) -> f64 {
    if d > 0.0 {
        1.0
    } else if d < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// One Adam step on the batch loss; returns the loss before the step.
pub fn train_batch(net: &mut QNetwork, adam: &mut Adam, batch: &[Sample], l2: f64) -> Result<f64, NeuralError> {
    if batch.is_empty() {
        return Err(NeuralError::EmptyBatch);
    }
    let (loss, grad) = net.loss_and_gradient(batch, l2)?;
    if !loss.is_finite() {
        return Err(NeuralError::Diverged(loss));
    }
    adam.step(&mut net.params, &grad);
    Ok(loss)
}

//! Skip-gram negative-sampling parameter tables and the per-pair update.
//!
//! Loss for one (center, context, negatives) instance:
//!
//! ```text
//! L = -log sigma(u_ctx . v_ctr) - sum_neg log sigma(-u_neg . v_ctr)
//! ```
//!
//! `step` descends the input vector of the center and the output vectors of
//! the context and negatives. Gradients are evaluated on pre-update values.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

pub struct SgnsModel {
    pub dim: usize,
    /// vocab x dim, row-major; uniform init in [-0.5/dim, +0.5/dim].
    pub input: Vec<f64>,
    /// vocab x dim, zero init.
    pub output: Vec<f64>,
}

/// -log sigma(x), computed as softplus(-x) to stay finite for large |x|.
fn neg_log_sigmoid(x: f64) -> f64 {
    let t = -x;
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Gradients for one training instance, matching the slot layout of the
/// inputs: center row of the input table, context and negative rows of the
/// output table.
pub struct SgnsGradients {
    pub center: Vec<f64>,
    pub context: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
}

impl SgnsModel {
    pub fn new(vocab_size: usize, dim: usize, init_seed: u64) -> SgnsModel {
        let mut rng = ChaCha12Rng::seed_from_u64(init_seed);
        let half = 0.5 / dim as f64;
        let input = (0..vocab_size * dim)
            .map(|_| rng.random_range(-half..half))
            .collect();
        SgnsModel {
            dim,
            input,
            output: vec![0.0; vocab_size * dim],
        }
    }

    pub fn input_row(&self, index: usize) -> &[f64] {
        &self.input[index * self.dim..(index + 1) * self.dim]
    }

    fn output_row(&self, index: usize) -> &[f64] {
        &self.output[index * self.dim..(index + 1) * self.dim]
    }

    fn dot_io(&self, input_index: usize, output_index: usize) -> f64 {
        self.input_row(input_index)
            .iter()
            .zip(self.output_row(output_index))
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn loss(&self, center: usize, context: usize, negatives: &[usize]) -> f64 {
        let mut loss = neg_log_sigmoid(self.dot_io(center, context));
        for &n in negatives {
            loss += neg_log_sigmoid(-self.dot_io(center, n));
        }
        loss
    }

    pub fn gradients(&self, center: usize, context: usize, negatives: &[usize]) -> SgnsGradients {
        let dim = self.dim;
        let mut g_center = vec![0.0; dim];
        let s_ctx = sigmoid(self.dot_io(center, context));
        let mut g_context = vec![0.0; dim];
        for d in 0..dim {
            g_center[d] += (s_ctx - 1.0) * self.output_row(context)[d];
            g_context[d] = (s_ctx - 1.0) * self.input_row(center)[d];
        }
        let mut g_negatives = Vec::with_capacity(negatives.len());
        for &n in negatives {
            let s_neg = sigmoid(self.dot_io(center, n));
            let mut g_neg = vec![0.0; dim];
            for d in 0..dim {
                g_center[d] += s_neg * self.output_row(n)[d];
                g_neg[d] = s_neg * self.input_row(center)[d];
            }
            g_negatives.push(g_neg);
        }
        SgnsGradients {
            center: g_center,
            context: g_context,
            negatives: g_negatives,
        }
    }

    /// One SGD update; returns the pre-update loss.
    pub fn step(&mut self, center: usize, context: usize, negatives: &[usize], lr: f64) -> f64 {
        let loss = self.loss(center, context, negatives);
        let grads = self.gradients(center, context, negatives);
        let dim = self.dim;
        for d in 0..dim {
            self.input[center * dim + d] -= lr * grads.center[d];
        }
        for d in 0..dim {
            self.output[context * dim + d] -= lr * grads.context[d];
        }
        for (&n, g_neg) in negatives.iter().zip(&grads.negatives) {
            for d in 0..dim {
                self.output[n * dim + d] -= lr * g_neg[d];
            }
        }
        loss
    }
}

//! Tabular softmax parameterizations of the four learned distributions.

use ndarray::{Array1, Array2, Array3, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::gridworld::Policy;

/// Stable log-softmax of a logit slice.
pub(crate) fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let log_sum: f64 = logits.iter().map(|&l| (l - max).exp()).sum::<f64>().ln() + max;
    logits.iter().map(|&l| l - log_sum).collect()
}

pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    log_softmax(logits).into_iter().map(f64::exp).collect()
}

/// Prior, intra-option policy, variational decoder and downstream selector,
/// all as logit tables over the maze's free cells.
///
/// - prior `P(c|s0)`: `(num_states, num_options)` logits
/// - policy `π(a|s,c)`: `(num_options, num_states, 4)` logits
/// - decoder `P(c|s0,G)`: linear softmax over `[one-hot s0 ⊕ mean landmark
///   feature]`, weights `(num_options, num_states + feature_dim)`
/// - selector `P(c|s)`: `(num_states, num_options)` logits
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptionPolicySet {
    num_states: usize,
    num_options: usize,
    feature_dim: usize,
    prior: Array2<f64>,
    policy: Array3<f64>,
    decoder: Array2<f64>,
    selector: Array2<f64>,
}

impl OptionPolicySet {
    /// All-zero logits: every distribution starts uniform.
    pub fn new(num_states: usize, num_options: usize, feature_dim: usize) -> Self {
        Self {
            num_states,
            num_options,
            feature_dim,
            prior: Array2::zeros((num_states, num_options)),
            policy: Array3::zeros((num_options, num_states, 4)),
            decoder: Array2::zeros((num_options, num_states + feature_dim)),
            selector: Array2::zeros((num_states, num_options)),
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_options(&self) -> usize {
        self.num_options
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn prior_logits(&self) -> &Array2<f64> {
        &self.prior
    }

    pub fn policy_logits(&self) -> &Array3<f64> {
        &self.policy
    }

    pub fn decoder_weights(&self) -> &Array2<f64> {
        &self.decoder
    }

    pub fn selector_logits(&self) -> &Array2<f64> {
        &self.selector
    }

    pub fn prior_log_probs(&self, s0: usize) -> Vec<f64> {
        log_softmax(self.prior.row(s0).as_slice().unwrap())
    }

    pub fn prior_probs(&self, s0: usize) -> Vec<f64> {
        softmax(self.prior.row(s0).as_slice().unwrap())
    }

    pub fn policy_log_probs(&self, state: usize, option: usize) -> [f64; 4] {
        let row = self.policy.slice(ndarray::s![option, state, ..]);
        let ls = log_softmax(row.as_slice().unwrap());
        [ls[0], ls[1], ls[2], ls[3]]
    }

    pub fn selector_log_probs(&self, state: usize) -> Vec<f64> {
        log_softmax(self.selector.row(state).as_slice().unwrap())
    }

    pub fn selector_probs(&self, state: usize) -> Vec<f64> {
        softmax(self.selector.row(state).as_slice().unwrap())
    }

    /// Decoder input `[one-hot s0 ⊕ mean landmark feature]` applied to the
    /// weight rows; returns log-probabilities over options.
    pub fn decoder_log_probs(&self, s0: usize, mean_feature: ArrayView1<'_, f64>) -> Vec<f64> {
        assert_eq!(mean_feature.len(), self.feature_dim, "feature dim mismatch");
        let logits: Vec<f64> = (0..self.num_options)
            .map(|c| {
                let row = self.decoder.row(c);
                let mut z = row[s0];
                for k in 0..self.feature_dim {
                    z += row[self.num_states + k] * mean_feature[k];
                }
                z
            })
            .collect();
        log_softmax(&logits)
    }

    pub fn decoder_logprob(&self, s0: usize, mean_feature: ArrayView1<'_, f64>, option: usize) -> f64 {
        self.decoder_log_probs(s0, mean_feature)[option]
    }

    /// One full-batch NLL descent step on `(s0, mean feature, option)`
    /// samples; returns the pre-update mean negative log-likelihood.
    pub fn decoder_update(
        &mut self,
        batch: &[(usize, Array1<f64>, usize)],
        learning_rate: f64,
    ) -> Option<f64> {
        if batch.is_empty() {
            return None;
        }
        let scale = 1.0 / batch.len() as f64;
        let mut grad = Array2::<f64>::zeros(self.decoder.dim());
        let mut nll = 0.0;
        for (s0, feature, target) in batch {
            let log_probs = self.decoder_log_probs(*s0, feature.view());
            nll -= log_probs[*target] * scale;
            for c in 0..self.num_options {
                let err = log_probs[c].exp() - if c == *target { 1.0 } else { 0.0 };
                grad[[c, *s0]] += err * scale;
                for k in 0..self.feature_dim {
                    grad[[c, self.num_states + k]] += err * feature[k] * scale;
                }
            }
        }
        self.decoder.scaled_add(-learning_rate, &grad);
        Some(nll)
    }

    pub fn add_to_prior(&mut self, grad: &Array2<f64>, step: f64) {
        self.prior.scaled_add(step, grad);
    }

    pub fn add_to_policy(&mut self, grad: &Array3<f64>, step: f64) {
        self.policy.scaled_add(step, grad);
    }

    pub fn add_to_selector(&mut self, grad: &Array2<f64>, step: f64) {
        self.selector.scaled_add(step, grad);
    }

    pub fn add_to_decoder(&mut self, grad: &Array2<f64>, step: f64) {
        self.decoder.scaled_add(step, grad);
    }

    /// Copies the trained prior into the selector table.
    pub fn init_selector_from_prior(&mut self) {
        self.selector = self.prior.clone();
    }

    pub fn reset_selector(&mut self) {
        self.selector.fill(0.0);
    }

    pub fn all_finite(&self) -> bool {
        self.prior.iter().all(|v| v.is_finite())
            && self.policy.iter().all(|v| v.is_finite())
            && self.decoder.iter().all(|v| v.is_finite())
            && self.selector.iter().all(|v| v.is_finite())
    }
}

impl Policy for OptionPolicySet {
    fn action_log_probs(&self, state: usize, option: usize) -> [f64; 4] {
        self.policy_log_probs(state, option)
    }
}

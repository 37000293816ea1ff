//! Gradient-based estimation of the bottom-D Laplacian eigenfunctions from
//! sampled transitions, for use when the exact spectrum is unavailable.
//!
//! The objective has two parts. An attraction term pulls features of
//! adjacent states together, weighting dimension `i` (1-based) by `D−i+1` so
//! the minimizer orders eigenfunctions rather than spanning an arbitrary
//! rotation of the subspace:
//!
//! `G = 1/2 · E_{(s,s')}[ Σ_i (D−i+1)(f_i(s) − f_i(s'))² ]`
//!
//! Orthonormality under the sampled state distribution ρ is enforced as a
//! penalty with the same nested weighting:
//!
//! `P = α · Σ_{i,j} (D−max(i,j)+1) (E_ρ[f_i f_j] − δ_ij)²`
//!
//! ρ is the empirical distribution of transition endpoints. Gradients are
//! analytic; optimization is plain full-batch descent, deterministic for a
//! fixed seed.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::graph::SpectralError;
use super::spectrum::StateFeatureMap;

/// Tabular eigenfunction estimates: one row per state, one column per
/// learned function.
#[derive(Debug, Clone)]
pub struct LearnedSpectrum {
    pub functions: Array2<f64>,
    pub final_loss: f64,
}

impl LearnedSpectrum {
    /// Row-normalized features in the same shape the exact spectrum yields.
    pub fn feature_map(&self) -> StateFeatureMap {
        StateFeatureMap::from_rows(self.functions.clone())
    }
}

/// Empirical distribution of transition endpoints.
fn endpoint_distribution(num_states: usize, transitions: &[(usize, usize)]) -> Vec<f64> {
    let mut counts = vec![0usize; num_states];
    for &(s, t) in transitions {
        counts[s] += 1;
        counts[t] += 1;
    }
    let total = (2 * transitions.len()) as f64;
    counts.into_iter().map(|c| c as f64 / total).collect()
}

fn check_transitions(
    num_states: usize,
    transitions: &[(usize, usize)],
) -> Result<(), SpectralError> {
    if transitions.is_empty() {
        return Err(SpectralError::EmptySample);
    }
    for &(s, t) in transitions {
        for &index in &[s, t] {
            if index >= num_states {
                return Err(SpectralError::StateOutOfRange { index, num_states });
            }
        }
    }
    Ok(())
}

/// Loss `G + P` and its analytic gradient with respect to every tabular
/// function value.
pub fn spectral_loss_grad(
    functions: &Array2<f64>,
    transitions: &[(usize, usize)],
    penalty_weight: f64,
) -> Result<(f64, Array2<f64>), SpectralError> {
    let n = functions.nrows();
    let d = functions.ncols();
    check_transitions(n, transitions)?;
    let rho = endpoint_distribution(n, transitions);
    let count = transitions.len() as f64;

    let mut grad = Array2::zeros((n, d));
    let mut attraction = 0.0;
    for &(s, t) in transitions {
        for i in 0..d {
            let w = (d - i) as f64;
            let diff = functions[[s, i]] - functions[[t, i]];
            attraction += 0.5 * w * diff * diff / count;
            grad[[s, i]] += w * diff / count;
            grad[[t, i]] -= w * diff / count;
        }
    }

    // Gram matrix under rho.
    let mut m = Array2::<f64>::zeros((d, d));
    for s in 0..n {
        for i in 0..d {
            for j in 0..d {
                m[[i, j]] += rho[s] * functions[[s, i]] * functions[[s, j]];
            }
        }
    }
    let mut penalty = 0.0;
    for i in 0..d {
        for j in 0..d {
            let w = (d - i.max(j)) as f64;
            let delta = if i == j { 1.0 } else { 0.0 };
            let r = m[[i, j]] - delta;
            penalty += penalty_weight * w * r * r;
        }
    }
    for s in 0..n {
        for a in 0..d {
            let mut acc = 0.0;
            for j in 0..d {
                let w = (d - a.max(j)) as f64;
                let delta = if a == j { 1.0 } else { 0.0 };
                acc += w * (m[[a, j]] - delta) * functions[[s, j]];
            }
            grad[[s, a]] += 4.0 * penalty_weight * rho[s] * acc;
        }
    }

    Ok((attraction + penalty, grad))
}

/// Loss value only.
pub fn spectral_loss(
    functions: &Array2<f64>,
    transitions: &[(usize, usize)],
    penalty_weight: f64,
) -> Result<f64, SpectralError> {
    spectral_loss_grad(functions, transitions, penalty_weight).map(|(l, _)| l)
}

/// Learns `d` tabular eigenfunction estimates by full-batch gradient descent
/// over the sampled transitions.
pub fn learn_spectrum_sgd(
    transitions: &[(usize, usize)],
    num_states: usize,
    d: usize,
    penalty_weight: f64,
    steps: usize,
    step_size: f64,
    seed: u64,
) -> Result<LearnedSpectrum, SpectralError> {
    check_transitions(num_states, transitions)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut functions = Array2::zeros((num_states, d));
    for v in functions.iter_mut() {
        *v = rng.gen_range(-1.0..1.0);
    }

    let mut loss = 0.0;
    for step in 0..steps {
        let (l, grad) = spectral_loss_grad(&functions, transitions, penalty_weight)?;
        if !l.is_finite() {
            return Err(SpectralError::NonFiniteLoss(step));
        }
        loss = l;
        functions.scaled_add(-step_size, &grad);
    }
    let (final_loss, _) = spectral_loss_grad(&functions, transitions, penalty_weight)?;
    if !final_loss.is_finite() {
        return Err(SpectralError::NonFiniteLoss(steps));
    }
    let _ = loss;
    Ok(LearnedSpectrum { functions, final_loss })
}

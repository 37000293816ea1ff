//! The per-trajectory and per-set objective quantities: landmark extraction,
//! structured trajectory features, the three DPP terms and the
//! information-bottleneck pieces.

use ndarray::{Array1, Array2};
use thiserror::Error;

use crate::dpp::{
    build_kernel, expected_cardinality, greedy_map, FeatureMatrix, ItemSubset, KernelError,
    KernelMatrix, QualityVector,
};
use crate::gridworld::{GridError, Policy, TrajectoryRecord, UNIFORM_ACTION_LOGPROB};
use crate::spectral::{SpectralError, StateFeatureMap};
use crate::trainer::policies::log_softmax;
use crate::trainer::OptionPolicySet;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Kernel(#[from] KernelError),

    #[error(transparent)]
    Spectral(#[from] SpectralError),

    #[error(transparent)]
    Grid(#[from] GridError),

    #[error("landmark set is empty")]
    EmptyLandmarks,

    #[error("landmark features cancel to a zero trajectory feature")]
    ZeroTrajectoryFeature,

    #[error("trajectory is missing its {0} (fill it before this call)")]
    MissingAnnotation(&'static str),

    #[error("empty batch")]
    EmptyBatch,

    #[error("invalid config: {0}")]
    BadConfig(String),

    #[error("non-finite gradient: {0}")]
    NonFiniteGradient(String),

    #[error("maze has no goal cells")]
    NoGoal,

    #[error("policy set has no options")]
    NoOptions,

    #[error("checkpoint error: {0}")]
    BadCheckpoint(String),
}

/// Kernel over the `T+1` visited states of one trajectory, quality 1 per
/// state and normalized spectral features as columns. Repeated states enter
/// repeatedly; the kernel is rank-deficient in that case by design.
pub fn visited_state_kernel(
    record: &TrajectoryRecord,
    features: &StateFeatureMap,
) -> Result<KernelMatrix, TrainError> {
    let n = record.states.len();
    let d = features.dim();
    let mut cols = Array2::zeros((d, n));
    for (i, &s) in record.states.iter().enumerate() {
        let f = features.get(s)?;
        for k in 0..d {
            cols[[k, i]] = f[k];
        }
    }
    let b = FeatureMatrix::new(cols, true)?;
    Ok(build_kernel(&QualityVector::uniform(n), &b)?)
}

/// MAP landmark positions of a trajectory: greedy MAP over the visited-state
/// kernel, capped at `max_landmarks` selections.
///
/// Exact duplicates can never be co-selected (their incremental gain is
/// negative infinity), so the positions always name distinct states.
pub fn extract_landmarks(
    record: &TrajectoryRecord,
    features: &StateFeatureMap,
    max_landmarks: usize,
) -> Result<ItemSubset, TrainError> {
    if record.states.is_empty() {
        return Err(TrainError::EmptyLandmarks);
    }
    let kernel = visited_state_kernel(record, features)?;
    let cap = max_landmarks.min(kernel.size()).max(1);
    Ok(greedy_map(&kernel, cap, false)?)
}

/// Structured trajectory feature: the sum of the landmark state features,
/// renormalized to unit length.
pub fn trajectory_feature(
    landmark_states: &[usize],
    features: &StateFeatureMap,
) -> Result<Array1<f64>, TrainError> {
    if landmark_states.is_empty() {
        return Err(TrainError::EmptyLandmarks);
    }
    let d = features.dim();
    let mut sum = Array1::<f64>::zeros(d);
    for &s in landmark_states {
        let f = features.get(s)?;
        for k in 0..d {
            sum[k] += f[k];
        }
    }
    let norm = sum.dot(&sum).sqrt();
    if norm <= 1e-12 {
        return Err(TrainError::ZeroTrajectoryFeature);
    }
    Ok(sum / norm)
}

/// Single-option coverage `f(τ)`: expected cardinality of the
/// visited-state kernel.
pub fn f_coverage(
    record: &TrajectoryRecord,
    features: &StateFeatureMap,
) -> Result<f64, TrainError> {
    let kernel = visited_state_kernel(record, features)?;
    Ok(expected_cardinality(&kernel)?)
}

/// Kernel over trajectory features (quality 1 each).
pub fn trajectory_kernel(features: &[&Array1<f64>]) -> Result<KernelMatrix, TrainError> {
    if features.is_empty() {
        return Err(TrainError::EmptyBatch);
    }
    let d = features[0].len();
    let mut cols = Array2::zeros((d, features.len()));
    for (i, f) in features.iter().enumerate() {
        for k in 0..d {
            cols[[k, i]] = f[k];
        }
    }
    let b = FeatureMatrix::new(cols, true)?;
    Ok(build_kernel(&QualityVector::uniform(features.len()), &b)?)
}

fn gathered_features<'a>(
    records: &'a [TrajectoryRecord],
) -> Result<Vec<&'a Array1<f64>>, TrainError> {
    records
        .iter()
        .map(|r| r.feature.as_ref().ok_or(TrainError::MissingAnnotation("trajectory feature")))
        .collect()
}

/// Same-option consistency `g`: expected cardinality over the M trajectory
/// features of one (start, option) pair. Lower is more consistent.
pub fn g_consistency(records: &[TrajectoryRecord]) -> Result<f64, TrainError> {
    let features = gathered_features(records)?;
    Ok(expected_cardinality(&trajectory_kernel(&features)?)?)
}

/// Cross-option diversity `h`: expected cardinality over the union of all
/// options' trajectory features at one start state.
pub fn h_diversity(records: &[TrajectoryRecord]) -> Result<f64, TrainError> {
    let features = gathered_features(records)?;
    Ok(expected_cardinality(&trajectory_kernel(&features)?)?)
}

/// Expected cardinality of the feature kernel together with its
/// leave-one-out values: entry `m` is the same quantity with item `m`
/// removed. Expected cardinality is monotone, so each marginal
/// `full − loo[m]` lies in `[0, 1)`.
pub fn expected_cardinality_with_loo(
    features: &[&Array1<f64>],
) -> Result<(f64, Vec<f64>), TrainError> {
    let kernel = trajectory_kernel(features)?;
    let full = expected_cardinality(&kernel)?;
    let n = features.len();
    let mut loo = Vec::with_capacity(n);
    for skip in 0..n {
        if n == 1 {
            loo.push(0.0);
            continue;
        }
        let mut sub = Array2::zeros((n - 1, n - 1));
        let keep: Vec<usize> = (0..n).filter(|&i| i != skip).collect();
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                sub[[a, b]] = kernel.entries()[[i, j]];
            }
        }
        loo.push(expected_cardinality(&KernelMatrix::from_gram(sub))?);
    }
    Ok((full, loo))
}

/// Single-trajectory estimate of the KL to the uniform walk:
/// `Σ_t (log π(a_t|s_t,c) − log(1/4))`. Nonnegative in expectation only.
pub fn kl_to_uniform(record: &TrajectoryRecord, policy: &impl Policy, option: usize) -> f64 {
    record
        .states
        .iter()
        .zip(record.actions.iter())
        .map(|(&s, &a)| policy.action_log_probs(s, option)[a.index()] - UNIFORM_ACTION_LOGPROB)
        .sum()
}

/// State-conditional form of the same KL estimate:
/// `Σ_t Σ_a π(a|s_t,c)(log π(a|s_t,c) − log(1/4))`.
///
/// Equal to [`kl_to_uniform`] in expectation, but nonnegative pathwise,
/// which makes it the right quantity to report.
pub fn state_kl_to_uniform(record: &TrajectoryRecord, policy: &impl Policy, option: usize) -> f64 {
    let mut total = 0.0;
    for t in 0..record.horizon() {
        let lps = policy.action_log_probs(record.states[t], option);
        total += lps
            .iter()
            .map(|&lp| lp.exp() * (lp - UNIFORM_ACTION_LOGPROB))
            .sum::<f64>();
    }
    total
}

/// Entropy of the option choice `H(C|S)` under a uniform distribution over
/// the given start states.
pub fn entropy_prior(policies: &OptionPolicySet, start_states: &[usize]) -> f64 {
    if start_states.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for &s0 in start_states {
        let lp = log_softmax(policies.prior_logits().row(s0).as_slice().unwrap());
        total -= lp.iter().map(|&l| l.exp() * l).sum::<f64>();
    }
    total / start_states.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::{Action, UniformPolicy};
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    /// Feature map with one orthogonal unit feature per state.
    fn orthogonal_features(n: usize) -> StateFeatureMap {
        StateFeatureMap::from_rows(Array2::eye(n))
    }

    fn record_over(states: Vec<usize>, option: usize) -> TrajectoryRecord {
        let t = states.len() - 1;
        TrajectoryRecord {
            option,
            states,
            actions: vec![Action::Up; t],
            log_probs: vec![UNIFORM_ACTION_LOGPROB; t],
            landmarks: None,
            feature: None,
        }
    }

    #[test]
    fn stationary_trajectory_single_landmark() {
        let features = orthogonal_features(3);
        let rec = record_over(vec![1, 1, 1, 1], 0);
        let lm = extract_landmarks(&rec, &features, 10).unwrap();
        assert_eq!(lm.len(), 1);
        assert_eq!(rec.states[lm.indices()[0]], 1);
    }

    #[test]
    fn orthogonal_states_fill_the_cap() {
        let features = orthogonal_features(5);
        let rec = record_over(vec![0, 1, 2, 3, 4], 0);
        let lm = extract_landmarks(&rec, &features, 3).unwrap();
        assert_eq!(lm.len(), 3);
        let rec2 = record_over(vec![0, 1, 2], 0);
        let all = extract_landmarks(&rec2, &features, 10).unwrap();
        assert_eq!(all.len(), 3);
    }

    #[test]
    fn stationary_coverage_closed_form() {
        // T+1 identical unit features: all-ones kernel, eigenvalues
        // {T+1, 0, ...} so f = (T+1)/(T+2).
        let features = orthogonal_features(2);
        let rec = record_over(vec![0; 6], 0);
        let f = f_coverage(&rec, &features).unwrap();
        assert_abs_diff_eq!(f, 6.0 / 7.0, epsilon = 1e-10);
    }

    #[test]
    fn orthogonal_coverage_is_half_count() {
        let features = orthogonal_features(4);
        let rec = record_over(vec![0, 1, 2, 3], 0);
        let f = f_coverage(&rec, &features).unwrap();
        assert_abs_diff_eq!(f, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn trajectory_feature_cases() {
        let features = orthogonal_features(3);
        let single = trajectory_feature(&[1], &features).unwrap();
        assert_abs_diff_eq!(single[1], 1.0, epsilon = 1e-12);

        // Two orthogonal landmarks: the 45-degree bisector, unit norm.
        let pair = trajectory_feature(&[0, 2], &features).unwrap();
        let r = 1.0 / 2.0f64.sqrt();
        assert_abs_diff_eq!(pair[0], r, epsilon = 1e-12);
        assert_abs_diff_eq!(pair[2], r, epsilon = 1e-12);
        assert_abs_diff_eq!(pair.dot(&pair).sqrt(), 1.0, epsilon = 1e-12);

        assert!(matches!(
            trajectory_feature(&[], &features),
            Err(TrainError::EmptyLandmarks)
        ));
    }

    #[test]
    fn zero_sum_trajectory_feature_reported() {
        // Two exactly opposite features cancel.
        let map = StateFeatureMap::from_rows(array![[1.0, 0.0], [-1.0, 0.0]]);
        assert!(matches!(
            trajectory_feature(&[0, 1], &map),
            Err(TrainError::ZeroTrajectoryFeature)
        ));
    }

    fn with_feature(mut rec: TrajectoryRecord, f: Array1<f64>) -> TrajectoryRecord {
        rec.feature = Some(f);
        rec
    }

    #[test]
    fn consistency_closed_forms() {
        let e0 = Array1::from(vec![1.0, 0.0]);
        let e1 = Array1::from(vec![0.0, 1.0]);
        // Two identical trajectories: all-ones 2x2 kernel -> 2/3.
        let recs = vec![
            with_feature(record_over(vec![0, 0], 0), e0.clone()),
            with_feature(record_over(vec![0, 0], 0), e0.clone()),
        ];
        assert_abs_diff_eq!(g_consistency(&recs).unwrap(), 2.0 / 3.0, epsilon = 1e-10);
        // Orthogonal features: identity kernel -> 1.0.
        let recs = vec![
            with_feature(record_over(vec![0, 0], 0), e0.clone()),
            with_feature(record_over(vec![0, 0], 0), e1.clone()),
        ];
        assert_abs_diff_eq!(g_consistency(&recs).unwrap(), 1.0, epsilon = 1e-10);
        // Single trajectory: one eigenvalue 1 -> 1/2.
        let recs = vec![with_feature(record_over(vec![0, 0], 0), e0)];
        assert_abs_diff_eq!(g_consistency(&recs).unwrap(), 0.5, epsilon = 1e-10);
    }

    #[test]
    fn diversity_duplicate_vs_orthogonal_addition() {
        let e0 = Array1::from(vec![1.0, 0.0, 0.0]);
        let e1 = Array1::from(vec![0.0, 1.0, 0.0]);
        let e2 = Array1::from(vec![0.0, 0.0, 1.0]);
        let base = vec![
            with_feature(record_over(vec![0, 0], 0), e0.clone()),
            with_feature(record_over(vec![0, 0], 1), e1.clone()),
        ];
        let h_base = h_diversity(&base).unwrap();
        let mut with_dup = base.clone();
        with_dup.push(with_feature(record_over(vec![0, 0], 2), e0.clone()));
        let mut with_orth = base.clone();
        with_orth.push(with_feature(record_over(vec![0, 0], 2), e2));
        let h_dup = h_diversity(&with_dup).unwrap();
        let h_orth = h_diversity(&with_orth).unwrap();
        assert!(h_dup - h_base < h_orth - h_base);
        // K identical -> K/(K+1); K orthogonal -> K/2.
        let identical: Vec<_> = (0..3)
            .map(|c| with_feature(record_over(vec![0, 0], c), e0.clone()))
            .collect();
        assert_abs_diff_eq!(h_diversity(&identical).unwrap(), 3.0 / 4.0, epsilon = 1e-10);
        let orth = vec![
            with_feature(record_over(vec![0, 0], 0), e0),
            with_feature(record_over(vec![0, 0], 1), e1),
        ];
        assert_abs_diff_eq!(h_diversity(&orth).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn kl_estimates() {
        let rec = record_over(vec![0, 0, 0], 0);
        assert_abs_diff_eq!(kl_to_uniform(&rec, &UniformPolicy, 0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            state_kl_to_uniform(&rec, &UniformPolicy, 0),
            0.0,
            epsilon = 1e-12
        );

        struct Deterministic;
        impl Policy for Deterministic {
            fn action_log_probs(&self, _s: usize, _c: usize) -> [f64; 4] {
                // Nearly deterministic softmax: logits (50, 0, 0, 0).
                let ls = log_softmax(&[50.0, 0.0, 0.0, 0.0]);
                [ls[0], ls[1], ls[2], ls[3]]
            }
        }
        let mut rec = record_over(vec![0; 51], 0);
        rec.actions = vec![Action::Up; 50];
        let kl = kl_to_uniform(&rec, &Deterministic, 0);
        assert_abs_diff_eq!(kl, 50.0 * 4.0f64.ln(), epsilon = 1e-6);
    }

    #[test]
    fn prior_entropy_closed_forms() {
        let set = OptionPolicySet::new(3, 10, 2);
        assert_abs_diff_eq!(entropy_prior(&set, &[0, 1]), 10.0f64.ln(), epsilon = 1e-12);

        let mut det = OptionPolicySet::new(3, 10, 2);
        det.add_to_prior(
            &{
                let mut g = Array2::zeros((3, 10));
                g[[0, 4]] = 1.0;
                g
            },
            500.0,
        );
        assert_abs_diff_eq!(entropy_prior(&det, &[0]), 0.0, epsilon = 1e-9);

        // Two-point prior (1/2, 1/2, 0, ...) -> log 2.
        let mut two = OptionPolicySet::new(3, 10, 2);
        let mut g = Array2::zeros((3, 10));
        g[[0, 0]] = 1.0;
        g[[0, 1]] = 1.0;
        two.add_to_prior(&g, 500.0);
        assert_abs_diff_eq!(entropy_prior(&two, &[0]), 2.0f64.ln(), epsilon = 1e-9);
    }
}

//! Score-function gradient estimation for the prior and intra-option policy.
//!
//! Every iteration collects, per sampled start state, M trajectories for
//! each option. A trajectory's scalar return is
//!
//! `Q_m = P(G_m|τ_m)·log P_φ(c|s0,G_m)/M − (β/M)·Σ_t log π(a_t|s_t,c)
//!        + (α₁/M)·f(τ_m) − α₂·g(τ⃗_(s0,c)) + α₃·h(∪_c' τ⃗_(s0,c'))`
//!
//! and the prior's return composes exactly as
//! `Q^P(c,s0) = −log P(c|s0) + Σ_m Q_m`. Policy gradients attach `Q_m` to
//! the per-step score `∇log π`; prior gradients attach `Q^P` to
//! `∇log P(c|s0)`. Expectation over the option choice is taken exactly by
//! weighting each option's contribution with its prior probability. A
//! per-(s0,c) mean-Q baseline (and its prior-side analogue) is subtracted
//! for variance reduction in production updates; the raw estimator stays
//! available for exactness checks.

use ndarray::{Array1, Array2, Array3};

use crate::dpp::{dpp_log_likelihood, expected_cardinality, greedy_map};
use crate::gridworld::TrajectoryRecord;
use crate::spectral::StateFeatureMap;
use crate::trainer::config::OptionConfig;
use crate::trainer::objectives::{
    expected_cardinality_with_loo, state_kl_to_uniform, trajectory_feature,
    visited_state_kernel, TrainError,
};
use crate::trainer::policies::OptionPolicySet;

/// A trajectory with every objective ingredient precomputed.
#[derive(Debug, Clone)]
pub struct TrajectoryEval {
    pub record: TrajectoryRecord,
    /// `P(G|τ)`: DPP probability of the MAP landmark set; zero when the
    /// log-likelihood underflows.
    pub dpp_weight: f64,
    /// `log P_φ(c|s0, G)` for the trajectory's own option.
    pub decoder_logprob: f64,
    /// Mean landmark feature, the decoder's input alongside the start cell.
    pub decoder_feature: Array1<f64>,
    /// `f(τ)`: expected cardinality of the visited-state kernel.
    pub coverage: f64,
    /// `Σ_t log π(a_t|s_t,c)` under the current policy.
    pub policy_logprob_sum: f64,
}

/// The M evaluated trajectories of one (start, option) pair.
#[derive(Debug, Clone)]
pub struct PairGroup {
    pub option: usize,
    pub evals: Vec<TrajectoryEval>,
    /// `g`: expected cardinality over this pair's trajectory features.
    pub consistency: f64,
    /// `g` with trajectory `m` left out, per `m`.
    pub consistency_loo: Vec<f64>,
    /// `h` over the batch union with trajectory `m` left out, per `m`.
    pub diversity_loo: Vec<f64>,
}

/// Everything collected at one start state in one iteration.
#[derive(Debug, Clone)]
pub struct StartBatch {
    pub start: usize,
    pub groups: Vec<PairGroup>,
    /// `h`: expected cardinality over the union of all options' features.
    pub diversity: f64,
}

/// Per-trajectory return; `m` indexes into the group's evaluations.
pub fn q_policy_m(
    group: &PairGroup,
    m: usize,
    diversity: f64,
    cfg: &OptionConfig,
) -> f64 {
    let eval = &group.evals[m];
    let count = group.evals.len() as f64;
    eval.dpp_weight * eval.decoder_logprob / count
        - cfg.beta / count * eval.policy_logprob_sum
        + cfg.alpha1 / count * eval.coverage
        - cfg.alpha2 * group.consistency
        + cfg.alpha3 * diversity
}

/// Prior-side return: `−log P(c|s0) + Σ_m Q_m`.
pub fn q_prior(prior_logprob: f64, q_policy_sum: f64) -> f64 {
    -prior_logprob + q_policy_sum
}

/// Evaluates one start state's rollouts: landmarks, DPP weights, decoder
/// terms, coverage, consistency and diversity.
///
/// `rollouts[c]` holds the M trajectories collected for option `c`; all of
/// them are annotated in place with landmarks and trajectory features.
pub fn evaluate_start_batch(
    start: usize,
    rollouts: Vec<Vec<TrajectoryRecord>>,
    features: &StateFeatureMap,
    policies: &OptionPolicySet,
    cfg: &OptionConfig,
) -> Result<StartBatch, TrainError> {
    if rollouts.is_empty() || rollouts.iter().any(|g| g.is_empty()) {
        return Err(TrainError::EmptyBatch);
    }
    let mut groups = Vec::with_capacity(rollouts.len());
    for (option, records) in rollouts.into_iter().enumerate() {
        let mut evals = Vec::with_capacity(records.len());
        for mut record in records {
            let kernel = visited_state_kernel(&record, features)?;
            let cap = cfg.landmark_cap.min(kernel.size()).max(1);
            let landmarks = greedy_map(&kernel, cap, false)?;
            let log_lik = dpp_log_likelihood(&kernel, &landmarks)?;
            let coverage = expected_cardinality(&kernel)?;
            record.landmarks = Some(landmarks);
            let landmark_states = record.landmark_states().expect("landmarks just set");
            record.feature = Some(trajectory_feature(&landmark_states, features)?);

            let d = features.dim();
            let mut mean_feature = Array1::<f64>::zeros(d);
            for &s in &landmark_states {
                let f = features.get(s)?;
                for k in 0..d {
                    mean_feature[k] += f[k] / landmark_states.len() as f64;
                }
            }
            let decoder_logprob = policies.decoder_logprob(start, mean_feature.view(), option);
            let policy_logprob_sum: f64 = record
                .states
                .iter()
                .zip(record.actions.iter())
                .map(|(&s, &a)| policies.policy_log_probs(s, option)[a.index()])
                .sum();
            let dpp_weight = if log_lik.is_finite() { log_lik.exp() } else { 0.0 };
            evals.push(TrajectoryEval {
                record,
                dpp_weight,
                decoder_logprob,
                decoder_feature: mean_feature,
                coverage,
                policy_logprob_sum,
            });
        }
        let group_features: Vec<&Array1<f64>> = evals
            .iter()
            .map(|e| e.record.feature.as_ref().expect("feature just set"))
            .collect();
        let (consistency, consistency_loo) = expected_cardinality_with_loo(&group_features)?;
        groups.push(PairGroup { option, evals, consistency, consistency_loo, diversity_loo: Vec::new() });
    }
    let union_features: Vec<&Array1<f64>> = groups
        .iter()
        .flat_map(|g| g.evals.iter().map(|e| e.record.feature.as_ref().expect("feature set")))
        .collect();
    let (diversity, union_loo) = expected_cardinality_with_loo(&union_features)?;
    let mut cursor = 0;
    for group in groups.iter_mut() {
        let m_count = group.evals.len();
        group.diversity_loo = union_loo[cursor..cursor + m_count].to_vec();
        cursor += m_count;
    }
    Ok(StartBatch { start, groups, diversity })
}

/// Raw gradient accumulations for one batch (no learning rate, no
/// averaging across batches).
#[derive(Debug, Clone)]
pub struct EstimatorGradients {
    pub prior: Array2<f64>,
    pub policy: Array3<f64>,
}

/// Score-function gradients of the objective for one start batch.
///
/// With `use_baselines` set, the per-(s0,c) mean-Q baseline is subtracted
/// from policy returns and the prior-probability-weighted mean return from
/// prior returns; both leave the estimator's expectation unchanged.
pub fn estimator_gradients(
    batch: &StartBatch,
    policies: &OptionPolicySet,
    cfg: &OptionConfig,
    use_baselines: bool,
) -> EstimatorGradients {
    let num_states = policies.num_states();
    let num_options = policies.num_options();
    let mut prior_grad = Array2::<f64>::zeros((num_states, num_options));
    let mut policy_grad = Array3::<f64>::zeros((num_options, num_states, 4));

    let prior_lp = policies.prior_log_probs(batch.start);
    let prior_p: Vec<f64> = prior_lp.iter().map(|&l| l.exp()).collect();

    let q_policy: Vec<Vec<f64>> = batch
        .groups
        .iter()
        .map(|g| (0..g.evals.len()).map(|m| q_policy_m(g, m, batch.diversity, cfg)).collect())
        .collect();
    let q_pri: Vec<f64> = batch
        .groups
        .iter()
        .zip(q_policy.iter())
        .map(|(g, qs)| q_prior(prior_lp[g.option], qs.iter().sum()))
        .collect();

    let prior_baseline = if use_baselines {
        batch
            .groups
            .iter()
            .zip(q_pri.iter())
            .map(|(g, &q)| prior_p[g.option] * q)
            .sum()
    } else {
        0.0
    };

    for (gi, group) in batch.groups.iter().enumerate() {
        let c = group.option;
        let weight = prior_p[c];

        // Prior score: ∇ log softmax = e_c − p.
        let coeff = weight * (q_pri[gi] - prior_baseline);
        for c2 in 0..num_options {
            let indicator = if c2 == c { 1.0 } else { 0.0 };
            prior_grad[[batch.start, c2]] += coeff * (indicator - prior_p[c2]);
        }

        // Per-trajectory terms use the group-mean baseline. The group's g
        // and the batch's h are constant across the group, so a plain mean
        // baseline would null their signal entirely; their baselines are
        // the leave-one-out values instead, which turns the advantage into
        // the trajectory's own marginal contribution and stays unbiased
        // (each left-out value is independent of the scored trajectory).
        let m_count = group.evals.len();
        let per_m: Vec<f64> = group
            .evals
            .iter()
            .map(|e| {
                e.dpp_weight * e.decoder_logprob - cfg.beta * e.policy_logprob_sum
                    + cfg.alpha1 * e.coverage
            })
            .collect();
        let per_mean = per_m.iter().sum::<f64>() / m_count as f64;
        for (m, eval) in group.evals.iter().enumerate() {
            let advantage = if use_baselines {
                (per_m[m] - if m_count >= 2 { per_mean } else { 0.0 }) / m_count as f64
                    - cfg.alpha2 * (group.consistency - group.consistency_loo[m])
                    + cfg.alpha3 * (batch.diversity - group.diversity_loo[m])
            } else {
                q_policy[gi][m]
            };
            if advantage == 0.0 {
                continue;
            }
            let record = &eval.record;
            for t in 0..record.horizon() {
                let s = record.states[t];
                let a = record.actions[t].index();
                let lps = policies.policy_log_probs(s, c);
                for a2 in 0..4 {
                    let indicator = if a2 == a { 1.0 } else { 0.0 };
                    policy_grad[[c, s, a2]] += weight * advantage * (indicator - lps[a2].exp());
                }
            }
        }
    }

    EstimatorGradients { prior: prior_grad, policy: policy_grad }
}

/// Scalar summaries of one iteration's batches, reported before the update.
#[derive(Debug, Clone, Copy)]
pub struct IterationStats {
    pub l_ib: f64,
    pub l_dpp1: f64,
    pub l_dpp2: f64,
    pub l_dpp3: f64,
    pub total: f64,
    pub entropy: f64,
    pub kl: f64,
    pub mean_dpp_weight: f64,
}

/// Applies one update to the prior, policy and decoder from the iteration's
/// batches and reports pre-update objective estimates.
pub fn gradient_step(
    batches: &[StartBatch],
    policies: &mut OptionPolicySet,
    cfg: &OptionConfig,
    entropy_states: &[usize],
) -> Result<IterationStats, TrainError> {
    if batches.is_empty() {
        return Err(TrainError::EmptyBatch);
    }
    let scale = 1.0 / batches.len() as f64;
    let mut prior_grad = Array2::<f64>::zeros((policies.num_states(), policies.num_options()));
    let mut policy_grad =
        Array3::<f64>::zeros((policies.num_options(), policies.num_states(), 4));

    let mut decoder_batch: Vec<(usize, Array1<f64>, usize)> = Vec::new();
    let mut sum_dec = 0.0;
    let mut sum_cov = 0.0;
    let mut sum_kl = 0.0;
    let mut sum_weight = 0.0;
    let mut traj_count = 0usize;
    let mut sum_g = 0.0;
    let mut group_count = 0usize;
    let mut sum_h = 0.0;

    for batch in batches {
        let grads = estimator_gradients(batch, policies, cfg, true);
        prior_grad.scaled_add(scale, &grads.prior);
        policy_grad.scaled_add(scale, &grads.policy);

        sum_h += batch.diversity;
        for group in &batch.groups {
            sum_g += group.consistency;
            group_count += 1;
            for eval in &group.evals {
                sum_dec += eval.dpp_weight * eval.decoder_logprob;
                sum_cov += eval.coverage;
                sum_kl += state_kl_to_uniform(&eval.record, policies, group.option);
                sum_weight += eval.dpp_weight;
                traj_count += 1;
                decoder_batch.push((batch.start, eval.decoder_feature.clone(), group.option));
            }
        }
    }

    if prior_grad.iter().any(|v| !v.is_finite()) || policy_grad.iter().any(|v| !v.is_finite()) {
        return Err(TrainError::NonFiniteGradient(
            "prior or policy gradient contains a non-finite entry".into(),
        ));
    }

    policies.add_to_prior(&prior_grad, cfg.lr_prior);
    policies.add_to_policy(&policy_grad, cfg.lr_policy);
    policies.decoder_update(&decoder_batch, cfg.lr_decoder);
    if !policies.all_finite() {
        return Err(TrainError::NonFiniteGradient("parameters left the finite range".into()));
    }

    let n = traj_count as f64;
    let entropy = crate::trainer::objectives::entropy_prior(policies, entropy_states);
    let kl = sum_kl / n;
    let l_dpp1 = sum_cov / n;
    let l_dpp2 = sum_g / group_count as f64;
    let l_dpp3 = sum_h / batches.len() as f64;
    let l_ib = entropy + sum_dec / n - cfg.beta * kl;
    let total = l_ib + cfg.alpha1 * l_dpp1 - cfg.alpha2 * l_dpp2 + cfg.alpha3 * l_dpp3;
    Ok(IterationStats {
        l_ib,
        l_dpp1,
        l_dpp2,
        l_dpp3,
        total,
        entropy,
        kl,
        mean_dpp_weight: sum_weight / n,
    })
}

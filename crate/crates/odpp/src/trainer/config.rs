//! Training configuration.

use serde::{Deserialize, Serialize};

/// Which objective terms participate in training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AblationMode {
    /// Mutual-information objective only.
    Ib,
    /// Mutual information plus the single-option coverage term.
    IbL1,
    /// All objective terms.
    Full,
}

impl AblationMode {
    pub fn name(self) -> &'static str {
        match self {
            AblationMode::Ib => "ib",
            AblationMode::IbL1 => "ib+l1",
            AblationMode::Full => "full",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "ib" => Some(AblationMode::Ib),
            "ib+l1" => Some(AblationMode::IbL1),
            "full" => Some(AblationMode::Full),
            _ => None,
        }
    }
}

/// Hyperparameters of the option-discovery loop.
///
/// Defaults: ten options with horizon 50, five trajectories per
/// (start, option) pair at two start samples per iteration (100 trajectories
/// per iteration), landmark cap 10, feature dimension 30, and objective
/// weights β=1e-3, α₁=1e-4, α₂=1e-2, α₃=1e-2.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptionConfig {
    /// Number of options learned simultaneously.
    pub num_options: usize,
    /// Fixed rollout horizon T.
    pub horizon: usize,
    /// Trajectories per (start, option) pair.
    pub rollouts_per_pair: usize,
    /// Start states sampled per iteration.
    pub starts_per_iter: usize,
    /// Landmark cap S for MAP extraction.
    pub landmark_cap: usize,
    /// Spectral feature dimension D.
    pub feature_dim: usize,
    /// Weight of the KL-to-uniform regularizer.
    pub beta: f64,
    /// Weight of the single-option coverage term.
    pub alpha1: f64,
    /// Weight of the same-option consistency term.
    pub alpha2: f64,
    /// Weight of the cross-option diversity term.
    pub alpha3: f64,
    /// Step size for the prior logits.
    pub lr_prior: f64,
    /// Step size for the intra-option policy logits.
    pub lr_policy: f64,
    /// Step size for the decoder weights.
    pub lr_decoder: f64,
    /// Training iterations.
    pub iterations: usize,
    /// Spectrum re-estimation period in iterations; 0 keeps the initial
    /// spectrum for the whole run.
    pub spectrum_period: usize,
    /// RNG seed.
    pub seed: u64,
}

impl Default for OptionConfig {
    fn default() -> Self {
        Self {
            num_options: 10,
            horizon: 50,
            rollouts_per_pair: 5,
            starts_per_iter: 2,
            landmark_cap: 10,
            feature_dim: 30,
            beta: 1e-3,
            alpha1: 1e-4,
            alpha2: 1e-2,
            alpha3: 1e-2,
            lr_prior: 0.05,
            lr_policy: 2.0,
            lr_decoder: 0.5,
            iterations: 200,
            spectrum_period: 0,
            seed: 0,
        }
    }
}

impl OptionConfig {
    /// Applies an ablation by zeroing the corresponding weights.
    pub fn with_ablation(mut self, mode: AblationMode) -> Self {
        match mode {
            AblationMode::Ib => {
                self.alpha1 = 0.0;
                self.alpha2 = 0.0;
                self.alpha3 = 0.0;
            }
            AblationMode::IbL1 => {
                self.alpha2 = 0.0;
                self.alpha3 = 0.0;
            }
            AblationMode::Full => {}
        }
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.num_options == 0 {
            return Err("num_options must be positive".into());
        }
        if self.horizon == 0 {
            return Err("horizon must be positive".into());
        }
        if self.rollouts_per_pair == 0 {
            return Err("rollouts_per_pair must be at least 1".into());
        }
        if self.starts_per_iter == 0 {
            return Err("starts_per_iter must be at least 1".into());
        }
        if self.landmark_cap == 0 || self.landmark_cap > self.horizon + 1 {
            return Err(format!(
                "landmark_cap must be in [1, horizon+1], got {}",
                self.landmark_cap
            ));
        }
        if self.feature_dim == 0 {
            return Err("feature_dim must be positive".into());
        }
        for (name, w) in [
            ("beta", self.beta),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("alpha3", self.alpha3),
        ] {
            if !(w >= 0.0) {
                return Err(format!("{name} must be nonnegative, got {w}"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        assert!(OptionConfig::default().validate().is_ok());
    }

    #[test]
    fn ablations_zero_the_right_weights() {
        let ib = OptionConfig::default().with_ablation(AblationMode::Ib);
        assert_eq!(ib.alpha1, 0.0);
        assert_eq!(ib.alpha2, 0.0);
        assert_eq!(ib.alpha3, 0.0);
        let l1 = OptionConfig::default().with_ablation(AblationMode::IbL1);
        assert!(l1.alpha1 > 0.0);
        assert_eq!(l1.alpha2, 0.0);
        let full = OptionConfig::default().with_ablation(AblationMode::Full);
        assert!(full.alpha2 > 0.0 && full.alpha3 > 0.0);
    }

    #[test]
    fn validation_catches_bad_fields() {
        let mut cfg = OptionConfig::default();
        cfg.landmark_cap = 100;
        cfg.horizon = 10;
        assert!(cfg.validate().is_err());
        let mut cfg = OptionConfig::default();
        cfg.rollouts_per_pair = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn ablation_names_roundtrip() {
        for mode in [AblationMode::Ib, AblationMode::IbL1, AblationMode::Full] {
            assert_eq!(AblationMode::from_name(mode.name()), Some(mode));
        }
        assert_eq!(AblationMode::from_name("nope"), None);
    }
}

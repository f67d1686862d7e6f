use serde::{Deserialize, Serialize};

use super::spectrum::MIN_HALF_WIDTH;
use crate::error::{LabError, Result};
use crate::model::Coupling;

/// Pass thresholds and finite-size allowances of a localization run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative distance of a fitted rate from `L/2` counted as a match.
    pub rate_rel: f64,
    pub rate_rel_wide: f64,
    /// Interior filter: largest boundary mass within `boundary_layer` sites of either end.
    pub boundary_mass: f64,
    pub boundary_layer: i64,
    pub min_interior: usize,
    /// Required pass fractions for the non-resonant and block-decay checks.
    pub nonres_pass: f64,
    pub r2t_pass: f64,
    /// `c` in the slack factor `e^{c·q_n^{1−ε}}` on the measured inequalities.
    pub slack_c: f64,
    /// Allowance added to the block-decay slope bound.
    pub r2t_slope_slack: f64,
    /// Phase-resonance threshold for the `γ̃` estimate.
    pub gamma: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rate_rel: 0.15,
            rate_rel_wide: 0.25,
            boundary_mass: 1e-10,
            boundary_layer: 20,
            min_interior: 20,
            nonres_pass: 0.9,
            r2t_pass: 0.8,
            slack_c: 0.0,
            r2t_slope_slack: 0.0,
            gamma: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub epsilon: f64,
    pub epsilon0: f64,
    /// Truncation half-width `N`: the interval is `[−N, N]`.
    pub n_half: i64,
    /// Phase of the unimodular coefficient closing the truncation.
    pub boundary_phase: f64,
    pub seed: u64,
    /// Scale index `n` of the resonance analysis; `None` picks the largest `n` with `2q_{n+1} ≤ N/4`.
    pub scale: Option<usize>,
    /// Largest `|t|` of the resonance blocks `R_{2t}`.
    pub max_t: i64,
    /// Envelope window; `None` uses `max(5, q_{n−1})`.
    pub envelope_width: Option<i64>,
    /// Half-width of `γ̃` sampling.
    pub gamma_n_max: u64,
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    /// `ε₀ = (L − β)/200` and `ε = ε₀ / (2(4β + 250))`, so that `(4β + 250)ε < ε₀`.
    pub fn derived(coupling: &Coupling, beta: f64, n_half: i64) -> Result<Self> {
        let epsilon0 = (coupling.l - beta) / 200.0;
        if !(epsilon0 > 0.0) {
            return Err(LabError::DomainError(format!("L − β = {} is not positive", coupling.l - beta)));
        }
        let cfg = Self {
            epsilon: epsilon0 / (2.0 * (4.0 * beta + 250.0)),
            epsilon0,
            n_half,
            boundary_phase: 0.0,
            seed: 0,
            scale: None,
            max_t: 3,
            envelope_width: None,
            gamma_n_max: 1000,
            tolerances: Tolerances::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    /// `(4β + 250)ε < ε₀`.
    pub fn satisfies_choice(&self, beta: f64) -> bool {
        (4.0 * beta + 250.0) * self.epsilon < self.epsilon0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(LabError::DomainError(format!("epsilon {} outside (0,1)", self.epsilon)));
        }
        if !(self.epsilon0 > 0.0 && self.epsilon0.is_finite()) {
            return Err(LabError::DomainError(format!("epsilon0 {} not positive", self.epsilon0)));
        }
        if self.n_half < MIN_HALF_WIDTH {
            return Err(LabError::DomainError(format!("half-width {} < {MIN_HALF_WIDTH}", self.n_half)));
        }
        if self.max_t < 1 {
            return Err(LabError::DomainError(format!("max_t {} < 1", self.max_t)));
        }
        if matches!(self.envelope_width, Some(w) if w < 1) {
            return Err(LabError::DomainError("envelope width must be positive".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| LabError::Serialization(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

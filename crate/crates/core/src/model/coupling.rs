use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Supercritical,
    Critical,
    Subcritical,
}

/// The coupling pair `(λ₁, λ₂)` with its derived constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coupling {
    pub lambda1: f64,
    pub lambda2: f64,
    /// `λ′₁ = √(1 − λ₁²)`
    pub lambda1p: f64,
    /// `λ′₂ = √(1 − λ₂²)`
    pub lambda2p: f64,
    /// `L₊ = ln(λ₂(1 + λ′₁)/2)`
    pub l_plus: f64,
    /// `L₋ = ln(λ₁(1 + λ′₂)/2)`
    pub l_minus: f64,
    /// `L = L₊ − L₋`
    pub l: f64,
    pub regime: Regime,
}

fn complement(x: f64) -> f64 {
    ((1.0 - x) * (1.0 + x)).max(0.0).sqrt()
}

impl Coupling {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self> {
        for (name, v) in [("lambda1", lambda1), ("lambda2", lambda2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(LabError::DomainError(format!("{name} = {v} outside [0, 1]")));
            }
            if v == 0.0 {
                return Err(LabError::DegenerateCoupling(format!(
                    "{name} = 0 makes rho or the cocycle normalization vanish"
                )));
            }
        }
        let lambda1p = complement(lambda1);
        let lambda2p = complement(lambda2);
        let l_plus = (lambda2 * (1.0 + lambda1p) / 2.0).ln();
        let l_minus = (lambda1 * (1.0 + lambda2p) / 2.0).ln();
        let regime = if lambda1 < lambda2 {
            Regime::Supercritical
        } else if lambda1 == lambda2 {
            Regime::Critical
        } else {
            Regime::Subcritical
        };
        let l = if regime == Regime::Critical { 0.0 } else { l_plus - l_minus };
        Ok(Self { lambda1, lambda2, lambda1p, lambda2p, l_plus, l_minus, l, regime })
    }

    /// Lyapunov exponent of the Szegő cocycle on the spectrum, `max(0, L/2)`.
    pub fn lyapunov_closed_form(&self) -> f64 {
        (0.5 * self.l).max(0.0)
    }

    /// Closed form of the per-pair average `∫ ln|ρ_{2n}ρ_{2n+1}| dθ = L₋`.
    pub fn rho_pair_integral(&self) -> f64 {
        self.l_minus
    }
}

pub fn make_coupling(lambda1: f64, lambda2: f64) -> Result<Coupling> {
    Coupling::new(lambda1, lambda2)
}

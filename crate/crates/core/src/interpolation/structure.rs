use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lagrange::{barycentric, barycentric_weights, check_nodes};
use crate::determinant::{dirichlet_det, LogComplex};
use crate::error::{LabError, Result};
use crate::linalg::C64;
use crate::model::VerblunskySequence;
use crate::stats;

/// Largest half-width accepted by [`sine_structure_check`].
pub const MAX_STRUCTURE_HALF_WIDTH: usize = 64;

/// Additive low-discrepancy step for fresh phases.
const FRESH_STEP: f64 = 0.754_877_666_246_692_7;

/// Interpolant of `θ ↦ P_{[1,2n],z}(θ)` as a polynomial in `ξ = sin 2π(θ + (n−1)ω/2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SineStructureFit {
    pub n: usize,
    pub z: C64,
    /// `(n − 1)ω/2`.
    pub shift: f64,
    /// Node phases `θ_j`.
    pub nodes: Vec<f64>,
    /// Chebyshev sine-values `ξ_j`.
    pub node_xi: Vec<f64>,
    /// `(fresh phase, relative log-magnitude residual)`.
    pub predicted_vs_actual: Vec<(f64, f64)>,
    pub max_residual: f64,
    node_values: Vec<C64>,
    log_ref: f64,
    weights: Vec<f64>,
}

fn det_at(seq: &VerblunskySequence, theta: f64, n: usize, z: C64) -> Result<LogComplex> {
    dirichlet_det(&VerblunskySequence { theta, ..*seq }, 1, 2 * n as i64, z)
}

/// `|ln|p| − ln|a|| / max(1, |ln|a||)`.
fn log_residual(pred: LogComplex, actual: LogComplex) -> f64 {
    if pred.is_zero() && actual.is_zero() {
        return 0.0;
    }
    (pred.log_mag - actual.log_mag).abs() / actual.log_mag.abs().max(1.0)
}

impl SineStructureFit {
    pub fn xi_of(&self, theta: f64) -> f64 {
        (TAU * (theta + self.shift)).sin()
    }

    /// Interpolated value at phase `theta`.
    pub fn predict(&self, theta: f64) -> LogComplex {
        let v = barycentric(&self.node_values, &self.node_xi, &self.weights, self.xi_of(theta));
        let l = LogComplex::from_complex(v);
        if l.is_zero() {
            l
        } else {
            LogComplex::new(l.log_mag + self.log_ref, l.phase)
        }
    }

    /// Residual of the prediction at `theta` against a direct determinant.
    pub fn residual_at(&self, seq: &VerblunskySequence, theta: f64) -> Result<f64> {
        Ok(log_residual(self.predict(theta), det_at(seq, theta, self.n, self.z)?))
    }
}

/// Samples `P_{[1,2n],z}` at `n + 1` phases whose sine-values are Chebyshev points,
/// then predicts it at `extra` fresh phases by Lagrange interpolation in `ξ`.
pub fn sine_structure_check(seq: &VerblunskySequence, n: usize, z: C64, extra: usize) -> Result<SineStructureFit> {
    if n == 0 || n > MAX_STRUCTURE_HALF_WIDTH {
        return Err(LabError::DomainError(format!("half-width {n} outside 1..={MAX_STRUCTURE_HALF_WIDTH}")));
    }
    let shift = (n as f64 - 1.0) * seq.omega / 2.0;
    let node_xi: Vec<f64> = (0..=n).map(|j| (PI * (j as f64 + 0.5) / (n as f64 + 1.0)).cos()).collect();
    check_nodes(&node_xi)?;
    let nodes: Vec<f64> = node_xi.iter().map(|x| (x.asin() / TAU - shift).rem_euclid(1.0)).collect();
    let raw = nodes.iter().map(|&th| det_at(seq, th, n, z)).collect::<Result<Vec<_>>>()?;
    let log_ref = raw.iter().map(|v| v.log_mag).fold(f64::NEG_INFINITY, f64::max);
    let log_ref = if log_ref.is_finite() { log_ref } else { 0.0 };
    let node_values: Vec<C64> = raw.iter().map(|v| v.scaled(log_ref)).collect();
    let weights = barycentric_weights(&node_xi);
    let mut fit = SineStructureFit {
        n,
        z,
        shift,
        nodes,
        node_xi,
        predicted_vs_actual: Vec::with_capacity(extra),
        max_residual: 0.0,
        node_values,
        log_ref,
        weights,
    };
    for k in 0..extra {
        let th = (seq.theta + (k as f64 + 1.0) * FRESH_STEP).rem_euclid(1.0);
        let r = fit.residual_at(seq, th)?;
        fit.predicted_vs_actual.push((th, r));
        fit.max_residual = fit.max_residual.max(r);
    }
    Ok(fit)
}

/// Phase average of `(1/2n) ln|P_{[1,2n],z}(θ)|` against its lower bound `L₊/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveLowReport {
    pub empirical: f64,
    pub target: f64,
    pub grid_size: usize,
    pub skipped: usize,
}

impl AveLowReport {
    pub fn holds(&self, epsilon: f64) -> bool {
        self.empirical >= self.target - epsilon
    }
}

pub fn ave_low_check(seq: &VerblunskySequence, n: usize, z: C64, grid_size: usize) -> Result<AveLowReport> {
    if grid_size < 256 {
        return Err(LabError::DomainError("grid_size must be at least 256".into()));
    }
    if n < 1 {
        return Err(LabError::DomainError("n must be positive".into()));
    }
    let vals: Vec<Option<f64>> = (0..grid_size)
        .into_par_iter()
        .map(|j| {
            let th = seq.theta + j as f64 / grid_size as f64;
            det_at(seq, th, n, z).ok().filter(|p| p.log_mag.is_finite()).map(|p| p.log_mag / (2 * n) as f64)
        })
        .collect();
    let kept: Vec<f64> = vals.iter().flatten().copied().collect();
    Ok(AveLowReport {
        empirical: stats::mean(&kept),
        target: seq.coupling.l_plus / 2.0,
        grid_size,
        skipped: grid_size - kept.len(),
    })
}

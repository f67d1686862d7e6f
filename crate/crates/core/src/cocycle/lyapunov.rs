use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::transfer::{SpectralPoint, TransferProduct, RHO_FLOOR};
use crate::error::{LabError, Result};
use crate::linalg::C64;
use crate::model::VerblunskySequence;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LyapunovMethod {
    OrbitAverage,
    PhaseAverage,
}

/// One phase sample `(1/k) ln‖S_k(θ, z)‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSample {
    pub eta: f64,
    pub theta: f64,
    pub k: usize,
    pub log_norm_over_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovEstimate {
    pub value: f64,
    pub stderr: f64,
    pub orbit_length: usize,
    pub phase_samples: usize,
    pub skipped: usize,
    pub method: LyapunovMethod,
    /// `max(0, L/2)` for the coupling of the sequence.
    pub closed_form: f64,
    pub samples: Vec<LyapunovSample>,
}

/// The JSON summary `{value, stderr, method, closed_form, abs_error}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSummary {
    pub value: f64,
    pub stderr: f64,
    pub method: LyapunovMethod,
    pub closed_form: f64,
    pub abs_error: f64,
}

impl LyapunovEstimate {
    pub fn summary(&self) -> LyapunovSummary {
        LyapunovSummary {
            value: self.value,
            stderr: self.stderr,
            method: self.method,
            closed_form: self.closed_form,
            abs_error: (self.value - self.closed_form).abs(),
        }
    }
}

pub fn write_samples_csv<W: Write>(samples: &[LyapunovSample], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for s in samples {
        wr.serialize(s).map_err(|e| LabError::Serialization(e.to_string()))?;
    }
    wr.flush().map_err(|e| LabError::Serialization(e.to_string()))
}

/// `(α_n, 1/|ρ_n|)` along `n = 0..k`, or the first singular index.
pub(crate) fn orbit_coefficients(seq: &VerblunskySequence, k: usize) -> std::result::Result<Vec<(C64, f64)>, i64> {
    (0..k as i64)
        .map(|n| {
            let (a, r) = seq.coefficient(n);
            let m = r.norm();
            if m < RHO_FLOOR {
                Err(n)
            } else {
                Ok((a, 1.0 / m))
            }
        })
        .collect()
}

pub(crate) fn log_norm_along(coeffs: &[(C64, f64)], z: C64) -> f64 {
    let mut p = TransferProduct::identity();
    for &(a, inv) in coeffs {
        p.push(a, inv, z);
    }
    p.log_norm()
}

/// Phase samples used for averages: `θ + j/P`, `j = 0..P`.
fn phase_grid(seq: &VerblunskySequence, phase_samples: usize) -> Vec<f64> {
    (0..phase_samples).map(|j| seq.theta + j as f64 / phase_samples as f64).collect()
}

/// Phase-averaged Lyapunov estimates at several spectral points sharing the orbits.
pub fn lyapunov_estimates(
    seq: &VerblunskySequence,
    points: &[SpectralPoint],
    orbit_length: usize,
    phase_samples: usize,
) -> Result<Vec<LyapunovEstimate>> {
    if orbit_length < 1000 {
        return Err(LabError::DomainError("orbit_length must be at least 1000".into()));
    }
    if phase_samples == 0 {
        return Err(LabError::DomainError("phase_samples must be positive".into()));
    }
    let thetas = phase_grid(seq, phase_samples);
    // per phase: per point log-norms, or None if the orbit hits a singular rho
    let rows: Vec<Option<Vec<f64>>> = thetas
        .par_iter()
        .map(|&th| {
            let s = VerblunskySequence { theta: th, ..*seq };
            orbit_coefficients(&s, orbit_length)
                .ok()
                .map(|c| points.iter().map(|p| log_norm_along(&c, p.z) / orbit_length as f64).collect())
        })
        .collect();
    let skipped = rows.iter().filter(|r| r.is_none()).count();
    if skipped as f64 > 0.001 * phase_samples as f64 {
        return Err(LabError::TooManySingular { skipped, total: phase_samples });
    }
    let method = if phase_samples == 1 { LyapunovMethod::OrbitAverage } else { LyapunovMethod::PhaseAverage };
    let closed_form = seq.coupling.lyapunov_closed_form();
    Ok(points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let samples: Vec<LyapunovSample> = thetas
                .iter()
                .zip(&rows)
                .filter_map(|(&th, r)| {
                    r.as_ref().map(|v| LyapunovSample { eta: p.eta, theta: th, k: orbit_length, log_norm_over_k: v[i] })
                })
                .collect();
            let vals: Vec<f64> = samples.iter().map(|s| s.log_norm_over_k).collect();
            LyapunovEstimate {
                value: stats::mean(&vals),
                stderr: stats::std_error(&vals),
                orbit_length,
                phase_samples,
                skipped,
                method,
                closed_form,
                samples,
            }
        })
        .collect())
}

pub fn lyapunov_estimate(
    seq: &VerblunskySequence,
    z: &SpectralPoint,
    orbit_length: usize,
    phase_samples: usize,
) -> Result<LyapunovEstimate> {
    Ok(lyapunov_estimates(seq, std::slice::from_ref(z), orbit_length, phase_samples)?.remove(0))
}

/// Per-pair Birkhoff average of `ln|ρ_j|` over `[a, b]` with its closed-form limit `L₋`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoProductReport {
    pub empirical: f64,
    pub target: f64,
    pub pairs: usize,
}

pub fn check_rho_product(seq: &VerblunskySequence, a: i64, b: i64) -> Result<RhoProductReport> {
    if b <= a || (b - a + 1) % 2 != 0 {
        return Err(LabError::DomainError(format!("[{a}, {b}] must contain a positive even number of indices")));
    }
    let logs = (a..=b)
        .map(|j| {
            let r = seq.rho_abs(j);
            if r < RHO_FLOOR {
                Err(LabError::NearSingularRho { index: j, modulus: r })
            } else {
                Ok(r.ln())
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let pairs = logs.len() / 2;
    Ok(RhoProductReport {
        empirical: stats::pairwise_sum(&logs) / pairs as f64,
        target: seq.coupling.rho_pair_integral(),
        pairs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperBoundReport {
    pub holds: bool,
    pub k: usize,
    pub max_log_norm: f64,
    pub argmax_theta: f64,
    /// `k·(L_est + ε)`.
    pub log_bound: f64,
}

/// Grid points used for uniform-in-θ checks: 512 equispaced plus 64 seeded random.
pub fn sup_grid() -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0512);
    let mut g: Vec<f64> = (0..512).map(|j| j as f64 / 512.0).collect();
    g.extend((0..64).map(|_| rng.gen::<f64>()));
    g
}

/// Checks `max_θ ln‖S_k(θ, z)‖ ≤ k(L_est + ε)` on [`sup_grid`].
pub fn upper_bound_check(seq: &VerblunskySequence, z: &SpectralPoint, k: usize, epsilon: f64) -> Result<UpperBoundReport> {
    if k == 0 {
        return Err(LabError::DomainError("k must be positive".into()));
    }
    let grid = sup_grid();
    let vals: Vec<Option<f64>> = grid
        .par_iter()
        .map(|&th| {
            let s = VerblunskySequence { theta: th, ..*seq };
            orbit_coefficients(&s, k).ok().map(|c| log_norm_along(&c, z.z))
        })
        .collect();
    let (mut best, mut arg) = (f64::NEG_INFINITY, 0.0);
    for (th, v) in grid.iter().zip(&vals) {
        if let Some(v) = v {
            if *v > best {
                best = *v;
                arg = *th;
            }
        }
    }
    let log_bound = k as f64 * (seq.coupling.lyapunov_closed_form() + epsilon);
    Ok(UpperBoundReport { holds: best <= log_bound, k, max_log_norm: best, argmax_theta: arg, log_bound })
}

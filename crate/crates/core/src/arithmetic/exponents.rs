//! Finite-depth surrogates for β(ω) and γ̃(ω,θ), and the strong/weak scale dichotomy.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::continued_fraction::Frequency;
use super::precise::ln_big;
use super::torus_norm;
use crate::error::{LabError, Result};

/// `ln(q_{n+1})/q_n` per scale with tail suprema.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaEstimate {
    pub values: Vec<f64>,
    pub tail_start: usize,
    pub running_sup_tail: f64,
    /// Maximum over the deepest half of the available scales.
    pub deep_half_sup: f64,
    pub depth_used: usize,
}

pub fn beta_estimate(freq: &Frequency, tail_start: usize) -> Result<BetaEstimate> {
    let depth = freq.depth();
    if tail_start >= depth {
        return Err(LabError::DepthExceeded { requested: tail_start, depth });
    }
    let values: Vec<f64> = (0..depth)
        .map(|n| {
            let qn = ln_big(freq.q(n).unwrap()).exp();
            ln_big(freq.q(n + 1).unwrap()) / qn
        })
        .collect();
    let sup = |from: usize| values[from..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(BetaEstimate {
        running_sup_tail: sup(tail_start),
        deep_half_sup: sup(depth / 2),
        tail_start,
        depth_used: depth,
        values,
    })
}

/// Samples of `−ln‖2θ − 1/2 + nω‖/|n|` for `0 < |n| ≤ n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseDiagnostic {
    pub theta: f64,
    pub samples: Vec<(i64, f64)>,
    /// Maximum over `|n| ≥ n_max/2`.
    pub estimate: f64,
    /// Shifts `n` at which `2θ − 1/2 + nω` is an integer to double precision.
    pub exact_resonances: Vec<i64>,
}

impl PhaseDiagnostic {
    pub fn is_resonant(&self, tolerance: f64) -> bool {
        !self.exact_resonances.is_empty() || self.estimate > tolerance
    }
}

/// Top 128 fractional bits of `ω`.
fn omega_u128(freq: &Frequency) -> u128 {
    let w = freq.omega();
    let fb = w.frac_bits() as i64;
    let m: BigInt = if fb >= 128 { w.mantissa() >> (fb - 128) as usize } else { w.mantissa() << (128 - fb) as usize };
    let modulus = BigInt::from(1u8) << 128usize;
    let m = ((m % &modulus) + &modulus) % &modulus;
    m.to_u128().unwrap_or(0)
}

fn u128_fraction(r: u128) -> f64 {
    (r >> 64) as f64 * 2f64.powi(-64) + (r as u64) as f64 * 2f64.powi(-128)
}

pub fn gamma_tilde(freq: &Frequency, theta: f64, n_max: u64) -> Result<PhaseDiagnostic> {
    if n_max < 1 {
        return Err(LabError::DomainError("n_max must be at least 1".into()));
    }
    let step = omega_u128(freq);
    let shift = 2.0 * theta - 0.5;
    let zero_tol = 8.0 * f64::EPSILON * (1.0 + shift.abs());
    let mut samples = Vec::with_capacity(2 * n_max as usize);
    let mut exact = Vec::new();
    let mut r: u128 = 0;
    let mut pos = Vec::with_capacity(n_max as usize);
    let mut neg = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max as i64 {
        r = r.wrapping_add(step);
        for (sign, frac, out) in [(1i64, u128_fraction(r), &mut pos), (-1, u128_fraction(r.wrapping_neg()), &mut neg)] {
            let d = torus_norm(frac + shift);
            let k = sign * n;
            let v = if d <= zero_tol {
                exact.push(k);
                f64::INFINITY
            } else {
                -d.ln() / n as f64
            };
            out.push((k, v));
        }
    }
    neg.reverse();
    samples.extend(neg);
    samples.extend(pos);
    exact.sort_unstable();
    let half = (n_max as i64 + 1) / 2;
    let estimate = samples
        .iter()
        .filter(|(n, _)| n.abs() >= half)
        .map(|&(_, v)| v)
        .fold(0.0, f64::max);
    Ok(PhaseDiagnostic { theta, samples, estimate, exact_resonances: exact })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScaleKind {
    StrongLiouville,
    WeakLiouville,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleClass {
    pub n: usize,
    pub kind: ScaleKind,
    pub epsilon: f64,
    /// `ε·q_n`, the logarithm of the threshold `e^{ε q_n}`.
    pub log_threshold: f64,
    pub ln_q_next: f64,
}

pub fn classify_scale(freq: &Frequency, n: usize, epsilon: f64) -> Result<ScaleClass> {
    if n + 1 > freq.depth() {
        return Err(LabError::DepthExceeded { requested: n + 1, depth: freq.depth() });
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(LabError::DomainError(format!("epsilon {epsilon} outside (0,1)")));
    }
    let qn = ln_big(freq.q(n)?).exp();
    let log_threshold = epsilon * qn;
    let ln_q_next = ln_big(freq.q(n + 1)?);
    let kind = if ln_q_next > log_threshold { ScaleKind::StrongLiouville } else { ScaleKind::WeakLiouville };
    Ok(ScaleClass { n, kind, epsilon, log_threshold, ln_q_next })
}

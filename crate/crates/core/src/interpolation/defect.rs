use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::nonmin::NONMIN_CONSTANT;
use super::windows::{WindowMode, WindowRow, WindowSelection};
use crate::error::{LabError, Result};
use crate::model::VerblunskySequence;

/// Largest node count `|I₀ ∪ I_y|` accepted by [`interpolation_defect`].
pub const MAX_DEFECT_NODES: usize = 10_000;

/// Sine factors below this are treated as exact zeros.
pub const SINE_UNDERFLOW: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefectParams {
    pub epsilon0: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefectBounds {
    /// Upper bound for `Σ₁`.
    pub sum1: f64,
    /// Upper bound for `Σ₁` before `ln q_m` terms are absorbed into `ε`.
    pub sum1_finite: f64,
    /// Lower bounds.
    pub sum21: f64,
    pub sum22: f64,
    pub sum2: f64,
    /// Upper bound for `ln sup |U|`.
    pub ln_sup_u: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectFlags {
    pub sum1: bool,
    pub sum1_finite: bool,
    pub sum21: bool,
    pub sum22: bool,
    pub sum2: bool,
    pub ln_sup_u: bool,
}

impl DefectFlags {
    /// All asymptotic bounds hold (the finite-scale `Σ₁` bound is informative only).
    pub fn all(&self) -> bool {
        self.sum1 && self.sum21 && self.sum22 && self.sum2 && self.ln_sup_u
    }
}

/// `ln|U| = Σ₁ − Σ₂` over a window, with `Σ₂ = (|I|−1)ln 2 + Σ₂₁ + Σ₂₂`.
///
/// `sum1` is the largest value over `x₁` and the phase grid; `sum2`, `sum21`, `sum22` are
/// the smallest over `x₁`. `ln_sup_u` is attained at `worst_x1`, where `worst_sum1` and
/// `worst_sum2` are the two halves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumDecomposition {
    pub mode: WindowMode,
    pub n: usize,
    pub q_n: u64,
    pub m: Option<usize>,
    pub s: Option<u64>,
    pub h: u64,
    pub theta: f64,
    pub epsilon: f64,
    pub params: DefectParams,
    pub node_count: usize,
    pub grid_size: usize,
    pub sum1: f64,
    pub sum2: f64,
    pub sum21: f64,
    pub sum22: f64,
    pub ln_sup_u: f64,
    pub worst_x1: i64,
    pub worst_sum1: f64,
    pub worst_sum2: f64,
    /// `max_{x₁} |Σ₂ − ((|I|−1)ln 2 + Σ₂₁ + Σ₂₂)|`.
    pub identity_err: f64,
    /// Smallest `ε₀` for which the `ln sup |U|` bound would hold.
    pub effective_epsilon0: f64,
    pub bounds: DefectBounds,
    pub satisfied: DefectFlags,
}

impl SumDecomposition {
    pub fn passes(&self) -> bool {
        self.satisfied.all()
    }

    pub fn row(&self) -> WindowRow {
        WindowRow {
            mode: self.mode,
            n: self.n,
            m: self.m,
            s: self.s,
            h: self.h,
            ln_sup_u: self.ln_sup_u,
            bound: self.bounds.ln_sup_u,
            pass: self.passes(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decomposition serializes")
    }
}

/// `ln|sin πx|`, reducing `x` mod 1 first.
fn ln_sin_pi(x: f64) -> f64 {
    (PI * x.rem_euclid(1.0)).sin().abs().ln()
}

/// Node phase `θ_ℓ = θ + ((ℓ−1)/2 + (h/2−1)/2)ω − 1/4`, reduced mod 1.
fn node_phase(theta: f64, omega: f64, ell: i64, h: u64) -> f64 {
    let k = (ell - 1) / 2 + (h as i64 / 2 - 1) / 2;
    (theta + (k as f64 * omega).rem_euclid(1.0) - 0.25).rem_euclid(1.0)
}

fn bounds_for(win: &WindowSelection, p: &DefectParams) -> DefectBounds {
    let eps = win.epsilon;
    let beta = p.beta;
    match win.mode {
        WindowMode::Resonant => {
            let q = win.q_n as f64;
            DefectBounds {
                sum1: 2.0 * q * (-LN_2 + eps),
                sum1_finite: 2.0 * q * LN_2 + 4.0 * (NONMIN_CONSTANT * q.ln() - (q - 1.0) * LN_2),
                sum21: (-2.0 * LN_2 - beta - eps) * q,
                sum22: (-2.0 * LN_2 - 2.0 * eps.powi(3)) * q,
                sum2: (-2.0 * LN_2 - beta - 2.0 * eps) * q,
                ln_sup_u: (beta / 2.0 + p.epsilon0) * 2.0 * q,
            }
        }
        WindowMode::NonResonant | WindowMode::WeakLiouville => {
            let s = win.s.unwrap_or(0) as f64;
            let qm = win.q_m.unwrap_or(1) as f64;
            let big_s = s * qm;
            let (k21, k22, k2) = if win.mode == WindowMode::NonResonant {
                (8.0 * beta + 17.0, 8.0 * beta + 17.0, 16.0 * beta + 35.0)
            } else {
                (8.0 * beta + 600.0, 8.0 * beta + 200.0, 16.0 * beta + 800.0)
            };
            DefectBounds {
                sum1: 4.0 * big_s * (-LN_2 + eps),
                sum1_finite: NONMIN_CONSTANT * s * qm.ln() - 4.0 * big_s * LN_2,
                sum21: -4.0 * big_s * LN_2 - k21 * eps * big_s,
                sum22: -4.0 * big_s * LN_2 - k22 * eps * big_s,
                sum2: -8.0 * big_s * LN_2 - k2 * eps * big_s,
                ln_sup_u: p.epsilon0 * win.h as f64 / 2.0,
            }
        }
    }
}

/// Per-`x₁` pieces of `Σ₂`.
struct Sum2Parts {
    direct: f64,
    s21: f64,
    s22: f64,
}

fn sum2_parts(nodes: &[i64], cos_nodes: &[f64], i: usize, theta: f64, omega: f64, h: u64) -> Result<Sum2Parts> {
    let x1 = nodes[i];
    let (mut direct, mut s21, mut s22) = (0.0, 0.0, 0.0);
    let hh = h as i64 / 2 - 2;
    for (j, &ell) in nodes.iter().enumerate() {
        if j == i {
            continue;
        }
        direct += (cos_nodes[i] - cos_nodes[j]).abs().ln();
        let k = (x1 - ell) / 2;
        let a = (PI * (k as f64 * omega).rem_euclid(1.0)).sin().abs();
        // (x₁+ℓ)/2 is an integer since both are odd
        let kk = (x1 + ell) / 2 + hh;
        let b = (PI * (2.0 * theta - 0.5 + (kk as f64 * omega).rem_euclid(1.0)).rem_euclid(1.0)).sin().abs();
        if a < SINE_UNDERFLOW || b < SINE_UNDERFLOW {
            return Err(LabError::ResonantPhase { x1, ell });
        }
        s21 += a.ln();
        s22 += b.ln();
    }
    Ok(Sum2Parts { direct, s21, s22 })
}

/// `Σ₁(θ̃, x₁) = Σ_{ℓ≠x₁} ln|cos 2πθ̃ − c_ℓ|` for every `x₁`, from the full sum minus one term.
fn sum1_row(node_phases: &[f64], theta_tilde: f64) -> Vec<f64> {
    let f: Vec<f64> = node_phases
        .iter()
        .map(|&t| LN_2 + ln_sin_pi(theta_tilde - t) + ln_sin_pi(theta_tilde + t))
        .collect();
    let neg: Vec<usize> = (0..f.len()).filter(|&i| f[i] == f64::NEG_INFINITY).collect();
    match neg.len() {
        0 => {
            let total: f64 = f.iter().sum();
            f.iter().map(|v| total - v).collect()
        }
        1 => {
            let rest: f64 = f.iter().enumerate().filter(|&(i, _)| i != neg[0]).map(|(_, v)| v).sum();
            (0..f.len()).map(|i| if i == neg[0] { rest } else { f64::NEG_INFINITY }).collect()
        }
        _ => vec![f64::NEG_INFINITY; f.len()],
    }
}

/// Evaluates `ln sup_ξ |U|` for every `x₁ ∈ I₀ ∪ I_y` and compares the pieces of
/// `ln|U| = Σ₁ − Σ₂` with their bounds for the window's mode.
///
/// The phase grid is `θ̃_k = k / (2(G−1))`, so `ξ = cos 2πθ̃` sweeps `[−1, 1]` with both ends.
pub fn interpolation_defect(
    seq: &VerblunskySequence,
    win: &WindowSelection,
    theta: f64,
    xi_grid_size: usize,
    params: &DefectParams,
) -> Result<SumDecomposition> {
    win.verify()?;
    let nodes = win.nodes();
    if nodes.len() > MAX_DEFECT_NODES {
        return Err(LabError::DomainError(format!("{} nodes exceed the limit {MAX_DEFECT_NODES}", nodes.len())));
    }
    if nodes.len() < 2 {
        return Err(LabError::DomainError("fewer than two interpolation nodes".into()));
    }
    if xi_grid_size < 2 {
        return Err(LabError::DomainError(format!("grid size {xi_grid_size} < 2")));
    }
    if win.windows_overlap() {
        let i = win.iy.iter().position(|x| win.i0.contains(x)).unwrap_or(0);
        let j = win.iy.len() + win.i0.iter().position(|x| *x == win.iy[i]).unwrap_or(0);
        return Err(LabError::CollidingNodes { i, j, gap: 0.0 });
    }
    let omega = seq.omega;
    let phases: Vec<f64> = nodes.iter().map(|&l| node_phase(theta, omega, l, win.h)).collect();
    let cosines: Vec<f64> = phases.iter().map(|t| (2.0 * PI * t).cos()).collect();

    let parts: Vec<Sum2Parts> = (0..nodes.len())
        .into_par_iter()
        .map(|i| sum2_parts(&nodes, &cosines, i, theta, omega, win.h))
        .collect::<Result<_>>()?;
    let base = (nodes.len() as f64 - 1.0) * LN_2;
    let identity_err = parts.iter().map(|p| (p.direct - (base + p.s21 + p.s22)).abs()).fold(0.0, f64::max);

    let denom = 2.0 * (xi_grid_size - 1) as f64;
    let rows: Vec<Vec<f64>> = (0..xi_grid_size)
        .into_par_iter()
        .map(|k| sum1_row(&phases, k as f64 / denom))
        .collect();
    let mut sup1 = vec![f64::NEG_INFINITY; nodes.len()];
    for row in &rows {
        for (acc, v) in sup1.iter_mut().zip(row) {
            *acc = acc.max(*v);
        }
    }

    let mut worst = 0;
    for i in 1..nodes.len() {
        if sup1[i] - parts[i].direct > sup1[worst] - parts[worst].direct {
            worst = i;
        }
    }
    let ln_sup_u = sup1[worst] - parts[worst].direct;
    let min_of = |f: &dyn Fn(&Sum2Parts) -> f64| parts.iter().map(f).fold(f64::INFINITY, f64::min);
    let sum1 = sup1.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum2 = min_of(&|p| p.direct);
    let sum21 = min_of(&|p| p.s21);
    let sum22 = min_of(&|p| p.s22);

    let bounds = bounds_for(win, params);
    let satisfied = DefectFlags {
        sum1: sum1 <= bounds.sum1,
        sum1_finite: sum1 <= bounds.sum1_finite,
        sum21: sum21 >= bounds.sum21,
        sum22: sum22 >= bounds.sum22,
        sum2: sum2 >= bounds.sum2,
        ln_sup_u: ln_sup_u <= bounds.ln_sup_u,
    };
    let effective_epsilon0 = match win.mode {
        WindowMode::Resonant => ln_sup_u / (2.0 * win.q_n as f64) - params.beta / 2.0,
        _ => ln_sup_u / (win.h as f64 / 2.0),
    };
    Ok(SumDecomposition {
        mode: win.mode,
        n: win.n,
        q_n: win.q_n,
        m: win.m,
        s: win.s,
        h: win.h,
        theta,
        epsilon: win.epsilon,
        params: *params,
        node_count: nodes.len(),
        grid_size: xi_grid_size,
        sum1,
        sum2,
        sum21,
        sum22,
        ln_sup_u,
        worst_x1: nodes[worst],
        worst_sum1: sup1[worst],
        worst_sum2: parts[worst].direct,
        identity_err,
        effective_epsilon0,
        bounds,
        satisfied,
    })
}

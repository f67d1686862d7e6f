use serde::{Deserialize, Serialize};

use super::spectrum::EigenfunctionProfile;
use crate::arithmetic::Frequency;
use crate::error::{LabError, Result};
use crate::stats::linear_fit;

/// Parameters of the measured decay inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayParams {
    /// Full `L`; the per-site rate is `L/2`.
    pub l: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub epsilon0: f64,
    pub max_t: i64,
    /// Sites at either end excluded from every block and gap.
    pub boundary_layer: i64,
    pub slack_c: f64,
    pub slope_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonResViolation {
    /// Offset from the center.
    pub y: i64,
    pub t: i64,
    pub amplitude: f64,
    pub bound: f64,
}

/// Block amplitudes `r_{2t}` around the center of one eigenfunction and the measured
/// non-resonant and block-decay inequalities.
///
/// Offsets `y` are measured from the center; amplitudes are rescaled so that
/// `|ψ_c|² + |ψ_{c−1}|² = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceProfile {
    pub n: usize,
    pub q_n: u64,
    /// `q_n^{1−ε}`, the half-width of `R_{2t}`.
    pub reach: f64,
    pub center: i64,
    /// `(t, r_{2t})` for the blocks inside the profile, `t` increasing.
    pub blocks: Vec<(i64, f64)>,
    /// `(t, max |ψ_y|)` over the gap between `R_{2(t−1)}` and `R_{2t}`.
    pub gap_maxima: Vec<(i64, f64)>,
    /// `(ln r_{2t} − ln r_{2(t−1)}) / 2q_n` for consecutive blocks.
    pub block_slopes: Vec<(i64, f64)>,
    pub nonres_tested: usize,
    pub violations: Vec<NonResViolation>,
    /// Least-squares slope of `ln r_{2t}` against `|t|q_n` over `1 ≤ |t| ≤ T`; NaN with fewer
    /// than two distinct `|t|`.
    pub r2t_slope: f64,
    /// `−(L − β − 26ε₀) + slack`.
    pub r2t_bound: f64,
    /// `(t, ln r_{2t} − ln r_0 ≤ −(L − β − 26ε₀)|t|q_n + c·q_n^{1−ε})`.
    pub r2t_pointwise: Vec<(i64, bool)>,
    /// Scale factor applied to the ℓ²-normalized amplitudes.
    pub normalization: f64,
}

impl ResonanceProfile {
    pub fn nonres_pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn nonres_passed(&self) -> usize {
        self.nonres_tested - self.violations.len()
    }

    pub fn r2t_pass(&self) -> bool {
        self.r2t_slope <= self.r2t_bound
    }

    pub fn r(&self, t: i64) -> Option<f64> {
        self.blocks.iter().find(|b| b.0 == t).map(|b| b.1)
    }
}

pub fn resonance_profile(
    profile: &EigenfunctionProfile,
    freq: &Frequency,
    n_scale: usize,
    params: &DecayParams,
) -> Result<ResonanceProfile> {
    let q = freq.q_u64(n_scale)?;
    let qi = q as i64;
    let reach = (q as f64).powf(1.0 - params.epsilon);
    let c = profile.center;
    let left = c - profile.a - params.boundary_layer;
    let right = profile.b - c - params.boundary_layer;
    let radius = left.min(right);
    if 2 * qi > radius {
        return Err(LabError::ScaleTooLarge { two_qn: 2 * q, radius });
    }
    let norm = profile.center_pair_norm();
    let amp = |y: i64| profile.amplitude(c + y) / norm;
    let ri = reach.floor() as i64;
    // blocks R_{2t} lying entirely inside [−left, right]
    let inside = |t: i64| 2 * t * qi - ri >= -left && 2 * t * qi + ri <= right;
    let mut blocks = Vec::new();
    for t in -params.max_t..=params.max_t {
        if inside(t) {
            let r = (2 * t * qi - ri..=2 * t * qi + ri).map(amp).fold(0.0, f64::max);
            blocks.push((t, r));
        }
    }
    let r_of = |t: i64| blocks.iter().find(|b: &&(i64, f64)| b.0 == t).map(|b| b.1);

    let rate = params.l / 2.0 - 12.0 * params.epsilon0;
    let slack = params.slack_c * reach;
    let mut gap_maxima = Vec::new();
    let mut block_slopes = Vec::new();
    let mut violations = Vec::new();
    let mut tested = 0;
    for &(t, rt) in &blocks {
        let Some(rp) = r_of(t - 1) else { continue };
        block_slopes.push((t, (rt.ln() - rp.ln()) / (2 * qi) as f64));
        let mut gmax: f64 = 0.0;
        for y in 2 * (t - 1) * qi + 1..2 * t * qi {
            let dist = (y - 2 * (t - 1) * qi).min(2 * t * qi - y) as f64;
            if dist <= reach {
                continue;
            }
            let a = amp(y);
            gmax = gmax.max(a);
            tested += 1;
            let bound = (-rate * (dist - reach) + slack).exp() * rp.max(rt);
            if a > bound {
                violations.push(NonResViolation { y, t, amplitude: a, bound });
            }
        }
        gap_maxima.push((t, gmax));
    }

    let target = params.l - params.beta - 26.0 * params.epsilon0;
    let r0 = r_of(0).unwrap_or(1.0);
    let off_center: Vec<(i64, f64)> = blocks.iter().filter(|b| b.0 != 0).map(|&(t, r)| (t, (r / r0).ln())).collect();
    let (x, ly): (Vec<f64>, Vec<f64>) = off_center.iter().map(|&(t, l)| ((t.abs() * qi) as f64, l)).unzip();
    // the fit needs two distinct |t| in 1..=T
    let r2t_slope = if x.iter().any(|&v| v != x[0]) { linear_fit(&x, &ly).0 } else { f64::NAN };
    let r2t_pointwise = off_center.iter().map(|&(t, l)| (t, l <= -target * (t.abs() * qi) as f64 + slack)).collect();
    Ok(ResonanceProfile {
        n: n_scale,
        q_n: q,
        reach,
        center: c,
        blocks,
        gap_maxima,
        block_slopes,
        nonres_tested: tested,
        violations,
        r2t_slope,
        r2t_bound: -target + params.slope_slack,
        r2t_pointwise,
        normalization: 1.0 / norm,
    })
}

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::dirichlet::{det_polynomial, dirichlet_det, star, PolyCoeffs, MAX_COEFF_DEGREE};
use super::logcomplex::LogComplex;
use crate::cocycle::{transfer_product, SpectralPoint};
use crate::error::{LabError, Result};
use crate::linalg::{C64, ZERO};
use crate::model::VerblunskySequence;
use crate::stats::pairwise_sum;

/// Below this modulus `α_{a−1}` is treated as zero.
pub const ALPHA_FLOOR: f64 = 1e-14;

/// Comparison of the transfer product `S_b⋯S_a` with its determinant form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectionReport {
    pub max_rel_err: f64,
    /// `b − a`.
    pub width: i64,
    /// Discrepancy of the stars computed from coefficient expansions against the
    /// circle identity, relative to the entry scale; only for `b − a + 1 ≤ 64`.
    pub coefficient_star_err: Option<f64>,
    /// `ln|det|` of the transfer side; zero on the unit circle up to cancellation.
    pub lhs_log_abs_det: f64,
}

/// `p*(z) = z^d conj(p(z))` for `|z| = 1`, in log form.
fn circle_star(p: LogComplex, z: &SpectralPoint, d: usize) -> LogComplex {
    LogComplex::new(p.log_mag, d as f64 * TAU * z.eta - p.phase)
}

/// Checks
/// `S_b⋯S_a = (Π_{j=a}^{b}|ρ_j|)^{-1} [[zP₁, X], [zX*, P₁*]]`,
/// `P₁ = P_{[a+1,b]}`, `X = (zP₁ − P_{[a,b]})/α_{a−1}`, with both stars taken at degree `b − a`.
///
/// On the unit circle the stars are evaluated as `z^d conj(p(z))`, which is exact and
/// avoids the conditioning of coefficient extraction; for small degree the coefficient
/// route is run as well and its discrepancy reported.
pub fn szego_connection_check(seq: &VerblunskySequence, a: i64, b: i64, z: &SpectralPoint) -> Result<ConnectionReport> {
    if b <= a {
        return Err(LabError::DomainError(format!("need b > a, got [{a}, {b}]")));
    }
    let alpha = seq.alpha(a - 1);
    if alpha.norm() < ALPHA_FLOOR {
        return Err(LabError::ZeroAlpha { index: a - 1 });
    }
    let lhs = transfer_product(seq, a, b, z)?;
    let logs: Vec<f64> = (a..=b).map(|j| seq.rho_abs(j).ln()).collect();
    let log_rho = pairwise_sum(&logs);
    let log_ref = log_rho + lhs.log_scale();

    let d = (b - a) as usize;
    let zc = LogComplex::from_complex(z.z);
    let p1 = dirichlet_det(seq, a + 1, b, z.z)?;
    let p0 = dirichlet_det(seq, a, b, z.z)?;
    let zp1 = zc * p1;
    // X in scaled form; the subtraction happens at the common reference scale
    let x = (zp1.scaled(log_ref) - p0.scaled(log_ref)) / alpha;
    let x_log = LogComplex::from_complex(x);
    let x_star = circle_star(x_log, z, d).to_complex();
    let p1_star = circle_star(p1, z, d).scaled(log_ref);
    let rhs = [[zp1.scaled(log_ref), x], [z.z * x_star, p1_star]];

    let m = lhs.m.0;
    let scale = m.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    let mut err: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            err = err.max((m[i][j] - rhs[i][j]).norm() / scale);
        }
    }

    let coefficient_star_err = if d + 1 <= MAX_COEFF_DEGREE {
        let (x_c, p1_c) = coefficient_stars(seq, a, b, z.z, alpha)?;
        let inv = (-log_ref).exp();
        let e = (x_c * inv - x_star).norm().max((p1_c * inv - p1_star).norm()) / scale;
        Some(e)
    } else {
        None
    };
    Ok(ConnectionReport { max_rel_err: err, width: b - a, coefficient_star_err, lhs_log_abs_det: lhs.log_abs_det() })
}

/// `(X*(z), P₁*(z))` from the coefficient expansions at degree `b − a`.
fn coefficient_stars(seq: &VerblunskySequence, a: i64, b: i64, z: C64, alpha: C64) -> Result<(C64, C64)> {
    let d = (b - a) as usize;
    let c1 = det_polynomial(seq, a + 1, b)?;
    let c0 = det_polynomial(seq, a, b)?;
    let mut xc = vec![ZERO; d + 2];
    for (j, c) in c1.coeffs.iter().enumerate() {
        xc[j + 1] += c;
    }
    for (j, c) in c0.coeffs.iter().enumerate() {
        xc[j] -= c;
    }
    let xpoly = PolyCoeffs::new(xc.iter().map(|c| c / alpha).collect()).with_degree(d);
    Ok((star(&xpoly).eval(z), star(&c1.with_degree(d)).eval(z)))
}

/// `|det|` of the determinant-side matrix after the `Π|ρ|` scaling; equals `1` on the
/// circle. On `|z| = 1` the determinant is `z^{d+1}(|P₁|² − |X|²)`.
pub fn connection_rhs_det_modulus(seq: &VerblunskySequence, a: i64, b: i64, z: &SpectralPoint) -> Result<f64> {
    if b <= a {
        return Err(LabError::DomainError(format!("need b > a, got [{a}, {b}]")));
    }
    let alpha = seq.alpha(a - 1);
    if alpha.norm() < ALPHA_FLOOR {
        return Err(LabError::ZeroAlpha { index: a - 1 });
    }
    let log_rho: f64 = (a..=b).map(|j| seq.rho_abs(j).ln()).sum();
    let p1 = dirichlet_det(seq, a + 1, b, z.z)?;
    let p0 = dirichlet_det(seq, a, b, z.z)?;
    let zp1 = LogComplex::from_complex(z.z) * p1;
    let x = (zp1.scaled(log_rho) - p0.scaled(log_rho)) / alpha;
    let p1s = p1.scaled(log_rho);
    Ok((p1s.norm_sqr() - x.norm_sqr()).abs())
}

use std::f64::consts::{LN_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg::{Mat2, C64};
use crate::model::VerblunskySequence;

/// Threshold below which `|ρ_n|` is treated as singular.
pub const RHO_FLOOR: f64 = 1e-12;

/// A point `z = e^{2πiη}` of the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub eta: f64,
    pub z: Complex64,
}

impl SpectralPoint {
    pub fn from_eta(eta: f64) -> Self {
        let eta = eta.rem_euclid(1.0);
        Self { eta, z: Complex64::from_polar(1.0, TAU * eta) }
    }

    /// Projects a nonzero complex number radially onto the circle.
    pub fn from_z(z: Complex64) -> Self {
        Self::from_eta(z.arg() / TAU)
    }
}

/// `e^{log_scale}·m`, with `m` kept at unit size by exact power-of-two rescaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferProduct {
    pub m: Mat2,
    /// Binary exponent of the scale: the product is `2^exp2 · m`.
    pub exp2: i64,
    pub steps: usize,
}

/// Binary exponent `e` with `x ∈ [2^e, 2^{e+1})` for positive normal `x`.
fn exponent_of(x: f64) -> i64 {
    ((x.to_bits() >> 52) & 0x7ff) as i64 - 1023
}

impl TransferProduct {
    pub fn identity() -> Self {
        Self { m: Mat2::IDENTITY, exp2: 0, steps: 0 }
    }

    pub fn log_scale(&self) -> f64 {
        self.exp2 as f64 * LN_2
    }

    /// `ln‖product‖₂`.
    pub fn log_norm(&self) -> f64 {
        self.log_scale() + self.m.norm2().ln()
    }

    /// `ln|det product|`.
    pub fn log_abs_det(&self) -> f64 {
        2.0 * self.log_scale() + self.m.det().norm().ln()
    }

    /// The product as a plain matrix, when representable.
    pub fn recombined(&self) -> Mat2 {
        self.m.scale(2f64.powi(self.exp2 as i32))
    }

    pub(crate) fn renormalize(&mut self) {
        let m = &self.m.0;
        let big = m.iter().flatten().map(|x| x.norm_sqr()).fold(0.0, f64::max);
        if big == 0.0 || !big.is_normal() {
            return;
        }
        let e = exponent_of(big).div_euclid(2);
        if e != 0 {
            self.m = self.m.scale(2f64.powi(-e as i32));
            self.exp2 += e;
        }
    }

    /// Left-multiplies by `(1/|ρ|)[[z, −ᾱ], [−αz, 1]]`.
    #[inline]
    pub(crate) fn push(&mut self, alpha: C64, inv_rho: f64, z: C64) {
        let [r0, r1] = self.m.0;
        let az = alpha * z;
        let ac = alpha.conj();
        let n0 = [(z * r0[0] - ac * r1[0]) * inv_rho, (z * r0[1] - ac * r1[1]) * inv_rho];
        let n1 = [(r1[0] - az * r0[0]) * inv_rho, (r1[1] - az * r0[1]) * inv_rho];
        self.m = Mat2([n0, n1]);
        self.steps += 1;
        self.renormalize();
    }

    /// `self` followed by `later`: returns `later · self`.
    pub fn then(&self, later: &TransferProduct) -> TransferProduct {
        let mut out = TransferProduct { m: later.m * self.m, exp2: self.exp2 + later.exp2, steps: self.steps + later.steps };
        out.renormalize();
        out
    }
}

fn checked_coefficient(seq: &VerblunskySequence, n: i64) -> Result<(C64, f64)> {
    let (alpha, rho) = seq.coefficient(n);
    let r = rho.norm();
    if r < RHO_FLOOR {
        return Err(LabError::NearSingularRho { index: n, modulus: r });
    }
    Ok((alpha, 1.0 / r))
}

/// `S_{n,z} = (1/|ρ_n|)[[z, −ᾱ_n], [−α_n z, 1]]`.
pub fn szego_matrix(seq: &VerblunskySequence, n: i64, z: &SpectralPoint) -> Result<Mat2> {
    let (alpha, inv) = checked_coefficient(seq, n)?;
    Ok(Mat2::new(z.z * inv, -alpha.conj() * inv, -alpha * z.z * inv, C64::new(inv, 0.0)))
}

/// `S_{b,z} ⋯ S_{a,z}` (empty product for `b < a`).
pub fn transfer_product(seq: &VerblunskySequence, a: i64, b: i64, z: &SpectralPoint) -> Result<TransferProduct> {
    let mut p = TransferProduct::identity();
    for n in a..=b {
        let (alpha, inv) = checked_coefficient(seq, n)?;
        p.push(alpha, inv, z.z);
    }
    Ok(p)
}

/// `S_k(θ + theta_offset, z) = S_{k−1,z} ⋯ S_{0,z}`: `k` consecutive Szegő matrices
/// starting at index 0 of the sequence with shifted phase.
pub fn cocycle_product(seq: &VerblunskySequence, theta_offset: f64, z: &SpectralPoint, k: usize) -> Result<TransferProduct> {
    if k == 0 {
        return Err(LabError::DomainError("cocycle product needs k >= 1".into()));
    }
    transfer_product(&seq.shifted(theta_offset), 0, k as i64 - 1, z)
}

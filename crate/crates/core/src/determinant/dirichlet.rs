use std::f64::consts::TAU;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::logcomplex::LogComplex;
use crate::error::{LabError, Result};
use crate::linalg::{BandLu, BandMatrix, C64, ZERO};
use crate::model::{dirichlet_band, VerblunskySequence};

/// `det(shift − A)` by banded elimination, accumulated in the log domain.
pub fn shifted_det(a: &BandMatrix, shift: C64) -> LogComplex {
    if a.dim() == 0 {
        return LogComplex::ONE;
    }
    let (lm, ph) = BandLu::factor(&a.shifted_negative(shift)).log_det();
    if lm == f64::NEG_INFINITY {
        LogComplex::ZERO
    } else {
        LogComplex::new(lm, ph)
    }
}

/// `P_{[a,b],z} = det(z − W|_{[a,b]})`; the empty interval `a = b + 1` gives 1.
pub fn dirichlet_det(seq: &VerblunskySequence, a: i64, b: i64, z: C64) -> Result<LogComplex> {
    if a > b + 1 {
        return Err(LabError::DomainError(format!("interval [{a}, {b}] is not a valid (possibly empty) range")));
    }
    if a == b + 1 {
        return Ok(LogComplex::ONE);
    }
    Ok(shifted_det(&dirichlet_band(seq, a, b), z))
}

/// Largest degree for which coefficients are extracted.
pub const MAX_COEFF_DEGREE: usize = 64;

/// Coefficients `p_0..p_d` of a polynomial in `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyCoeffs {
    pub coeffs: Vec<C64>,
}

impl PolyCoeffs {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    /// Nominal degree `d = len − 1`.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    /// Drops trailing coefficients with modulus at most `tol` (keeps at least one).
    pub fn trimmed(&self, tol: f64) -> PolyCoeffs {
        let mut c = self.coeffs.clone();
        while c.len() > 1 && c.last().unwrap().norm() <= tol {
            c.pop();
        }
        PolyCoeffs::new(c)
    }

    /// Pads with zeros or drops high coefficients to nominal degree `d`.
    pub fn with_degree(&self, d: usize) -> PolyCoeffs {
        let mut c = self.coeffs.clone();
        c.resize(d + 1, ZERO);
        PolyCoeffs::new(c)
    }
}

/// `p*(z) = z^d conj(p(1/z̄))`: reverse and conjugate the coefficients.
pub fn star(p: &PolyCoeffs) -> PolyCoeffs {
    PolyCoeffs::new(p.coeffs.iter().rev().map(|c| c.conj()).collect())
}

/// Coefficients of `z ↦ P_{[a,b],z}` from its values at the `d+1` roots of unity.
pub fn det_polynomial(seq: &VerblunskySequence, a: i64, b: i64) -> Result<PolyCoeffs> {
    let d = (b - a + 1).max(0) as usize;
    if d > MAX_COEFF_DEGREE {
        return Err(LabError::DomainError(format!("degree {d} exceeds coefficient limit {MAX_COEFF_DEGREE}")));
    }
    let band = dirichlet_band(seq, a, b);
    let m = d + 1;
    let values: Vec<C64> = (0..m)
        .map(|k| shifted_det(&band, C64::from_polar(1.0, TAU * k as f64 / m as f64)).to_complex())
        .collect();
    let coeffs = (0..m)
        .map(|j| {
            values
                .iter()
                .enumerate()
                .map(|(k, v)| v * C64::from_polar(1.0, -TAU * ((j * k) % m) as f64 / m as f64))
                .sum::<C64>()
                / m as f64
        })
        .collect();
    Ok(PolyCoeffs::new(coeffs))
}

/// One row of a determinant sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeterminantRow {
    pub a: i64,
    pub b: i64,
    pub eta: f64,
    pub theta: f64,
    pub log_mag: f64,
    pub phase: f64,
}

pub fn write_determinant_csv<W: Write>(rows: &[DeterminantRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r).map_err(|e| LabError::Serialization(e.to_string()))?;
    }
    wr.flush().map_err(|e| LabError::Serialization(e.to_string()))
}

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::verblunsky::VerblunskySequence;
use crate::error::{LabError, Result};
use crate::linalg::{BandMatrix, Mat2, C64, ZERO};

/// `Θ(α) = [[ᾱ, ρ], [ρ, −α]]` with `ρ = √(1 − |α|²) ≥ 0`.
pub fn cmv_block(alpha: Complex64) -> Mat2 {
    let rho = C64::new((1.0 - alpha.norm_sqr()).max(0.0).sqrt(), 0.0);
    Mat2::new(alpha.conj(), rho, rho, -alpha)
}

/// Boundary treatment of a finite restriction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Boundary {
    /// Plain cut-off `χ W χ`.
    Dirichlet,
    /// The two cut blocks get the unimodular coefficient `e^{i·phase}`.
    UnitaryClosure { phase: f64 },
}

impl Boundary {
    pub fn closure() -> Self {
        Boundary::UnitaryClosure { phase: 0.0 }
    }
}

/// Restriction of `W = 𝓛𝓜` to the sites `a..=b`, stored as a pentadiagonal band.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteCMV {
    a: i64,
    b: i64,
    boundary: Boundary,
    seq: VerblunskySequence,
    matrix: BandMatrix,
}

/// One factor (`parity` 0 for 𝓛, 1 for 𝓜) restricted to `[a, b]`.
fn restricted_factor(seq: &VerblunskySequence, a: i64, b: i64, parity: i64, boundary: Boundary) -> BandMatrix {
    let n = (b - a + 1) as usize;
    let mut f = BandMatrix::zeros(n, 1, 1);
    let mut j = a - 1;
    if j.rem_euclid(2) != parity {
        j += 1;
    }
    while j <= b {
        let alpha = match boundary {
            Boundary::UnitaryClosure { phase } if j == a - 1 || j == b => Complex64::from_polar(1.0, phase),
            _ => seq.alpha(j),
        };
        let blk = cmv_block(alpha).0;
        for (di, row) in blk.iter().enumerate() {
            for (dj, v) in row.iter().enumerate() {
                let (r, c) = (j + di as i64, j + dj as i64);
                if (a..=b).contains(&r) && (a..=b).contains(&c) {
                    f.set((r - a) as usize, (c - a) as usize, *v);
                }
            }
        }
        j += 2;
    }
    f
}

impl FiniteCMV {
    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn sequence(&self) -> &VerblunskySequence {
        &self.seq
    }

    pub fn matrix(&self) -> &BandMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// The restricted 𝓛 and 𝓜 factors (bandwidth 1 each).
    pub fn factors(&self) -> (BandMatrix, BandMatrix) {
        (
            restricted_factor(&self.seq, self.a, self.b, 0, self.boundary),
            restricted_factor(&self.seq, self.a, self.b, 1, self.boundary),
        )
    }

    /// Coordinate list `row,col,re,im` in global site indices.
    pub fn write_coo<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let ser = |e: csv::Error| LabError::Serialization(e.to_string());
        wr.write_record(["row", "col", "re", "im"]).map_err(ser)?;
        for (i, j, v) in self.matrix.entries() {
            if v == ZERO {
                continue;
            }
            wr.write_record(&[
                (self.a + i as i64).to_string(),
                (self.a + j as i64).to_string(),
                format!("{:e}", v.re),
                format!("{:e}", v.im),
            ])
            .map_err(ser)?;
        }
        wr.flush().map_err(|e| LabError::Serialization(e.to_string()))
    }
}

pub fn build_finite_cmv(seq: &VerblunskySequence, a: i64, b: i64, boundary: Boundary) -> Result<FiniteCMV> {
    if b < a || b - a < 2 {
        return Err(LabError::IntervalTooSmall { a, b, reason: "need b - a >= 2".into() });
    }
    let l = restricted_factor(seq, a, b, 0, boundary);
    let m = restricted_factor(seq, a, b, 1, boundary);
    Ok(FiniteCMV { a, b, boundary, seq: *seq, matrix: l.mul(&m) })
}

/// Dirichlet restriction without the size restriction of [`build_finite_cmv`]; used
/// for determinants of short intervals.
pub(crate) fn dirichlet_band(seq: &VerblunskySequence, a: i64, b: i64) -> BandMatrix {
    let l = restricted_factor(seq, a, b, 0, Boundary::Dirichlet);
    let m = restricted_factor(seq, a, b, 1, Boundary::Dirichlet);
    l.mul(&m)
}

/// A finitely supported sequence on ℤ: `values[i]` sits at site `offset + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSupport {
    pub offset: i64,
    pub values: Vec<C64>,
}

impl FiniteSupport {
    pub fn delta(site: i64) -> Self {
        Self { offset: site, values: vec![C64::new(1.0, 0.0)] }
    }

    pub fn get(&self, site: i64) -> C64 {
        let i = site - self.offset;
        if i < 0 || i >= self.values.len() as i64 {
            ZERO
        } else {
            self.values[i as usize]
        }
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::norm2(&self.values)
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        self.values.iter().filter(|v| **v != ZERO).count()
    }
}

fn apply_factor(seq: &VerblunskySequence, parity: i64, psi: &FiniteSupport) -> FiniteSupport {
    let lo = psi.offset - 1;
    let hi = psi.offset + psi.values.len() as i64;
    let mut out = vec![ZERO; (hi - lo + 1) as usize];
    let mut j = lo - 1;
    if j.rem_euclid(2) != parity {
        j += 1;
    }
    while j <= hi {
        let blk = cmv_block(seq.alpha(j)).0;
        let (x0, x1) = (psi.get(j), psi.get(j + 1));
        for (di, row) in blk.iter().enumerate() {
            let site = j + di as i64;
            if (lo..=hi).contains(&site) {
                out[(site - lo) as usize] += row[0] * x0 + row[1] * x1;
            }
        }
        j += 2;
    }
    FiniteSupport { offset: lo, values: out }
}

/// `Wψ` on the whole line.
pub fn apply_w(seq: &VerblunskySequence, psi: &FiniteSupport) -> FiniteSupport {
    let m = apply_factor(seq, 1, psi);
    apply_factor(seq, 0, &m)
}

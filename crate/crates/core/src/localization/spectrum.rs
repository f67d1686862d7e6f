use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::DecayFit;
use crate::cocycle::SpectralPoint;
use crate::error::{LabError, Result};
use crate::linalg::{dense_eigen, norm2, BandLu, BandMatrix, C64};
use crate::model::{build_finite_cmv, Boundary, VerblunskySequence};

/// Smallest truncation half-width accepted by [`truncation_spectrum`].
pub const MIN_HALF_WIDTH: i64 = 64;

/// Largest tolerated `||z| − 1|` for a truncation eigenvalue.
pub const UNIMODULAR_TOL: f64 = 1e-10;

/// Inverse-iteration sweeps applied to each dense eigenvector.
const REFINE_SWEEPS: usize = 8;

/// Relative offset of the inverse-iteration shift from the eigenvalue.
const SHIFT_OFFSET: f64 = 1e-14;

/// One normalized eigenfunction of a truncation on `[a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenfunctionProfile {
    pub a: i64,
    pub b: i64,
    pub z: C64,
    /// `arg z / 2π` in `[0, 1)`.
    pub eta: f64,
    /// `|ψ_y|` for `y = a..=b`, with `Σ|ψ_y|² = 1`.
    pub amplitudes: Vec<f64>,
    /// Site of the largest amplitude.
    pub center: i64,
    /// Residual `‖Wψ − zψ‖` of the stored vector.
    pub eigen_residual: f64,
    pub fit: Option<DecayFit>,
}

impl EigenfunctionProfile {
    /// Normalizes `amplitudes` and locates the center.
    pub fn from_amplitudes(a: i64, z: C64, amplitudes: Vec<f64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) || amplitudes.len() < 3 {
            return Err(LabError::DomainError(format!("profile of length {} with norm {norm}", amplitudes.len())));
        }
        let amplitudes: Vec<f64> = amplitudes.iter().map(|x| x.abs() / norm).collect();
        let imax = (0..amplitudes.len()).max_by(|&i, &j| amplitudes[i].total_cmp(&amplitudes[j])).unwrap_or(0);
        Ok(Self {
            a,
            b: a + amplitudes.len() as i64 - 1,
            z,
            eta: SpectralPoint::from_z(z).eta,
            center: a + imax as i64,
            amplitudes,
            eigen_residual: 0.0,
            fit: None,
        })
    }

    pub fn amplitude(&self, site: i64) -> f64 {
        if site < self.a || site > self.b {
            0.0
        } else {
            self.amplitudes[(site - self.a) as usize]
        }
    }

    /// `Σ|ψ_y|²` over sites within `layer` of either end.
    pub fn boundary_mass(&self, layer: i64) -> f64 {
        let n = self.amplitudes.len();
        let k = (layer.max(0) as usize).min(n);
        self.amplitudes[..k].iter().chain(&self.amplitudes[n - k..]).map(|x| x * x).sum()
    }

    /// Distance from the center to the nearer end.
    pub fn radius(&self) -> i64 {
        (self.center - self.a).min(self.b - self.center)
    }

    /// Center within `max_center` of the origin and boundary mass below `max_mass`.
    pub fn is_interior(&self, max_center: i64, layer: i64, max_mass: f64) -> bool {
        self.center.abs() <= max_center && self.boundary_mass(layer) < max_mass
    }

    /// `|ψ_c|² + |ψ_{c−1}|²` to the power ½ at the center `c`.
    pub fn center_pair_norm(&self) -> f64 {
        self.amplitude(self.center).hypot(self.amplitude(self.center - 1))
    }
}

fn residual(w: &BandMatrix, z: C64, v: &[C64]) -> f64 {
    let wv = w.matvec(v);
    norm2(&wv.iter().zip(v).map(|(a, b)| a - z * b).collect::<Vec<_>>())
}

/// Inverse iteration at a slightly offset shift; returns the normalized vector.
fn refine(w: &BandMatrix, z: C64, v: &[C64]) -> Vec<C64> {
    let lu = BandLu::factor(&w.shifted_negative(z * (1.0 + SHIFT_OFFSET)));
    let mut x = v.to_vec();
    for _ in 0..REFINE_SWEEPS {
        x = lu.solve(&x);
        let nx = norm2(&x);
        if !(nx.is_finite() && nx > 0.0) {
            return v.to_vec();
        }
        x.iter_mut().for_each(|c| *c /= nx);
    }
    x
}

/// Full eigendecomposition of the truncation to `[−N, N]`.
///
/// Each dense eigenvector is refined by banded inverse iteration, which resolves the
/// exponentially small tails far below the dense solver's noise floor.
pub fn truncation_spectrum(seq: &VerblunskySequence, n_half: i64, boundary: Boundary) -> Result<Vec<EigenfunctionProfile>> {
    if n_half < MIN_HALF_WIDTH {
        return Err(LabError::DomainError(format!("half-width {n_half} < {MIN_HALF_WIDTH}")));
    }
    let cmv = build_finite_cmv(seq, -n_half, n_half, boundary)?;
    let w = cmv.matrix();
    let pairs = dense_eigen(w)?;
    if let Some((z, _)) = pairs.iter().find(|(z, _)| (z.norm() - 1.0).abs() > UNIMODULAR_TOL) {
        return Err(LabError::EigensolverFailure(format!(
            "eigenvalue {z} off the unit circle by {:e} (dimension {})",
            (z.norm() - 1.0).abs(),
            w.dim()
        )));
    }
    pairs
        .par_iter()
        .map(|(z, v)| {
            let x = refine(w, *z, v);
            let mut p = EigenfunctionProfile::from_amplitudes(-n_half, *z, x.iter().map(|c| c.norm()).collect())?;
            p.eigen_residual = residual(w, *z, &x);
            Ok(p)
        })
        .collect()
}

/// Eigenvalues of the truncation to `[−N, N]` nearest to `count` equally spaced points of
/// the circle, found by Rayleigh quotient iteration on the band.
///
/// Distinct targets can converge to the same eigenvalue; duplicates are kept so that the
/// result always has `count` entries in target order.
pub fn banded_spectral_points(
    seq: &VerblunskySequence,
    n_half: i64,
    boundary: Boundary,
    count: usize,
    seed: u64,
) -> Result<Vec<SpectralPoint>> {
    let cmv = build_finite_cmv(seq, -n_half, n_half, boundary)?;
    let w = cmv.matrix();
    let dim = w.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<Vec<C64>> =
        (0..count).map(|_| (0..dim).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()).collect();
    starts
        .par_iter()
        .enumerate()
        .map(|(k, start)| {
            let mut z = C64::from_polar(1.0, std::f64::consts::TAU * (k as f64 + 0.5) / count as f64);
            let mut x = start.clone();
            for _ in 0..40 {
                x = BandLu::factor(&w.shifted_negative(z * (1.0 + SHIFT_OFFSET))).solve(&x);
                let nx = norm2(&x);
                x.iter_mut().for_each(|c| *c /= nx);
                let wx = w.matvec(&x);
                z = x.iter().zip(&wx).map(|(a, b)| a.conj() * b).sum();
                if residual(w, z, &x) < 1e-12 {
                    if (z.norm() - 1.0).abs() > UNIMODULAR_TOL {
                        break;
                    }
                    return Ok(SpectralPoint::from_z(z));
                }
            }
            Err(LabError::EigensolverFailure(format!("Rayleigh iteration for target {k} of {count} did not converge (dimension {dim})")))
        })
        .collect()
}

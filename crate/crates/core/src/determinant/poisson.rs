use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dirichlet::dirichlet_det;
use crate::error::{LabError, Result};
use crate::linalg::{dense_eigen, norm2, C64};
use crate::model::{build_finite_cmv, Boundary, Coupling, VerblunskySequence};

/// Frozen constant of the Poisson inequality, twice the largest ratio observed on the
/// calibration suite (`calibrate_poisson_constant(1000, POISSON_CALIBRATION_SEED)`).
pub const POISSON_CONSTANT: f64 = 2.0;
pub const POISSON_CALIBRATION_SEED: u64 = 0xC0FFEE;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; the inequality holds iff `ratio ≤ 1`.
    pub ratio: f64,
    pub constant: f64,
}

impl PoissonReport {
    pub fn holds(&self) -> bool {
        self.ratio <= 1.0
    }
}

fn log_rho_sum(seq: &VerblunskySequence, from: i64, to: i64) -> f64 {
    (from..=to).map(|j| seq.rho_abs(j).ln()).sum()
}

/// Evaluates both sides of
/// `|Ψ_y| ≤ C Π_{j=a}^{y−1}|ρ_j| |P_{[y+1,b]}|/|P_{[a,b]}| max(|Ψ_{a−1}|,|Ψ_a|)
///        + C Π_{j=y}^{b−1}|ρ_j| |P_{[a,y−1]}|/|P_{[a,b]}| max(|Ψ_b|,|Ψ_{b+1}|)`.
pub fn poisson_check(
    seq: &VerblunskySequence,
    a: i64,
    b: i64,
    y: i64,
    z: C64,
    psi: impl Fn(i64) -> f64,
    constant: f64,
) -> Result<PoissonReport> {
    if !(a <= y && y <= b) {
        return Err(LabError::DomainError(format!("y = {y} outside [{a}, {b}]")));
    }
    let pab = dirichlet_det(seq, a, b, z)?;
    if pab.is_zero() {
        return Err(LabError::SingularDenominator { a, b });
    }
    let right = dirichlet_det(seq, y + 1, b, z)?;
    let left = dirichlet_det(seq, a, y - 1, z)?;
    let t1 = (log_rho_sum(seq, a, y - 1) + right.log_mag - pab.log_mag).exp() * psi(a - 1).max(psi(a));
    let t2 = (log_rho_sum(seq, y, b - 1) + left.log_mag - pab.log_mag).exp() * psi(b).max(psi(b + 1));
    let lhs = psi(y);
    let rhs = constant * (t1 + t2);
    Ok(PoissonReport { lhs, rhs, ratio: lhs / rhs, constant })
}

/// Result of a calibration run of the Poisson constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonCalibration {
    pub instances: usize,
    pub max_ratio: f64,
    /// `2 × max_ratio`.
    pub constant: f64,
}

/// Amplitudes below this are eigensolver noise and carry no information.
pub const AMPLITUDE_FLOOR: f64 = 1e-9;
/// Largest interior residual `‖(z − W)ψ‖` accepted for a generalized eigenfunction.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// One random Poisson instance: the ratio at `C = 1`.
///
/// A random supercritical sequence is closed on `[−n_half, n_half]`; a random
/// eigenvector `ψ` of the closure satisfies `(z − W)ψ = 0` on every row not touching
/// the boundary, so any `[a, b]` with `[a−2, b+2]` inside is admissible. Windows where
/// one of the amplitudes entering the inequality is below [`AMPLITUDE_FLOOR`] are
/// redrawn, as is the eigenvector when no resolved window is found.
pub fn poisson_instance(rng: &mut ChaCha8Rng, n_half: i64, max_width: i64) -> Result<f64> {
    let l1 = rng.gen_range(0.05..0.9);
    let l2 = rng.gen_range(l1 + 0.05..1.0f64.min(l1 + 0.9)).min(0.999);
    let coupling = Coupling::new(l1, l2)?;
    let seq = VerblunskySequence::with_omega(coupling, rng.gen_range(0.05..0.95), rng.gen::<f64>());
    let cmv = build_finite_cmv(&seq, -n_half, n_half, Boundary::closure())?;
    let eig = dense_eigen(cmv.matrix())?;
    for _ in 0..100 {
        let (z, v) = &eig[rng.gen_range(0..eig.len())];
        let z = *z / z.norm();
        debug_assert!((norm2(v) - 1.0).abs() < 1e-10);
        let amp = |site: i64| -> f64 {
            let i = site + n_half;
            if i < 0 || i as usize >= v.len() {
                0.0
            } else {
                v[i as usize].norm()
            }
        };
        for _ in 0..20 {
            let width = rng.gen_range(4..=max_width);
            let a = rng.gen_range(-n_half + 3..=n_half - 3 - width);
            let b = a + width;
            let y = rng.gen_range(a..=b);
            let resolved = [amp(a - 1).max(amp(a)), amp(b).max(amp(b + 1)), amp(y)].iter().all(|&x| x >= AMPLITUDE_FLOOR);
            if !resolved {
                continue;
            }
            let res = interior_residual(&cmv, z, v, a - 2 + n_half, b + 2 + n_half);
            if res > RESIDUAL_TOLERANCE {
                return Err(LabError::EigensolverFailure(format!("interior residual {res:.2e}")));
            }
            return Ok(poisson_check(&seq, a, b, y, z, amp, 1.0)?.ratio);
        }
    }
    Err(LabError::EigensolverFailure("no resolved window found".into()))
}

/// `‖((z − W)ψ)_{lo..=hi}‖` in local indices.
fn interior_residual(cmv: &crate::model::FiniteCMV, z: C64, v: &[C64], lo: i64, hi: i64) -> f64 {
    let wv = cmv.matrix().matvec(v);
    let r: Vec<C64> = (lo..=hi).map(|i| z * v[i as usize] - wv[i as usize]).collect();
    norm2(&r)
}

pub fn calibrate_poisson_constant(instances: usize, seed: u64) -> Result<PoissonCalibration> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio: f64 = 0.0;
    for _ in 0..instances {
        let r = poisson_instance(&mut rng, 30, 20)?;
        if r.is_finite() {
            max_ratio = max_ratio.max(r);
        }
    }
    Ok(PoissonCalibration { instances, max_ratio, constant: 2.0 * max_ratio })
}

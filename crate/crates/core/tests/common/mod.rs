#![allow(dead_code)]

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uamo_core::model::{Coupling, VerblunskySequence};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_seq(rng: &mut ChaCha8Rng) -> VerblunskySequence {
    let l1 = rng.gen_range(0.05..1.0);
    let l2 = rng.gen_range(0.05..1.0);
    let c = Coupling::new(l1, l2).unwrap();
    VerblunskySequence::with_omega(c, rng.gen_range(0.01..0.99), rng.gen::<f64>())
}

pub fn random_supercritical(rng: &mut ChaCha8Rng) -> VerblunskySequence {
    let l1: f64 = rng.gen_range(0.05..0.85);
    let l2 = rng.gen_range(l1 + 0.1..1.0f64).min(0.999);
    let c = Coupling::new(l1, l2).unwrap();
    VerblunskySequence::with_omega(c, rng.gen_range(0.01..0.99), rng.gen::<f64>())
}

/// Coefficients written out from the definition, independently of the crate.
pub fn alpha_ref(seq: &VerblunskySequence, k: i64) -> C64 {
    let c = &seq.coupling;
    if k.rem_euclid(2) == 0 {
        C64::new((1.0 - c.lambda1 * c.lambda1).sqrt(), 0.0)
    } else {
        let n = (k - 1).div_euclid(2);
        let ph = seq.theta + n as f64 * seq.omega;
        C64::new(c.lambda2 * (std::f64::consts::TAU * ph).sin(), 0.0)
    }
}

pub fn dense_zero(n: usize) -> Vec<Vec<C64>> {
    vec![vec![C64::new(0.0, 0.0); n]; n]
}

pub fn dense_mul(a: &[Vec<C64>], b: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let n = a.len();
    let mut c = dense_zero(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

/// Dense 𝓛 (even blocks) or 𝓜 (odd blocks) on the window `[lo, hi]`; exact on rows
/// and columns whose blocks lie inside the window.
pub fn dense_factor(seq: &VerblunskySequence, lo: i64, hi: i64, parity: i64) -> Vec<Vec<C64>> {
    let n = (hi - lo + 1) as usize;
    let mut m = dense_zero(n);
    for j in lo - 1..=hi {
        if j.rem_euclid(2) != parity {
            continue;
        }
        let al = alpha_ref(seq, j);
        let rho = C64::new((1.0 - al.norm_sqr()).sqrt(), 0.0);
        let blk = [[al.conj(), rho], [rho, -al]];
        for di in 0..2 {
            for dj in 0..2 {
                let (r, c) = (j + di, j + dj);
                if r >= lo && r <= hi && c >= lo && c <= hi {
                    m[(r - lo) as usize][(c - lo) as usize] = blk[di as usize][dj as usize];
                }
            }
        }
    }
    m
}

/// `χ_{[a,b]} 𝓛𝓜 χ_{[a,b]}` computed on a wider window.
pub fn dense_restricted_w(seq: &VerblunskySequence, a: i64, b: i64) -> Vec<Vec<C64>> {
    let (lo, hi) = (a - 4, b + 4);
    let w = dense_mul(&dense_factor(seq, lo, hi, 0), &dense_factor(seq, lo, hi, 1));
    let n = (b - a + 1) as usize;
    let mut out = dense_zero(n);
    for i in 0..n {
        for j in 0..n {
            out[i][j] = w[i + 4][j + 4];
        }
    }
    out
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn dense_det(mut a: Vec<Vec<C64>>) -> C64 {
    let n = a.len();
    let mut det = C64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm())).unwrap();
        if a[p][k].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let l = a[i][k] / a[k][k];
            for j in k..n {
                let u = a[k][j];
                a[i][j] -= l * u;
            }
        }
    }
    det
}

/// Naive product `S_b ⋯ S_a` in plain double precision.
pub fn naive_transfer(seq: &VerblunskySequence, a: i64, b: i64, z: C64) -> [[C64; 2]; 2] {
    let mut p = [[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]];
    for k in a..=b {
        let al = alpha_ref(seq, k);
        let r = (1.0 - al.norm_sqr()).sqrt();
        let s = [[z / r, -al.conj() / r], [-al * z / r, C64::new(1.0 / r, 0.0)]];
        let mut q = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                q[i][j] = s[i][0] * p[0][j] + s[i][1] * p[1][j];
            }
        }
        p = q;
    }
    p
}

/// Supercritical coupling with a bounded-type frequency: partial quotients uniform in `1..=5`.
///
/// Frequencies within about 0.02 of `p/q` with small `q` make the degree-40 value
/// interpolation of the determinant ill-conditioned; this family stays away from them.
pub fn random_supercritical_bounded(rng: &mut ChaCha8Rng) -> VerblunskySequence {
    let c = random_supercritical(rng).coupling;
    let qs: Vec<u64> = (0..30).map(|_| rng.gen_range(1..=5)).collect();
    let f = uamo_core::arithmetic::cf_build(&qs).unwrap();
    VerblunskySequence::new(c, &f, rng.gen())
}

//! Small dense and banded complex linear algebra used throughout the crate.

use std::ops::Mul;

use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// A 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let m = self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    /// Spectral norm from the closed-form singular values of a 2×2 matrix.
    pub fn norm2(&self) -> f64 {
        let f2: f64 = self.0.iter().flatten().map(|x| x.norm_sqr()).sum();
        let d = self.det().norm();
        let half = 0.5 * f2;
        let disc = (half * half - d * d).max(0.0).sqrt();
        (half + disc).sqrt()
    }

    pub fn adjoint(&self) -> Mat2 {
        let m = self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, r: Mat2) -> Mat2 {
        let (a, b) = (self.0, r.0);
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }
}

/// Square banded matrix with `kl` sub- and `ku` super-diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<C64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self { n, kl, ku, data: vec![ZERO; n * (kl + ku + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.kl
    }

    pub fn upper(&self) -> usize {
        self.ku
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n || j >= self.n || j + self.kl < i || j > i + self.ku {
            return None;
        }
        Some(i * (self.kl + self.ku + 1) + (j + self.kl - i))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.slot(i, j).map_or(ZERO, |s| self.data[s])
    }

    /// Sets an entry; panics outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        let s = self.slot(i, j).expect("entry outside band");
        self.data[s] = v;
    }

    /// Nonzero-pattern entries `(i, j, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            (lo..=hi).map(move |j| (i, j, self.get(i, j)))
        })
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.n];
        for (i, j, v) in self.entries() {
            y[i] += v * x[j];
        }
        y
    }

    /// `x* A` for a row vector, i.e. `(A^† x)^*`.
    pub fn adjoint_matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.n];
        for (i, j, v) in self.entries() {
            y[j] += v.conj() * x[i];
        }
        y
    }

    pub fn mul(&self, other: &BandMatrix) -> BandMatrix {
        assert_eq!(self.n, other.n);
        let mut out = BandMatrix::zeros(self.n, self.kl + other.kl, self.ku + other.ku);
        for (i, k, a) in self.entries() {
            let lo = k.saturating_sub(other.kl);
            let hi = (k + other.ku).min(self.n - 1);
            for j in lo..=hi {
                let s = out.slot(i, j).unwrap();
                out.data[s] += a * other.get(k, j);
            }
        }
        out
    }

    /// `shift·I − A`.
    pub fn shifted_negative(&self, shift: C64) -> BandMatrix {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v = -*v;
        }
        for i in 0..self.n {
            let s = out.slot(i, i).unwrap();
            out.data[s] += shift;
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let mut d = vec![vec![ZERO; self.n]; self.n];
        for (i, j, v) in self.entries() {
            d[i][j] = v;
        }
        d
    }
}

/// LU factorization of a banded matrix with partial pivoting inside the band.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<C64>,
    pivots: Vec<usize>,
    swaps: usize,
    singular: bool,
}

impl BandLu {
    pub fn factor(a: &BandMatrix) -> Self {
        let (n, kl, ku) = (a.n, a.kl, a.ku);
        let width = 2 * kl + ku + 1;
        let mut data = vec![ZERO; n * width];
        let idx = |i: usize, j: usize| i * width + (j + kl - i);
        for (i, j, v) in a.entries() {
            data[idx(i, j)] = v;
        }
        let mut pivots = Vec::with_capacity(n);
        let mut swaps = 0;
        let mut singular = false;
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let mut p = k;
            let mut best = data[idx(k, k)].norm();
            for i in k + 1..=last_row {
                let v = data[idx(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            pivots.push(p);
            if p != k {
                swaps += 1;
                for j in k..=last_col {
                    data.swap(idx(k, j), idx(p, j));
                }
            }
            let piv = data[idx(k, k)];
            if piv == ZERO {
                singular = true;
                continue;
            }
            for i in k + 1..=last_row {
                let l = data[idx(i, k)] / piv;
                data[idx(i, k)] = l;
                if l == ZERO {
                    continue;
                }
                for j in k + 1..=last_col {
                    let u = data[idx(k, j)];
                    data[idx(i, j)] -= l * u;
                }
            }
        }
        Self { n, kl, ku, width, data, pivots, swaps, singular }
    }

    fn at(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.width + (j + self.kl - i)]
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// `(ln|det|, arg det)` with the argument reduced to `[0, 2π)`; `ln|det| = −∞`
    /// for singular matrices.
    pub fn log_det(&self) -> (f64, f64) {
        if self.singular {
            return (f64::NEG_INFINITY, 0.0);
        }
        let mut log_mag = 0.0;
        let mut phase = if self.swaps % 2 == 1 { std::f64::consts::PI } else { 0.0 };
        for k in 0..self.n {
            let u = self.at(k, k);
            log_mag += u.norm().ln();
            phase += u.arg();
        }
        (log_mag, phase.rem_euclid(std::f64::consts::TAU))
    }

    /// Solves `A x = b`; exact-zero pivots are replaced by a tiny value so that
    /// inverse iteration at an exact eigenvalue still returns the eigenvector.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            for i in k + 1..=(k + self.kl).min(n - 1) {
                x[i] -= self.at(i, k) * xk;
            }
        }
        let tiny = 1e-300;
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..=(k + self.kl + self.ku).min(n - 1) {
                s -= self.at(k, j) * x[j];
            }
            let mut u = self.at(k, k);
            if u == ZERO {
                u = C64::new(tiny, 0.0);
            }
            x[k] = s / u;
        }
        x
    }
}

pub fn norm2(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}


#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_band(n: usize, kl: usize, ku: usize, rng: &mut ChaCha8Rng) -> BandMatrix {
        let mut a = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                a.set(i, j, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
        }
        a
    }

    #[test]
    fn band_lu_matches_dense_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 2, 5, 17, 30] {
            let a = random_band(n, 2, 2, &mut rng);
            let (lm, ph) = BandLu::factor(&a).log_det();
            let d = oracle::dense_det(a.to_dense());
            assert!((lm - d.norm().ln()).abs() < 1e-10);
            let dphase = (ph - d.arg()).rem_euclid(std::f64::consts::TAU);
            assert!(dphase.min(std::f64::consts::TAU - dphase) < 1e-10);
        }
    }

    #[test]
    fn band_lu_solves() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_band(40, 2, 2, &mut rng);
        let x: Vec<C64> = (0..40).map(|i| C64::new(i as f64, 1.0)).collect();
        let b = a.matvec(&x);
        let y = BandLu::factor(&a).solve(&b);
        let err: f64 = x.iter().zip(&y).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        assert!(err < 1e-8);
    }

    #[test]
    fn mat2_norm_matches_power_iteration() {
        let m = Mat2::new(C64::new(1.0, 2.0), C64::new(0.5, 0.0), C64::new(-3.0, 1.0), C64::new(0.0, 0.25));
        let h = m.adjoint() * m;
        let mut v = [ONE, ONE];
        for _ in 0..200 {
            let w = [h.0[0][0] * v[0] + h.0[0][1] * v[1], h.0[1][0] * v[0] + h.0[1][1] * v[1]];
            let s = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
            v = [w[0] / s, w[1] / s];
        }
        let hv = [h.0[0][0] * v[0] + h.0[0][1] * v[1], h.0[1][0] * v[0] + h.0[1][1] * v[1]];
        let lam = (hv[0] * v[0].conj() + hv[1] * v[1].conj()).re;
        assert!((lam.sqrt() - m.norm2()).abs() < 1e-12);
    }

    #[test]
    fn band_product_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_band(12, 1, 1, &mut rng);
        let b = random_band(12, 1, 1, &mut rng);
        let c = a.mul(&b).to_dense();
        let d = oracle::dense_mul(&a.to_dense(), &b.to_dense());
        for i in 0..12 {
            for j in 0..12 {
                assert!((c[i][j] - d[i][j]).norm() < 1e-14);
            }
        }
    }
}

/// Full eigendecomposition of a (small or moderate) banded matrix through a dense
/// solver. Returns `(eigenvalue, unit eigenvector)` pairs in solver order.
pub fn dense_eigen(a: &BandMatrix) -> crate::Result<Vec<(C64, Vec<C64>)>> {
    faer::set_global_parallelism(faer::Par::Seq);
    let n = a.dim();
    let m = faer::Mat::<C64>::from_fn(n, n, |i, j| a.get(i, j));
    let evd = m
        .eigen()
        .map_err(|e| crate::LabError::EigensolverFailure(format!("dense eigensolver failed on {n}x{n}: {e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut v: Vec<C64> = (0..n).map(|i| u[(i, k)]).collect();
        let nv = norm2(&v);
        if !(nv.is_finite() && nv > 0.0) {
            return Err(crate::LabError::EigensolverFailure(format!("degenerate eigenvector {k} (norm {nv})")));
        }
        v.iter_mut().for_each(|x| *x /= nv);
        out.push((s[k], v));
    }
    Ok(out)
}

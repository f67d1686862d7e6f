use std::f64::consts::TAU;

use num_complex::Complex64;

use super::coupling::Coupling;
use crate::arithmetic::Frequency;

/// Verblunsky coefficients `α_{2n} = λ′₁`, `α_{2n+1} = λ₂ sin 2π(θ + nω)` with the
/// companions `ρ_{2n} = λ₁`, `ρ_{2n+1} = λ₂ cos 2π(θ + nω) + iλ′₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerblunskySequence {
    pub coupling: Coupling,
    pub omega: f64,
    pub theta: f64,
}

/// Coin index of a CMV index: both `2n` and `2n+1` belong to coin step `n`.
pub fn coin_index(k: i64) -> i64 {
    k.div_euclid(2)
}

impl VerblunskySequence {
    pub fn new(coupling: Coupling, freq: &Frequency, theta: f64) -> Self {
        Self::with_omega(coupling, freq.omega_f64(), theta)
    }

    pub fn with_omega(coupling: Coupling, omega: f64, theta: f64) -> Self {
        Self { coupling, omega, theta }
    }

    /// The same sequence with phase `θ + dtheta`.
    pub fn shifted(&self, dtheta: f64) -> Self {
        Self { theta: self.theta + dtheta, ..*self }
    }

    /// `θ + nω mod 1`, with `nω` reduced through an error-free product.
    pub fn coin_phase(&self, n: i64) -> f64 {
        let nf = n as f64;
        let hi = nf * self.omega;
        let lo = nf.mul_add(self.omega, -hi);
        let frac = (hi - hi.round()) + lo;
        (self.theta + frac).rem_euclid(1.0)
    }

    /// `(α_k, ρ_k)`.
    pub fn coefficient(&self, k: i64) -> (Complex64, Complex64) {
        let c = &self.coupling;
        if k.rem_euclid(2) == 0 {
            (Complex64::new(c.lambda1p, 0.0), Complex64::new(c.lambda1, 0.0))
        } else {
            let (s, co) = (TAU * self.coin_phase(coin_index(k))).sin_cos();
            (Complex64::new(c.lambda2 * s, 0.0), Complex64::new(c.lambda2 * co, c.lambda2p))
        }
    }

    pub fn alpha(&self, k: i64) -> Complex64 {
        self.coefficient(k).0
    }

    pub fn rho_abs(&self, k: i64) -> f64 {
        self.coefficient(k).1.norm()
    }
}

pub fn verblunsky(seq: &VerblunskySequence, n: i64) -> (Complex64, Complex64) {
    seq.coefficient(n)
}

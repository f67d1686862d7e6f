use std::f64::consts::TAU;
use std::ops::{Div, Mul};

use serde::{Deserialize, Serialize};

use crate::linalg::C64;

/// A complex number `e^{log_mag + i·phase}`; zero is `log_mag = −∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub log_mag: f64,
    pub phase: f64,
}

impl LogComplex {
    pub const ONE: LogComplex = LogComplex { log_mag: 0.0, phase: 0.0 };
    pub const ZERO: LogComplex = LogComplex { log_mag: f64::NEG_INFINITY, phase: 0.0 };

    pub fn new(log_mag: f64, phase: f64) -> Self {
        Self { log_mag, phase: phase.rem_euclid(TAU) }
    }

    pub fn from_complex(z: C64) -> Self {
        if z.norm() == 0.0 {
            return Self::ZERO;
        }
        Self::new(z.norm().ln(), z.arg())
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    /// The value times `e^{−log_ref}` as an ordinary complex number.
    pub fn scaled(&self, log_ref: f64) -> C64 {
        if self.is_zero() {
            return C64::new(0.0, 0.0);
        }
        C64::from_polar((self.log_mag - log_ref).exp(), self.phase)
    }

    pub fn to_complex(&self) -> C64 {
        self.scaled(0.0)
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;
    fn mul(self, r: LogComplex) -> LogComplex {
        LogComplex::new(self.log_mag + r.log_mag, self.phase + r.phase)
    }
}

impl Div for LogComplex {
    type Output = LogComplex;
    fn div(self, r: LogComplex) -> LogComplex {
        LogComplex::new(self.log_mag - r.log_mag, self.phase - r.phase)
    }
}

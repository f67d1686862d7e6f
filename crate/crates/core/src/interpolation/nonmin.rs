use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arithmetic::Frequency;
use crate::error::Result;

/// Frozen constant of the cosine-product estimate: twice the largest `|D|/ln q_n` seen by
/// `calibrate_nonmin_constant` on the golden mean at `q_n ∈ {89, 233, 610, 1597}`.
pub const NONMIN_CONSTANT: f64 = 2.12;
pub const NONMIN_CALIBRATION_SEED: u64 = 0x5EED_C05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosProductDeviation {
    pub q_n: u64,
    /// `Σ_{j≠j₀} ln|cos π(θ + jω)| + (q_n − 1) ln 2`.
    pub deviation: f64,
    pub j0: u64,
    /// `|D|/ln q_n`, zero when `q_n = 1`.
    pub ratio: f64,
}

impl CosProductDeviation {
    pub fn holds(&self, constant: f64) -> bool {
        self.deviation.abs() <= constant * (self.q_n as f64).ln()
    }
}

/// The deviation `D` of the cosine product over one period `0 ≤ j < q_n` from `2^{−(q_n−1)}`,
/// with the smallest factor removed.
pub fn cos_product_deviation(freq: &Frequency, theta: f64, n_scale: usize) -> Result<CosProductDeviation> {
    let q = freq.q_u64(n_scale)?;
    Ok(cos_product_deviation_q(freq.omega_f64(), theta, q))
}

pub(crate) fn cos_product_deviation_q(omega: f64, theta: f64, q: u64) -> CosProductDeviation {
    let logs: Vec<f64> = (0..q)
        .map(|j| {
            let ph = (theta + (j as f64 * omega).fract()).fract();
            (PI * ph).cos().abs().ln()
        })
        .collect();
    let j0 = (0..q as usize).min_by(|&a, &b| logs[a].total_cmp(&logs[b])).unwrap_or(0);
    let s: f64 = logs.iter().enumerate().filter(|&(j, _)| j != j0).map(|(_, v)| v).sum();
    let deviation = s + (q as f64 - 1.0) * std::f64::consts::LN_2;
    let ratio = if q > 1 { deviation.abs() / (q as f64).ln() } else { 0.0 };
    CosProductDeviation { q_n: q, deviation, j0: j0 as u64, ratio }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonminCalibration {
    pub scales: Vec<u64>,
    pub samples_per_scale: usize,
    pub max_ratio: f64,
    /// `2 × max_ratio`.
    pub constant: f64,
}

/// Largest `|D|/ln q_n` over `samples` uniform phases at each listed scale.
pub fn calibrate_nonmin_constant(freq: &Frequency, scales: &[usize], samples: usize, seed: u64) -> Result<NonminCalibration> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = freq.omega_f64();
    let mut max_ratio: f64 = 0.0;
    let mut qs = Vec::with_capacity(scales.len());
    for &n in scales {
        let q = freq.q_u64(n)?;
        qs.push(q);
        for _ in 0..samples {
            max_ratio = max_ratio.max(cos_product_deviation_q(omega, rng.gen(), q).ratio);
        }
    }
    Ok(NonminCalibration { scales: qs, samples_per_scale: samples, max_ratio, constant: 2.0 * max_ratio })
}

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::arithmetic::Frequency;
use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WindowMode {
    NonResonant,
    Resonant,
    WeakLiouville,
}

/// Interpolation windows `I₀`, `I_y` at one site and scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSelection {
    pub mode: WindowMode,
    pub y: i64,
    /// Scale index `n` and its denominators.
    pub n: usize,
    pub q_n: u64,
    pub q_next: u64,
    pub epsilon: f64,
    /// Nearest resonance block: `round(y / 2q_n)`.
    pub t: i64,
    /// `dist(y, 2ℤq_n)`; for the weak mode the site `y` itself.
    pub dist: u64,
    pub m: Option<usize>,
    pub q_m: Option<u64>,
    pub q_m_next: Option<u64>,
    pub s: Option<u64>,
    pub h: u64,
    pub i0: Vec<i64>,
    pub iy: Vec<i64>,
    /// `T_1..T_{4s}`: `T_1..T_{3s}` tile `I_y`, `T_{3s+1}..T_{4s}` tile `I₀`.
    pub blocks: Vec<Vec<i64>>,
    /// `T^{(1)}..T^{(4)}`, each the union of `s` consecutive blocks.
    pub unions: Vec<Vec<i64>>,
    /// `true` unless `y` and the window base (`7sq_m`, or `3q_n` when resonant) are both even;
    /// the odd runs then start one site later than in the even bookkeeping.
    pub parity_shift: bool,
}

/// `q_n^{1−ε}`.
fn reach(q: u64, epsilon: f64) -> f64 {
    (q as f64).powf(1.0 - epsilon)
}

fn first_odd_at_least(x: i64) -> i64 {
    if x.rem_euclid(2) == 1 {
        x
    } else {
        x + 1
    }
}

fn odd_run(start: i64, count: u64) -> Vec<i64> {
    let s = first_odd_at_least(start);
    (0..count as i64).map(|k| s + 2 * k).collect()
}

fn out_of_regime(msg: String) -> LabError {
    LabError::OutOfRegime(msg)
}

/// Largest `m` with `8q_m ≤ d`, together with `q_m`, `q_{m+1}`.
fn ladder(freq: &Frequency, d: u64) -> Result<(usize, u64, u64)> {
    let mut best = None;
    for m in 0..freq.depth() {
        let qm = freq.q_u64(m)?;
        if 8 * qm <= d {
            best = Some((m, qm, freq.q_u64(m + 1)?));
        } else {
            break;
        }
    }
    best.ok_or_else(|| out_of_regime(format!("distance {d} < 8: no scale m with 8q_m ≤ {d}")))
}

pub fn select_windows(freq: &Frequency, y: i64, n_scale: usize, epsilon: f64, mode: WindowMode) -> Result<WindowSelection> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(LabError::DomainError(format!("epsilon {epsilon} outside (0,1)")));
    }
    let q = freq.q_u64(n_scale)?;
    let q_next = freq.q_u64(n_scale + 1)?;
    let two_q = 2 * q as i64;
    let t = (y as f64 / two_q as f64).round() as i64;
    let dist = (y - t * two_q).unsigned_abs();
    let lo = reach(q, epsilon);
    let hi = 10.0 * reach(q_next, epsilon);
    let yf = y as f64;
    let mut sel = WindowSelection {
        mode,
        y,
        n: n_scale,
        q_n: q,
        q_next,
        epsilon,
        t,
        dist,
        m: None,
        q_m: None,
        q_m_next: None,
        s: None,
        h: 0,
        i0: vec![],
        iy: vec![],
        blocks: vec![],
        unions: vec![],
        parity_shift: false,
    };
    match mode {
        WindowMode::Resonant => {
            if dist as f64 > lo {
                return Err(out_of_regime(format!("dist(y, 2ℤq_n) = {dist} > q_n^(1-ε) = {lo:.3}")));
            }
            if t == 0 {
                return Err(out_of_regime(format!("y = {y} lies in the central block t = 0")));
            }
            sel.h = 4 * q - 2;
            let qi = q as i64;
            sel.i0 = odd_run(-3 * qi, q);
            sel.iy = odd_run(y - 3 * qi, q);
            sel.parity_shift = y.rem_euclid(2) == 1 || q % 2 == 1;
        }
        WindowMode::NonResonant | WindowMode::WeakLiouville => {
            let d = if mode == WindowMode::NonResonant {
                if !(yf > lo && yf < hi) {
                    return Err(out_of_regime(format!("y = {y} outside (q_n^(1-ε), 10 q_(n+1)^(1-ε)) = ({lo:.3}, {hi:.3})")));
                }
                if dist as f64 <= lo {
                    return Err(out_of_regime(format!("dist(y, 2ℤq_n) = {dist} ≤ q_n^(1-ε) = {lo:.3}")));
                }
                dist
            } else {
                if !(yf >= lo && yf <= hi) {
                    return Err(out_of_regime(format!("y = {y} outside [q_n^(1-ε), 10 q_(n+1)^(1-ε)] = [{lo:.3}, {hi:.3}]")));
                }
                y as u64
            };
            sel.dist = d;
            let (m, qm, qm1) = ladder(freq, d)?;
            let s = d / (8 * qm);
            let big_s = s * qm;
            sel.m = Some(m);
            sel.q_m = Some(qm);
            sel.q_m_next = Some(qm1);
            sel.s = Some(s);
            sel.h = 8 * big_s - 2;
            let bs = big_s as i64;
            sel.i0 = odd_run(-7 * bs, big_s);
            sel.iy = odd_run(y - 7 * bs + 2, 3 * big_s);
            sel.parity_shift = y.rem_euclid(2) == 1 || big_s % 2 == 1;
            let chunk = qm as usize;
            sel.blocks = sel.iy.chunks(chunk).chain(sel.i0.chunks(chunk)).map(|c| c.to_vec()).collect();
            sel.unions = sel.blocks.chunks(s as usize).map(|c| c.concat()).collect();
        }
    }
    sel.verify()?;
    Ok(sel)
}

impl WindowSelection {
    /// All nodes `I₀ ∪ I_y`, `I_y` first.
    pub fn nodes(&self) -> Vec<i64> {
        self.iy.iter().chain(&self.i0).copied().collect()
    }

    /// `s·q_m` for the non-resonant and weak modes.
    pub fn sq_m(&self) -> Option<u64> {
        Some(self.s? * self.q_m?)
    }

    pub fn windows_overlap(&self) -> bool {
        self.i0.iter().any(|x| self.iy.contains(x))
    }

    /// Re-checks the defining inequalities and set identities from the stored fields.
    pub fn verify(&self) -> Result<()> {
        let fail = |what: &str| Err(out_of_regime(format!("window check failed: {what}")));
        if !self.i0.iter().chain(&self.iy).all(|x| x.rem_euclid(2) == 1) {
            return fail("even node");
        }
        let lo = reach(self.q_n, self.epsilon);
        let d = self.dist as f64;
        match self.mode {
            WindowMode::Resonant => {
                let q = self.q_n as i64;
                if self.h != 4 * self.q_n - 2 {
                    return fail("h = 4q_n − 2");
                }
                if self.i0.len() as u64 != self.q_n || self.iy.len() as u64 != self.q_n {
                    return fail("|I₀| = |I_y| = q_n");
                }
                if !self.i0.iter().all(|&x| (-3 * q..=-q - 1).contains(&x)) {
                    return fail("I₀ ⊂ [−3q_n, −q_n−1]");
                }
                if !self.iy.iter().all(|&x| (self.y - 3 * q..=self.y - q - 1).contains(&x)) {
                    return fail("I_y ⊂ [y−3q_n, y−q_n−1]");
                }
                if d > lo || self.t == 0 {
                    return fail("resonance condition");
                }
            }
            WindowMode::NonResonant | WindowMode::WeakLiouville => {
                let (Some(s), Some(qm), Some(qm1)) = (self.s, self.q_m, self.q_m_next) else {
                    return fail("missing m, s");
                };
                let big_s = s * qm;
                let bs = big_s as i64;
                if s == 0 || self.h != 8 * big_s - 2 {
                    return fail("h = 8sq_m − 2");
                }
                if self.i0.len() as u64 != big_s || self.iy.len() as u64 != 3 * big_s {
                    return fail("|I₀| + |I_y| = 4sq_m");
                }
                if !self.i0.iter().all(|&x| (-7 * bs..=-5 * bs + 1).contains(&x)) {
                    return fail("I₀ ⊂ [−7sq_m, −5sq_m+1]");
                }
                if !self.iy.iter().all(|&x| (self.y - 7 * bs + 2..=self.y - bs + 1).contains(&x)) {
                    return fail("I_y ⊂ [y−7sq_m+2, y−sq_m+1]");
                }
                if self.windows_overlap() {
                    return fail("I₀ ∩ I_y = ∅");
                }
                // max(q_n^{1−ε}, 8sq_m) ≤ d < min(8(s+1)q_m, 8q_{m+1})
                if !(d >= lo && self.dist >= 8 * big_s && self.dist < 8 * (s + 1) * qm && self.dist < 8 * qm1) {
                    return fail("scale inequalities for m, s");
                }
                if self.dist >= 16 * big_s {
                    return fail("dist < 16sq_m");
                }
                if self.blocks.len() as u64 != 4 * s || !self.blocks.iter().all(|b| b.len() as u64 == qm) {
                    return fail("T_j tiling");
                }
                if self.unions.len() != 4 {
                    return fail("four unions T^(w)");
                }
            }
        }
        Ok(())
    }
}

/// One row of the per-window CSV export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRow {
    pub mode: WindowMode,
    pub n: usize,
    pub m: Option<usize>,
    pub s: Option<u64>,
    pub h: u64,
    pub ln_sup_u: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn write_window_csv<W: Write>(rows: &[WindowRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r).map_err(|e| LabError::Serialization(e.to_string()))?;
    }
    wr.flush().map_err(|e| LabError::Serialization(e.to_string()))
}

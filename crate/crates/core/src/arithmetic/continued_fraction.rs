//! Certified continued-fraction expansion and forward construction of frequencies.

use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::precise::{dyadic_to_f64, ln_big, HpReal};
use crate::error::{LabError, Result};

/// Default working precision of frequencies, in fractional bits.
pub const DEFAULT_PRECISION_BITS: u32 = 256;

/// A frequency `ω ∈ (0,1)` with its partial quotients and exact convergents.
///
/// Convergents are indexed from `n = 0` (`p_0/q_0 = 0/1`) to `n = depth`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frequency {
    omega: HpReal,
    quotients: Vec<BigUint>,
    p: Vec<BigUint>,
    q: Vec<BigUint>,
}

fn convergents(quotients: &[BigUint]) -> (Vec<BigUint>, Vec<BigUint>) {
    let mut p = vec![BigUint::zero()];
    let mut q = vec![BigUint::one()];
    let (mut p_prev, mut q_prev) = (BigUint::one(), BigUint::zero());
    for a in quotients {
        let pn = a * p.last().unwrap() + &p_prev;
        let qn = a * q.last().unwrap() + &q_prev;
        p_prev = p.last().unwrap().clone();
        q_prev = q.last().unwrap().clone();
        p.push(pn);
        q.push(qn);
    }
    (p, q)
}

impl Frequency {
    pub fn omega(&self) -> &HpReal {
        &self.omega
    }

    pub fn omega_f64(&self) -> f64 {
        self.omega.to_f64()
    }

    /// Number of stored partial quotients `N`.
    pub fn depth(&self) -> usize {
        self.quotients.len()
    }

    /// Partial quotients `a_1..a_N`.
    pub fn quotients(&self) -> &[BigUint] {
        &self.quotients
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.depth() {
            return Err(LabError::DepthExceeded { requested: n, depth: self.depth() });
        }
        Ok(())
    }

    pub fn p(&self, n: usize) -> Result<&BigUint> {
        self.check(n)?;
        Ok(&self.p[n])
    }

    pub fn q(&self, n: usize) -> Result<&BigUint> {
        self.check(n)?;
        Ok(&self.q[n])
    }

    /// `q_n` as a machine integer; fails if it does not fit.
    pub fn q_u64(&self, n: usize) -> Result<u64> {
        self.q(n)?
            .to_u64()
            .ok_or_else(|| LabError::DomainError(format!("q_{n} does not fit in 64 bits")))
    }

    /// Index of the first scale with `q_n == value`, if any.
    pub fn scale_of(&self, value: u64) -> Option<usize> {
        let v = BigUint::from(value);
        self.q.iter().position(|q| *q == v)
    }

    pub fn to_spec(&self) -> FrequencySpec {
        FrequencySpec {
            quotients: self
                .quotients
                .iter()
                .map(|a| match a.to_u64() {
                    Some(v) => QuotientValue::Small(v),
                    None => QuotientValue::Big(a.to_string()),
                })
                .collect(),
            precision_bits: self.omega.frac_bits(),
        }
    }

    pub fn from_spec(spec: &FrequencySpec) -> Result<Self> {
        let qs = spec
            .quotients
            .iter()
            .map(|v| v.to_biguint())
            .collect::<Result<Vec<_>>>()?;
        cf_build_with_precision(qs, spec.precision_bits)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_spec()).expect("frequency spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: FrequencySpec =
            serde_json::from_str(s).map_err(|e| LabError::Serialization(e.to_string()))?;
        Self::from_spec(&spec)
    }

    /// Per-scale rows `(n, q_n, ln q_{n+1}/q_n, ‖q_n ω‖)` for `n < depth`.
    pub fn scale_table(&self) -> Vec<ScaleRow> {
        (0..self.depth())
            .map(|n| ScaleRow {
                n,
                q_n: self.q[n].to_string(),
                log_ratio: ln_big(&self.q[n + 1]) / ln_big(&self.q[n]).exp(),
                norm_qn_omega: norm_qn_omega(self, n).unwrap_or(f64::NAN),
            })
            .collect()
    }

    pub fn write_scale_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for row in self.scale_table() {
            wr.serialize(&row).map_err(|e| LabError::Serialization(e.to_string()))?;
        }
        wr.flush().map_err(|e| LabError::Serialization(e.to_string()))
    }
}

/// One row of the per-scale arithmetic table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleRow {
    pub n: usize,
    pub q_n: String,
    pub log_ratio: f64,
    pub norm_qn_omega: f64,
}

/// A partial quotient as it appears in JSON: a number when it fits, a decimal string otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuotientValue {
    Small(u64),
    Big(String),
}

impl QuotientValue {
    fn to_biguint(&self) -> Result<BigUint> {
        match self {
            QuotientValue::Small(v) => Ok(BigUint::from(*v)),
            QuotientValue::Big(s) => s
                .parse::<BigUint>()
                .map_err(|e| LabError::Serialization(format!("bad quotient {s:?}: {e}"))),
        }
    }
}

/// Serialized form `{"quotients": [..], "precision_bits": N}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencySpec {
    pub quotients: Vec<QuotientValue>,
    pub precision_bits: u32,
}

/// Expands `omega` into `depth` partial quotients, certifying each one against the
/// error radius of the input.
pub fn cf_expand(omega: &HpReal, depth: usize) -> Result<Frequency> {
    if depth == 0 {
        return Err(LabError::DomainError("depth must be at least 1".into()));
    }
    let fb = omega.frac_bits() as usize;
    let denom = BigInt::one() << fb;
    let m = omega.mantissa().clone();
    let e = BigInt::from(omega.err().clone());
    if m <= e || &m + &e >= denom {
        return Err(LabError::DomainError("omega must lie strictly inside (0,1)".into()));
    }
    let lo = &m - &e;
    let hi = &m + &e;
    let rational_log = 0.5 * omega.precision_digits() * std::f64::consts::LN_10;

    let mut u = denom.to_biguint().unwrap();
    let mut v = m.to_biguint().unwrap();
    let mut quotients = Vec::with_capacity(depth);
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p_cur, mut q_cur) = (BigInt::zero(), BigInt::one());
    for n in 1..=depth {
        if v.is_zero() {
            return Err(LabError::RationalFrequency { at_depth: n - 1 });
        }
        let a = &u / &v;
        let r = &u - &a * &v;
        if ln_big(&a) > rational_log {
            return Err(LabError::RationalFrequency { at_depth: n });
        }
        let ai = BigInt::from(a.clone());
        let p_next = &ai * &p_cur + &p_prev;
        let q_next = &ai * &q_cur + &q_prev;
        // the whole uncertainty interval must sit inside the cylinder of [a_1..a_n]
        let e_num = &p_next + &p_cur;
        let e_den = &q_next + &q_cur;
        let below = |x: &BigInt, pn: &BigInt, qn: &BigInt| x * qn < pn * &denom;
        let above = |x: &BigInt, pn: &BigInt, qn: &BigInt| x * qn > pn * &denom;
        let (lo_ok, hi_ok) = if n % 2 == 1 {
            // odd n: p_n/q_n lies above ω
            (above(&lo, &e_num, &e_den), below(&hi, &p_next, &q_next))
        } else {
            (above(&lo, &p_next, &q_next), below(&hi, &e_num, &e_den))
        };
        if !(lo_ok && hi_ok) {
            if r.is_zero() && n < depth {
                return Err(LabError::RationalFrequency { at_depth: n });
            }
            return Err(LabError::InsufficientPrecision { at_depth: n });
        }
        quotients.push(a);
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
        u = v;
        v = r;
    }
    let (p, q) = convergents(&quotients);
    Ok(Frequency { omega: omega.clone(), quotients, p, q })
}

/// Builds the frequency `[0; a_1, …, a_N, 1, 1, 1, …]`: the given quotients followed
/// by a golden-mean tail, so that the expansion of the result starts with `quotients`.
pub fn cf_build(quotients: &[u64]) -> Result<Frequency> {
    cf_build_with_precision(quotients.iter().map(|&a| BigUint::from(a)).collect(), DEFAULT_PRECISION_BITS)
}

pub fn cf_build_with_precision(quotients: Vec<BigUint>, min_bits: u32) -> Result<Frequency> {
    if quotients.is_empty() {
        return Err(LabError::DomainError("at least one partial quotient is required".into()));
    }
    if quotients.iter().any(|a| a.is_zero()) {
        return Err(LabError::DomainError("partial quotients must be positive".into()));
    }
    let (p, q) = convergents(&quotients);
    let n = quotients.len();
    let qn_bits = q[n].bits() as u32;
    let bits = min_bits.max(DEFAULT_PRECISION_BITS).max(2 * qn_bits + 64);
    let guard = bits + 2 * qn_bits + 16;
    let one = BigUint::one() << guard as usize;
    let root5 = (BigUint::from(5u32) << (2 * guard as usize)).sqrt();
    let phi = (root5 + &one) >> 1usize;
    let num = &p[n] * &phi + &p[n - 1] * &one;
    let den = &q[n] * &phi + &q[n - 1] * &one;
    let omega = HpReal::from_ratio(&BigInt::from(num), &BigInt::from(den), bits)?;
    let omega = HpReal::new(omega.mantissa().clone(), bits, BigUint::from(2u32));
    Ok(Frequency { omega, quotients, p, q })
}

/// `‖q_n ω‖` evaluated exactly on the dyadic representation of `ω`.
pub fn norm_qn_omega(freq: &Frequency, n: usize) -> Result<f64> {
    if n >= freq.depth() {
        return Err(LabError::DepthExceeded { requested: n, depth: freq.depth() });
    }
    let qn = BigInt::from(freq.q[n].clone());
    let r = freq.omega.torus_norm_multiple(&qn);
    Ok(dyadic_to_f64(&BigInt::from(r), freq.omega.frac_bits()))
}

/// Certifies `1/(2q_{n+1}) ≤ ‖q_n ω‖ ≤ 1/q_{n+1}` in exact arithmetic, accounting
/// for the error radius of `ω`. Returns `false` when either side cannot be certified.
pub fn appro2_holds(freq: &Frequency, n: usize) -> Result<bool> {
    if n >= freq.depth() {
        return Err(LabError::DepthExceeded { requested: n, depth: freq.depth() });
    }
    let qn = &freq.q[n];
    let qn1 = &freq.q[n + 1];
    let r = freq.omega.torus_norm_multiple(&BigInt::from(qn.clone()));
    let unc = qn * freq.omega.err();
    let one = BigUint::one() << freq.omega.frac_bits() as usize;
    if r < unc {
        return Ok(false);
    }
    let lower_ok = BigUint::from(2u32) * qn1 * (&r - &unc) >= one;
    let upper_ok = qn1 * (&r + &unc) <= one;
    Ok(lower_ok && upper_ok)
}

/// Outcome of the exhaustive best-approximation scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Appro1Report {
    /// Scales `n ≥ 1` whose `q_n` was within the scan limit.
    pub scales: Vec<usize>,
    /// `(n, k)` with `0 < k < q_n` and `‖kω‖ < ‖q_{n−1}ω‖`, certified.
    pub violations: Vec<(usize, u64)>,
    /// Pairs whose comparison fell inside the error radius of `ω`.
    pub uncertain: Vec<(usize, u64)>,
}

/// Scans every `0 < k < q_n` for each stored `q_n ≤ q_limit` and checks
/// `‖kω‖ ≥ ‖q_{n−1}ω‖` exactly.
pub fn appro1_scan(freq: &Frequency, q_limit: u64) -> Appro1Report {
    let limit = BigUint::from(q_limit);
    let scales: Vec<usize> = (1..=freq.depth()).filter(|&n| freq.q[n] <= limit).collect();
    let kmax = scales.iter().map(|&n| freq.q[n].to_u64().unwrap()).max().unwrap_or(0);
    let one = BigUint::one() << freq.omega.frac_bits() as usize;
    let m = freq.omega.mantissa().to_biguint().unwrap_or_default() % &one;
    let err = freq.omega.err();
    let mut dist = Vec::with_capacity(kmax as usize + 1);
    dist.push(BigUint::zero());
    let mut r = BigUint::zero();
    for _ in 1..=kmax {
        r += &m;
        if r >= one {
            r -= &one;
        }
        let other = &one - &r;
        dist.push(r.clone().min(other));
    }
    let mut violations = Vec::new();
    let mut uncertain = Vec::new();
    for &n in &scales {
        let qn = freq.q[n].to_u64().unwrap();
        let qp = freq.q[n - 1].to_u64().unwrap();
        let reference = &dist[qp as usize];
        for k in 1..qn {
            let d = &dist[k as usize];
            let unc = BigUint::from(k + qp) * err;
            if d + &unc < *reference {
                violations.push((n, k));
            } else if *d < *reference && k != qp {
                uncertain.push((n, k));
            }
        }
    }
    Appro1Report { scales, violations, uncertain }
}

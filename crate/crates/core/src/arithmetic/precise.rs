//! Dyadic fixed-point reals with an explicit error radius.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{LabError, Result};

/// Multiplies `x` by `2^e` without intermediate overflow or premature underflow.
pub fn ldexp(mut x: f64, mut e: i64) -> f64 {
    let up = 2f64.powi(1000);
    let down = 2f64.powi(-1000);
    while e > 1000 {
        x *= up;
        e -= 1000;
    }
    while e < -1000 {
        x *= down;
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// Converts `num / 2^frac_bits` to the nearest-ish double (truncation of the low bits).
pub fn dyadic_to_f64(num: &BigInt, frac_bits: u32) -> f64 {
    let bits = num.bits();
    if bits <= 64 {
        return ldexp(num.to_f64().unwrap_or(0.0), -(frac_bits as i64));
    }
    let shift = bits - 64;
    let top = num.abs() >> shift;
    let v = top.to_f64().unwrap_or(0.0);
    let v = if num.sign() == Sign::Minus { -v } else { v };
    ldexp(v, shift as i64 - frac_bits as i64)
}

/// Natural logarithm of a positive big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(0.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// A real number `mantissa / 2^frac_bits` known to within `err / 2^frac_bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HpReal {
    mantissa: BigInt,
    frac_bits: u32,
    err: BigUint,
}

impl HpReal {
    pub fn new(mantissa: BigInt, frac_bits: u32, err: BigUint) -> Self {
        Self { mantissa, frac_bits, err }
    }

    /// The double `x` taken as a half-ulp approximation of the intended real.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(LabError::DomainError(format!("non-finite input {x}")));
        }
        if x == 0.0 {
            return Ok(Self::new(BigInt::zero(), 0, BigUint::zero()));
        }
        let raw = x.to_bits();
        let exp = ((raw >> 52) & 0x7ff) as i64;
        let frac = raw & ((1u64 << 52) - 1);
        let (m, e) = if exp == 0 {
            (frac << 1, exp - 1075)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        let mut mantissa = BigInt::from(m);
        if x < 0.0 {
            mantissa = -mantissa;
        }
        // one extra bit so that the half-ulp radius is an integer
        let (mantissa, frac_bits) = if e >= 0 {
            (mantissa << (e as usize + 1), 1u32)
        } else {
            (mantissa << 1usize, (-e) as u32 + 1)
        };
        Ok(Self::new(mantissa, frac_bits, BigUint::one()))
    }

    /// Parses a plain decimal literal such as `0.14159265358979`, treating it as
    /// correctly rounded to its last digit.
    pub fn parse_decimal(s: &str, bits: u32) -> Result<Self> {
        let t = s.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        let valid = |p: &str| p.chars().all(|c| c.is_ascii_digit());
        if (int_part.is_empty() && frac_part.is_empty()) || !valid(int_part) || !valid(frac_part) {
            return Err(LabError::DomainError(format!("not a decimal literal: {s:?}")));
        }
        let digits = format!("{int_part}{frac_part}");
        let num = digits
            .parse::<BigUint>()
            .map_err(|e| LabError::DomainError(e.to_string()))?;
        let den = BigUint::from(10u32).pow(frac_part.len() as u32);
        let scaled = (num << bits as usize) * 2u32;
        let (q, r) = scaled.div_rem(&(&den * 2u32));
        let mantissa = if r >= den { q + 1u32 } else { q };
        // rounding to the grid plus half a unit in the last decimal place
        let one = BigUint::one();
        let last_digit = if frac_part.is_empty() {
            BigUint::zero()
        } else {
            ((&one << bits as usize) + &den * 2u32 - 1u32) / (&den * 2u32)
        };
        let mut m = BigInt::from(mantissa);
        if neg {
            m = -m;
        }
        Ok(Self::new(m, bits, one + last_digit))
    }

    /// `num / den` rounded to `bits` fractional bits.
    pub fn from_ratio(num: &BigInt, den: &BigInt, bits: u32) -> Result<Self> {
        if den.is_zero() {
            return Err(LabError::DomainError("zero denominator".into()));
        }
        let scaled: BigInt = num << bits as usize;
        let q = scaled.div_floor(den);
        Ok(Self::new(q, bits, BigUint::one()))
    }

    /// The golden mean `(√5 − 1)/2`.
    pub fn golden(bits: u32) -> Self {
        let five = BigUint::from(5u32) << (2 * bits as usize);
        let root = five.sqrt();
        let m = BigInt::from(root) - (BigInt::one() << bits as usize);
        Self::new(m, bits + 1, BigUint::from(2u32))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn err(&self) -> &BigUint {
        &self.err
    }

    pub fn to_f64(&self) -> f64 {
        dyadic_to_f64(&self.mantissa, self.frac_bits)
    }

    /// Number of trustworthy decimal digits, `log10(2^frac_bits / err)`.
    pub fn precision_digits(&self) -> f64 {
        let e = if self.err.is_zero() { 1.0 } else { ln_big(&self.err) / std::f64::consts::LN_10 };
        self.frac_bits as f64 * std::f64::consts::LOG10_2 - e.max(0.0)
    }

    /// `k·x mod 1` as an exact dyadic residue in `[0, 2^frac_bits)`.
    pub fn frac_multiple(&self, k: &BigInt) -> BigUint {
        let one = BigInt::one() << self.frac_bits as usize;
        let r = (k * &self.mantissa).mod_floor(&one);
        r.to_biguint().unwrap_or_default()
    }

    /// Distance of `k·x` to the nearest integer, as an exact dyadic numerator.
    pub fn torus_norm_multiple(&self, k: &BigInt) -> BigUint {
        let r = self.frac_multiple(k);
        let one = BigUint::one() << self.frac_bits as usize;
        let other = &one - &r;
        r.min(other)
    }

    /// `‖x‖` rounded to double at the boundary.
    pub fn torus_norm(&self) -> f64 {
        let n = self.torus_norm_multiple(&BigInt::one());
        dyadic_to_f64(&BigInt::from(n), self.frac_bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_round_trip_is_exact() {
        for x in [0.5, 0.1, 0.6180339887498949, 1e-300, 3.0] {
            assert_eq!(HpReal::from_f64(x).unwrap().to_f64(), x);
        }
    }

    #[test]
    fn decimal_parse_matches_double() {
        let v = HpReal::parse_decimal("0.14159265358979323846", 128).unwrap();
        assert!((v.to_f64() - (std::f64::consts::PI - 3.0)).abs() < 1e-15);
        assert!(v.precision_digits() > 19.0);
    }

    #[test]
    fn golden_value() {
        let g = HpReal::golden(256);
        assert!((g.to_f64() - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-16);
        assert!(g.precision_digits() > 76.0);
    }

    #[test]
    fn ln_big_of_large_power() {
        let x = BigUint::one() << 3000usize;
        assert!((ln_big(&x) - 3000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn ldexp_handles_deep_exponents() {
        assert_eq!(ldexp(1.0, -1074), f64::from_bits(1));
        assert_eq!(ldexp(3.0, 2), 12.0);
    }
}

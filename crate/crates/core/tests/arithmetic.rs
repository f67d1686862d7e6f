use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use uamo_core::arithmetic::*;
use uamo_core::LabError;

const PI_MINUS_3: &str = "0.14159265358979323846264338327950288419716939937510582097494459230781640628620899862803482534211706798214808651328230664709384460955058223172535940812848111745028410270193852110555964462294895493038196";

fn qs(f: &Frequency) -> Vec<u64> {
    (1..=f.depth()).map(|n| f.q_u64(n).unwrap()).collect()
}

fn pi3() -> HpReal {
    HpReal::parse_decimal(PI_MINUS_3, 600).unwrap()
}

/// `|ω·q − p|` as an exact rational on the dyadic representation, times `2^bits`.
fn scaled_residual(w: &HpReal, p: &BigUint, q: &BigUint) -> BigInt {
    let one = BigInt::one() << w.frac_bits() as usize;
    (w.mantissa() * BigInt::from(q.clone()) - BigInt::from(p.clone()) * one).abs()
}

#[test]
fn golden_expansion() {
    let f = cf_expand(&HpReal::golden(256), 10).unwrap();
    assert_eq!(qs(&f), vec![1, 2, 3, 5, 8, 13, 21, 34, 55, 89]);
    assert!(f.quotients().iter().all(|a| a.is_one()));
}

#[test]
fn pi_minus_three_expansion() {
    let f = cf_expand(&pi3(), 4).unwrap();
    let a: Vec<u64> = f.quotients().iter().map(|x| x.to_u64().unwrap()).collect();
    assert_eq!(a, vec![7, 15, 1, 292]);
    assert_eq!(qs(&f), vec![7, 106, 113, 33102]);
    let p: Vec<u64> = (1..=4).map(|n| f.p(n).unwrap().to_u64().unwrap()).collect();
    assert_eq!(p, vec![1, 15, 16, 4687]);
    // |ω − p/q| < 1/(q_n q_{n+1}) checked exactly: |qω − p| · q_{n+1} < 1
    let deep = cf_expand(&pi3(), 6).unwrap();
    let one = BigInt::one() << deep.omega().frac_bits() as usize;
    for n in 1..=5 {
        let r = scaled_residual(deep.omega(), deep.p(n).unwrap(), deep.q(n).unwrap());
        assert!(r * BigInt::from(deep.q(n + 1).unwrap().clone()) < one, "n = {n}");
    }
}

#[test]
fn rational_input() {
    let half = HpReal::from_f64(0.5).unwrap();
    assert!(matches!(cf_expand(&half, 5), Err(LabError::RationalFrequency { .. })));
}

#[test]
fn torus_norm_examples() {
    assert_eq!(torus_norm(0.75), 0.25);
    assert!((torus_norm(-0.4) - 0.4).abs() < 1e-16);
    assert_eq!(torus_norm(3.0), 0.0);
}

proptest! {
    #[test]
    fn torus_norm_properties(x in -1e6f64..1e6) {
        let t = torus_norm(x);
        prop_assert!((0.0..=0.5).contains(&t));
        prop_assert_eq!(torus_norm(-x), t);
        prop_assert!((torus_norm(x + 1.0) - t).abs() < 1e-9);
    }

    #[test]
    fn build_expand_round_trip(a in prop::collection::vec(1u64..50, 1..25)) {
        let f = cf_build(&a).unwrap();
        let g = cf_expand(f.omega(), a.len()).unwrap();
        prop_assert_eq!(g.quotients(), f.quotients());
        for n in 1..=a.len() {
            // recurrence and lowest terms
            let (p, q) = (f.p(n).unwrap(), f.q(n).unwrap());
            prop_assert_eq!(&(BigUint::from(a[n - 1]) * f.q(n - 1).unwrap() + if n >= 2 { f.q(n - 2).unwrap().clone() } else { BigUint::zero() }), q);
            prop_assert!(p.gcd(q).is_one());
        }
    }

    #[test]
    fn appro2_on_built_frequencies(a in prop::collection::vec(1u64..1000, 2..20)) {
        let f = cf_build(&a).unwrap();
        // with a_1 = 1 the n = 0 case compares ‖ω‖ = 1 − ω with 1/2 and fails
        prop_assert_eq!(appro2_holds(&f, 0).unwrap(), a[0] >= 2);
        for n in 1..f.depth() {
            prop_assert!(appro2_holds(&f, n).unwrap());
        }
    }

    #[test]
    fn beta_on_bounded_quotients_decays(a in prop::collection::vec(1u64..=10, 40)) {
        let f = cf_build(&a).unwrap();
        let shallow = beta_estimate(&f, 10).unwrap();
        let deep = beta_estimate(&f, 20).unwrap();
        prop_assert!(deep.running_sup_tail <= shallow.running_sup_tail);
        prop_assert!(deep.running_sup_tail < 0.05);
    }
}

#[test]
fn norm_qn_omega_examples() {
    let g = golden(14).unwrap();
    let n = g.scale_of(89).unwrap();
    assert_eq!(g.q_u64(n + 1).unwrap(), 144);
    let v = norm_qn_omega(&g, n).unwrap();
    assert!((1.0 / 288.0..=1.0 / 144.0).contains(&v));
    assert!((v - 0.005025).abs() < 5e-6);

    let f = cf_expand(&pi3(), 6).unwrap();
    let n = f.scale_of(113).unwrap();
    let v = norm_qn_omega(&f, n).unwrap();
    assert!((1.0 / 66204.0..=1.0 / 33102.0).contains(&v));

    let w = g.omega_f64();
    assert!((norm_qn_omega(&g, 0).unwrap() - w.min(1.0 - w)).abs() < 1e-16);
    assert!(matches!(norm_qn_omega(&g, 14), Err(LabError::DepthExceeded { .. })));
}

#[test]
fn beta_examples() {
    let g = golden(40).unwrap();
    let b10 = beta_estimate(&g, 10).unwrap().running_sup_tail;
    let b30 = beta_estimate(&g, 30).unwrap().running_sup_tail;
    assert!(b30 < b10 && b30 < 1e-4);

    // values ln(q_{n+1})/q_n over the verified q sequence (1, 7, 106, 113, 33102)
    let f = cf_expand(&pi3(), 4).unwrap();
    let est = beta_estimate(&f, 1).unwrap();
    let want = [(106f64).ln() / 7.0, (113f64).ln() / 106.0, (33102f64).ln() / 113.0];
    for (v, w) in est.values[1..].iter().zip(want) {
        assert!((v - w).abs() < 1e-14);
    }
    assert!((est.values[3] - 0.0921).abs() < 1e-4);
    // the supremum over n ≥ 1 is ln(106)/7
    assert!((est.running_sup_tail - (106f64).ln() / 7.0).abs() < 1e-14);

    // a_{n+1} = ⌈e^{0.5 q_n}⌉ built forward
    let mut a: Vec<BigUint> = vec![BigUint::from(1u32), BigUint::from(2u32)];
    let mut q = vec![BigUint::one(), BigUint::one(), BigUint::from(3u32)];
    while q[q.len() - 2].to_f64().unwrap() < 1000.0 {
        let qn = q.last().unwrap().to_f64().unwrap();
        let next = exp_ceil(0.5 * qn);
        let qn1 = &next * q.last().unwrap() + &q[q.len() - 2];
        a.push(next);
        q.push(qn1);
    }
    let f = cf_build_with_precision(a, DEFAULT_PRECISION_BITS).unwrap();
    let est = beta_estimate(&f, 1).unwrap();
    let last = est.values[f.depth() - 1];
    assert!(f.q(f.depth() - 1).unwrap().to_f64().unwrap() >= 1000.0);
    assert!((last - 0.5).abs() < 0.025, "{last}");

    let f = cf_build(&[2, 1_000_000]).unwrap();
    assert_eq!(qs(&f), vec![2, 2_000_001]);
    assert!((beta_estimate(&f, 1).unwrap().values[1] - 7.254).abs() < 1e-3);
    assert!(matches!(beta_estimate(&f, 2), Err(LabError::DepthExceeded { .. })));
}

/// `⌈e^x⌉` as a big integer, exact enough for large `x` (x·log2(e) bits).
fn exp_ceil(x: f64) -> BigUint {
    let bits = x * std::f64::consts::LOG2_E;
    let whole = bits.floor();
    let frac = 2f64.powf(bits - whole);
    let m = (frac * 2f64.powi(52)).ceil() as u64;
    let shift = whole as i64 - 52;
    if shift >= 0 {
        BigUint::from(m) << shift as usize
    } else {
        BigUint::from((m >> (-shift) as u64) + 1)
    }
}

#[test]
fn build_examples() {
    let f = cf_build(&[1, 1, 1, 1, 1]).unwrap();
    assert_eq!(qs(&f), vec![1, 2, 3, 5, 8]);
    let f = cf_build(&[7, 15, 1, 292]).unwrap();
    assert!((f.omega_f64() - (std::f64::consts::PI - 3.0)).abs() < 1e-9);
}

#[test]
fn gamma_examples() {
    let g = golden(60).unwrap();
    let w = g.omega_f64();
    for k in [1i64, 2, 3, -2] {
        let theta = 0.25 + w / 2.0 * k as f64;
        let d = gamma_tilde(&g, theta.rem_euclid(1.0), 10).unwrap();
        assert!(d.exact_resonances.contains(&-k), "k = {k}: {:?}", d.exact_resonances);
        assert!(d.samples.iter().any(|&(n, v)| n == -k && v.is_infinite()));
    }
    let d = gamma_tilde(&g, 0.123, 10_000).unwrap();
    assert!(d.estimate < 0.01, "{}", d.estimate);
    assert!(d.exact_resonances.is_empty());
    assert!(d.samples.iter().all(|&(n, v)| n != 0 && v >= 0.0));
    assert_eq!(d.samples.len(), 20_000);
}

#[test]
fn classify_examples() {
    let g = golden(20).unwrap();
    // ln q_{n+1} ≤ 0.1·q_n from q_n = 55 on; below that the Fibonacci scales are still strong
    let first_weak = g.scale_of(55).unwrap();
    for n in first_weak..19 {
        assert_eq!(classify_scale(&g, n, 0.1).unwrap().kind, ScaleKind::WeakLiouville);
    }
    assert_eq!(classify_scale(&g, first_weak - 1, 0.1).unwrap().kind, ScaleKind::StrongLiouville);
    let f = cf_build(&[1, 1, 1, 1, 1, 1_000_000_000]).unwrap();
    let jump = f.scale_of(8).unwrap();
    let c = classify_scale(&f, jump, 0.1).unwrap();
    assert_eq!(c.kind, ScaleKind::StrongLiouville);
    assert!((c.ln_q_next - (8e9f64 + 5.0).ln()).abs() < 1e-9);
    let p = cf_expand(&pi3(), 4).unwrap();
    let c = classify_scale(&p, 2, 0.5).unwrap();
    assert_eq!(p.q_u64(2).unwrap(), 106);
    assert_eq!(c.kind, ScaleKind::WeakLiouville);
    assert!(matches!(classify_scale(&p, 4, 0.5), Err(LabError::DepthExceeded { .. })));
}

#[test]
fn huge_quotients_classify_without_overflow() {
    let a = vec![BigUint::from(3u32), BigUint::from(10u32).pow(400), BigUint::from(2u32)];
    let f = cf_build_with_precision(a, DEFAULT_PRECISION_BITS).unwrap();
    let c = classify_scale(&f, 1, 0.1).unwrap();
    assert_eq!(c.kind, ScaleKind::StrongLiouville);
    assert!((c.ln_q_next - 400.0 * 10f64.ln() - 3f64.ln()).abs() < 1e-6);
    assert!(appro2_holds(&f, 1).unwrap());
}

#[test]
fn appro1_exhaustive() {
    let g = golden(25).unwrap();
    let rep = appro1_scan(&g, 10_000);
    assert!(rep.violations.is_empty() && rep.uncertain.is_empty());
    assert_eq!(rep.scales.iter().map(|&n| g.q_u64(n).unwrap()).max(), Some(6765));
    let p = cf_expand(&pi3(), 5).unwrap();
    let rep = appro1_scan(&p, 10_000);
    assert!(rep.violations.is_empty() && rep.uncertain.is_empty());
}

#[test]
fn appro1_oracle_on_small_case() {
    // exact rational distances against the convergent 13/21 of the golden mean
    let g = golden(12).unwrap();
    let one = BigInt::one() << g.omega().frac_bits() as usize;
    let m = g.omega().mantissa().clone();
    let dist = |k: i64| -> BigInt {
        let r = (&m * k).mod_floor(&one);
        let s = &one - &r;
        r.min(s)
    };
    let n = g.scale_of(21).unwrap();
    let reference = dist(13);
    for k in 1..21 {
        assert!(dist(k) >= reference);
    }
    assert_eq!(g.q_u64(n - 1).unwrap(), 13);
}

#[test]
fn scale_table_and_json() {
    let f = cf_build(&[7, 15, 1, 292]).unwrap();
    let rows = f.scale_table();
    assert_eq!(rows.len(), f.depth());
    let mut buf = Vec::new();
    f.write_scale_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), f.depth() + 1);
    let json: serde_json::Value = serde_json::from_str(&f.to_json()).unwrap();
    assert!(json.get("quotients").is_some() && json.get("precision_bits").is_some());
}

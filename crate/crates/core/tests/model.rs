mod common;

use common::*;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::Rng;
use uamo_core::linalg::dense_eigen;
use uamo_core::model::*;
use uamo_core::LabError;

#[test]
fn coupling_reference_values() {
    let c = make_coupling(0.6, 0.8).unwrap();
    assert!((c.lambda1p - 0.8).abs() < 1e-15 && (c.lambda2p - 0.6).abs() < 1e-15);
    // ln(0.8·1.8/(0.6·1.6)) = ln 1.5
    assert!((c.l - 1.5f64.ln()).abs() < 1e-14);
    assert!((c.l - 0.405465108108164).abs() < 1e-12);
    assert_eq!(c.regime, Regime::Supercritical);

    let c = make_coupling(0.5, 0.5).unwrap();
    assert_eq!(c.l, 0.0);
    assert_eq!(c.regime, Regime::Critical);

    assert!(matches!(make_coupling(0.0, 0.8), Err(LabError::DegenerateCoupling(_))));
    assert!(matches!(make_coupling(1.2, 0.5), Err(LabError::DomainError(_))));
    assert_eq!(make_coupling(0.8, 0.6).unwrap().regime, Regime::Subcritical);
}

#[test]
fn verblunsky_examples() {
    let c = make_coupling(0.6, 0.8).unwrap();
    let s = VerblunskySequence::with_omega(c, 0.3819660112501051, 0.0);
    for n in [-6i64, 0, 4, 1000] {
        assert_eq!(verblunsky(&s, n), (C64::new(0.8, 0.0), C64::new(0.6, 0.0)));
    }
    let (a1, r1) = verblunsky(&s, 1);
    assert!(a1.norm() < 1e-16 && (r1 - C64::new(0.8, 0.6)).norm() < 1e-16);
    let s = VerblunskySequence::with_omega(c, 0.3819660112501051, 0.25);
    let (a1, r1) = verblunsky(&s, 1);
    assert!((a1 - C64::new(0.8, 0.0)).norm() < 1e-15 && (r1 - C64::new(0.0, 0.6)).norm() < 1e-15);
}

#[test]
fn negative_odd_indices_follow_the_coin() {
    let mut r = rng(1);
    for _ in 0..50 {
        let s = random_seq(&mut r);
        for k in -41..41 {
            assert!((s.alpha(k) - alpha_ref(&s, k)).norm() < 1e-12, "k = {k}");
        }
    }
}

proptest! {
    #[test]
    fn coefficients_lie_on_the_sphere(l1 in 0.01f64..1.0, l2 in 0.01f64..1.0, om in 0.0f64..1.0, th in 0.0f64..1.0, k in -100000i64..100000) {
        let s = VerblunskySequence::with_omega(make_coupling(l1, l2).unwrap(), om, th);
        let (a, r) = s.coefficient(k);
        prop_assert!((a.norm_sqr() + r.norm_sqr() - 1.0).abs() < 1e-14);
        prop_assert!(a.norm() < 1.0);
    }

    #[test]
    fn coupling_identities(l1 in 0.01f64..=1.0, l2 in 0.01f64..=1.0) {
        let c = make_coupling(l1, l2).unwrap();
        prop_assert!((l1 * l1 + c.lambda1p * c.lambda1p - 1.0).abs() < 1e-15);
        prop_assert!((l2 * l2 + c.lambda2p * c.lambda2p - 1.0).abs() < 1e-15);
        prop_assert_eq!(c.l > 0.0, c.regime == Regime::Supercritical);
    }
}

#[test]
fn cmv_block_is_unitary_with_det_minus_one() {
    let mut r = rng(2);
    for _ in 0..10_000 {
        let rad: f64 = r.gen::<f64>().sqrt() * 0.999_999;
        let a = C64::from_polar(rad, r.gen_range(0.0..std::f64::consts::TAU));
        let t = cmv_block(a);
        let p = t * t.adjoint();
        assert!((p.0[0][0] - 1.0).norm() < 1e-14 && p.0[0][1].norm() < 1e-14);
        assert!((p.0[1][1] - 1.0).norm() < 1e-14 && p.0[1][0].norm() < 1e-14);
        assert!((t.det() + 1.0).norm() < 1e-14);
    }
}

#[test]
fn factorized_restriction_matches_dense_cutoff() {
    let mut r = rng(3);
    for _ in 0..100 {
        let s = random_seq(&mut r);
        let a = r.gen_range(-30i64..30);
        let b = a + r.gen_range(2i64..=60);
        let w = build_finite_cmv(&s, a, b, Boundary::Dirichlet).unwrap();
        let dense = dense_restricted_w(&s, a, b);
        let band = w.matrix().to_dense();
        for i in 0..dense.len() {
            for j in 0..dense.len() {
                assert!((dense[i][j] - band[i][j]).norm() < 1e-13);
            }
        }
        // also the product of the restricted factors
        let (l, m) = w.factors();
        let lm = dense_mul(&l.to_dense(), &m.to_dense());
        for i in 0..dense.len() {
            for j in 0..dense.len() {
                assert!((lm[i][j] - band[i][j]).norm() < 1e-13);
            }
        }
    }
}

#[test]
fn closure_is_unitary() {
    let mut r = rng(4);
    for phase in [0.0, 0.7] {
        let s = random_seq(&mut r);
        let w = build_finite_cmv(&s, 0, 9, Boundary::UnitaryClosure { phase }).unwrap();
        let d = w.matrix().to_dense();
        for i in 0..10 {
            for j in 0..10 {
                let v: C64 = (0..10).map(|k| d[i][k] * d[j][k].conj()).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((v - target).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn interval_too_small() {
    let s = random_seq(&mut rng(5));
    assert!(matches!(build_finite_cmv(&s, 3, 4, Boundary::Dirichlet), Err(LabError::IntervalTooSmall { .. })));
}

#[test]
fn dirichlet_contraction_and_closure_spectrum() {
    let mut r = rng(6);
    for _ in 0..10 {
        let s = random_seq(&mut r);
        let a = r.gen_range(-20i64..20);
        let d = build_finite_cmv(&s, a, a + 40, Boundary::Dirichlet).unwrap();
        let v: Vec<C64> = (0..41).map(|i| C64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let nv = uamo_core::linalg::norm2(&v);
        assert!(uamo_core::linalg::norm2(&d.matrix().matvec(&v)) <= nv * (1.0 + 1e-12));
        for (z, _) in dense_eigen(d.matrix()).unwrap() {
            assert!(z.norm() <= 1.0 + 1e-10);
        }
        let c = build_finite_cmv(&s, a, a + 40, Boundary::closure()).unwrap();
        for (z, _) in dense_eigen(c.matrix()).unwrap() {
            assert!((z.norm() - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn interior_vectors_keep_their_norm() {
    let mut r = rng(7);
    let s = random_seq(&mut r);
    let w = build_finite_cmv(&s, 0, 30, Boundary::Dirichlet).unwrap();
    let mut v = vec![C64::new(0.0, 0.0); 31];
    for x in v.iter_mut().take(29).skip(2) {
        *x = C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
    }
    let before = uamo_core::linalg::norm2(&v);
    let after = uamo_core::linalg::norm2(&w.matrix().matvec(&v));
    assert!((before - after).abs() < 1e-12 * before);
}

#[test]
fn apply_w_examples() {
    let s = random_seq(&mut rng(8));
    let out = apply_w(&s, &FiniteSupport::delta(0));
    assert!(out.nnz() <= 4);
    assert!((out.norm() - 1.0).abs() < 1e-12);

    // λ₂ = 1, θ = 0, ω = 0: the coin is a constant rotation
    let c = make_coupling(0.4, 1.0).unwrap();
    let s2 = VerblunskySequence::with_omega(c, 0.0, 0.0);
    let mut psi = FiniteSupport::delta(3);
    for _ in 0..50 {
        psi = apply_w(&s2, &psi);
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }
    // two-periodic: the action commutes with a shift by two sites
    let a = apply_w(&s2, &FiniteSupport::delta(0));
    let b = apply_w(&s2, &FiniteSupport::delta(2));
    for k in -3..4 {
        assert!((a.get(k) - b.get(k + 2)).norm() < 1e-15);
    }

    let mut r = rng(9);
    for _ in 0..20 {
        let s = random_seq(&mut r);
        let psi = FiniteSupport {
            offset: -20,
            values: (0..41).map(|_| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect(),
        };
        let out = apply_w(&s, &psi);
        assert!((out.norm() / psi.norm() - 1.0).abs() < 1e-12);
        assert!(out.offset >= -22 && out.offset + out.values.len() as i64 - 1 <= 22);
    }
}

#[test]
fn apply_w_agrees_with_dense_window() {
    let mut r = rng(10);
    let s = random_seq(&mut r);
    let psi = FiniteSupport { offset: -5, values: (0..11).map(|i| C64::new(i as f64, -(i as f64))).collect() };
    let out = apply_w(&s, &psi);
    let (lo, hi) = (-12i64, 12i64);
    let w = dense_mul(&dense_factor(&s, lo, hi, 0), &dense_factor(&s, lo, hi, 1));
    for y in -7..=7 {
        let v: C64 = (lo..=hi).map(|x| w[(y - lo) as usize][(x - lo) as usize] * psi.get(x)).sum();
        assert!((v - out.get(y)).norm() < 1e-12);
    }
}

#[test]
fn coordinate_export() {
    let s = random_seq(&mut rng(11));
    let w = build_finite_cmv(&s, -1, 3, Boundary::closure()).unwrap();
    let mut buf = Vec::new();
    w.write_coo(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("row,col,re,im"));
    for l in lines {
        let f: Vec<&str> = l.split(',').collect();
        let (i, j): (i64, i64) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let v = C64::new(f[2].parse().unwrap(), f[3].parse().unwrap());
        assert_eq!(v, w.matrix().get((i + 1) as usize, (j + 1) as usize));
    }
}

#[test]
fn model_config_json() {
    let text = r#"{"lambda1":0.6,"lambda2":0.8,"theta":0.123,"omega":{"quotients":[1,1,1,1,1,1,1,1,1,1,1,1],"precision_bits":256}}"#;
    let cfg: ModelConfig = serde_json::from_str(text).unwrap();
    let (freq, seq) = cfg.build().unwrap();
    assert_eq!(freq.q_u64(12).unwrap(), 233);
    assert!((seq.omega - 0.6180339887498949).abs() < 1e-15);
}

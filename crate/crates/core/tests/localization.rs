mod common;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::Rng;
use uamo_core::arithmetic::{cf_build, golden};
use uamo_core::linalg::dense_eigen;
use uamo_core::localization::*;
use uamo_core::model::{build_finite_cmv, make_coupling, Boundary, VerblunskySequence};
use uamo_core::LabError;

fn synthetic(n: i64, f: impl FnMut(i64) -> f64) -> EigenfunctionProfile {
    EigenfunctionProfile::from_amplitudes(-n, C64::new(1.0, 0.0), (-n..=n).map(f).collect()).unwrap()
}

fn golden_seq(l1: f64, l2: f64, theta: f64) -> VerblunskySequence {
    VerblunskySequence::new(make_coupling(l1, l2).unwrap(), &golden(40).unwrap(), theta)
}

fn decay_params(l: f64) -> DecayParams {
    DecayParams {
        l,
        beta: 0.0,
        epsilon: 0.1,
        epsilon0: l / 200.0,
        max_t: 3,
        boundary_layer: 20,
        slack_c: 0.0,
        slope_slack: 0.0,
    }
}

#[test]
fn spectrum_is_unimodular_and_normalized() {
    let s = golden_seq(0.6, 0.8, 0.123);
    let sp = truncation_spectrum(&s, 64, Boundary::closure()).unwrap();
    assert_eq!(sp.len(), 129);
    for p in &sp {
        assert!((p.z.norm() - 1.0).abs() < 1e-10);
        let n2: f64 = p.amplitudes.iter().map(|x| x * x).sum();
        assert!((n2 - 1.0).abs() < 1e-12);
        assert!(p.eigen_residual < 1e-10, "{}", p.eigen_residual);
        assert_eq!(p.amplitude(p.center), p.amplitudes.iter().cloned().fold(0.0, f64::max));
    }
    assert!(matches!(truncation_spectrum(&s, 63, Boundary::closure()), Err(LabError::DomainError(_))));
}

#[test]
fn dense_eigenvectors_orthonormal() {
    let s = golden_seq(0.3, 0.8, 0.4);
    let w = build_finite_cmv(&s, -64, 64, Boundary::UnitaryClosure { phase: 0.7 }).unwrap();
    let e = dense_eigen(w.matrix()).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..e.len() {
        for j in 0..e.len() {
            let ip: C64 = e[i].1.iter().zip(&e[j].1).map(|(a, b)| a.conj() * b).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((ip - target).norm());
        }
    }
    assert!(worst < 1e-10, "{worst:e}");
}

#[test]
fn banded_points_match_dense_eigenvalues() {
    let s = golden_seq(0.6, 0.8, 0.2);
    let w = build_finite_cmv(&s, -80, 80, Boundary::closure()).unwrap();
    let dense: Vec<C64> = dense_eigen(w.matrix()).unwrap().into_iter().map(|p| p.0).collect();
    let pts = banded_spectral_points(&s, 80, Boundary::closure(), 12, 5).unwrap();
    assert_eq!(pts.len(), 12);
    for p in &pts {
        let d = dense.iter().map(|z| (z - p.z).norm()).fold(f64::INFINITY, f64::min);
        assert!(d < 1e-10, "{d:e}");
    }
}

#[test]
fn fit_exact_exponential() {
    let p = synthetic(200, |y| (-0.3 * y.abs() as f64).exp());
    assert_eq!(p.center, 0);
    let fit = fit_decay(&p, 5, 0).unwrap();
    assert!((fit.rate - 0.3).abs() < 1e-6, "{}", fit.rate);
    assert!(fit.residual < 1e-9);
    assert_eq!(fit.window.0, 5);
}

#[test]
fn fit_oscillating_exponential() {
    let p = synthetic(300, |y| (-0.3 * y.abs() as f64).exp() * (1.0 + 0.5 * (y as f64).cos()));
    for w in [10, 20] {
        let fit = fit_decay(&p, w, 0).unwrap();
        assert!((fit.rate - 0.3).abs() < 0.01, "width {w}: {}", fit.rate);
    }
}

#[test]
fn fit_rejects_flat_profile() {
    let mut rng = common::rng(1);
    let p = synthetic(200, |_| rng.gen_range(0.5..1.0));
    assert!(matches!(fit_decay(&p, 5, 0), Err(LabError::FlatProfile { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fit_recovers_planted_rate(rate in 0.05f64..1.0, shift in -50i64..50, phase in 0.0f64..6.28) {
        let p = synthetic(400, |y| {
            let d = (y - shift).abs() as f64;
            (-rate * d).exp() * (1.0 + 0.3 * (0.9 * y as f64 + phase).cos().abs())
        });
        let fit = fit_decay(&p, 10, 0).unwrap();
        prop_assert!((fit.rate - rate).abs() < 0.01 * rate, "{} vs {rate}", fit.rate);
    }
}

#[test]
fn resonance_profile_of_pure_exponential() {
    let f = golden(40).unwrap();
    let l = 0.4;
    let p = synthetic(800, |y| (-l / 2.0 * y.abs() as f64).exp());
    let r = resonance_profile(&p, &f, 10, &decay_params(l)).unwrap();
    assert_eq!(r.q_n, 89);
    assert_eq!(r.blocks.len(), 7);
    // r_0 is the peak itself, in the ‖(Ψ₀, Ψ₋₁)‖ = 1 normalization
    let peak = 1.0 / (1.0f64).hypot((-l / 2.0).exp());
    assert!((r.r(0).unwrap() - peak).abs() < 1e-12);
    assert!(r.nonres_pass());
    assert!(r.nonres_tested > 0);
    // r_{2t} sits at the inner edge of R_{2t}: slope exactly −L
    assert!((r.r2t_slope + l).abs() < 1e-9, "{}", r.r2t_slope);
    assert!(r.r2t_pass());
    // the maximum over R_{2t} sits q_n^{1−ε} closer than 2tq_n, so the pointwise bound
    // needs the slack e^{(L/2)q_n^{1−ε}}
    assert!(!r.r2t_pointwise.iter().all(|x| x.1));
    let slack = DecayParams { slack_c: l / 2.0, ..decay_params(l) };
    let r2 = resonance_profile(&p, &f, 10, &slack).unwrap();
    assert!(r2.r2t_pointwise.iter().all(|x| x.1));
    assert!(r.block_slopes.iter().all(|&(t, s)| if t > 0 { s < 0.0 } else { s > 0.0 }));

    let narrow = synthetic(150, |y| (-0.2 * y.abs() as f64).exp());
    assert!(matches!(resonance_profile(&narrow, &f, 10, &decay_params(l)), Err(LabError::ScaleTooLarge { .. })));
}

#[test]
fn resonance_profile_flags_slow_decay() {
    let f = golden(40).unwrap();
    // decays at a tenth of the assumed rate
    let p = synthetic(800, |y| (-0.02 * y.abs() as f64).exp());
    let r = resonance_profile(&p, &f, 10, &decay_params(0.4)).unwrap();
    assert!(!r.nonres_pass());
    assert!(!r.r2t_pass());
    let v = &r.violations[0];
    assert!(v.amplitude > v.bound);
}

#[test]
fn config_defaults_and_json() {
    let c = make_coupling(0.6, 0.8).unwrap();
    let cfg = ExperimentConfig::derived(&c, 0.01, 500).unwrap();
    assert!((cfg.epsilon0 - (c.l - 0.01) / 200.0).abs() < 1e-15);
    assert!(cfg.satisfies_choice(0.01));
    let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
    assert_eq!(back, cfg);
    assert!(!cfg.clone().with_epsilon(0.1).satisfies_choice(0.01));
    assert!(ExperimentConfig::derived(&c, 1.0, 500).is_err());
    let mut bad = cfg.clone();
    bad.n_half = 10;
    assert!(ExperimentConfig::from_json(&bad.to_json()).is_err());
}

fn small_config() -> ExperimentConfig {
    let c = make_coupling(0.6, 0.8).unwrap();
    let mut cfg = ExperimentConfig::derived(&c, 0.0, 300).unwrap().with_epsilon(0.1);
    cfg.scale = Some(7);
    cfg.max_t = 2;
    cfg.tolerances.min_interior = 5;
    cfg
}

#[test]
fn small_experiment_passes_gates() {
    let c = make_coupling(0.6, 0.8).unwrap();
    let f = golden(40).unwrap();
    let r = run_localization_experiment(&small_config(), &c, &f, 0.123).unwrap();
    assert_eq!(r.q_n, 21);
    assert_eq!(r.eigenvalue_count, 601);
    assert!(!r.diagnostic_only);
    assert!(r.profiles.len() >= 20);
    assert!((r.median_rate - c.l / 2.0).abs() < 0.15 * c.l / 2.0, "{}", r.median_rate);
    assert!(r.gates_pass(), "{:?}", r.gates);

    let mut out = Vec::new();
    r.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("eta,center,fitted_rate,residual,nonres_pass,r2t_pass\n"));
    assert_eq!(text.lines().count(), r.profiles.len() + 1);

    // identical inputs give an identical report
    let again = run_localization_experiment(&small_config(), &c, &f, 0.123).unwrap();
    assert_eq!(serde_json::to_string(&again).unwrap(), serde_json::to_string(&r).unwrap());
}

#[test]
fn boundary_phase_does_not_move_median() {
    let c = make_coupling(0.6, 0.8).unwrap();
    let f = golden(40).unwrap();
    let a = run_localization_experiment(&small_config(), &c, &f, 0.31).unwrap();
    let mut cfg = small_config();
    cfg.boundary_phase = 2.1;
    let b = run_localization_experiment(&cfg, &c, &f, 0.31).unwrap();
    assert!((a.median_rate - b.median_rate).abs() < 0.05 * a.median_rate);
}

#[test]
fn resonant_phase_is_diagnostic_only() {
    let c = make_coupling(0.6, 0.8).unwrap();
    let f = golden(40).unwrap();
    let theta = (0.25 - 1.5 * f.omega_f64()).rem_euclid(1.0);
    let r = run_localization_experiment(&small_config(), &c, &f, theta).unwrap();
    assert!(r.diagnostic_only);
    assert!(r.gates.is_none());
    assert!(r.notes.iter().any(|n| n.contains("phase is resonant")));
}

#[test]
fn liouville_frequency_is_diagnostic_only() {
    let c = make_coupling(0.6, 0.8).unwrap();
    let f = cf_build(&[1, 1, 1, 1, 1, 1_000_000_000]).unwrap();
    let mut cfg = small_config();
    cfg.scale = None;
    let r = run_localization_experiment(&cfg, &c, &f, 0.123).unwrap();
    assert!(r.beta_est >= c.l);
    assert!(r.diagnostic_only && r.gates.is_none());
}

#[test]
fn manifest_hash_tracks_inputs() {
    let cfg = small_config();
    let f = golden(40).unwrap();
    let a = ExperimentManifest::new(&cfg, 0.6, 0.8, &f.to_spec(), 0.123);
    let b = ExperimentManifest::new(&cfg, 0.6, 0.8, &f.to_spec(), 0.123);
    let c = ExperimentManifest::new(&cfg, 0.6, 0.8, &f.to_spec(), 0.124);
    assert_eq!(a.input_hash, b.input_hash);
    assert_ne!(a.input_hash, c.input_hash);
    assert_eq!(a.input_hash.len(), 64);
    assert_eq!(a.schema_version, MANIFEST_SCHEMA_VERSION);
    // SHA-256 of the git blob header for empty content
    assert_eq!(content_hash(b""), "473a0f4c3be8a93681a267e3b1e9a7dcda1185436fe141f7749120a303721813");
}

#[test]
fn auto_scale_rule() {
    let f = golden(40).unwrap();
    // 2q_{n+1} ≤ N/4: N = 1000 allows q_{n+1} = 89, so q_n = 55
    assert_eq!(f.q_u64(auto_scale(&f, 1000).unwrap()).unwrap(), 55);
    assert!(auto_scale(&f, 4).is_err());
}

use std::path::Path;

use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use uamo_core::arithmetic::{cf_build, golden};
use uamo_core::cocycle::SpectralPoint;
use uamo_core::determinant::{calibrate_poisson_constant, szego_connection_check, POISSON_CALIBRATION_SEED, POISSON_CONSTANT};
use uamo_core::interpolation::{
    ave_low_check, calibrate_nonmin_constant, cos_product_deviation, sine_structure_check, NONMIN_CALIBRATION_SEED,
    NONMIN_CONSTANT,
};
use uamo_core::localization::banded_spectral_points;
use uamo_core::model::{Boundary, Coupling, VerblunskySequence};

use crate::config::{overlay, write_entry, ConfigFile, DEFAULT_CONFIG_PATH};
use crate::error::{CliResult, Exit};
use crate::freq::PI_MINUS_3_QUOTIENTS;
use crate::output::{csv_rows, to_value, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Sze2,
    SineStructure,
    AveLow,
    Nonmin,
    Poisson,
    All,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    /// Random configurations per check; each suite has its own default.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Scale of the determinant-structure check.
    #[arg(long)]
    pub n: Option<usize>,
    /// Largest interval width of the connection check.
    #[arg(long)]
    pub width: Option<i64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Recalibrate the Poisson constant and store it in the config file.
    #[arg(long)]
    pub calibrate: bool,
    /// Constant gating the held-out Poisson instances.
    #[arg(long)]
    pub poisson_constant: Option<f64>,
}

/// One gated check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub suite: &'static str,
    pub check: String,
    pub trials: usize,
    pub passed: usize,
    pub max_err: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    fn new(suite: &'static str, check: impl Into<String>, errs: &[f64], tolerance: f64) -> Self {
        let passed = errs.iter().filter(|e| **e <= tolerance).count();
        let max_err = errs.iter().copied().fold(0.0, f64::max);
        Self { suite, check: check.into(), trials: errs.len(), passed, max_err, tolerance, pass: passed == errs.len() && !errs.is_empty() }
    }
}

fn random_coupling(rng: &mut ChaCha8Rng, supercritical: bool) -> CliResult<Coupling> {
    let (l1, l2) = if supercritical {
        let l1: f64 = rng.gen_range(0.05..0.85);
        (l1, rng.gen_range(l1 + 0.1..1.0f64).min(0.999))
    } else {
        (rng.gen_range(0.05..1.0), rng.gen_range(0.05..1.0))
    };
    Ok(Coupling::new(l1, l2)?)
}

fn random_seq(rng: &mut ChaCha8Rng) -> CliResult<VerblunskySequence> {
    let c = random_coupling(rng, false)?;
    Ok(VerblunskySequence::with_omega(c, rng.gen_range(0.01..0.99), rng.gen::<f64>()))
}

/// Supercritical coupling with partial quotients uniform in `1..=5`; near `p/q` with small
/// `q` the value interpolation of the degree-n determinant loses its relative accuracy.
fn random_bounded_type(rng: &mut ChaCha8Rng) -> CliResult<VerblunskySequence> {
    let c = random_coupling(rng, true)?;
    let qs: Vec<u64> = (0..30).map(|_| rng.gen_range(1..=5)).collect();
    Ok(VerblunskySequence::new(c, &cf_build(&qs)?, rng.gen()))
}

fn sze2(trials: usize, max_width: i64, seed: u64) -> CliResult<CheckRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errs = Vec::with_capacity(trials);
    while errs.len() < trials {
        let s = random_seq(&mut rng)?;
        let a = rng.gen_range(-20i64..20);
        let b = a + rng.gen_range(1..=max_width);
        // the identity divides by α_{a−1}
        if s.alpha(a - 1).norm() < 1e-3 {
            continue;
        }
        let rep = szego_connection_check(&s, a, b, &SpectralPoint::from_eta(rng.gen()))?;
        errs.push(rep.max_rel_err);
    }
    Ok(CheckRow::new("sze2", format!("connection identity, widths <= {max_width}"), &errs, 1e-8))
}

fn sine_structure(trials: usize, n: usize, seed: u64) -> CliResult<CheckRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errs = Vec::with_capacity(trials);
    for _ in 0..trials {
        let s = random_bounded_type(&mut rng)?;
        let z = SpectralPoint::from_eta(rng.gen()).z;
        errs.push(sine_structure_check(&s, n, z, 20)?.max_residual);
    }
    Ok(CheckRow::new("sine-structure", format!("determinant as product of sines, n = {n}"), &errs, 1e-6))
}

fn ave_low(seed: u64) -> CliResult<CheckRow> {
    let freq = golden(40)?;
    let mut errs = Vec::new();
    for (l1, l2, theta) in [(0.6, 0.8, 0.123), (0.8, 0.5, 0.3)] {
        let s = VerblunskySequence::new(Coupling::new(l1, l2)?, &freq, theta);
        for p in banded_spectral_points(&s, 100, Boundary::closure(), 8, seed)? {
            let rep = ave_low_check(&s, 100, p.z, 256)?;
            // a lower bound: only the shortfall counts
            errs.push((rep.target - rep.empirical).max(0.0));
        }
    }
    Ok(CheckRow::new("ave-low", "shortfall of the phase average of ln|P_2n| / 2n below L+/2, n = 100", &errs, 0.02))
}

fn nonmin(trials: usize, seed: u64) -> CliResult<Vec<CheckRow>> {
    let cal = calibrate_nonmin_constant(&golden(30)?, &[10, 12, 14, 16], trials, NONMIN_CALIBRATION_SEED)?;
    let calibrated = CheckRow {
        suite: "nonmin",
        check: format!("calibrated constant {:.4} on golden scales", cal.constant),
        trials: cal.scales.len() * cal.samples_per_scale,
        passed: if cal.constant <= NONMIN_CONSTANT { cal.scales.len() * cal.samples_per_scale } else { 0 },
        max_err: cal.constant,
        tolerance: NONMIN_CONSTANT,
        pass: cal.constant <= NONMIN_CONSTANT,
    };
    let pi3 = cf_build(&PI_MINUS_3_QUOTIENTS[..8])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::new();
    for n in 1..=pi3.depth() {
        if pi3.q_u64(n)? > 10_000 {
            break;
        }
        for _ in 0..50 {
            ratios.push(cos_product_deviation(&pi3, rng.gen(), n)?.ratio);
        }
    }
    let held_out = CheckRow::new("nonmin", "held-out ratio on pi - 3 convergents up to 1e4", &ratios, NONMIN_CONSTANT);
    Ok(vec![calibrated, held_out])
}

fn poisson(trials: usize, seed: u64, constant: f64, calibrate: bool, config_path: &Path) -> CliResult<(CheckRow, Option<f64>)> {
    if calibrate {
        let cal = calibrate_poisson_constant(trials, POISSON_CALIBRATION_SEED)?;
        write_entry(config_path, "verify", "poisson_constant", serde_json::json!(cal.constant))?;
        let ok = cal.constant.is_finite() && cal.constant > 0.0;
        let row = CheckRow {
            suite: "poisson",
            check: format!("calibrated constant written to {}", config_path.display()),
            trials: cal.instances,
            passed: if ok { cal.instances } else { 0 },
            max_err: cal.max_ratio,
            tolerance: cal.constant,
            pass: ok,
        };
        return Ok((row, Some(cal.constant)));
    }
    let held_out = calibrate_poisson_constant(trials, seed ^ 0xBADC0DE)?;
    let row = CheckRow {
        suite: "poisson",
        check: "held-out instances below the constant".into(),
        trials: held_out.instances,
        passed: if held_out.max_ratio <= constant { held_out.instances } else { 0 },
        max_err: held_out.max_ratio,
        tolerance: constant,
        pass: held_out.max_ratio <= constant,
    };
    Ok((row, None))
}

pub fn run(args: &VerifyArgs, file: Option<&ConfigFile>, config_path: Option<&Path>) -> CliResult<Outcome> {
    let args = overlay(args, file, "verify")?;
    let suite = args.suite.unwrap_or(Suite::All);
    let seed = args.seed.unwrap_or(0);
    let n = args.n.unwrap_or(40);
    let width = args.width.unwrap_or(30);
    let constant = args.poisson_constant.unwrap_or(POISSON_CONSTANT);
    let trials = |default: usize| args.trials.unwrap_or(default);
    let runs = |s: Suite| suite == s || suite == Suite::All;

    let mut rows = Vec::new();
    let mut calibrated = None;
    if runs(Suite::Sze2) {
        rows.push(sze2(trials(300), width, seed)?);
    }
    if runs(Suite::SineStructure) {
        rows.push(sine_structure(trials(50), n, seed)?);
    }
    if runs(Suite::AveLow) {
        rows.push(ave_low(seed)?);
    }
    if runs(Suite::Nonmin) {
        rows.extend(nonmin(trials(200), seed)?);
    }
    if runs(Suite::Poisson) {
        let path = config_path.unwrap_or(Path::new(DEFAULT_CONFIG_PATH));
        let (row, c) = poisson(trials(1000), seed, constant, args.calibrate, path)?;
        rows.push(row);
        calibrated = c;
    }
    let all = rows.iter().all(|r| r.pass);
    let mut summary = String::new();
    for r in &rows {
        summary += &format!(
            "{} {:<15} {:<70} {}/{}  max {:.3e}  tol {:.1e}\n",
            if r.pass { "PASS" } else { "FAIL" },
            r.suite,
            r.check,
            r.passed,
            r.trials,
            r.max_err,
            r.tolerance
        );
    }
    let config = to_value(&VerifyArgs {
        suite: Some(suite),
        trials: args.trials,
        n: Some(n),
        width: Some(width),
        seed: Some(seed),
        calibrate: args.calibrate,
        poisson_constant: Some(constant),
    });
    Ok(Outcome {
        command: "verify",
        exit: if all { Exit::Pass } else { Exit::GateFailure },
        config,
        seed: Some(seed),
        result: serde_json::json!({ "checks": to_value(&rows), "calibrated_poisson_constant": calibrated }),
        csv: csv_rows(&rows)?,
        summary,
    })
}

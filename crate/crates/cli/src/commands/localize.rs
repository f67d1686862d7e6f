use clap::Args;
use serde::{Deserialize, Serialize};
use uamo_core::arithmetic::{beta_estimate, gamma_tilde};
use uamo_core::localization::{run_localization_experiment, ExperimentConfig, LocalizationReport, Tolerances};
use uamo_core::model::Coupling;
use uamo_core::LabError;

use crate::config::{overlay, ConfigFile};
use crate::error::{CliError, CliResult, Exit};
use crate::freq::FreqArgs;
use crate::output::{to_value, Outcome};

/// Inner-scale ε used unless overridden: the admissible choice `(4β + 250)ε < ε₀` is of
/// order 1e-5, at which no site of a finite truncation is non-resonant.
pub const DEFAULT_EPSILON: f64 = 0.1;
const NOMINAL_EPSILON0: f64 = 1e-3;

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct LocalizeArgs {
    #[arg(long)]
    pub l1: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub freq: FreqArgs,
    #[arg(long, conflicts_with = "theta_resonant")]
    pub theta: Option<f64>,
    /// `k=K`: phase `θ = 1/4 − Kω/2`, which makes `2θ + Kω ∈ 1/2 + ℤ`.
    #[arg(long)]
    pub theta_resonant: Option<String>,
    /// Truncation half-width: the interval is `[−N, N]`.
    #[arg(long = "N")]
    pub n_half: Option<i64>,
    /// Scale index of the resonance analysis; defaults to the largest `n` with `2q_{n+1} ≤ N/4`.
    #[arg(long)]
    pub scale: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Defaults to `(L − β)/200`.
    #[arg(long)]
    pub epsilon0: Option<f64>,
    #[arg(long)]
    pub boundary_phase: Option<f64>,
    #[arg(long)]
    pub max_t: Option<i64>,
    #[arg(long)]
    pub envelope_width: Option<i64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report without asserting the gates.
    #[arg(long)]
    pub diagnostic_only: bool,
    /// Refuse to run (exit 2) when the phase is resonant.
    #[arg(long)]
    pub require_nonresonant: bool,
    /// Pass thresholds; config file only.
    #[arg(skip)]
    pub tolerances: Option<Tolerances>,
}

fn parse_resonant(spec: &str) -> CliResult<i64> {
    spec.trim()
        .strip_prefix("k=")
        .and_then(|k| k.parse().ok())
        .ok_or_else(|| CliError::Usage(format!("--theta-resonant expects k=<integer>, got `{spec}`")))
}

pub fn run(args: &LocalizeArgs, file: Option<&ConfigFile>) -> CliResult<Outcome> {
    let args = overlay(args, file, "localize")?;
    let coupling = Coupling::new(args.l1.unwrap_or(0.6), args.l2.unwrap_or(0.8))?;
    let (freq, used) = args.freq.resolve(40)?;
    let theta = match &args.theta_resonant {
        Some(spec) => (0.25 - parse_resonant(spec)? as f64 * freq.omega_f64() / 2.0).rem_euclid(1.0),
        None => args.theta.unwrap_or(0.123),
    };
    let n_half = args.n_half.unwrap_or(1000);
    let beta = beta_estimate(&freq, freq.depth() / 2)?.deep_half_sup;

    // with β ≥ L or a non-supercritical coupling the run is a diagnostic and ε₀ only nominal
    let epsilon0 = args.epsilon0.unwrap_or_else(|| {
        let e = (coupling.l - beta) / 200.0;
        if e > 0.0 {
            e
        } else {
            NOMINAL_EPSILON0
        }
    });
    let cfg = ExperimentConfig {
        epsilon: args.epsilon.unwrap_or(DEFAULT_EPSILON),
        epsilon0,
        n_half,
        boundary_phase: args.boundary_phase.unwrap_or(0.0),
        seed: args.seed.unwrap_or(0),
        scale: args.scale,
        max_t: args.max_t.unwrap_or(3),
        envelope_width: args.envelope_width,
        gamma_n_max: 1000,
        tolerances: args.tolerances.unwrap_or_default(),
    };
    cfg.validate()?;

    if args.require_nonresonant {
        let phase = gamma_tilde(&freq, theta, cfg.gamma_n_max)?;
        if phase.is_resonant(cfg.tolerances.gamma) {
            return Err(LabError::NonResonanceViolated(format!(
                "theta = {theta}: estimate {:.4}, exact resonances at {:?}",
                phase.estimate, phase.exact_resonances
            ))
            .into());
        }
    }

    let mut report = run_localization_experiment(&cfg, &coupling, &freq, theta)?;
    if args.diagnostic_only && report.gates.is_some() {
        report.gates = None;
        report.diagnostic_only = true;
        report.notes.push("gates not asserted on request".into());
    }
    let exit = if report.gates_pass() { Exit::Pass } else { Exit::GateFailure };
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    let config = to_value(&LocalizeArgs {
        l1: Some(coupling.lambda1),
        l2: Some(coupling.lambda2),
        freq: used,
        theta: Some(theta),
        theta_resonant: args.theta_resonant.clone(),
        n_half: Some(n_half),
        scale: Some(report.scale),
        epsilon: Some(cfg.epsilon),
        epsilon0: Some(cfg.epsilon0),
        boundary_phase: Some(cfg.boundary_phase),
        max_t: Some(cfg.max_t),
        envelope_width: cfg.envelope_width,
        seed: Some(cfg.seed),
        diagnostic_only: args.diagnostic_only,
        require_nonresonant: args.require_nonresonant,
        tolerances: Some(cfg.tolerances),
    });
    Ok(Outcome {
        command: "localize",
        exit,
        config,
        seed: Some(cfg.seed),
        summary: summary(&report),
        result: to_value(&report),
        csv,
    })
}

fn summary(r: &LocalizationReport) -> String {
    let mut s = format!(
        "lambda = ({}, {}), theta = {:.6}, N = {}, scale n = {} (q_n = {}), beta_est = {:.3e}\n",
        r.lambda1, r.lambda2, r.theta, r.config.n_half, r.scale, r.q_n, r.beta_est
    );
    s += &format!(
        "eigenvalues {}, interior {}, fitted {}, skipped {}\n",
        r.eigenvalue_count,
        r.interior_count,
        r.profiles.len(),
        r.skipped
    );
    s += &format!(
        "median rate {:.4} vs L/2 = {:.4} (rel {:+.2}%), within 15%: {:.1}%, within 25%: {:.1}%\n",
        r.median_rate,
        r.target_rate,
        100.0 * (r.median_rate - r.target_rate) / r.target_rate,
        100.0 * r.frac_within,
        100.0 * r.frac_within_wide
    );
    s += &format!(
        "non-resonant pairs {:.1}%, profiles {:.1}%, block decay {:.1}%, violations logged {}\n",
        100.0 * r.nonres_pair_rate,
        100.0 * r.nonres_profile_rate,
        100.0 * r.r2t_pass_rate,
        r.violations.len()
    );
    for n in &r.notes {
        s += &format!("note: {n}\n");
    }
    s += &match r.gates {
        None => "gates: not asserted (diagnostic)\n".to_string(),
        Some(g) => format!(
            "gates: median {} interior {} nonres {} r2t {} => {}\n",
            g.median_rate,
            g.interior_count,
            g.nonres,
            g.r2t,
            if g.all() { "PASS" } else { "FAIL" }
        ),
    };
    s
}

use clap::Args;
use serde::{Deserialize, Serialize};
use uamo_core::cocycle::lyapunov_estimates;
use uamo_core::localization::banded_spectral_points;
use uamo_core::model::{Boundary, Coupling, VerblunskySequence};
use uamo_core::stats;

use crate::config::{overlay, ConfigFile};
use crate::error::{CliError, CliResult, Exit};
use crate::freq::FreqArgs;
use crate::output::{csv_rows, to_value, Outcome};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct LyapunovArgs {
    #[arg(long)]
    pub l1: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub freq: FreqArgs,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Orbit length of each cocycle product.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Phase samples averaged per spectral point.
    #[arg(long)]
    pub phase_samples: Option<usize>,
    /// Number of spectral points taken from the truncation.
    #[arg(long)]
    pub points: Option<usize>,
    /// Half-width of the truncation `[−N, N]` supplying the spectral points.
    #[arg(long = "N")]
    pub n_half: Option<i64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest accepted |estimate − closed form|.
    #[arg(long)]
    pub tol: Option<f64>,
}

impl LyapunovArgs {
    fn with_defaults(self) -> Self {
        Self {
            theta: Some(self.theta.unwrap_or(0.0)),
            steps: Some(self.steps.unwrap_or(100_000)),
            phase_samples: Some(self.phase_samples.unwrap_or(8)),
            points: Some(self.points.unwrap_or(20)),
            n_half: Some(self.n_half.unwrap_or(2000)),
            seed: Some(self.seed.unwrap_or(0)),
            tol: Some(self.tol.unwrap_or(0.01)),
            ..self
        }
    }
}

#[derive(Serialize)]
struct PointRow {
    eta: f64,
    value: f64,
    stderr: f64,
    skipped: usize,
}

pub fn run(args: &LyapunovArgs, file: Option<&ConfigFile>) -> CliResult<Outcome> {
    let args = overlay(args, file, "lyapunov")?.with_defaults();
    let (Some(l1), Some(l2)) = (args.l1, args.l2) else {
        return Err(CliError::Usage("lyapunov needs --l1 and --l2".into()));
    };
    let coupling = Coupling::new(l1, l2)?;
    let (freq, used) = args.freq.resolve(40)?;
    let seq = VerblunskySequence::new(coupling, &freq, args.theta.unwrap());
    let pts = banded_spectral_points(
        &seq,
        args.n_half.unwrap(),
        Boundary::closure(),
        args.points.unwrap(),
        args.seed.unwrap(),
    )?;
    let est = lyapunov_estimates(&seq, &pts, args.steps.unwrap(), args.phase_samples.unwrap())?;
    let values: Vec<f64> = est.iter().map(|e| e.value).collect();
    let value = stats::mean(&values);
    let stderr = stats::std_error(&values);
    let closed_form = coupling.lyapunov_closed_form();
    let abs_error = (value - closed_form).abs();
    let tol = args.tol.unwrap();
    let exit = if abs_error <= tol { Exit::Pass } else { Exit::GateFailure };
    let rows: Vec<PointRow> = est
        .iter()
        .zip(&pts)
        .map(|(e, p)| PointRow { eta: p.eta, value: e.value, stderr: e.stderr, skipped: e.skipped })
        .collect();
    let summary = format!(
        "regime {:?}\nestimate    {value:.6} ± {stderr:.2e} over {} spectral points\nclosed form {closed_form:.6}\nabs error   {abs_error:.3e} (tol {tol:e}): {}\n",
        coupling.regime,
        pts.len(),
        if exit == Exit::Pass { "PASS" } else { "FAIL" },
    );
    let config = to_value(&LyapunovArgs { freq: used, ..args });
    Ok(Outcome {
        command: "lyapunov",
        exit,
        config,
        seed: args.seed,
        result: serde_json::json!({
            "value": value,
            "stderr": stderr,
            "method": est.first().map(|e| e.method),
            "closed_form": closed_form,
            "abs_error": abs_error,
            "points": rows,
        }),
        csv: csv_rows(&rows)?,
        summary,
    })
}

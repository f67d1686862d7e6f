use clap::Args;
use serde::{Deserialize, Serialize};
use uamo_core::arithmetic::beta_estimate;
use uamo_core::interpolation::{interpolation_defect, write_window_csv, DefectParams};
use uamo_core::model::{Coupling, VerblunskySequence};

use super::windows::SiteArgs;
use crate::config::{overlay, ConfigFile};
use crate::error::{CliResult, Exit};
use crate::freq::FreqArgs;
use crate::output::{to_value, Outcome};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct DefectArgs {
    #[arg(long)]
    pub l1: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub freq: FreqArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub site: SiteArgs,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Defaults to `(L − β)/200`.
    #[arg(long)]
    pub epsilon0: Option<f64>,
    /// Defaults to the deep-tail estimate of the frequency.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Points of the phase grid on which sup and min are taken.
    #[arg(long)]
    pub grid: Option<usize>,
}

pub fn run(args: &DefectArgs, file: Option<&ConfigFile>) -> CliResult<Outcome> {
    let args = overlay(args, file, "defect")?;
    let coupling = Coupling::new(args.l1.unwrap_or(0.6), args.l2.unwrap_or(0.8))?;
    let (freq, used) = args.freq.resolve(40)?;
    let site = args.site.with_defaults()?;
    let theta = args.theta.unwrap_or(0.123);
    let beta = match args.beta {
        Some(b) => b,
        None => beta_estimate(&freq, freq.depth() / 2)?.deep_half_sup,
    };
    let epsilon0 = args.epsilon0.unwrap_or((coupling.l - beta) / 200.0);
    let grid = args.grid.unwrap_or(512);
    let w = site.select(&freq)?;
    let seq = VerblunskySequence::new(coupling, &freq, theta);
    let d = interpolation_defect(&seq, &w, theta, grid, &DefectParams { epsilon0, beta })?;
    let mut csv = Vec::new();
    write_window_csv(&[d.row()], &mut csv)?;
    let pass = d.passes();
    let summary = format!(
        "{:?} at y = {}, q_n = {}: {} nodes, identity error {:.2e}\n\
         sum1 {:.4} (bound {:.4}), sum2 {:.4} (bound {:.4}), ln sup U {:.4} (bound {:.4})\n\
         flags {:?} => {}\n",
        d.mode,
        w.y,
        d.q_n,
        d.node_count,
        d.identity_err,
        d.sum1,
        d.bounds.sum1,
        d.sum2,
        d.bounds.sum2,
        d.ln_sup_u,
        d.bounds.ln_sup_u,
        d.satisfied,
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(Outcome {
        command: "defect",
        exit: if pass { Exit::Pass } else { Exit::GateFailure },
        config: to_value(&DefectArgs {
            l1: Some(coupling.lambda1),
            l2: Some(coupling.lambda2),
            freq: used,
            site,
            theta: Some(theta),
            epsilon0: Some(epsilon0),
            beta: Some(beta),
            grid: Some(grid),
        }),
        seed: None,
        result: to_value(&d),
        csv,
        summary,
    })
}

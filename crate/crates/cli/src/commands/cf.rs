use clap::Args;
use serde::{Deserialize, Serialize};

use crate::config::{overlay, ConfigFile};
use crate::error::{CliError, CliResult, Exit};
use crate::freq::FreqArgs;
use crate::output::{csv_rows, to_value, Outcome};

pub const DEFAULT_DEPTH: usize = 12;

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CfArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub freq: FreqArgs,
}

pub fn run(args: &CfArgs, file: Option<&ConfigFile>) -> CliResult<Outcome> {
    let args = overlay(args, file, "cf")?;
    // one quotient beyond the requested depth, so that the table reaches q_depth; the
    // expansion of a built frequency continues with ones
    let mut ext = args.freq.clone();
    match &mut ext.quotients {
        Some(qs) if !qs.is_empty() => qs.push(1),
        Some(_) => return Err(CliError::Usage("empty quotient list".into())),
        None => ext.depth = Some(args.freq.depth.unwrap_or(DEFAULT_DEPTH) + 1),
    }
    let (freq, mut used) = ext.resolve(DEFAULT_DEPTH)?;
    if let Some(qs) = &mut used.quotients {
        qs.pop();
    }
    used.depth = used.depth.map(|d| d - 1);
    let rows = freq.scale_table();
    let mut summary = format!("{:>4}  {:>22}  {:>14}  {:>14}\n", "n", "q_n", "ln q_n+1 / q_n", "||q_n omega||");
    for r in &rows {
        summary += &format!("{:>4}  {:>22}  {:>14.6e}  {:>14.6e}\n", r.n, r.q_n, r.log_ratio, r.norm_qn_omega);
    }
    Ok(Outcome {
        command: "cf",
        exit: Exit::Pass,
        config: to_value(&CfArgs { freq: used }),
        seed: None,
        result: serde_json::json!({
            "omega": freq.omega_f64(),
            "frequency": freq.to_spec(),
            "rows": rows,
        }),
        csv: csv_rows(&rows)?,
        summary,
    })
}

//! Frequency selection shared by the subcommands.

use clap::Args;
use serde::{Deserialize, Serialize};
use uamo_core::arithmetic::{cf_build, cf_expand, golden, Frequency, HpReal, DEFAULT_PRECISION_BITS};
use uamo_core::LabError;

use crate::error::{CliError, CliResult};

/// Leading partial quotients of `π − 3`.
pub const PI_MINUS_3_QUOTIENTS: [u64; 60] = [
    7, 15, 1, 292, 1, 1, 1, 2, 1, 3, 1, 14, 2, 1, 1, 2, 2, 2, 2, 1, 84, 2, 1, 1, 15, 3, 13, 1, 4, 2, 6, 6, 99, 1, 2, 2,
    6, 3, 5, 1, 1, 6, 8, 1, 7, 1, 2, 3, 7, 1, 2, 1, 1, 12, 1, 1, 1, 3, 1, 1,
];

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct FreqArgs {
    /// `golden`, `silver`, `pi-3`, or a decimal in (0, 1).
    #[arg(long, conflicts_with = "quotients")]
    pub omega: Option<String>,
    /// Comma-separated partial quotients a_1,a_2,...; the expansion continues with ones.
    #[arg(long, alias = "omega-quotients", value_delimiter = ',')]
    pub quotients: Option<Vec<u64>>,
    /// Number of partial quotients to expand.
    #[arg(long)]
    pub depth: Option<usize>,
}

impl FreqArgs {
    /// Resolves to a frequency; the returned args have every field that was used filled in.
    pub fn resolve(&self, default_depth: usize) -> CliResult<(Frequency, FreqArgs)> {
        if self.omega.is_some() && self.quotients.is_some() {
            return Err(CliError::Usage("give either omega or quotients, not both".into()));
        }
        if let Some(qs) = &self.quotients {
            if qs.is_empty() || qs.contains(&0) {
                return Err(CliError::Usage("partial quotients must be positive".into()));
            }
            let freq = cf_build(qs)?;
            let used = FreqArgs { omega: None, quotients: Some(qs.clone()), depth: Some(qs.len()) };
            return Ok((freq, used));
        }
        let depth = self.depth.unwrap_or(default_depth);
        let omega = self.omega.clone().unwrap_or_else(|| "golden".into());
        let freq = named(&omega, depth)?.map_or_else(|| decimal(&omega, depth), Ok)?;
        Ok((freq, FreqArgs { omega: Some(omega), quotients: None, depth: Some(depth) }))
    }
}

fn named(name: &str, depth: usize) -> CliResult<Option<Frequency>> {
    Ok(Some(match name {
        "golden" => golden(depth)?,
        "silver" => cf_build(&vec![2; depth.max(1)])?,
        "pi-3" => {
            if depth > PI_MINUS_3_QUOTIENTS.len() {
                return Err(LabError::DepthExceeded { requested: depth, depth: PI_MINUS_3_QUOTIENTS.len() }.into());
            }
            cf_build(&PI_MINUS_3_QUOTIENTS[..depth.max(1)])?
        }
        _ => return Ok(None),
    }))
}

fn decimal(s: &str, depth: usize) -> CliResult<Frequency> {
    let digits = s.trim().len() as u32;
    let bits = DEFAULT_PRECISION_BITS.max(4 * digits);
    let x = HpReal::parse_decimal(s.trim(), bits)
        .map_err(|e| CliError::Usage(format!("omega `{s}` is neither a known name nor a decimal: {e}")))?;
    Ok(cf_expand(&x, depth)?)
}

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use uamo_core::interpolation::{select_windows, WindowMode, WindowSelection};

use crate::config::{overlay, ConfigFile};
use crate::error::{CliError, CliResult, Exit};
use crate::freq::FreqArgs;
use crate::output::{csv_rows, to_value, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    NonResonant,
    Resonant,
    Weak,
}

impl From<Mode> for WindowMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::NonResonant => WindowMode::NonResonant,
            Mode::Resonant => WindowMode::Resonant,
            Mode::Weak => WindowMode::WeakLiouville,
        }
    }
}

/// Site, scale and mode of a window selection; shared with `defect`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SiteArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<i64>,
    /// Scale index n (q_n = 89 at n = 10 for the golden mean).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub epsilon: Option<f64>,
}

impl SiteArgs {
    pub fn with_defaults(self) -> CliResult<Self> {
        let y = self.y.ok_or_else(|| CliError::Usage("missing --y".into()))?;
        Ok(Self {
            y: Some(y),
            n: Some(self.n.unwrap_or(10)),
            mode: Some(self.mode.unwrap_or(Mode::NonResonant)),
            epsilon: Some(self.epsilon.unwrap_or(0.1)),
        })
    }

    pub fn select(&self, freq: &uamo_core::arithmetic::Frequency) -> CliResult<WindowSelection> {
        let w = select_windows(freq, self.y.unwrap(), self.n.unwrap(), self.epsilon.unwrap(), self.mode.unwrap().into())?;
        w.verify()?;
        Ok(w)
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct WindowsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub freq: FreqArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub site: SiteArgs,
}

#[derive(Serialize)]
struct NodeRow {
    window: &'static str,
    block: usize,
    union: usize,
    node: i64,
}

pub fn run(args: &WindowsArgs, file: Option<&ConfigFile>) -> CliResult<Outcome> {
    let args = overlay(args, file, "windows")?;
    let (freq, used) = args.freq.resolve(40)?;
    let site = args.site.with_defaults()?;
    let w = site.select(&freq)?;
    let rows: Vec<NodeRow> = if w.blocks.is_empty() {
        // resonant windows are not tiled
        let iy = w.iy.iter().map(|&node| NodeRow { window: "iy", block: 0, union: 0, node });
        iy.chain(w.i0.iter().map(|&node| NodeRow { window: "i0", block: 0, union: 0, node })).collect()
    } else {
        let s = (w.blocks.len() / 4).max(1);
        w.blocks
            .iter()
            .enumerate()
            .flat_map(|(b, nodes)| {
                let window = if b < 3 * s { "iy" } else { "i0" };
                nodes.iter().map(move |&node| NodeRow { window, block: b + 1, union: b / s + 1, node })
            })
            .collect()
    };
    let summary = format!(
        "{:?} window at y = {}, q_n = {} (n = {}): dist {}, m {:?} (q_m {:?}), s {:?}, h {}, {} + {} nodes, parity shift {}\n",
        w.mode,
        w.y,
        w.q_n,
        w.n,
        w.dist,
        w.m,
        w.q_m,
        w.s,
        w.h,
        w.iy.len(),
        w.i0.len(),
        w.parity_shift
    );
    Ok(Outcome {
        command: "windows",
        exit: Exit::Pass,
        config: to_value(&WindowsArgs { freq: used, site }),
        seed: None,
        result: to_value(&w),
        csv: csv_rows(&rows)?,
        summary,
    })
}

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use super::fit::fit_decay;
use super::resonance::{resonance_profile, DecayParams, NonResViolation};
use super::spectrum::truncation_spectrum;
use crate::arithmetic::{beta_estimate, gamma_tilde, Frequency, FrequencySpec};
use crate::error::{LabError, Result};
use crate::model::{Boundary, Coupling, Regime, VerblunskySequence};
use crate::stats;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// Per-eigenfunction outcome; the CSV row of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub eta: f64,
    pub center: i64,
    pub fitted_rate: f64,
    pub residual: f64,
    pub nonres_pass: bool,
    pub r2t_pass: bool,
    pub nonres_tested: usize,
    pub nonres_passed: usize,
    pub r2t_slope: f64,
    /// `ln r_{2t}/r_0` for `t = −T..=T` where the block is inside the profile.
    pub log_r2t: Vec<(i64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoggedViolation {
    pub eta: f64,
    pub center: i64,
    pub violation: NonResViolation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gates {
    pub median_rate: bool,
    pub interior_count: bool,
    pub nonres: bool,
    pub r2t: bool,
}

impl Gates {
    pub fn all(&self) -> bool {
        self.median_rate && self.interior_count && self.nonres && self.r2t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub config: ExperimentConfig,
    pub lambda1: f64,
    pub lambda2: f64,
    pub frequency: FrequencySpec,
    pub theta: f64,
    pub scale: usize,
    pub q_n: u64,
    pub beta_est: f64,
    /// `L/2`.
    pub target_rate: f64,
    pub eigenvalue_count: usize,
    pub interior_count: usize,
    /// Interior profiles whose envelope was too flat or whose scale did not fit.
    pub skipped: usize,
    pub profiles: Vec<ProfileSummary>,
    pub median_rate: f64,
    pub frac_within: f64,
    pub frac_within_wide: f64,
    /// Fraction of (eigenfunction, non-resonant y) pairs satisfying the inequality.
    pub nonres_pair_rate: f64,
    /// Fraction of eigenfunctions satisfying it at every tested y.
    pub nonres_profile_rate: f64,
    pub r2t_pass_rate: f64,
    pub violations: Vec<LoggedViolation>,
    /// Set when gates are not asserted: resonant phase, `β ≥ L`, or non-supercritical coupling.
    pub diagnostic_only: bool,
    pub notes: Vec<String>,
    pub gates: Option<Gates>,
}

impl LocalizationReport {
    pub fn gates_pass(&self) -> bool {
        self.gates.map_or(true, |g| g.all())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        #[derive(Serialize)]
        struct Row {
            eta: f64,
            center: i64,
            fitted_rate: f64,
            residual: f64,
            nonres_pass: bool,
            r2t_pass: bool,
        }
        let mut wr = csv::Writer::from_writer(w);
        for p in &self.profiles {
            wr.serialize(Row {
                eta: p.eta,
                center: p.center,
                fitted_rate: p.fitted_rate,
                residual: p.residual,
                nonres_pass: p.nonres_pass,
                r2t_pass: p.r2t_pass,
            })
            .map_err(|e| LabError::Serialization(e.to_string()))?;
        }
        wr.flush().map_err(|e| LabError::Serialization(e.to_string()))
    }

    pub fn manifest(&self) -> ExperimentManifest {
        ExperimentManifest::new(&self.config, self.lambda1, self.lambda2, &self.frequency, self.theta)
    }
}

/// Inputs of a run with a content hash over their canonical JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub lambda1: f64,
    pub lambda2: f64,
    pub frequency: FrequencySpec,
    pub theta: f64,
    pub input_hash: String,
}

/// SHA-256 of `blob <len>\0<bytes>`, the object hashing scheme of git.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl ExperimentManifest {
    pub fn new(config: &ExperimentConfig, lambda1: f64, lambda2: f64, frequency: &FrequencySpec, theta: f64) -> Self {
        let inputs = serde_json::to_string(&(config, lambda1, lambda2, frequency, theta)).expect("inputs serialize");
        Self {
            schema_version: MANIFEST_SCHEMA_VERSION,
            config: config.clone(),
            lambda1,
            lambda2,
            frequency: frequency.clone(),
            theta,
            input_hash: content_hash(inputs.as_bytes()),
        }
    }
}

/// Largest `n` with `2q_{n+1} ≤ N/4`.
pub fn auto_scale(freq: &Frequency, n_half: i64) -> Result<usize> {
    let mut best = None;
    for n in 0..freq.depth() {
        if 2 * freq.q_u64(n + 1)? as i64 <= n_half / 4 {
            best = Some(n);
        } else {
            break;
        }
    }
    best.ok_or_else(|| LabError::ScaleTooLarge { two_qn: 2 * freq.q_u64(1).unwrap_or(1), radius: n_half / 4 })
}

/// Build, diagonalize, fit every interior eigenfunction and measure the resonance-block
/// inequalities at one scale.
pub fn run_localization_experiment(
    config: &ExperimentConfig,
    coupling: &Coupling,
    freq: &Frequency,
    theta: f64,
) -> Result<LocalizationReport> {
    config.validate()?;
    let tol = &config.tolerances;
    let scale = match config.scale {
        Some(n) => n,
        None => auto_scale(freq, config.n_half)?,
    };
    let q_n = freq.q_u64(scale)?;
    let beta_est = beta_estimate(freq, freq.depth() / 2)?.deep_half_sup;
    let mut notes = Vec::new();
    let mut diagnostic_only = false;
    if coupling.regime != Regime::Supercritical {
        diagnostic_only = true;
        notes.push(format!("coupling is {:?}; gates not asserted", coupling.regime));
    }
    if beta_est >= coupling.l {
        diagnostic_only = true;
        notes.push(format!("beta_est = {beta_est:.4} >= L = {:.4}; gates not asserted", coupling.l));
    }
    let phase = gamma_tilde(freq, theta, config.gamma_n_max)?;
    if phase.is_resonant(tol.gamma) {
        diagnostic_only = true;
        let e = LabError::NonResonanceViolated(format!(
            "gamma estimate {:.4}, exact resonances at {:?}",
            phase.estimate, phase.exact_resonances
        ));
        notes.push(e.to_string());
    }

    let seq = VerblunskySequence::new(*coupling, freq, theta);
    let spectrum = truncation_spectrum(&seq, config.n_half, Boundary::UnitaryClosure { phase: config.boundary_phase })?;
    let eigenvalue_count = spectrum.len();
    let mut interior: Vec<_> = spectrum
        .into_iter()
        .filter(|p| p.is_interior(config.n_half / 2, tol.boundary_layer, tol.boundary_mass))
        .collect();
    interior.sort_by(|a, b| a.eta.total_cmp(&b.eta).then(a.center.cmp(&b.center)));
    let width = match config.envelope_width {
        Some(w) => w,
        None => (freq.q_u64(scale.saturating_sub(1))? as i64).max(5),
    };
    let params = DecayParams {
        l: coupling.l,
        beta: beta_est,
        epsilon: config.epsilon,
        epsilon0: config.epsilon0,
        max_t: config.max_t,
        boundary_layer: tol.boundary_layer,
        slack_c: tol.slack_c,
        slope_slack: tol.r2t_slope_slack,
    };
    let outcomes: Vec<Option<(ProfileSummary, Vec<LoggedViolation>)>> = interior
        .par_iter()
        .map(|p| {
            let fit = fit_decay(p, width, tol.boundary_layer).ok()?;
            let res = resonance_profile(p, freq, scale, &params).ok()?;
            let r0 = res.r(0).unwrap_or(1.0);
            let logged = res
                .violations
                .iter()
                .map(|v| LoggedViolation { eta: p.eta, center: p.center, violation: v.clone() })
                .collect();
            Some((
                ProfileSummary {
                    eta: p.eta,
                    center: p.center,
                    fitted_rate: fit.rate,
                    residual: fit.residual,
                    nonres_pass: res.nonres_pass(),
                    r2t_pass: res.r2t_pass(),
                    nonres_tested: res.nonres_tested,
                    nonres_passed: res.nonres_passed(),
                    r2t_slope: res.r2t_slope,
                    log_r2t: res.blocks.iter().map(|&(t, r)| (t, (r / r0).ln())).collect(),
                },
                logged,
            ))
        })
        .collect();
    let interior_count = interior.len();
    let skipped = outcomes.iter().filter(|o| o.is_none()).count();
    let (profiles, logs): (Vec<_>, Vec<_>) = outcomes.into_iter().flatten().unzip();
    let violations: Vec<LoggedViolation> = logs.into_iter().flatten().collect();

    let target_rate = coupling.l / 2.0;
    let rates: Vec<f64> = profiles.iter().map(|p| p.fitted_rate).collect();
    let frac = |rel: f64| {
        rates.iter().filter(|r| (*r - target_rate).abs() <= rel * target_rate).count() as f64 / rates.len().max(1) as f64
    };
    let tested: usize = profiles.iter().map(|p| p.nonres_tested).sum();
    let passed: usize = profiles.iter().map(|p| p.nonres_passed).sum();
    let count = profiles.len().max(1) as f64;
    let median_rate = stats::median(&rates);
    let nonres_pair_rate = if tested == 0 { f64::NAN } else { passed as f64 / tested as f64 };
    let r2t_pass_rate = profiles.iter().filter(|p| p.r2t_pass).count() as f64 / count;
    let gates = (!diagnostic_only).then(|| Gates {
        median_rate: (median_rate - target_rate).abs() <= tol.rate_rel * target_rate,
        interior_count: profiles.len() >= tol.min_interior,
        nonres: nonres_pair_rate >= tol.nonres_pass,
        r2t: r2t_pass_rate >= tol.r2t_pass,
    });
    Ok(LocalizationReport {
        config: config.clone(),
        lambda1: coupling.lambda1,
        lambda2: coupling.lambda2,
        frequency: freq.to_spec(),
        theta,
        scale,
        q_n,
        beta_est,
        target_rate,
        eigenvalue_count,
        interior_count,
        skipped,
        median_rate,
        frac_within: frac(tol.rate_rel),
        frac_within_wide: frac(tol.rate_rel_wide),
        nonres_pair_rate,
        nonres_profile_rate: profiles.iter().filter(|p| p.nonres_pass).count() as f64 / count,
        r2t_pass_rate,
        profiles,
        violations,
        diagnostic_only,
        notes,
        gates,
    })
}

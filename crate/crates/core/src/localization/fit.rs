use serde::{Deserialize, Serialize};

use super::spectrum::EigenfunctionProfile;
use crate::error::{LabError, Result};
use crate::stats::linear_fit;

/// Smallest dynamic range of a fittable envelope, in decades.
pub const MIN_DECADES: f64 = 3.0;

/// Envelope values at or below this are treated as underflow and end the fit window.
const ENVELOPE_FLOOR: f64 = 1e-290;

/// Least-squares decay of the envelope `ln max_{window} |ψ|` against the distance from the center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    /// RMS residual of the log-envelope about the fitted line.
    pub residual: f64,
    pub width: i64,
    /// Distance range `[first, last]` of the fitted envelope points.
    pub window: (i64, i64),
    /// `(distance of the window maximum, ln of the maximum)`.
    pub envelope: Vec<(i64, f64)>,
    pub decades: f64,
}

/// Envelope over distance windows `[kw, (k+1)w)`, `k ≥ 1`, merged over both sides of the
/// center, kept while the window ends at least `exclusion` sites before the nearer boundary.
pub fn envelope(profile: &EigenfunctionProfile, width: i64, exclusion: i64) -> Vec<(i64, f64)> {
    let d_max = profile.radius() - exclusion;
    let c = profile.center;
    let mut out = Vec::new();
    let mut k = 1;
    while (k + 1) * width - 1 <= d_max {
        let mut best = (k * width, 0.0f64);
        for d in k * width..(k + 1) * width {
            for site in [c - d, c + d] {
                let v = profile.amplitude(site);
                if v > best.1 {
                    best = (d, v);
                }
            }
        }
        if best.1 <= ENVELOPE_FLOOR {
            break;
        }
        out.push((best.0, best.1.ln()));
        k += 1;
    }
    out
}

/// Decay rate of a centered profile from its windowed envelope.
pub fn fit_decay(profile: &EigenfunctionProfile, width: i64, exclusion: i64) -> Result<DecayFit> {
    if width < 1 {
        return Err(LabError::DomainError(format!("envelope width {width} < 1")));
    }
    let env = envelope(profile, width, exclusion);
    let (lo, hi) = env.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, v)| (lo.min(v), hi.max(v)));
    let decades = if env.is_empty() { 0.0 } else { (hi - lo) / std::f64::consts::LN_10 };
    if env.len() < 3 || decades < MIN_DECADES {
        return Err(LabError::FlatProfile { decades });
    }
    let x: Vec<f64> = env.iter().map(|p| p.0 as f64).collect();
    let y: Vec<f64> = env.iter().map(|p| p.1).collect();
    let (slope, _, residual) = linear_fit(&x, &y);
    Ok(DecayFit {
        rate: -slope,
        residual,
        width,
        window: (env[0].0, env[env.len() - 1].0),
        envelope: env,
        decades,
    })
}

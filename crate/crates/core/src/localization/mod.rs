//! Truncated eigenproblems, envelope decay rates and the resonance-block inequalities.

mod config;
mod experiment;
mod fit;
mod resonance;
mod spectrum;

pub use config::{ExperimentConfig, Tolerances};
pub use experiment::{
    auto_scale, content_hash, run_localization_experiment, ExperimentManifest, Gates, LocalizationReport,
    LoggedViolation, ProfileSummary, MANIFEST_SCHEMA_VERSION,
};
pub use fit::{envelope, fit_decay, DecayFit, MIN_DECADES};
pub use resonance::{resonance_profile, DecayParams, NonResViolation, ResonanceProfile};
pub use spectrum::{
    banded_spectral_points, truncation_spectrum, EigenfunctionProfile, MIN_HALF_WIDTH, UNIMODULAR_TOL,
};

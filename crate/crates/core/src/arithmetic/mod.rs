//! Continued fractions, torus norms and the arithmetic exponents of the frequency and phase.

mod continued_fraction;
mod exponents;
mod precise;

pub use continued_fraction::{
    appro1_scan, appro2_holds, cf_build, cf_build_with_precision, cf_expand, norm_qn_omega, Appro1Report,
    Frequency, FrequencySpec, QuotientValue, ScaleRow, DEFAULT_PRECISION_BITS,
};
pub use exponents::{beta_estimate, classify_scale, gamma_tilde, BetaEstimate, PhaseDiagnostic, ScaleClass, ScaleKind};
pub use precise::{dyadic_to_f64, ldexp, ln_big, HpReal};

/// `dist(x, ℤ)`.
pub fn torus_norm(x: f64) -> f64 {
    let f = x - x.round();
    f.abs()
}

/// The golden mean as a quotient list of length `depth` (all ones), built forward.
pub fn golden(depth: usize) -> crate::Result<Frequency> {
    cf_build(&vec![1; depth.max(1)])
}

use thiserror::Error;

/// Failure modes shared by every module of the laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("continued fraction terminates at depth {at_depth}: frequency is rational at working precision")]
    RationalFrequency { at_depth: usize },
    #[error("precision exhausted at depth {at_depth}: quotient cannot be certified")]
    InsufficientPrecision { at_depth: usize },
    #[error("scale {requested} exceeds stored depth {depth}")]
    DepthExceeded { requested: usize, depth: usize },
    #[error("degenerate coupling: {0}")]
    DegenerateCoupling(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("interval [{a}, {b}] too small: {reason}")]
    IntervalTooSmall { a: i64, b: i64, reason: String },
    #[error("|rho_{index}| = {modulus:e} is below the singularity threshold")]
    NearSingularRho { index: i64, modulus: f64 },
    #[error("too many singular samples: {skipped} of {total}")]
    TooManySingular { skipped: usize, total: usize },
    #[error("alpha_{index} vanishes; connection identity undefined")]
    ZeroAlpha { index: i64 },
    #[error("determinant of [{a}, {b}] is zero")]
    SingularDenominator { a: i64, b: i64 },
    #[error("interpolation nodes {i} and {j} coincide (sine-values within {gap:e})")]
    CollidingNodes { i: usize, j: usize, gap: f64 },
    #[error("window out of regime: {0}")]
    OutOfRegime(String),
    #[error("sine factor underflows at (x1 = {x1}, l = {ell})")]
    ResonantPhase { x1: i64, ell: i64 },
    #[error("eigensolver failure: {0}")]
    EigensolverFailure(String),
    #[error("profile dynamic range {decades:.2} decades is below the fitting threshold")]
    FlatProfile { decades: f64 },
    #[error("scale 2q_n = {two_qn} exceeds profile radius {radius}")]
    ScaleTooLarge { two_qn: u64, radius: i64 },
    #[error("phase is resonant: {0}")]
    NonResonanceViolated(String),
    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

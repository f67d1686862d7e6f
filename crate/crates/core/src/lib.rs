//! Numerical laboratory for the unitary almost Mathieu operator.
//!
//! The operator is realised as an extended CMV matrix `W = 𝓛𝓜` whose Verblunsky
//! coefficients alternate between the constant `λ′₁` and the quasi-periodic coin
//! `λ₂ sin 2π(θ + nω)`. The crate computes its cocycles, determinants and finite
//! eigenfunctions and checks the quantitative statements made about them.

pub mod arithmetic;
pub mod error;
pub mod linalg;
pub mod model;
pub mod cocycle;
pub mod determinant;
pub mod interpolation;
pub mod localization;
pub mod stats;

pub use error::{LabError, Result};

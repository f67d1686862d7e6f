//! Couplings, Verblunsky coefficients and finite restrictions of the CMV operator.

mod cmv;
mod coupling;
mod verblunsky;

pub use cmv::{apply_w, build_finite_cmv, cmv_block, Boundary, FiniteCMV, FiniteSupport};
pub(crate) use cmv::dirichlet_band;
pub use coupling::{make_coupling, Coupling, Regime};
pub use verblunsky::{coin_index, verblunsky, VerblunskySequence};

use serde::{Deserialize, Serialize};

use crate::arithmetic::{Frequency, FrequencySpec};
use crate::error::Result;

/// JSON model description `{"lambda1", "lambda2", "theta", "omega": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    pub theta: f64,
    pub omega: FrequencySpec,
}

impl ModelConfig {
    pub fn build(&self) -> Result<(Frequency, VerblunskySequence)> {
        let coupling = Coupling::new(self.lambda1, self.lambda2)?;
        let freq = Frequency::from_spec(&self.omega)?;
        let seq = VerblunskySequence::new(coupling, &freq, self.theta);
        Ok((freq, seq))
    }
}

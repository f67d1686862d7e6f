//! Szegő transfer matrices, scaled cocycle products and Lyapunov exponents.
//!
//! One step of the cocycle is one CMV index; the phase advances by `ω` every two
//! steps. With this normalization the exponent on the spectrum is `max(0, L/2)`.

mod lyapunov;
mod transfer;

pub use lyapunov::{
    check_rho_product, lyapunov_estimate, lyapunov_estimates, sup_grid, upper_bound_check, write_samples_csv,
    LyapunovEstimate, LyapunovMethod, LyapunovSample, LyapunovSummary, RhoProductReport, UpperBoundReport,
};
pub use transfer::{cocycle_product, szego_matrix, transfer_product, SpectralPoint, TransferProduct, RHO_FLOOR};

//! Dirichlet determinants, the star operation, the Szegő connection and the Poisson inequality.

mod connection;
mod dirichlet;
mod logcomplex;
mod poisson;

pub use connection::{connection_rhs_det_modulus, szego_connection_check, ConnectionReport, ALPHA_FLOOR};
pub use dirichlet::{
    det_polynomial, dirichlet_det, shifted_det, star, write_determinant_csv, DeterminantRow, PolyCoeffs,
    MAX_COEFF_DEGREE,
};
pub use logcomplex::LogComplex;
pub use poisson::{
    calibrate_poisson_constant, poisson_check, poisson_instance, AMPLITUDE_FLOOR, RESIDUAL_TOLERANCE, PoissonCalibration, PoissonReport,
    POISSON_CALIBRATION_SEED, POISSON_CONSTANT,
};

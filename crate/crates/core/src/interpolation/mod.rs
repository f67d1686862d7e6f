//! Lagrange interpolation in the sine variable, the cosine-product estimate, window
//! selection and the interpolation defect `U` with its `Σ₁/Σ₂` decomposition.

mod defect;
mod lagrange;
mod nonmin;
mod structure;
mod windows;

pub use defect::{
    interpolation_defect, DefectBounds, DefectFlags, DefectParams, SumDecomposition, MAX_DEFECT_NODES, SINE_UNDERFLOW,
};
pub use lagrange::{lagrange_eval, NODE_COLLISION_TOL};
pub use nonmin::{
    calibrate_nonmin_constant, cos_product_deviation, CosProductDeviation, NonminCalibration, NONMIN_CALIBRATION_SEED,
    NONMIN_CONSTANT,
};
pub use structure::{ave_low_check, sine_structure_check, AveLowReport, SineStructureFit, MAX_STRUCTURE_HALF_WIDTH};
pub use windows::{select_windows, write_window_csv, WindowMode, WindowRow, WindowSelection};

pub mod cf;
pub mod defect;
pub mod localize;
pub mod lyapunov;
pub mod verify;
pub mod windows;

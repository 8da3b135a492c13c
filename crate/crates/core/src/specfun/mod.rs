//! Special functions: Gamma family and the Meijer G-function.

mod gamma;
mod meijer;

pub use gamma::{gamma, ln_gamma_complex, ln_gamma_signed, log_gamma, sin_pi};
pub use meijer::{meijer_g, MeijerGSpec, MeijerGValue, Strategy, DEFAULT_POLE_SHIFT};

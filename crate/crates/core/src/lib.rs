//! Performance analysis of a dual-hop RF/FSO amplify-and-forward relay link
//! with best-user selection on the RF side.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analytic;
pub mod channels;
pub mod error;
pub mod linkmodel;
pub mod mcsim;
pub mod quadrature;
pub mod scalar;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Real;

pub type SystemConfig64 = linkmodel::SystemConfig<f64>;
pub type TurbulenceModel64 = channels::TurbulenceModel<f64>;
pub type GammaGammaPointing64 = channels::GammaGammaPointing<f64>;
pub type RayleighRf64 = channels::RayleighRf<f64>;
pub type PerformanceCurve64 = analytic::PerformanceCurve<f64>;
pub type PerformancePoint64 = analytic::PerformancePoint<f64>;

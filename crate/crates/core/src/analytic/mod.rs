//! Outage probability and DPSK bit error rate of the relayed link.
//!
//! [`closed_form`] evaluates the Meijer-G expressions, [`quadrature`]
//! integrates the defining expressions directly and is the reference.

mod closed;
mod oracle;
pub mod printed;

use std::fmt;
use std::str::FromStr;

pub use closed::{
    ber_adaptive_gg, ber_adaptive_ne, ber_fixed_gg, ber_fixed_ne, outage_adaptive, outage_fixed_gg, outage_fixed_ne,
};
pub use oracle::{ber_from_outage, ber_quadrature, ber_quadrature_nested, outage_at, outage_quadrature};

use crate::channels::Turbulence;
use crate::error::{Error, Result};
use crate::linkmodel::{Relay, SystemConfig};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Outage,
    Ber,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Outage => "outage",
            Metric::Ber => "ber",
        }
    }

    /// Largest attainable value: 1 for outage, 1/2 for DPSK BER.
    pub fn upper<T: Real>(&self) -> T {
        match self {
            Metric::Outage => T::one(),
            Metric::Ber => T::lit(0.5),
        }
    }
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed",
            Method::Quadrature => "quad",
            Method::MonteCarlo => "mc",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "outage" => Ok(Metric::Outage),
            "ber" => Ok(Metric::Ber),
            _ => Err(Error::InvalidParameter(format!("unknown metric '{s}'"))),
        }
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(Method::ClosedForm),
            "quad" => Ok(Method::Quadrature),
            "mc" => Ok(Method::MonteCarlo),
            _ => Err(Error::InvalidParameter(format!("unknown method '{s}'"))),
        }
    }
}

/// One evaluated grid point. γ̄_FSO = γ̄_RF = 10^{gamma_avg_db/10}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerformancePoint<T> {
    pub gamma_avg_db: T,
    pub metric: T,
    pub metric_kind: Metric,
    pub method: Method,
    pub ci_half_width: T,
}

/// Points sharing method, metric and every parameter except the sweep
/// coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceCurve<T> {
    pub method: Method,
    pub metric_kind: Metric,
    pub n_users: usize,
    pub regime: String,
    pub relay: String,
    pub points: Vec<PerformancePoint<T>>,
}

/// Closed-form value for `cfg`'s relay scheme and turbulence model.
pub fn closed_form<T: Real>(cfg: &SystemConfig<T>, metric: Metric) -> Result<T> {
    let gg = matches!(cfg.fso().turbulence(), Turbulence::GammaGamma(_));
    match (metric, cfg.relay(), gg) {
        (Metric::Outage, Relay::FixedGain { .. }, true) => outage_fixed_gg(cfg),
        (Metric::Outage, Relay::FixedGain { .. }, false) => outage_fixed_ne(cfg),
        (Metric::Outage, Relay::AdaptiveGain, _) => outage_adaptive(cfg),
        (Metric::Ber, Relay::FixedGain { .. }, true) => ber_fixed_gg(cfg),
        (Metric::Ber, Relay::FixedGain { .. }, false) => ber_fixed_ne(cfg),
        (Metric::Ber, Relay::AdaptiveGain, true) => ber_adaptive_gg(cfg),
        (Metric::Ber, Relay::AdaptiveGain, false) => ber_adaptive_ne(cfg),
    }
}

/// Quadrature oracle value.
pub fn quadrature<T: Real>(cfg: &SystemConfig<T>, metric: Metric) -> Result<T> {
    match metric {
        Metric::Outage => outage_quadrature(cfg),
        Metric::Ber => ber_quadrature(cfg),
    }
}

//! Literal transcriptions of printed formulas that disagree with the
//! defining integrals, and an audit that measures each disagreement.

use crate::channels::SnrDistribution;
use crate::error::Result;
use crate::linkmodel::{best_user_cdf, Relay, SystemConfig};
use crate::Real;

use super::closed::{ber_adaptive_gg, ber_adaptive_ne, ber_fixed_ne, clamp, gg_of, outage_fixed_gg_impl};
use super::oracle::{ber_quadrature, outage_quadrature};
use crate::channels::Turbulence;

use super::Metric;

/// Fixed-gain Gamma-Gamma outage with the printed upper list ending in
/// `1/2, 1/2` instead of `1/2, 1`.
pub fn eq22_printed<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    outage_fixed_gg_impl(cfg, T::lit(0.5))
}

/// Adaptive Gamma-Gamma outage with the printed extra factor e^{+γ_th/γ̄_RF}
/// on the cross term.
pub fn eq32_printed<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    gg_of(cfg)?;
    let th = cfg.gamma_th();
    let fr = best_user_cdf(cfg.rf(), cfg.n_users(), th)?;
    let ff = cfg.fso().cdf_snr(th)?;
    Ok(fr + ff - fr * (th / cfg.rf().mean_snr()).exp() * ff)
}

/// Rytov-to-(α, β) mapping with the customary 7/6 and 5/6 outer exponents,
/// for comparison with [`crate::channels::rytov_to_gg_params`].
pub fn rytov_with_outer_exponents<T: Real>(rytov_var: T) -> (T, T) {
    let s = rytov_var;
    let s12 = s.powf(T::lit(1.2));
    let ea = T::lit(0.49) * s / (T::one() + T::lit(1.11) * s12).powf(T::lit(7.0 / 6.0));
    let eb = T::lit(0.51) * s / (T::one() + T::lit(0.69) * s12).powf(T::lit(5.0 / 6.0));
    (T::one() / ea.exp_m1(), T::one() / eb.exp_m1())
}

/// One audited formula at one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ErratumRecord<T> {
    pub equation: &'static str,
    pub note: &'static str,
    /// Value of the printed form, or of the corrected form when the printed
    /// one cannot be evaluated.
    pub closed_form: T,
    pub oracle: T,
    /// False when the printed parameter list is malformed.
    pub evaluable: bool,
}

impl<T: Real> ErratumRecord<T> {
    pub fn gap(&self) -> T {
        (self.closed_form - self.oracle).abs()
    }
}

/// Evaluates every printed formula for `metric` under `cfg`'s scheme
/// against the quadrature oracle.
pub fn audit<T: Real>(cfg: &SystemConfig<T>, metric: Metric) -> Result<Vec<ErratumRecord<T>>> {
    let mut out = Vec::new();
    let gg = matches!(cfg.fso().turbulence(), Turbulence::GammaGamma(_));
    match (metric, cfg.relay(), gg) {
        (Metric::Outage, Relay::FixedGain { .. }, true) => {
            out.push(ErratumRecord {
                equation: "eq22",
                note: "last upper parameter printed as 1/2, should be 1",
                closed_form: clamp(eq22_printed(cfg)?, T::one()),
                oracle: outage_quadrature(cfg)?,
                evaluable: true,
            });
        }
        (Metric::Ber, Relay::FixedGain { .. }, false) => {
            out.push(ErratumRecord {
                equation: "eq29",
                note: "argument printed with the integration variable and prefactor N/sqrt(pi(k+1)); corrected form shown",
                closed_form: ber_fixed_ne(cfg)?,
                oracle: ber_quadrature(cfg)?,
                evaluable: false,
            });
        }
        (Metric::Outage, Relay::AdaptiveGain, true) => {
            out.push(ErratumRecord {
                equation: "eq32",
                note: "cross term printed with extra factor exp(+gamma_th/gamma_rf)",
                closed_form: eq32_printed(cfg)?,
                oracle: outage_quadrature(cfg)?,
                evaluable: true,
            });
        }
        (Metric::Ber, Relay::AdaptiveGain, true) => {
            out.push(ErratumRecord {
                equation: "eq35",
                note: "first lower list has a stray leading xi^2, second G-function garbled; corrected form shown",
                closed_form: ber_adaptive_gg(cfg)?,
                oracle: ber_quadrature(cfg)?,
                evaluable: false,
            });
        }
        (Metric::Ber, Relay::AdaptiveGain, false) => {
            out.push(ErratumRecord {
                equation: "eq37",
                note: "lower list printed as (1/2), should be (0, 1/2); corrected form shown",
                closed_form: ber_adaptive_ne(cfg)?,
                oracle: ber_quadrature(cfg)?,
                evaluable: false,
            });
        }
        _ => {}
    }
    Ok(out)
}

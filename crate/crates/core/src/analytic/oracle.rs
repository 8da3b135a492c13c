//! Direct numerical integration of the defining expressions.

use crate::channels::SnrDistribution;
use crate::error::Result;
use crate::linkmodel::{best_user_cdf, best_user_pdf, binomial, Relay, SystemConfig};
use crate::quadrature::{integrate_log, QuadOptions};
use crate::scalar::KahanSum;
use crate::Real;

use super::closed::{adaptive_cdf, alt};

/// Inner (outage) integral tolerances.
pub const OUTAGE_OPTS: QuadOptions = QuadOptions {
    abs_tol: 1e-13,
    rel_tol: 1e-11,
    max_intervals: 4_000,
};

/// Outer (BER) integral tolerances.
pub const BER_OPTS: QuadOptions = QuadOptions {
    abs_tol: 1e-12,
    rel_tol: 1e-9,
    max_intervals: 4_000,
};

// ∫_{BER_HI}^∞ e^{−γ} dγ < 1e-19
const BER_HI: f64 = 44.0;
const LOG_LO: f64 = 1e-13;

fn panels<T: Real>(lo: T, hi: T) -> usize {
    ((hi / lo).ln().as_f64() / 1.5).ceil().max(1.0) as usize
}

/// Fixed-gain outage at threshold `th`:
/// F_RF(th) + ∫₀^∞ F_FSO(th·C/x) f_RF(x + th) dx,
/// the complement of ∫ Pr(γ_FSO ≥ th·C/x) f_RF(x + th) dx.
fn fixed_outage_at<T: Real>(cfg: &SystemConfig<T>, c: T, th: T) -> Result<T> {
    if th == T::zero() {
        return Ok(T::zero());
    }
    let n = cfg.n_users();
    let rf = cfg.rf();
    let fso = cfg.fso();
    let gr = rf.mean_snr();
    let nn = T::from_usize(n).unwrap();
    let lo = T::lit(LOG_LO) * gr / nn;
    let hi = gr * (nn.ln() + T::lit(34.0));
    let head = best_user_cdf(rf, n, th)?;
    let body = integrate_log(
        |x: T| {
            let f = best_user_pdf(rf, n, x + th)?;
            if f == T::zero() {
                return Ok(T::zero());
            }
            Ok(fso.cdf_snr(th * c / x)? * f)
        },
        lo,
        hi,
        panels(lo, hi),
        &OUTAGE_OPTS,
    )?;
    Ok((head + body.value).min(T::one()))
}

/// Outage probability at `th` by direct integration (fixed gain) or the
/// min-CDF identity (adaptive gain).
pub fn outage_at<T: Real>(cfg: &SystemConfig<T>, th: T) -> Result<T> {
    match *cfg.relay() {
        Relay::FixedGain { c } => fixed_outage_at(cfg, c, th),
        Relay::AdaptiveGain => adaptive_cdf(cfg, th),
    }
}

/// Authoritative outage oracle at the configured threshold.
pub fn outage_quadrature<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    outage_at(cfg, cfg.gamma_th())
}

/// ½∫₀^∞ e^{−γ} P_out(γ) dγ for an arbitrary outage curve.
pub fn ber_from_outage<T, F>(mut p_out: F) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let lo = T::lit(LOG_LO);
    let hi = T::lit(BER_HI);
    let r = integrate_log(|g: T| Ok((-g).exp() * p_out(g)?), lo, hi, panels(lo, hi), &BER_OPTS)?;
    Ok(T::lit(0.5) * r.value)
}

/// ∫₀^∞ γ e^{−γ} f_RF(γ v) dγ for the best-of-N density,
/// (N/γ̄) Σ_k C(N−1,k)(−1)^k / (1 + (k+1)v/γ̄)².
fn selection_moment<T: Real>(n: usize, gr: T, v: T) -> T {
    let mut acc = KahanSum::new();
    for k in 0..n {
        let s = T::one() + T::from_usize(k + 1).unwrap() * v / gr;
        acc.add(alt::<T>(k) * binomial::<T>(n - 1, k) / (s * s));
    }
    T::from_usize(n).unwrap() / gr * acc.value()
}

// Upper end of the ratio integral; the neglected tail is O(γ̄_RF / U).
const RATIO_HI: f64 = 1e30;

/// Fixed-gain BER as a single integral. Writing x = γu in
/// ½∫e^{−γ}[F_RF(γ) + ∫F_FSO(γC/x) f_RF(x+γ) dx] dγ and swapping the order
/// gives ½∫e^{−γ}F_RF(γ)dγ + ½∫₀^∞ F_FSO(C/u) W(u) du with W from
/// [`selection_moment`] at v = 1 + u.
fn fixed_ber<T: Real>(cfg: &SystemConfig<T>, c: T) -> Result<T> {
    let n = cfg.n_users();
    let rf = cfg.rf();
    let fso = cfg.fso();
    let gr = rf.mean_snr();
    let rf_part = ber_from_outage(|g| best_user_cdf(rf, n, g))?;
    let lo = T::lit(LOG_LO);
    let hi = T::lit(RATIO_HI);
    let fso_part = integrate_log(
        |u: T| Ok(fso.cdf_snr(c / u)? * selection_moment(n, gr, T::one() + u)),
        lo,
        hi,
        panels(lo, hi),
        &BER_OPTS,
    )?;
    Ok(rf_part + T::lit(0.5) * fso_part.value)
}

/// DPSK BER oracle, ½∫e^{−γ} P_out(γ) dγ with P_out from [`outage_at`].
///
/// Adaptive gain integrates the min-CDF identity directly; fixed gain uses
/// an equivalent single-integral form of the nested expression.
pub fn ber_quadrature<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    let b = match *cfg.relay() {
        Relay::FixedGain { c } => fixed_ber(cfg, c)?,
        Relay::AdaptiveGain => ber_from_outage(|g| adaptive_cdf(cfg, g))?,
    };
    Ok(b.max(T::zero()).min(T::lit(0.5)))
}

/// Literal nested form ½∫e^{−γ} outage_at(γ) dγ. Slow for Gamma-Gamma.
pub fn ber_quadrature_nested<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    ber_from_outage(|g| outage_at(cfg, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{RayleighRf, TurbulenceModel};

    #[test]
    fn ber_kernel_limits() {
        let one = ber_from_outage(|_g: f64| Ok(1.0)).unwrap();
        assert!((one - 0.5).abs() < 1e-12);
        let step = ber_from_outage(|g: f64| Ok(if g >= 2.0 { 1.0 } else { 0.0 })).unwrap();
        assert!((step - 0.5 * (-2.0f64).exp()).abs() < 1e-10, "{step}");
    }

    #[test]
    fn single_integral_matches_nested() {
        for n in [1usize, 3] {
            let fso = TurbulenceModel::neg_exp(1.5, 200.0).unwrap();
            let rf = RayleighRf::new(200.0).unwrap();
            let cfg: SystemConfig<f64> = SystemConfig::new(n, rf, fso, Relay::FixedGain { c: 2.0 }, 10.0).unwrap();
            let a = ber_quadrature(&cfg).unwrap();
            let b = ber_quadrature_nested(&cfg).unwrap();
            assert!((a - b).abs() < 1e-10, "{n}: {a} {b}");
        }
    }

    #[test]
    fn zero_threshold() {
        let fso = TurbulenceModel::neg_exp(1.0, 100.0).unwrap();
        let rf = RayleighRf::new(100.0).unwrap();
        for relay in [Relay::FixedGain { c: 1.0 }, Relay::AdaptiveGain] {
            let cfg = SystemConfig::new(2, rf, fso, relay, 0.0).unwrap();
            assert_eq!(outage_quadrature(&cfg).unwrap(), 0.0);
        }
    }
}

//! Closed-form outage probability and DPSK BER.
//!
//! Parameter lists are the ones that agree with direct quadrature; where
//! they differ from the printed equations see [`super::printed`].

use crate::channels::{GammaGammaPointing, SnrDistribution, Turbulence};
use crate::error::{Error, Result};
use crate::linkmodel::{best_user_cdf, binomial, Relay, SystemConfig};
use crate::scalar::KahanSum;
use crate::specfun::MeijerGSpec;
use crate::Real;

pub(crate) fn gg_of<T: Real>(cfg: &SystemConfig<T>) -> Result<GammaGammaPointing<T>> {
    match cfg.fso().turbulence() {
        Turbulence::GammaGamma(gg) => Ok(*gg),
        _ => Err(Error::SchemeMismatch("expected Gamma-Gamma turbulence")),
    }
}

pub(crate) fn lambda_of<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    match cfg.fso().turbulence() {
        Turbulence::NegExp(ne) => Ok(ne.lambda()),
        _ => Err(Error::SchemeMismatch("expected Negative-Exponential turbulence")),
    }
}

pub(crate) fn fixed_c<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    match cfg.relay() {
        Relay::FixedGain { c } => Ok(*c),
        Relay::AdaptiveGain => Err(Error::SchemeMismatch("expected a fixed-gain relay")),
    }
}

fn require_adaptive<T: Real>(cfg: &SystemConfig<T>) -> Result<()> {
    match cfg.relay() {
        Relay::AdaptiveGain => Ok(()),
        _ => Err(Error::SchemeMismatch("expected an adaptive-gain relay")),
    }
}

/// ξ² 2^{α+β−3} / (π Γ(α) Γ(β))
pub(crate) fn k_prime<T: Real>(gg: &GammaGammaPointing<T>) -> T {
    let ln = gg.ln_norm() + (gg.alpha() + gg.beta() - T::lit(3.0)) * T::LN_2() - T::PI().ln();
    ln.exp()
}

#[inline]
pub(crate) fn alt<T: Real>(k: usize) -> T {
    if k.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    }
}

pub(crate) fn clamp<T: Real>(x: T, hi: T) -> T {
    x.max(T::zero()).min(hi)
}

fn half<T: Real>(x: T) -> T {
    x * T::lit(0.5)
}

/// Upper and lower lists of the G^{2,7}_{9,4} outage kernel; `last_a` is the
/// final upper parameter (1 here, 1/2 in the printed text).
pub(crate) fn outage_gg_lists<T: Real>(gg: &GammaGammaPointing<T>, last_a: T) -> (Vec<T>, Vec<T>) {
    let one = T::one();
    let two = T::lit(2.0);
    let x2 = gg.xi() * gg.xi();
    let (a, b) = (gg.alpha(), gg.beta());
    let upper = vec![
        T::zero(),
        half(one - x2),
        half(two - x2),
        half(one - a),
        half(two - a),
        half(one - b),
        half(two - b),
        half(one),
        last_a,
    ];
    let lower = vec![T::zero(), half(one), -half(x2), half(one - x2)];
    (upper, lower)
}

/// Shared body of the fixed-gain Gamma-Gamma outage with a chosen kernel list.
pub(crate) fn outage_fixed_gg_impl<T: Real>(cfg: &SystemConfig<T>, last_a: T) -> Result<T> {
    let c = fixed_c(cfg)?;
    let gg = gg_of(cfg)?;
    let n = cfg.n_users();
    let gf = cfg.fso().mean_snr();
    let gr = cfg.rf().mean_snr();
    let th = cfg.gamma_th();
    if th == T::zero() {
        return Ok(T::zero());
    }
    let abk = gg.alpha() * gg.beta() * gg.kappa();
    let kp = k_prime(&gg);
    let (upper, lower) = outage_gg_lists(&gg, last_a);
    let nn = T::from_usize(n).unwrap();
    let mut acc = KahanSum::new();
    for k in 0..n {
        let k1 = T::from_usize(k + 1).unwrap();
        let w = T::lit(16.0) * gf * gr / (abk * abk * th * c * k1);
        let g = MeijerGSpec::new(2, 7, upper.clone(), lower.clone(), w)?.evaluate()?;
        let weight = alt::<T>(k) * binomial::<T>(n - 1, k) * nn / k1 * (-k1 * th / gr).exp();
        acc.add(weight * (T::one() - kp * g));
    }
    Ok(T::one() - acc.value())
}

/// Fixed-gain outage over Gamma-Gamma turbulence with pointing errors.
pub fn outage_fixed_gg<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    outage_fixed_gg_impl(cfg, T::one()).map(|p| clamp(p, T::one()))
}

/// Fixed-gain outage over Negative-Exponential turbulence.
pub fn outage_fixed_ne<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    let c = fixed_c(cfg)?;
    let lambda = lambda_of(cfg)?;
    let n = cfg.n_users();
    let gf = cfg.fso().mean_snr();
    let gr = cfg.rf().mean_snr();
    let th = cfg.gamma_th();
    if th == T::zero() {
        return Ok(T::zero());
    }
    let nn = T::from_usize(n).unwrap();
    let sqrt_pi = T::PI().sqrt();
    let upper = vec![T::zero(), T::one(), T::lit(0.5)];
    let mut acc = KahanSum::new();
    for k in 0..n {
        let k1 = T::from_usize(k + 1).unwrap();
        let w = T::lit(4.0) * gf * gr / (lambda * lambda * th * c * k1);
        let g = MeijerGSpec::new(0, 3, upper.clone(), vec![], w)?.evaluate()?;
        let weight = alt::<T>(k) * binomial::<T>(n - 1, k) * nn / (sqrt_pi * k1) * (-k1 * th / gr).exp();
        acc.add(weight * g);
    }
    Ok(clamp(T::one() - acc.value(), T::one()))
}

/// Adaptive-gain outage under the min(γ_FSO, γ_RF) approximation:
/// F_RF + F_FSO − F_RF·F_FSO at γ_th. Valid for both turbulence models.
pub fn outage_adaptive<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    require_adaptive(cfg)?;
    adaptive_cdf(cfg, cfg.gamma_th())
}

pub(crate) fn adaptive_cdf<T: Real>(cfg: &SystemConfig<T>, gamma: T) -> Result<T> {
    let fr = best_user_cdf(cfg.rf(), cfg.n_users(), gamma)?;
    let ff = cfg.fso().cdf_snr(gamma)?;
    Ok(clamp(fr + ff - fr * ff, T::one()))
}

/// Fixed-gain DPSK BER over Gamma-Gamma turbulence with pointing errors.
pub fn ber_fixed_gg<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    let c = fixed_c(cfg)?;
    let gg = gg_of(cfg)?;
    let n = cfg.n_users();
    let gf = cfg.fso().mean_snr();
    let gr = cfg.rf().mean_snr();
    let one = T::one();
    let two = T::lit(2.0);
    let x2 = gg.xi() * gg.xi();
    let (a, b) = (gg.alpha(), gg.beta());
    let abk = a * b * gg.kappa();
    let kp = k_prime(&gg);
    let upper = vec![T::zero(), one, half(one), half(two + x2), half(one + x2)];
    let lower = vec![
        one,
        half(one + x2),
        half(x2),
        half(one + a),
        half(a),
        half(one + b),
        half(b),
        half(one),
        T::zero(),
    ];
    let nn = T::from_usize(n).unwrap();
    let mut acc = KahanSum::new();
    for k in 0..n {
        let k1 = T::from_usize(k + 1).unwrap();
        let y = abk * abk * c * k1 / (T::lit(16.0) * gf * (gr + k1));
        let g = MeijerGSpec::new(7, 3, upper.clone(), lower.clone(), y)?.evaluate()?;
        let q = one + k1 / gr;
        let weight = alt::<T>(k) * binomial::<T>(n - 1, k) * nn / k1 / q;
        acc.add(weight * (one - kp * g));
    }
    Ok(clamp(half(one - acc.value()), half(one)))
}

/// Fixed-gain DPSK BER over Negative-Exponential turbulence.
pub fn ber_fixed_ne<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    let c = fixed_c(cfg)?;
    let lambda = lambda_of(cfg)?;
    let n = cfg.n_users();
    let gf = cfg.fso().mean_snr();
    let gr = cfg.rf().mean_snr();
    let one = T::one();
    let sqrt_pi = T::PI().sqrt();
    let nn = T::from_usize(n).unwrap();
    let mut acc = KahanSum::new();
    for k in 0..n {
        let k1 = T::from_usize(k + 1).unwrap();
        let y = lambda * lambda * c * k1 / (T::lit(4.0) * gf * (gr + k1));
        let g = MeijerGSpec::new(3, 1, vec![T::zero()], vec![one, T::zero(), half(one)], y)?.evaluate()?;
        let q = one + k1 / gr;
        let weight = alt::<T>(k) * binomial::<T>(n - 1, k) * nn / (sqrt_pi * k1) / q;
        acc.add(weight * g);
    }
    Ok(clamp(half(one - acc.value()), half(one)))
}

/// G^{6,3}_{5,8} kernel of the adaptive Gamma-Gamma BER, scaled by K′.
fn adaptive_gg_kernel<T: Real>(gg: &GammaGammaPointing<T>, gf: T, q: T) -> Result<T> {
    let one = T::one();
    let two = T::lit(2.0);
    let x2 = gg.xi() * gg.xi();
    let (a, b) = (gg.alpha(), gg.beta());
    let abk = a * b * gg.kappa();
    let upper = vec![T::zero(), one, half(one), half(one + x2), half(two + x2)];
    let lower = vec![
        half(x2),
        half(one + x2),
        half(a),
        half(one + a),
        half(b),
        half(one + b),
        T::zero(),
        half(one),
    ];
    let y = abk * abk / (T::lit(16.0) * gf * q);
    let g = MeijerGSpec::new(6, 3, upper, lower, y)?.evaluate()?;
    Ok(k_prime(gg) * g)
}

/// Adaptive-gain DPSK BER over Gamma-Gamma turbulence with pointing errors
/// (min-SNR approximation).
pub fn ber_adaptive_gg<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    require_adaptive(cfg)?;
    let gg = gg_of(cfg)?;
    let n = cfg.n_users();
    let gf = cfg.fso().mean_snr();
    let gr = cfg.rf().mean_snr();
    let one = T::one();
    let mut acc = KahanSum::new();
    acc.add(adaptive_gg_kernel(&gg, gf, one)?);
    for k in 0..=n {
        let q = one + T::from_usize(k).unwrap() / gr;
        let l = adaptive_gg_kernel(&gg, gf, q)?;
        acc.add(alt::<T>(k) * binomial::<T>(n, k) / q * (one - l));
    }
    Ok(clamp(half(acc.value()), half(one)))
}

/// Adaptive-gain DPSK BER over Negative-Exponential turbulence
/// (min-SNR approximation).
pub fn ber_adaptive_ne<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    require_adaptive(cfg)?;
    let lambda = lambda_of(cfg)?;
    let n = cfg.n_users();
    let gf = cfg.fso().mean_snr();
    let gr = cfg.rf().mean_snr();
    let one = T::one();
    let sqrt_pi = T::PI().sqrt();
    let j = |q: T| -> Result<T> {
        let y = lambda * lambda / (T::lit(4.0) * gf * q);
        let g = MeijerGSpec::new(2, 1, vec![T::zero()], vec![T::zero(), half(one)], y)?.evaluate()?;
        Ok(g / (q * sqrt_pi))
    };
    let mut acc = KahanSum::new();
    acc.add(one);
    acc.add(-j(one)?);
    for k in 0..=n {
        let q = one + T::from_usize(k).unwrap() / gr;
        acc.add(alt::<T>(k) * binomial::<T>(n, k) * j(q)?);
    }
    Ok(clamp(half(acc.value()), half(one)))
}

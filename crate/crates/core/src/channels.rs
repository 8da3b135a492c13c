//! Per-hop SNR statistics: Rayleigh RF, Gamma-Gamma FSO with pointing
//! errors, and Negative-Exponential FSO.
//!
//! Every model exposes its pdf, CDF and a sampler. SNR arguments are linear.
//! For the Negative-Exponential model `mean_snr` is the scale γ̄ in
//! F(γ) = 1 − exp(−λ√(γ/γ̄)); the actual mean SNR is 2γ̄/λ².

use rand::Rng;
use rand_distr::Distribution;

use crate::error::{domain, Error, Result};
use crate::specfun::{log_gamma, MeijerGSpec};
use crate::Real;

/// Gamma-Gamma turbulence with zero-boresight pointing errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaGammaPointing<T> {
    alpha: T,
    beta: T,
    xi: T,
    kappa: T,
}

impl<T: Real> GammaGammaPointing<T> {
    /// κ defaults to ξ²/(1+ξ²).
    pub fn new(alpha: T, beta: T, xi: T) -> Result<Self> {
        let x2 = xi * xi;
        Self::with_kappa(alpha, beta, xi, x2 / (T::one() + x2))
    }

    pub fn with_kappa(alpha: T, beta: T, xi: T, kappa: T) -> Result<Self> {
        for (what, v) in [("alpha", alpha), ("beta", beta), ("xi", xi), ("kappa", kappa)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(domain(what, v));
            }
        }
        Ok(Self { alpha, beta, xi, kappa })
    }

    /// α = 4, β = 1.9, ξ = 10.45.
    pub fn moderate() -> Self {
        Self::new(T::lit(4.0), T::lit(1.9), T::lit(10.45)).unwrap()
    }

    /// α = 4.2, β = 1.4, ξ = 2.45.
    pub fn strong() -> Self {
        Self::new(T::lit(4.2), T::lit(1.4), T::lit(2.45)).unwrap()
    }

    /// α, β from the Rytov variance; κ from ξ.
    pub fn from_rytov(rytov_var: T, xi: T) -> Result<Self> {
        let (a, b) = rytov_to_gg_params(rytov_var)?;
        Self::new(a, b, xi)
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }
    pub fn beta(&self) -> T {
        self.beta
    }
    pub fn xi(&self) -> T {
        self.xi
    }
    pub fn kappa(&self) -> T {
        self.kappa
    }

    /// ln of ξ²/(Γ(α)Γ(β)).
    pub(crate) fn ln_norm(&self) -> T {
        (self.xi * self.xi).ln() - log_gamma(self.alpha).unwrap() - log_gamma(self.beta).unwrap()
    }

    /// Meijer-G argument αβκ√(γ/γ̄).
    fn arg(&self, gamma: T, mean_snr: T) -> T {
        self.alpha * self.beta * self.kappa * (gamma / mean_snr).sqrt()
    }

    /// Upper bound on 1 − F at Meijer-G argument `z`, from the moments
    /// E[(z/z₀)^r] via Markov's inequality, minimized over a grid of r.
    fn tail_bound(&self, z: T) -> T {
        let x2 = self.xi * self.xi;
        let lga = log_gamma(self.alpha).unwrap();
        let lgb = log_gamma(self.beta).unwrap();
        let lnz = z.ln();
        let mut best = T::zero();
        let mut r = T::lit(0.5);
        for _ in 0..40 {
            let l = log_gamma(self.alpha + r).unwrap() + log_gamma(self.beta + r).unwrap() - lga - lgb
                + (x2 / (x2 + r)).ln()
                - r * lnz;
            best = best.min(l);
            r = r * T::lit(1.25);
        }
        best.exp()
    }
}

/// Negative-Exponential (saturated) turbulence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegExpTurbulence<T> {
    lambda: T,
}

impl<T: Real> NegExpTurbulence<T> {
    pub fn new(lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(domain("lambda", lambda));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }
}

/// Rayleigh-faded RF hop with average SNR γ̄_RF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighRf<T> {
    mean_snr: T,
}

impl<T: Real> RayleighRf<T> {
    pub fn new(mean_snr: T) -> Result<Self> {
        if !(mean_snr > T::zero()) || !mean_snr.is_finite() {
            return Err(domain("mean_snr", mean_snr));
        }
        Ok(Self { mean_snr })
    }

    pub fn mean_snr(&self) -> T {
        self.mean_snr
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Turbulence<T> {
    GammaGamma(GammaGammaPointing<T>),
    NegExp(NegExpTurbulence<T>),
}

/// FSO hop: turbulence law plus its SNR scale γ̄_FSO.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurbulenceModel<T> {
    turbulence: Turbulence<T>,
    mean_snr: T,
}

impl<T: Real> TurbulenceModel<T> {
    pub fn new(turbulence: Turbulence<T>, mean_snr: T) -> Result<Self> {
        if !(mean_snr > T::zero()) || !mean_snr.is_finite() {
            return Err(domain("mean_snr", mean_snr));
        }
        Ok(Self { turbulence, mean_snr })
    }

    pub fn gamma_gamma(params: GammaGammaPointing<T>, mean_snr: T) -> Result<Self> {
        Self::new(Turbulence::GammaGamma(params), mean_snr)
    }

    pub fn neg_exp(lambda: T, mean_snr: T) -> Result<Self> {
        Self::new(Turbulence::NegExp(NegExpTurbulence::new(lambda)?), mean_snr)
    }

    pub fn turbulence(&self) -> &Turbulence<T> {
        &self.turbulence
    }

    pub fn mean_snr(&self) -> T {
        self.mean_snr
    }

    /// Same turbulence law at another SNR scale.
    pub fn with_mean_snr(&self, mean_snr: T) -> Result<Self> {
        Self::new(self.turbulence, mean_snr)
    }
}

/// pdf, CDF and sampler of a per-hop SNR.
pub trait SnrDistribution<T: Real> {
    /// Density at `gamma` ≥ 0. May be +∞ at 0.
    fn pdf_snr(&self, gamma: T) -> Result<T>;

    /// Pr(SNR ≤ gamma), clamped to [0, 1].
    fn cdf_snr(&self, gamma: T) -> Result<T>;

    /// Prebuilt sampler for repeated draws.
    fn sampler(&self) -> SnrSampler<T>;

    /// One draw. Prefer [`SnrDistribution::sampler`] inside loops.
    fn sample_snr<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        self.sampler().sample(rng)
    }
}

fn check_gamma<T: Real>(gamma: T) -> Result<()> {
    if gamma >= T::zero() && !gamma.is_nan() {
        Ok(())
    } else {
        Err(domain("gamma", gamma))
    }
}

fn clamp01<T: Real>(x: T) -> T {
    x.max(T::zero()).min(T::one())
}

impl<T: Real> SnrDistribution<T> for RayleighRf<T> {
    fn pdf_snr(&self, gamma: T) -> Result<T> {
        check_gamma(gamma)?;
        Ok((-gamma / self.mean_snr).exp() / self.mean_snr)
    }

    fn cdf_snr(&self, gamma: T) -> Result<T> {
        check_gamma(gamma)?;
        Ok(clamp01(-(-gamma / self.mean_snr).exp_m1()))
    }

    fn sampler(&self) -> SnrSampler<T> {
        SnrSampler::Rayleigh {
            mean_snr: self.mean_snr,
        }
    }
}

impl<T: Real> SnrDistribution<T> for TurbulenceModel<T> {
    fn pdf_snr(&self, gamma: T) -> Result<T> {
        check_gamma(gamma)?;
        let gb = self.mean_snr;
        match &self.turbulence {
            Turbulence::NegExp(ne) => {
                if gamma == T::zero() {
                    return Ok(T::infinity());
                }
                let u = (gamma / gb).sqrt();
                Ok(ne.lambda / (T::lit(2.0) * (gamma * gb).sqrt()) * (-ne.lambda * u).exp())
            }
            Turbulence::GammaGamma(gg) => {
                if gamma == T::zero() {
                    // f ~ γ^{min(α,β,ξ²)/2 − 1} near the origin
                    let lead = gg.alpha.min(gg.beta).min(gg.xi * gg.xi) * T::lit(0.5) - T::one();
                    if lead < T::zero() {
                        return Ok(T::infinity());
                    }
                    if lead > T::zero() {
                        return Ok(T::zero());
                    }
                    return self.pdf_snr(gb * T::lit(1e-300).max(T::min_positive_value()));
                }
                let z = gg.arg(gamma, gb);
                let x2 = gg.xi * gg.xi;
                let g = MeijerGSpec::new(3, 0, vec![x2 + T::one()], vec![x2, gg.alpha, gg.beta], z)?.evaluate()?;
                Ok((gg.ln_norm() - (T::lit(2.0) * gamma).ln()).exp() * g)
            }
        }
    }

    fn cdf_snr(&self, gamma: T) -> Result<T> {
        check_gamma(gamma)?;
        if gamma == T::zero() {
            return Ok(T::zero());
        }
        if gamma.is_infinite() {
            return Ok(T::one());
        }
        let gb = self.mean_snr;
        match &self.turbulence {
            Turbulence::NegExp(ne) => Ok(clamp01(-(-ne.lambda * (gamma / gb).sqrt()).exp_m1())),
            Turbulence::GammaGamma(gg) => {
                let z = gg.arg(gamma, gb);
                if z > T::one() && gg.tail_bound(z) < T::lit(1e-17) {
                    return Ok(T::one());
                }
                let x2 = gg.xi * gg.xi;
                let one = T::one();
                let g = MeijerGSpec::new(3, 1, vec![one, x2 + one], vec![x2, gg.alpha, gg.beta, T::zero()], z)?
                    .evaluate()?;
                Ok(clamp01(gg.ln_norm().exp() * g))
            }
        }
    }

    fn sampler(&self) -> SnrSampler<T> {
        match &self.turbulence {
            Turbulence::NegExp(ne) => SnrSampler::NegExp {
                mean_snr: self.mean_snr,
                lambda: ne.lambda,
            },
            Turbulence::GammaGamma(gg) => SnrSampler::GammaGamma {
                mean_snr: self.mean_snr,
                x: T::gamma_dist(gg.alpha, T::one() / gg.alpha).expect("validated shape"),
                y: T::gamma_dist(gg.beta, T::one() / gg.beta).expect("validated shape"),
                inv_xi2: T::one() / (gg.xi * gg.xi),
                inv_kappa: T::one() / gg.kappa,
            },
        }
    }
}

/// Draws SNR realizations; see the module docs for each composition.
#[derive(Debug, Clone)]
pub enum SnrSampler<T: Real> {
    /// γ = γ̄·E, E ~ Exp(1)
    Rayleigh { mean_snr: T },
    /// γ = γ̄·(E/λ)²
    NegExp { mean_snr: T, lambda: T },
    /// γ = γ̄·(X·Y·V/κ)², X, Y unit-mean Gamma, V = W^{1/ξ²}
    GammaGamma {
        mean_snr: T,
        x: T::GammaDist,
        y: T::GammaDist,
        inv_xi2: T,
        inv_kappa: T,
    },
}

impl<T: Real> SnrSampler<T> {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match self {
            SnrSampler::Rayleigh { mean_snr } => *mean_snr * T::sample_exp1(rng),
            SnrSampler::NegExp { mean_snr, lambda } => {
                let u = T::sample_exp1(rng) / *lambda;
                *mean_snr * u * u
            }
            SnrSampler::GammaGamma {
                mean_snr,
                x,
                y,
                inv_xi2,
                inv_kappa,
            } => {
                let v = T::sample_open01(rng).powf(*inv_xi2);
                let u = x.sample(rng) * y.sample(rng) * v * *inv_kappa;
                *mean_snr * u * u
            }
        }
    }
}

/// α, β of the Gamma-Gamma law from the Rytov variance σ_R².
///
/// α = [exp(0.49σ_R²/(1 + 1.11σ_R^{12/5})) − 1]⁻¹,
/// β = [exp(0.51σ_R²/(1 + 0.69σ_R^{12/5})) − 1]⁻¹.
pub fn rytov_to_gg_params<T: Real>(rytov_var: T) -> Result<(T, T)> {
    if !(rytov_var > T::zero()) || !rytov_var.is_finite() {
        return Err(domain("rytov_var", rytov_var));
    }
    // σ_R^{12/5} = (σ_R²)^{6/5}
    let s125 = rytov_var.powf(T::lit(1.2));
    let one = T::one();
    let alpha = one / (T::lit(0.49) * rytov_var / (one + T::lit(1.11) * s125)).exp_m1();
    let beta = one / (T::lit(0.51) * rytov_var / (one + T::lit(0.69) * s125)).exp_m1();
    if !(alpha > T::zero() && beta > T::zero()) || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Rytov variance {rytov_var} gives non-finite Gamma-Gamma parameters"
        )));
    }
    Ok((alpha, beta))
}

/// ξ = ω_eq / (2σ_s).
pub fn pointing_xi<T: Real>(beam_radius_eq: T, jitter_std: T) -> Result<T> {
    if !(beam_radius_eq > T::zero()) || !beam_radius_eq.is_finite() {
        return Err(domain("beam_radius_eq", beam_radius_eq));
    }
    if !(jitter_std > T::zero()) || !jitter_std.is_finite() {
        return Err(domain("jitter_std", jitter_std));
    }
    Ok(beam_radius_eq / (T::lit(2.0) * jitter_std))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rayleigh_values() {
        let rf = RayleighRf::new(2.0).unwrap();
        assert_eq!(rf.pdf_snr(0.0).unwrap(), 0.5);
        assert_relative_eq!(rf.cdf_snr(2.0).unwrap(), 1.0 - (-1.0f64).exp(), max_relative = 1e-15);
        assert!(rf.cdf_snr(-1.0).is_err());
    }

    #[test]
    fn neg_exp_values() {
        let m = TurbulenceModel::neg_exp(1.0, 1.0).unwrap();
        assert_relative_eq!(m.pdf_snr(1.0).unwrap(), 0.5 * (-1.0f64).exp(), max_relative = 1e-15);
        let m = TurbulenceModel::neg_exp(1.0, 37.0).unwrap();
        assert_relative_eq!(m.cdf_snr(37.0).unwrap(), 1.0 - (-1.0f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn gamma_gamma_cdf_oracle() {
        // z = αβκ√(γ/γ̄) = 2.5; value from a 30-digit hypergeometric evaluation
        let gg = GammaGammaPointing::<f64>::moderate();
        let k = gg.kappa();
        let gb = 10.0;
        let gamma: f64 = gb * (2.5 / (4.0 * 1.9 * k)).powi(2);
        let m = TurbulenceModel::gamma_gamma(gg, gb).unwrap();
        assert_relative_eq!(
            m.cdf_snr(gamma).unwrap(),
            0.224_432_799_069_888_39,
            max_relative = 1e-10
        );
    }

    #[test]
    fn gamma_gamma_tail_shortcut_is_sound() {
        let m = TurbulenceModel::gamma_gamma(GammaGammaPointing::<f64>::strong(), 1.0).unwrap();
        let gg = GammaGammaPointing::<f64>::strong();
        // pick the first z where the shortcut fires and compare with the G value
        let mut z = 2.0;
        while gg.tail_bound(z) >= 1e-17 {
            z *= 1.1;
        }
        let gamma = (z / (gg.alpha() * gg.beta() * gg.kappa())).powi(2);
        assert_eq!(m.cdf_snr(gamma).unwrap(), 1.0);
        let x2 = gg.xi() * gg.xi();
        let g = MeijerGSpec::new(3, 1, vec![1.0, x2 + 1.0], vec![x2, gg.alpha(), gg.beta(), 0.0], z)
            .unwrap()
            .evaluate()
            .unwrap();
        assert!((1.0 - gg.ln_norm().exp() * g).abs() < 1e-12);
    }

    #[test]
    fn rytov_reference() {
        // 30-digit evaluation of the formula at σ_R² = 1 and 2
        let (a, b) = rytov_to_gg_params(1.0).unwrap();
        assert_relative_eq!(a, 3.825_457_367_606_904, max_relative = 1e-13);
        assert_relative_eq!(b, 2.838_835_332_137_862, max_relative = 1e-13);
        let (a, b) = rytov_to_gg_params(2.0).unwrap();
        assert_relative_eq!(a, 3.145_536_396_413_969_5, max_relative = 1e-13);
        assert_relative_eq!(b, 2.067_307_889_136_742_8, max_relative = 1e-13);
        assert!(rytov_to_gg_params(1e-3).unwrap().0 > 1e3);
        assert!(rytov_to_gg_params(0.5).unwrap().0 > rytov_to_gg_params(2.0).unwrap().0);
        assert!(rytov_to_gg_params(0.0).is_err());
    }

    #[test]
    fn pointing_ratio() {
        assert_relative_eq!(pointing_xi(20.9, 1.0).unwrap(), 10.45);
        assert_relative_eq!(pointing_xi(4.9, 1.0).unwrap(), 2.45);
        assert_eq!(pointing_xi(3.0, 1.5).unwrap(), 1.0);
        assert!(pointing_xi(0.0, 1.0).is_err());
        assert!(pointing_xi(1.0, -1.0).is_err());
    }

    #[test]
    fn sampler_unit_mean_amplitude() {
        let m = TurbulenceModel::gamma_gamma(GammaGammaPointing::moderate(), 1.0).unwrap();
        let s = m.sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| s.sample(&mut rng)).map(f64::sqrt).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 1.0).abs() < 3.0 * (var / n as f64).sqrt());
    }

    #[test]
    fn f32_cdf() {
        let m = TurbulenceModel::<f32>::neg_exp(1.0, 1.0).unwrap();
        assert!((m.cdf_snr(1.0).unwrap() - 0.632_120_6).abs() < 1e-6);
    }
}

//! Best-of-N RF user selection and end-to-end SNR of the AF relay.

use crate::channels::{RayleighRf, SnrDistribution, TurbulenceModel};
use crate::error::{domain, Error, Result};
use crate::scalar::KahanSum;
use crate::specfun::log_gamma;
use crate::Real;

/// Relay gain rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Relay<T> {
    /// Constant gain G² = 1/(Cσ²_RF).
    FixedGain { c: T },
    /// Gain follows the instantaneous RF channel.
    AdaptiveGain,
}

impl<T: Real> Relay<T> {
    pub fn fixed(c: T) -> Result<Self> {
        if !(c > T::zero()) || !c.is_finite() {
            return Err(domain("C", c));
        }
        Ok(Relay::FixedGain { c })
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, Relay::FixedGain { .. })
    }
}

/// One dual-hop scenario: N RF users, the relay, and the FSO hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig<T> {
    n_users: usize,
    rf: RayleighRf<T>,
    fso: TurbulenceModel<T>,
    eta: T,
    relay: Relay<T>,
    gamma_th: T,
}

impl<T: Real> SystemConfig<T> {
    /// η defaults to 1.
    pub fn new(
        n_users: usize,
        rf: RayleighRf<T>,
        fso: TurbulenceModel<T>,
        relay: Relay<T>,
        gamma_th: T,
    ) -> Result<Self> {
        if n_users == 0 {
            return Err(Error::InvalidParameter("n_users must be at least 1".into()));
        }
        if let Relay::FixedGain { c } = relay {
            if !(c > T::zero()) || !c.is_finite() {
                return Err(domain("C", c));
            }
        }
        if !(gamma_th >= T::zero()) || !gamma_th.is_finite() {
            return Err(domain("gamma_th", gamma_th));
        }
        Ok(Self {
            n_users,
            rf,
            fso,
            eta: T::one(),
            relay,
            gamma_th,
        })
    }

    /// Both hops at the same average SNR γ̄_FSO = γ̄_RF = `gamma_avg`.
    pub fn symmetric(
        n_users: usize,
        fso: TurbulenceModel<T>,
        gamma_avg: T,
        relay: Relay<T>,
        gamma_th: T,
    ) -> Result<Self> {
        Self::new(
            n_users,
            RayleighRf::new(gamma_avg)?,
            fso.with_mean_snr(gamma_avg)?,
            relay,
            gamma_th,
        )
    }

    /// η is carried for documentation; it is already folded into γ̄_FSO.
    pub fn with_eta(mut self, eta: T) -> Result<Self> {
        if !(eta > T::zero()) || !eta.is_finite() {
            return Err(domain("eta", eta));
        }
        self.eta = eta;
        Ok(self)
    }

    pub fn with_gamma_th(mut self, gamma_th: T) -> Result<Self> {
        if !(gamma_th >= T::zero()) || !gamma_th.is_finite() {
            return Err(domain("gamma_th", gamma_th));
        }
        self.gamma_th = gamma_th;
        Ok(self)
    }

    pub fn with_relay(self, relay: Relay<T>) -> Result<Self> {
        Self::new(self.n_users, self.rf, self.fso, relay, self.gamma_th).map(|c| Self { eta: self.eta, ..c })
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }
    pub fn rf(&self) -> &RayleighRf<T> {
        &self.rf
    }
    pub fn fso(&self) -> &TurbulenceModel<T> {
        &self.fso
    }
    pub fn eta(&self) -> T {
        self.eta
    }
    pub fn relay(&self) -> &Relay<T> {
        &self.relay
    }
    pub fn gamma_th(&self) -> T {
        self.gamma_th
    }
}

/// Binomial coefficient C(n, k): exact for n ≤ 64, log-gamma beyond.
pub fn binomial<T: Real>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    if n <= 64 {
        let k = k.min(n - k);
        let mut c: u128 = 1;
        for i in 0..k {
            c = c * (n - i) as u128 / (i + 1) as u128;
        }
        return T::from_u128(c).unwrap();
    }
    let one = T::one();
    let f = |x: usize| log_gamma(T::from_usize(x).unwrap() + one).unwrap();
    (f(n) - f(k) - f(n - k)).exp().round()
}

/// CDF of the strongest of `n` i.i.d. Rayleigh SNRs: (1 − e^{−γ/γ̄})ⁿ.
pub fn best_user_cdf<T: Real>(rf: &RayleighRf<T>, n: usize, gamma: T) -> Result<T> {
    let f = rf.cdf_snr(gamma)?;
    Ok(f.powi(n as i32))
}

/// Density of the strongest of `n` users, n·F^{n−1}·f.
pub fn best_user_pdf<T: Real>(rf: &RayleighRf<T>, n: usize, gamma: T) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let f = rf.pdf_snr(gamma)?;
    let cdf = rf.cdf_snr(gamma)?;
    Ok(T::from_usize(n).unwrap() * cdf.powi(n as i32 - 1) * f)
}

/// Same density through the binomial expansion
/// (N/γ̄) Σ_k C(N−1,k)(−1)^k e^{−(k+1)γ/γ̄}, compensated.
pub fn best_user_pdf_binomial<T: Real>(rf: &RayleighRf<T>, n: usize, gamma: T) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !(gamma >= T::zero()) {
        return Err(domain("gamma", gamma));
    }
    let gb = rf.mean_snr();
    let mut acc = KahanSum::new();
    for k in 0..n {
        let sign = if k % 2 == 0 { T::one() } else { -T::one() };
        let kk = T::from_usize(k + 1).unwrap();
        acc.add(sign * binomial::<T>(n - 1, k) * (-kk * gamma / gb).exp());
    }
    Ok(T::from_usize(n).unwrap() / gb * acc.value())
}

/// Exact per-realization end-to-end SNR of the relay.
pub fn end_to_end_snr<T: Real>(relay: &Relay<T>, gamma_fso: T, gamma_rf: T) -> T {
    match *relay {
        Relay::FixedGain { c } => {
            if gamma_fso.is_infinite() {
                return gamma_rf;
            }
            gamma_fso * gamma_rf / (gamma_fso + c)
        }
        Relay::AdaptiveGain => {
            let den = gamma_fso + gamma_rf + T::one();
            if den.is_infinite() {
                return gamma_fso.min(gamma_rf);
            }
            gamma_fso * gamma_rf / den
        }
    }
}

/// High-SNR approximation min(γ_FSO, γ_RF) of the adaptive-gain SNR.
pub fn end_to_end_snr_min_approx<T: Real>(gamma_fso: T, gamma_rf: T) -> T {
    gamma_fso.min(gamma_rf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn binomials() {
        assert_eq!(binomial::<f64>(5, 2), 10.0);
        assert_eq!(binomial::<f64>(64, 32), 1_832_624_140_942_590_534.0);
        assert_eq!(binomial::<f64>(3, 4), 0.0);
        assert_relative_eq!(binomial::<f64>(70, 3), 54_740.0, max_relative = 1e-12);
    }

    #[test]
    fn best_user_reductions() {
        let rf = RayleighRf::new(3.0).unwrap();
        let e1 = 1.0 - (-1.0f64).exp();
        assert_relative_eq!(best_user_cdf(&rf, 1, 3.0).unwrap(), e1, max_relative = 1e-15);
        assert_relative_eq!(best_user_cdf(&rf, 2, 3.0).unwrap(), e1 * e1, max_relative = 1e-15);
        for &g in &[0.0, 0.3, 3.0, 30.0] {
            assert_relative_eq!(
                best_user_pdf(&rf, 1, g).unwrap(),
                (-g / 3.0f64).exp() / 3.0,
                max_relative = 1e-15
            );
        }
        let a = best_user_pdf(&rf, 3, 3.0).unwrap();
        let b = best_user_pdf_binomial(&rf, 3, 3.0).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }

    #[test]
    fn combining_examples() {
        let fixed = Relay::fixed(1.0).unwrap();
        assert_eq!(end_to_end_snr(&fixed, 1.0, 1.0), 0.5);
        assert_relative_eq!(end_to_end_snr(&Relay::AdaptiveGain, 1.0, 1.0), 1.0 / 3.0);
        assert_relative_eq!(end_to_end_snr(&fixed, 1e6, 7.0), 7.0, max_relative = 1e-5);
        assert_eq!(end_to_end_snr_min_approx(10.0, 3.0), 3.0);
        assert_eq!(end_to_end_snr_min_approx(3.0, 3.0), 3.0);
    }

    #[test]
    fn config_validation() {
        let fso = TurbulenceModel::neg_exp(1.0, 10.0).unwrap();
        let rf = RayleighRf::new(10.0).unwrap();
        assert!(SystemConfig::new(0, rf, fso, Relay::AdaptiveGain, 10.0).is_err());
        assert!(SystemConfig::new(1, rf, fso, Relay::FixedGain { c: 0.0 }, 10.0).is_err());
        assert!(SystemConfig::new(1, rf, fso, Relay::AdaptiveGain, -1.0).is_err());
        assert!(SystemConfig::new(1, rf, fso, Relay::AdaptiveGain, 0.0).is_ok());
        let cfg = SystemConfig::new(2, rf, fso, Relay::AdaptiveGain, 10.0).unwrap();
        assert_eq!(cfg.eta(), 1.0);
    }
}

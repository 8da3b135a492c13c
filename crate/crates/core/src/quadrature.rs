//! Adaptive Gauss–Kronrod (10/21-point) integration.
//!
//! Intervals are bisected worst-first until the summed Kronrod–Gauss error
//! estimate meets `max(abs_tol, rel_tol·|I|)`. Integrands may fail; the
//! first error aborts the integration.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::KahanSum;
use crate::Real;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_652_838_130_566,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
// Gauss weights for XGK[1], XGK[3], ..., XGK[9]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_intervals: 2_000,
        }
    }
}

impl QuadOptions {
    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

/// Integral value with the integrator's own error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate<T> {
    pub value: T,
    pub abs_err: T,
    pub evals: usize,
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    err: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T: Real> Eq for Segment<T> {}
impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(std::cmp::Ordering::Equal)
    }
}

fn kronrod21<T: Real, F>(f: &mut F, a: T, b: T) -> Result<(T, T)>
where
    F: FnMut(T) -> Result<T>,
{
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center)?;
    let mut res_k = fc * T::lit(WGK[10]);
    let mut res_g = T::zero();
    for j in 0..10 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        res_k = res_k + T::lit(WGK[j]) * (f1 + f2);
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let value = res_k * half_len;
    let err = ((res_k - res_g) * half_len).abs();
    if !value.is_finite() {
        return Err(Error::Quadrature {
            reason: "non-finite integrand",
            estimate: value.as_f64(),
            abs_err: f64::INFINITY,
            evals: 21,
        });
    }
    Ok((value, err))
}

/// Integrates `f` over `[a, b]` by globally adaptive bisection.
pub fn integrate<T, F>(mut f: F, a: T, b: T, opts: &QuadOptions) -> Result<QuadEstimate<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    integrate_panels(&mut f, &[a, b], opts)
}

/// Integrates over consecutive panels `[p0, p1], [p1, p2], …`, refining all of
/// them under one shared error budget.
pub fn integrate_panels<T, F>(f: &mut F, breaks: &[T], opts: &QuadOptions) -> Result<QuadEstimate<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    assert!(breaks.len() >= 2, "need at least one panel");
    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;
    for w in breaks.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (value, err) = kronrod21(f, w[0], w[1])?;
        evals += 21;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value,
            err,
        });
    }
    let abs_tol = T::lit(opts.abs_tol);
    let rel_tol = T::lit(opts.rel_tol);
    loop {
        let total: KahanSum<T> = heap.iter().map(|s| s.value).collect();
        let total = total.value();
        let err: T = heap.iter().map(|s| s.err).sum();
        let budget = abs_tol.max(rel_tol * total.abs());
        if err <= budget {
            return Ok(QuadEstimate {
                value: total,
                abs_err: err,
                evals,
            });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                reason: "interval limit reached",
                estimate: total.as_f64(),
                abs_err: err.as_f64(),
                evals,
            });
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => {
                return Ok(QuadEstimate {
                    value: T::zero(),
                    abs_err: T::zero(),
                    evals,
                })
            }
        };
        let mid = T::lit(0.5) * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::Quadrature {
                reason: "interval collapsed below floating-point resolution",
                estimate: total.as_f64(),
                abs_err: err.as_f64(),
                evals,
            });
        }
        let (v1, e1) = kronrod21(f, worst.a, mid)?;
        let (v2, e2) = kronrod21(f, mid, worst.b)?;
        evals += 42;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
    }
}

/// Integrates `g` over `(lo, hi)` after the substitution x = e^v, i.e.
/// ∫ g(x) dx = ∫ g(e^v) e^v dv, split into `panels` equal pieces in v.
///
/// Suited to integrands whose features are spread over many decades.
pub fn integrate_log<T, F>(mut g: F, lo: T, hi: T, panels: usize, opts: &QuadOptions) -> Result<QuadEstimate<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    assert!(lo > T::zero() && hi > lo && panels >= 1);
    let (vlo, vhi) = (lo.ln(), hi.ln());
    let step = (vhi - vlo) / T::from_usize(panels).unwrap();
    let breaks: Vec<T> = (0..=panels)
        .map(|i| {
            if i == panels {
                vhi
            } else {
                vlo + step * T::from_usize(i).unwrap()
            }
        })
        .collect();
    let mut h = |v: T| {
        let x = v.exp();
        g(x).map(|y| y * x)
    };
    integrate_panels(&mut h, &breaks, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x: f64| Ok(x.powi(7) - 3.0 * x), 0.0, 2.0, &QuadOptions::default()).unwrap();
        assert!((r.value - (32.0 - 6.0)).abs() < 1e-13);
        assert_eq!(r.evals, 21);
    }

    #[test]
    fn peaked_integrand_refines() {
        // ∫_0^1 1/(1e-4 + (x-0.3)^2) dx
        let a: f64 = 1e-2;
        let exact = ((0.7 / a).atan() + (0.3 / a).atan()) / a;
        let r = integrate(
            |x: f64| Ok(1.0 / (a * a + (x - 0.3).powi(2))),
            0.0,
            1.0,
            &QuadOptions::default(),
        )
        .unwrap();
        assert!(((r.value - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn log_substitution_handles_decades() {
        // ∫_0^∞ e^{-x} dx truncated to (1e-12, 60)
        let r = integrate_log(|x: f64| Ok((-x).exp()), 1e-12, 60.0, 8, &QuadOptions::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn integrand_error_propagates() {
        let r = integrate(
            |x: f64| {
                if x > 0.5 {
                    Err(Error::InvalidParameter("boom".into()))
                } else {
                    Ok(x)
                }
            },
            0.0,
            1.0,
            &QuadOptions::default(),
        );
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn interval_limit_reports() {
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol: 0.0,
            max_intervals: 4,
        };
        let r = integrate(|x: f64| Ok(x.sqrt()), 0.0, 1.0, &opts);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}

use linklab_core::analytic::{
    ber_adaptive_gg, ber_adaptive_ne, ber_fixed_gg, ber_fixed_ne, ber_from_outage, ber_quadrature,
    ber_quadrature_nested, closed_form, outage_adaptive, outage_fixed_gg, outage_fixed_ne, outage_quadrature, printed,
    quadrature, Metric,
};
use linklab_core::channels::{GammaGammaPointing, TurbulenceModel};
use linklab_core::linkmodel::{Relay, SystemConfig};

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

fn moderate() -> TurbulenceModel<f64> {
    TurbulenceModel::gamma_gamma(GammaGammaPointing::moderate(), 1.0).unwrap()
}

fn strong() -> TurbulenceModel<f64> {
    TurbulenceModel::gamma_gamma(GammaGammaPointing::strong(), 1.0).unwrap()
}

fn negexp(lambda: f64) -> TurbulenceModel<f64> {
    TurbulenceModel::neg_exp(lambda, 1.0).unwrap()
}

fn fixed(fso: TurbulenceModel<f64>, avg_db: f64, n: usize, c: f64) -> SystemConfig<f64> {
    SystemConfig::symmetric(n, fso, db(avg_db), Relay::fixed(c).unwrap(), 10.0).unwrap()
}

fn adaptive(fso: TurbulenceModel<f64>, avg_db: f64, n: usize) -> SystemConfig<f64> {
    SystemConfig::symmetric(n, fso, db(avg_db), Relay::AdaptiveGain, 10.0).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    ((a - b) / b).abs() < rel
}

// Reference values: mpmath meijerg and quad at 30 digits.

#[test]
fn fixed_gg_outage_reference() {
    let cfg = fixed(moderate(), 30.0, 2, 1.0);
    let want = 2.101_288_350_134_563e-4;
    let cf = outage_fixed_gg(&cfg).unwrap();
    let q = outage_quadrature(&cfg).unwrap();
    assert!(close(cf, want, 1e-8), "{cf}");
    assert!(close(q, want, 1e-8), "{q}");

    let cfg = fixed(strong(), 20.0, 3, 2.0);
    let want = 2.492_816_831_699_421e-2;
    assert!(close(outage_fixed_gg(&cfg).unwrap(), want, 1e-8));
    assert!(close(outage_quadrature(&cfg).unwrap(), want, 1e-8));
}

#[test]
fn fixed_ne_outage_reference() {
    let cfg = fixed(negexp(1.0), 25.0, 2, 1.0);
    let want = 1.168_827_262_692_765_7e-2;
    assert!(close(outage_fixed_ne(&cfg).unwrap(), want, 1e-8));
    assert!(close(outage_quadrature(&cfg).unwrap(), want, 1e-8));
}

#[test]
fn adaptive_outage_reference() {
    let cfg = adaptive(negexp(1.0), 20.0, 2);
    let want = 0.277_707_384_154_421_5;
    assert!(close(outage_adaptive(&cfg).unwrap(), want, 1e-10));
    assert!(close(outage_quadrature(&cfg).unwrap(), want, 1e-10));
}

#[test]
fn ber_references() {
    let cases = [
        (fixed(moderate(), 30.0, 2, 1.0), 6.867_563_878_213_3e-6),
        (fixed(negexp(2.0), 25.0, 2, 1.0), 2.923_943_510_332_372e-3),
        (adaptive(strong(), 35.0, 2), 3.372_592_360_345_850_5e-3),
        (adaptive(negexp(1.0), 30.0, 3), 1.376_594_273_281_523e-2),
    ];
    for (cfg, want) in &cases {
        let cf = closed_form(cfg, Metric::Ber).unwrap();
        let q = ber_quadrature(cfg).unwrap();
        assert!(close(cf, *want, 1e-7), "closed {cf} vs {want}");
        assert!(close(q, *want, 1e-7), "quad {q} vs {want}");
    }
}

#[test]
fn closed_forms_match_quadrature_on_a_grid() {
    let turbs = [moderate(), strong(), negexp(1.0), negexp(5.0)];
    for t in turbs {
        for &n in &[1usize, 2, 4] {
            for &g in &[0.0, 15.0, 30.0, 45.0] {
                for cfg in [fixed(t, g, n, 1.0), adaptive(t, g, n)] {
                    for metric in [Metric::Outage, Metric::Ber] {
                        let cf = closed_form(&cfg, metric).unwrap();
                        let q = quadrature(&cfg, metric).unwrap();
                        assert!((cf - q).abs() < 1e-6, "{metric} {g} dB N={n}: {cf} {q}");
                    }
                }
            }
        }
    }
}

#[test]
fn scheme_mismatch_is_an_error() {
    let f = fixed(moderate(), 20.0, 2, 1.0);
    let a = adaptive(negexp(1.0), 20.0, 2);
    assert!(outage_fixed_ne(&f).is_err());
    assert!(ber_fixed_gg(&a).is_err());
    assert!(ber_adaptive_gg(&f).is_err());
    assert!(ber_adaptive_ne(&f).is_err());
    assert!(ber_fixed_ne(&a).is_err());
}

#[test]
fn high_snr_outage_decays() {
    for cfg in [fixed(moderate(), 120.0, 2, 1.0), adaptive(strong(), 120.0, 2)] {
        let p = closed_form(&cfg, Metric::Outage).unwrap();
        assert!((0.0..1e-6).contains(&p), "{p}");
    }
}

#[test]
fn zero_threshold_gives_zero_outage() {
    for t in [moderate(), negexp(1.0)] {
        for cfg in [fixed(t, 20.0, 2, 1.0), adaptive(t, 20.0, 2)] {
            let at = |th: f64| closed_form(&cfg.with_gamma_th(th).unwrap(), Metric::Outage).unwrap();
            assert_eq!(at(0.0), 0.0);
            // the FSO CDF vanishes only like γ^{min(α,β,ξ²)/2}, or γ^{1/2} for NegExp
            assert!(at(1e-20) <= 1e-9, "{}", at(1e-20));
            assert!(at(1e-20) <= at(1e-12) && at(1e-12) <= at(1e-6));
        }
    }
}

#[test]
fn low_snr_ber_is_one_half() {
    for t in [moderate(), strong(), negexp(1.0)] {
        for cfg in [fixed(t, -60.0, 2, 1.0), adaptive(t, -60.0, 2)] {
            let p = closed_form(&cfg, Metric::Ber).unwrap();
            assert!((p - 0.5).abs() < 1e-3, "{p}");
        }
    }
}

#[test]
fn single_user_adaptive_ber_matches_quadrature() {
    for t in [moderate(), strong(), negexp(2.0)] {
        let cfg = adaptive(t, 20.0, 1);
        let cf = closed_form(&cfg, Metric::Ber).unwrap();
        assert!((cf - ber_quadrature(&cfg).unwrap()).abs() < 1e-6);
    }
}

#[test]
fn vanishing_lambda_leaves_rf_selection_ber() {
    let g = db(30.0);
    let n = 3;
    let cfg = adaptive(negexp(1e-9), 30.0, n);
    let p = ber_adaptive_ne(&cfg).unwrap();
    let rf_only = ber_from_outage(|x: f64| Ok((-(-x / g).exp_m1()).powi(n as i32))).unwrap();
    assert!((p - rf_only).abs() < 1e-6, "{p} {rf_only}");
}

#[test]
fn nested_and_single_integral_agree() {
    let cfg = fixed(strong(), 15.0, 2, 1.0);
    let a = ber_quadrature(&cfg).unwrap();
    let b = ber_quadrature_nested(&cfg).unwrap();
    assert!((a - b).abs() < 1e-9, "{a} {b}");
}

#[test]
fn printed_fixed_gg_outage_is_off() {
    let cfg = fixed(moderate(), 30.0, 2, 1.0);
    let recs = printed::audit(&cfg, Metric::Outage).unwrap();
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0].equation, "eq22");
    assert!(recs[0].evaluable);
    assert!(recs[0].gap() > 1e-6, "{:?}", recs[0]);
}

#[test]
fn printed_adaptive_outage_cross_term() {
    let cfg = adaptive(moderate(), 10.0, 2);
    let recs = printed::audit(&cfg, Metric::Outage).unwrap();
    assert_eq!(recs[0].equation, "eq32");
    assert!(recs[0].gap() > 1e-6);
    assert!(close(printed::eq32_printed(&cfg).unwrap(), recs[0].closed_form, 1e-15));
}

#[test]
fn audit_is_empty_where_nothing_was_misprinted() {
    let cfg = fixed(negexp(1.0), 20.0, 2, 1.0);
    assert!(printed::audit(&cfg, Metric::Outage).unwrap().is_empty());
    let cfg = fixed(moderate(), 20.0, 2, 1.0);
    assert!(printed::audit(&cfg, Metric::Ber).unwrap().is_empty());
}

#[test]
fn rytov_outer_exponents_change_alpha() {
    let (a, b) = printed::rytov_with_outer_exponents(1.0f64);
    let (pa, pb) = linklab_core::channels::rytov_to_gg_params(1.0f64).unwrap();
    assert!(a > 1.0 && b > 1.0);
    assert!((a - pa).abs() > 1e-3 || (b - pb).abs() > 1e-3);
}

#[test]
fn f32_instantiation() {
    let fso = TurbulenceModel::<f32>::neg_exp(1.0, 1.0).unwrap();
    let cfg = SystemConfig::symmetric(2, fso, 316.227_77f32, Relay::fixed(1.0).unwrap(), 10.0).unwrap();
    let p = outage_fixed_ne(&cfg).unwrap();
    assert!(((p - 1.168_827_3e-2) / 1.168_827_3e-2).abs() < 1e-3, "{p}");
}

use linklab_core::analytic::{closed_form, Metric};
use linklab_core::channels::{GammaGammaPointing, RayleighRf, SnrDistribution, TurbulenceModel};
use linklab_core::linkmodel::{
    best_user_cdf, best_user_pdf, best_user_pdf_binomial, end_to_end_snr, end_to_end_snr_min_approx, Relay,
    SystemConfig,
};
use proptest::prelude::*;

fn turbulence() -> impl Strategy<Value = TurbulenceModel<f64>> {
    prop_oneof![
        (1.5f64..8.0, 1.1f64..4.0, 1.0f64..12.0).prop_map(|(a, b, x)| {
            TurbulenceModel::gamma_gamma(GammaGammaPointing::new(a, b, x).unwrap(), 1.0).unwrap()
        }),
        (0.3f64..6.0).prop_map(|l| TurbulenceModel::neg_exp(l, 1.0).unwrap()),
    ]
}

fn relay() -> impl Strategy<Value = Relay<f64>> {
    prop_oneof![
        (0.5f64..3.0).prop_map(|c| Relay::fixed(c).unwrap()),
        Just(Relay::AdaptiveGain)
    ]
}

fn config(fso: TurbulenceModel<f64>, relay: Relay<f64>, n: usize, avg_db: f64) -> SystemConfig<f64> {
    SystemConfig::symmetric(n, fso, 10f64.powf(avg_db / 10.0), relay, 10.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn metrics_stay_in_range(fso in turbulence(), r in relay(), n in 1usize..5, g in 0.0f64..50.0) {
        let cfg = config(fso, r, n, g);
        let p = closed_form(&cfg, Metric::Outage).unwrap();
        prop_assert!((0.0..=1.0).contains(&p), "{}", p);
        let e = closed_form(&cfg, Metric::Ber).unwrap();
        prop_assert!((0.0..=0.5).contains(&e), "{}", e);
    }

    #[test]
    fn metrics_fall_with_average_snr(fso in turbulence(), r in relay(), n in 1usize..4, g in 0.0f64..40.0) {
        let lo = config(fso, r, n, g);
        let hi = config(fso, r, n, g + 3.0);
        for m in [Metric::Outage, Metric::Ber] {
            let a = closed_form(&lo, m).unwrap();
            let b = closed_form(&hi, m).unwrap();
            prop_assert!(b <= a * (1.0 + 1e-9) + 1e-12, "{} {} {}", m, a, b);
        }
    }

    #[test]
    fn fixed_gain_improves_with_users(fso in turbulence(), c in 0.5f64..3.0, n in 1usize..5, g in 5.0f64..40.0) {
        let r = Relay::fixed(c).unwrap();
        for m in [Metric::Outage, Metric::Ber] {
            let a = closed_form(&config(fso, r, n, g), m).unwrap();
            let b = closed_form(&config(fso, r, n + 1, g), m).unwrap();
            prop_assert!(b <= a * (1.0 + 1e-9) + 1e-12, "{} {} {}", m, a, b);
        }
    }

    #[test]
    fn fso_cdf_is_monotone(fso in turbulence(), mean in 0.1f64..1e4, x in 1e-6f64..1e3, f in 1.0f64..10.0) {
        let t = fso.with_mean_snr(mean).unwrap();
        let a = t.cdf_snr(x).unwrap();
        let b = t.cdf_snr(x * f).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a - 1e-12, "{} {}", a, b);
    }

    #[test]
    fn more_users_shift_the_best_snr_up(mean in 0.1f64..1e3, n in 1usize..20, x in 0.0f64..1e3) {
        let rf = RayleighRf::new(mean).unwrap();
        let a = best_user_cdf(&rf, n, x).unwrap();
        let b = best_user_cdf(&rf, n + 1, x).unwrap();
        prop_assert!(b <= a);
        prop_assert!(best_user_cdf(&rf, n, x * 1.5).unwrap() >= a);
    }

    #[test]
    fn binomial_density_matches_product_form(mean in 0.5f64..100.0, n in 1usize..12, u in 0.05f64..5.0) {
        let rf = RayleighRf::new(mean).unwrap();
        let x = u * mean;
        let a = best_user_pdf(&rf, n, x).unwrap();
        let b = best_user_pdf_binomial(&rf, n, x).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (a.abs() + 1.0 / mean), "{} {}", a, b);
    }

    #[test]
    fn relay_snr_bounds(gf in 0.0f64..1e6, gr in 0.0f64..1e6, c in 0.1f64..10.0) {
        let adaptive = end_to_end_snr(&Relay::AdaptiveGain, gf, gr);
        prop_assert!(adaptive <= end_to_end_snr_min_approx(gf, gr));
        prop_assert!(adaptive >= 0.0);
        let fixed = end_to_end_snr(&Relay::FixedGain { c }, gf, gr);
        prop_assert!(fixed <= gr && fixed >= 0.0);
    }
}

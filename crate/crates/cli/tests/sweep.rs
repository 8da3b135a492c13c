use linklab::config::{parse_config, RelayKind};
use linklab::output::{emit_csv, quantize, read_csv, to_csv, CSV_HEADER};
use linklab::{execute, preset, run_sweep, RunOptions, PRESET_NAMES};
use linklab_core::analytic::{closed_form, quadrature, Method, Metric};

fn closed_only(name: &str) -> linklab::SweepSpec {
    let mut s = preset(name).unwrap();
    s.methods = vec![Method::ClosedForm];
    s
}

#[test]
fn single_point_matches_direct_call() {
    let spec =
        parse_config("metric = \"ber\"\nregime = \"strong-gg\"\nrelay = \"adaptive\"\nN = 3\ngamma_avg_db = [17.5]\n")
            .unwrap();
    let out = run_sweep(&spec, RunOptions::default());
    assert!(out.failures.is_empty());
    assert_eq!(out.curves.len(), 2);
    let cfg = spec.series()[0].config(&spec, 17.5).unwrap();
    let c = &out.curves[0];
    assert_eq!((c.method, c.points.len()), (Method::ClosedForm, 1));
    assert_eq!(c.points[0].metric, closed_form(&cfg, Metric::Ber).unwrap());
    assert_eq!(out.curves[1].points[0].metric, quadrature(&cfg, Metric::Ber).unwrap());
}

#[test]
fn every_preset_runs() {
    for name in PRESET_NAMES {
        let spec = closed_only(name);
        let out = run_sweep(&spec, RunOptions::default());
        assert!(out.failures.is_empty(), "{name}: {:?}", out.failures);
        assert_eq!(out.curves.len(), spec.series().len());
        for c in &out.curves {
            assert_eq!(c.points.len(), spec.gamma_avg_db.len());
            assert!(c.points.iter().all(|p| p.metric.is_finite()));
        }
    }
}

#[test]
fn fig2_has_four_curves_per_method() {
    let out = run_sweep(&preset("fig2").unwrap(), RunOptions::default());
    assert_eq!(out.curves.len(), 8);
    assert!(out.errata.iter().any(|e| e.equation == "eq22"));
    assert!(out.errata.iter().any(|e| e.equation == "eq32"));
    assert!(out.errata.iter().all(|e| e.equation != "closed-form"));
}

#[test]
fn crowded_cell_is_better_with_fixed_gain() {
    let spec = closed_only("fig5");
    let out = run_sweep(&spec, RunOptions::default());
    let fixed: Vec<_> = out
        .curves
        .iter()
        .filter(|c| c.relay == RelayKind::Fixed.as_str())
        .collect();
    assert_eq!(fixed.iter().map(|c| c.n_users).collect::<Vec<_>>(), vec![1, 2, 4]);
    for w in fixed.windows(2) {
        for (a, b) in w[0].points.iter().zip(&w[1].points) {
            assert!(b.metric <= a.metric * (1.0 + 1e-12), "{} dB", a.gamma_avg_db);
        }
    }
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let spec = preset("fig4").unwrap();
    let out = run_sweep(&spec, RunOptions::default());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig4.csv");
    emit_csv(&out.curves, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let back = read_csv(&text).unwrap();
    assert_eq!(back.len(), out.curves.len());
    for (a, b) in out.curves.iter().zip(&back) {
        assert_eq!(
            (a.method, a.n_users, &a.regime, &a.relay),
            (b.method, b.n_users, &b.regime, &b.relay)
        );
        for (p, q) in a.points.iter().zip(&b.points) {
            assert_eq!(quantize(p.metric).to_bits(), q.metric.to_bits());
            assert_eq!(quantize(p.gamma_avg_db).to_bits(), q.gamma_avg_db.to_bits());
        }
    }
    assert_eq!(to_csv(&back), text);
}

#[test]
fn empty_curve_set_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    emit_csv(&[], &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().trim_end(), CSV_HEADER);
}

#[test]
fn execute_writes_dataset_and_errata() {
    let dir = tempfile::tempdir().unwrap();
    let spec = parse_config("regime = \"moderate-gg\"\nrelay = \"fixed\"\nN = 2\ngamma_avg_db = [20, 30]\n").unwrap();
    let r = execute(&spec, "tiny", dir.path(), RunOptions::default()).unwrap();
    assert!(r.csv.ends_with("tiny.csv"));
    let log = std::fs::read_to_string(dir.path().join("errata.log")).unwrap();
    assert_eq!(log.lines().filter(|l| l.starts_with("eq22 ")).count(), 2);
    execute(&spec, "tiny", dir.path(), RunOptions { trusted: true }).unwrap();
    let log = std::fs::read_to_string(dir.path().join("errata.log")).unwrap();
    assert_eq!(log.lines().filter(|l| l.starts_with("eq22 ")).count(), 4);
}

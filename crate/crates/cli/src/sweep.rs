//! Grid evaluation.

use linklab_core::analytic::{closed_form, printed, quadrature, Method, PerformanceCurve, PerformancePoint};
use linklab_core::mcsim::run_mc;
use rayon::prelude::*;

use crate::config::{rytov_alpha_pair, Series, SweepSpec};
use crate::errata::{fingerprint, ErrataEntry};

/// Closed-form values further than this from the quadrature oracle are
/// reported (and replaced in trusted mode).
pub const CLOSED_FORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Replace disagreeing closed-form values with the quadrature oracle.
    pub trusted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub series: String,
    pub gamma_avg_db: f64,
    pub method: Method,
    pub error: String,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutput {
    pub curves: Vec<PerformanceCurve<f64>>,
    pub failures: Vec<PointFailure>,
    pub errata: Vec<ErrataEntry>,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of the Monte Carlo run at one grid point.
pub fn point_seed(master: u64, series: usize, point: usize) -> u64 {
    splitmix64(master ^ splitmix64(((series as u64) << 32) | point as u64))
}

fn series_label(s: &Series) -> String {
    format!("{}/{}/N={}", s.regime.name, s.relay.as_str(), s.n_users)
}

struct PointResult {
    values: Vec<(Method, Result<PerformancePoint<f64>, String>)>,
    errata: Vec<ErrataEntry>,
}

fn eval_point(spec: &SweepSpec, series: &Series, si: usize, pi: usize, opts: RunOptions) -> PointResult {
    let db = spec.gamma_avg_db[pi];
    let mut errata = Vec::new();
    let cfg = match series.config(spec, db) {
        Ok(c) => c,
        Err(e) => {
            let msg = e.to_string();
            return PointResult {
                values: spec.methods.iter().map(|&m| (m, Err(msg.clone()))).collect(),
                errata,
            };
        }
    };
    let fp = fingerprint(&series.point_key(spec, db));
    let point = |method, metric: f64, ci: f64| PerformancePoint {
        gamma_avg_db: db,
        metric,
        metric_kind: spec.metric,
        method,
        ci_half_width: ci,
    };

    let wants = |m| spec.methods.contains(&m);
    let need_quad = wants(Method::Quadrature) || (wants(Method::ClosedForm) && opts.trusted);
    let quad = need_quad.then(|| quadrature(&cfg, spec.metric).map_err(|e| e.to_string()));

    let mut values = Vec::new();
    for &m in &spec.methods {
        let v = match m {
            Method::ClosedForm => closed_form(&cfg, spec.metric).map_err(|e| e.to_string()).map(|cf| {
                let mut value = cf;
                if let Some(Ok(q)) = &quad {
                    if (cf - q).abs() > CLOSED_FORM_TOL {
                        let note = if opts.trusted {
                            "closed form disagrees with quadrature; quadrature value used"
                        } else {
                            "closed form disagrees with quadrature"
                        };
                        errata.push(ErrataEntry::new("closed-form", &fp, cf, *q, note));
                        if opts.trusted {
                            value = *q;
                        }
                    }
                }
                point(m, value, 0.0)
            }),
            Method::Quadrature => quad
                .clone()
                .expect("quadrature computed when requested")
                .map(|q| point(m, q, 0.0)),
            Method::MonteCarlo => {
                let mo = spec.mc.options(point_seed(spec.mc.seed, si, pi));
                run_mc(&cfg, spec.metric, &mo)
                    .map_err(|e| e.to_string())
                    .map(|r| point(m, r.estimate, r.half_width(1.96)))
            }
        };
        values.push((m, v));
    }

    if wants(Method::ClosedForm) {
        match printed::audit(&cfg, spec.metric) {
            Ok(records) => {
                for r in records {
                    let report = if r.evaluable {
                        r.gap() > CLOSED_FORM_TOL
                    } else {
                        pi == 0
                    };
                    if report {
                        errata.push(ErrataEntry::new(r.equation, &fp, r.closed_form, r.oracle, r.note));
                    }
                }
            }
            Err(e) => errata.push(ErrataEntry::new(
                "audit",
                &fp,
                f64::NAN,
                f64::NAN,
                &format!("audit failed: {e}"),
            )),
        }
        if pi == 0 {
            if let Some((a_printed, a_other)) = rytov_alpha_pair(&series.regime.model) {
                errata.push(ErrataEntry::new(
                    "rytov-alpha",
                    &fp,
                    a_printed,
                    a_other,
                    "alpha from the printed Rytov mapping vs the form with outer exponents 7/6, 5/6",
                ));
            }
        }
    }
    PointResult { values, errata }
}

/// Evaluates every (series, γ_avg, method) combination. Points run in
/// parallel; assembly is ordered and deterministic.
pub fn run_sweep(spec: &SweepSpec, opts: RunOptions) -> SweepOutput {
    let series = spec.series();
    let np = spec.gamma_avg_db.len();
    let jobs: Vec<(usize, usize)> = (0..series.len()).flat_map(|s| (0..np).map(move |p| (s, p))).collect();
    let results: Vec<PointResult> = jobs
        .par_iter()
        .map(|&(si, pi)| eval_point(spec, &series[si], si, pi, opts))
        .collect();

    let mut out = SweepOutput::default();
    for (si, s) in series.iter().enumerate() {
        let mut curves: Vec<PerformanceCurve<f64>> = spec
            .methods
            .iter()
            .map(|&m| PerformanceCurve {
                method: m,
                metric_kind: spec.metric,
                n_users: s.n_users,
                regime: s.regime.name.clone(),
                relay: s.relay.as_str().to_string(),
                points: Vec::with_capacity(np),
            })
            .collect();
        for pi in 0..np {
            let r = &results[si * np + pi];
            for (ci, (m, v)) in r.values.iter().enumerate() {
                match v {
                    Ok(p) => curves[ci].points.push(*p),
                    Err(e) => out.failures.push(PointFailure {
                        series: series_label(s),
                        gamma_avg_db: spec.gamma_avg_db[pi],
                        method: *m,
                        error: e.clone(),
                    }),
                }
            }
            out.errata.extend(r.errata.iter().cloned());
        }
        out.curves.extend(curves);
    }
    out
}

//! Scenario documents (TOML) and their validated form.
//!
//! See `presets/example.toml` for an annotated document and
//! `presets/SCHEMA.md` for every key.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Range;

use linklab_core::analytic::{Method, Metric};
use linklab_core::channels::{rytov_to_gg_params, GammaGammaPointing, TurbulenceModel};
use linklab_core::linkmodel::{Relay, SystemConfig};
use linklab_core::mcsim::{CombiningMode, McOptions, DEFAULT_CHUNK_SIZE};
use linklab_core::scalar::db_to_linear;
use serde::Deserialize;
use toml::Spanned;

use crate::CliError;

pub const MAX_USERS: usize = 64;
pub const MAX_GRID_POINTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelayKind {
    Fixed,
    Adaptive,
}

impl RelayKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RelayKind::Fixed => "fixed",
            RelayKind::Adaptive => "adaptive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeModel {
    GammaGamma {
        alpha: f64,
        beta: f64,
        xi: f64,
    },
    /// α, β derived from the Rytov variance.
    Rytov {
        rytov_var: f64,
        xi: f64,
    },
    NegExp {
        lambda: f64,
    },
}

impl RegimeModel {
    pub fn turbulence(&self, mean_snr: f64) -> linklab_core::Result<TurbulenceModel<f64>> {
        match *self {
            RegimeModel::GammaGamma { alpha, beta, xi } => {
                TurbulenceModel::gamma_gamma(GammaGammaPointing::new(alpha, beta, xi)?, mean_snr)
            }
            RegimeModel::Rytov { rytov_var, xi } => {
                TurbulenceModel::gamma_gamma(GammaGammaPointing::from_rytov(rytov_var, xi)?, mean_snr)
            }
            RegimeModel::NegExp { lambda } => TurbulenceModel::neg_exp(lambda, mean_snr),
        }
    }

    fn describe(&self) -> String {
        match *self {
            RegimeModel::GammaGamma { alpha, beta, xi } => format!("gg(alpha={alpha},beta={beta},xi={xi})"),
            RegimeModel::Rytov { rytov_var, xi } => format!("gg(rytov={rytov_var},xi={xi})"),
            RegimeModel::NegExp { lambda } => format!("negexp(lambda={lambda})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Regime {
    pub name: String,
    pub model: RegimeModel,
}

pub fn builtin_regime(name: &str) -> Option<RegimeModel> {
    match name {
        "moderate-gg" => Some(RegimeModel::GammaGamma {
            alpha: 4.0,
            beta: 1.9,
            xi: 10.45,
        }),
        "strong-gg" => Some(RegimeModel::GammaGamma {
            alpha: 4.2,
            beta: 1.4,
            xi: 2.45,
        }),
        "negexp" => Some(RegimeModel::NegExp { lambda: 1.0 }),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub trials: u64,
    pub seed: u64,
    pub chunk_size: u64,
    pub combining: CombiningMode,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            trials: 1_000_000,
            seed: 1,
            chunk_size: DEFAULT_CHUNK_SIZE,
            combining: CombiningMode::MinApprox,
        }
    }
}

impl McSettings {
    pub fn options(&self, seed: u64) -> McOptions {
        McOptions::new(self.trials, seed)
            .with_chunk_size(self.chunk_size)
            .with_mode(self.combining)
    }
}

/// Which parameter a curve family varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    GammaAvgDb,
    NUsers,
    Lambda,
    Regime,
}

/// A validated scenario. The x axis is always γ_avg in dB; every
/// combination of regime × relay × N is one curve per method.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub metric: Metric,
    pub methods: Vec<Method>,
    pub gamma_avg_db: Vec<f64>,
    pub regimes: Vec<Regime>,
    pub relays: Vec<RelayKind>,
    pub n_users: Vec<usize>,
    pub gamma_th_db: f64,
    pub c: f64,
    pub eta: f64,
    pub mc: McSettings,
}

/// One curve family member.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub regime: Regime,
    pub relay: RelayKind,
    pub n_users: usize,
}

impl Series {
    /// System configuration at γ̄_FSO = γ̄_RF = 10^{db/10}.
    pub fn config(&self, spec: &SweepSpec, gamma_avg_db: f64) -> linklab_core::Result<SystemConfig<f64>> {
        let g = db_to_linear(gamma_avg_db);
        let relay = match self.relay {
            RelayKind::Fixed => Relay::fixed(spec.c)?,
            RelayKind::Adaptive => Relay::AdaptiveGain,
        };
        SystemConfig::symmetric(
            self.n_users,
            self.regime.model.turbulence(g)?,
            g,
            relay,
            db_to_linear(spec.gamma_th_db),
        )?
        .with_eta(spec.eta)
    }

    /// Stable text identifying one grid point, hashed into errata fingerprints.
    pub fn point_key(&self, spec: &SweepSpec, gamma_avg_db: f64) -> String {
        format!(
            "metric={};n={};regime={}:{};relay={};c={};gamma_th_db={};eta={};gamma_avg_db={}",
            spec.metric,
            self.n_users,
            self.regime.name,
            self.regime.model.describe(),
            self.relay.as_str(),
            spec.c,
            spec.gamma_th_db,
            spec.eta,
            gamma_avg_db
        )
    }
}

impl SweepSpec {
    /// Curve families in output order: regime, then relay, then N.
    pub fn series(&self) -> Vec<Series> {
        let mut out = Vec::new();
        for r in &self.regimes {
            for &relay in &self.relays {
                for &n in &self.n_users {
                    out.push(Series {
                        regime: r.clone(),
                        relay,
                        n_users: n,
                    });
                }
            }
        }
        out
    }

    /// γ_avg plus every series dimension with more than one value.
    pub fn sweep_variables(&self) -> Vec<SweepVariable> {
        let mut v = vec![SweepVariable::GammaAvgDb];
        if self.n_users.len() > 1 {
            v.push(SweepVariable::NUsers);
        }
        if self.regimes.len() > 1 {
            let all_ne = self
                .regimes
                .iter()
                .all(|r| matches!(r.model, RegimeModel::NegExp { .. }));
            v.push(if all_ne {
                SweepVariable::Lambda
            } else {
                SweepVariable::Regime
            });
        }
        v
    }

    /// Canonical document: every default spelled out, every regime defined
    /// inline, the grid listed point by point.
    pub fn to_toml(&self) -> String {
        let mut s = String::new();
        let list = |items: Vec<String>| format!("[{}]", items.join(", "));
        let _ = writeln!(s, "metric = \"{}\"", self.metric);
        let _ = writeln!(
            s,
            "methods = {}",
            list(self.methods.iter().map(|m| format!("\"{m}\"")).collect())
        );
        let _ = writeln!(
            s,
            "regime = {}",
            list(self.regimes.iter().map(|r| format!("\"{}\"", r.name)).collect())
        );
        let _ = writeln!(
            s,
            "relay = {}",
            list(self.relays.iter().map(|r| format!("\"{}\"", r.as_str())).collect())
        );
        let _ = writeln!(
            s,
            "n_users = {}",
            list(self.n_users.iter().map(|n| n.to_string()).collect())
        );
        let _ = writeln!(s, "gamma_th_db = {:?}", self.gamma_th_db);
        let _ = writeln!(s, "c = {:?}", self.c);
        let _ = writeln!(s, "eta = {:?}", self.eta);
        let _ = writeln!(
            s,
            "gamma_avg_db = {}",
            list(self.gamma_avg_db.iter().map(|g| format!("{g:?}")).collect())
        );
        let _ = writeln!(s, "\n[mc]");
        let _ = writeln!(s, "trials = {}", self.mc.trials);
        let _ = writeln!(s, "seed = {}", self.mc.seed);
        let _ = writeln!(s, "chunk_size = {}", self.mc.chunk_size);
        let _ = writeln!(
            s,
            "combining = \"{}\"",
            match self.mc.combining {
                CombiningMode::Exact => "exact",
                CombiningMode::MinApprox => "min-approx",
            }
        );
        for r in &self.regimes {
            let _ = writeln!(s, "\n[regimes.\"{}\"]", r.name);
            match r.model {
                RegimeModel::GammaGamma { alpha, beta, xi } => {
                    let _ = writeln!(
                        s,
                        "kind = \"gamma-gamma\"\nalpha = {alpha:?}\nbeta = {beta:?}\nxi = {xi:?}"
                    );
                }
                RegimeModel::Rytov { rytov_var, xi } => {
                    let _ = writeln!(s, "kind = \"gamma-gamma\"\nrytov = {rytov_var:?}\nxi = {xi:?}");
                }
                RegimeModel::NegExp { lambda } => {
                    let _ = writeln!(s, "kind = \"neg-exp\"\nlambda = {lambda:?}");
                }
            }
        }
        s
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GridDoc {
    List(Vec<f64>),
    Range(RangeDoc),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RangeDoc {
    start: f64,
    stop: f64,
    step: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct McDoc {
    trials: Option<Spanned<i64>>,
    seed: Option<Spanned<i64>>,
    chunk_size: Option<Spanned<i64>>,
    combining: Option<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RegimeDoc {
    kind: Spanned<String>,
    alpha: Option<Spanned<f64>>,
    beta: Option<Spanned<f64>>,
    xi: Option<Spanned<f64>>,
    rytov: Option<Spanned<f64>>,
    lambda: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    metric: Option<Spanned<String>>,
    methods: Option<Spanned<Vec<String>>>,
    regime: Spanned<OneOrMany<String>>,
    relay: Spanned<OneOrMany<String>>,
    #[serde(alias = "N")]
    n_users: Spanned<OneOrMany<i64>>,
    gamma_th_db: Option<Spanned<f64>>,
    #[serde(alias = "C")]
    c: Option<Spanned<f64>>,
    eta: Option<Spanned<f64>>,
    gamma_avg_db: Option<Spanned<GridDoc>>,
    mc: Option<McDoc>,
    #[serde(default)]
    regimes: BTreeMap<String, Spanned<RegimeDoc>>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn err(&self, key: &str, span: Range<usize>, message: impl Into<String>) -> CliError {
        CliError::Config {
            key: key.to_string(),
            line: line_of(self.text, span.start),
            message: message.into(),
        }
    }

    fn positive(&self, key: &str, v: &Spanned<f64>) -> Result<f64, CliError> {
        let x = *v.get_ref();
        if x > 0.0 && x.is_finite() {
            Ok(x)
        } else {
            Err(self.err(key, v.span(), format!("must be a positive finite number, got {x}")))
        }
    }
}

fn toml_error(text: &str, e: toml::de::Error) -> CliError {
    let line = e.span().map(|s| line_of(text, s.start)).unwrap_or(0);
    let msg = e.message().trim().to_string();
    // serde names the offending field in backticks; otherwise read it off the line
    let key = msg
        .split('`')
        .nth(1)
        .map(str::to_string)
        .or_else(|| {
            text.lines()
                .nth(line.saturating_sub(1))
                .and_then(|l| l.split('=').next())
                .map(|k| k.trim().trim_matches(|c| c == '[' || c == ']').to_string())
        })
        .unwrap_or_default();
    CliError::Config {
        key,
        line,
        message: msg,
    }
}

/// Parses and validates a scenario document.
pub fn parse_config(text: &str) -> Result<SweepSpec, CliError> {
    let doc: ConfigDoc = toml::from_str(text).map_err(|e| toml_error(text, e))?;
    let cx = Ctx { text };

    let metric = match &doc.metric {
        None => Metric::Outage,
        Some(m) => m
            .get_ref()
            .parse::<Metric>()
            .map_err(|_| cx.err("metric", m.span(), "expected \"outage\" or \"ber\""))?,
    };

    let methods = match &doc.methods {
        None => vec![Method::ClosedForm, Method::Quadrature],
        Some(m) => {
            let mut out = Vec::new();
            for s in m.get_ref() {
                let v = s.parse::<Method>().map_err(|_| {
                    cx.err(
                        "methods",
                        m.span(),
                        format!("unknown method \"{s}\" (closed, quad, mc)"),
                    )
                })?;
                if !out.contains(&v) {
                    out.push(v);
                }
            }
            if out.is_empty() {
                return Err(cx.err("methods", m.span(), "at least one method is required"));
            }
            out.sort();
            out
        }
    };

    let mut definitions = BTreeMap::new();
    for (name, r) in &doc.regimes {
        let key = format!("regimes.{name}");
        let d = r.get_ref();
        let need = |field: &'static str, v: &Option<Spanned<f64>>| -> Result<f64, CliError> {
            match v {
                Some(v) => cx.positive(&format!("{key}.{field}"), v),
                None => Err(cx.err(&format!("{key}.{field}"), r.span(), "missing required key")),
            }
        };
        let forbid = |field: &'static str, v: &Option<Spanned<f64>>| -> Result<(), CliError> {
            match v {
                Some(v) => Err(cx.err(
                    &format!("{key}.{field}"),
                    v.span(),
                    format!("not allowed for kind \"{}\"", d.kind.get_ref()),
                )),
                None => Ok(()),
            }
        };
        let model = match d.kind.get_ref().as_str() {
            "gamma-gamma" => {
                let xi = need("xi", &d.xi)?;
                forbid("lambda", &d.lambda)?;
                if d.rytov.is_some() {
                    forbid("alpha", &d.alpha)?;
                    forbid("beta", &d.beta)?;
                    RegimeModel::Rytov {
                        rytov_var: need("rytov", &d.rytov)?,
                        xi,
                    }
                } else {
                    RegimeModel::GammaGamma {
                        alpha: need("alpha", &d.alpha)?,
                        beta: need("beta", &d.beta)?,
                        xi,
                    }
                }
            }
            "neg-exp" => {
                forbid("alpha", &d.alpha)?;
                forbid("beta", &d.beta)?;
                forbid("xi", &d.xi)?;
                forbid("rytov", &d.rytov)?;
                RegimeModel::NegExp {
                    lambda: need("lambda", &d.lambda)?,
                }
            }
            other => {
                return Err(cx.err(
                    &format!("{key}.kind"),
                    d.kind.span(),
                    format!("unknown kind \"{other}\" (gamma-gamma, neg-exp)"),
                ))
            }
        };
        // surface parameter errors here rather than at the first grid point
        model
            .turbulence(1.0)
            .map_err(|e| cx.err(&key, r.span(), e.to_string()))?;
        definitions.insert(name.clone(), model);
    }

    let regime_span = doc.regime.span();
    let mut regimes = Vec::new();
    for name in doc.regime.into_inner().into_vec() {
        let model = definitions
            .get(&name)
            .copied()
            .or_else(|| builtin_regime(&name))
            .ok_or_else(|| {
                cx.err(
                    "regime",
                    regime_span.clone(),
                    format!("unknown regime \"{name}\" (moderate-gg, strong-gg, negexp, or a [regimes.NAME] table)"),
                )
            })?;
        if regimes.iter().any(|r: &Regime| r.name == name) {
            return Err(cx.err("regime", regime_span.clone(), format!("regime \"{name}\" listed twice")));
        }
        regimes.push(Regime { name, model });
    }
    if regimes.is_empty() {
        return Err(cx.err("regime", regime_span, "at least one regime is required"));
    }

    let relay_span = doc.relay.span();
    let mut relays = Vec::new();
    for r in doc.relay.into_inner().into_vec() {
        let k = match r.as_str() {
            "fixed" => RelayKind::Fixed,
            "adaptive" => RelayKind::Adaptive,
            _ => {
                return Err(cx.err(
                    "relay",
                    relay_span.clone(),
                    format!("unknown relay \"{r}\" (fixed, adaptive)"),
                ))
            }
        };
        if !relays.contains(&k) {
            relays.push(k);
        }
    }
    if relays.is_empty() {
        return Err(cx.err("relay", relay_span, "at least one relay scheme is required"));
    }

    let n_span = doc.n_users.span();
    let mut n_users = Vec::new();
    for n in doc.n_users.into_inner().into_vec() {
        if n < 1 || n as usize > MAX_USERS {
            return Err(cx.err(
                "n_users",
                n_span.clone(),
                format!("must be between 1 and {MAX_USERS}, got {n}"),
            ));
        }
        if n_users.contains(&(n as usize)) {
            return Err(cx.err("n_users", n_span.clone(), format!("{n} listed twice")));
        }
        n_users.push(n as usize);
    }
    if n_users.is_empty() {
        return Err(cx.err("n_users", n_span, "at least one value is required"));
    }
    if n_users.windows(2).any(|w| w[0] >= w[1]) {
        return Err(cx.err("n_users", n_span, "values must be strictly increasing"));
    }

    let gamma_th_db = match &doc.gamma_th_db {
        None => 10.0,
        Some(v) if v.get_ref().is_finite() => *v.get_ref(),
        Some(v) => return Err(cx.err("gamma_th_db", v.span(), "must be finite")),
    };
    let c = match &doc.c {
        None => 1.0,
        Some(v) => cx.positive("c", v)?,
    };
    let eta = match &doc.eta {
        None => 1.0,
        Some(v) => cx.positive("eta", v)?,
    };

    let gamma_avg_db = match &doc.gamma_avg_db {
        None => (0..=45).map(f64::from).collect(),
        Some(g) => {
            let values = match g.get_ref() {
                GridDoc::List(v) => v.clone(),
                GridDoc::Range(r) => {
                    if r.step.is_nan()
                        || r.step <= 0.0
                        || !r.start.is_finite()
                        || !r.stop.is_finite()
                        || r.stop < r.start
                    {
                        return Err(cx.err(
                            "gamma_avg_db",
                            g.span(),
                            "range needs finite start <= stop and step > 0",
                        ));
                    }
                    let count = ((r.stop - r.start) / r.step + 1e-9).floor() as usize + 1;
                    if count > MAX_GRID_POINTS {
                        return Err(cx.err("gamma_avg_db", g.span(), format!("more than {MAX_GRID_POINTS} points")));
                    }
                    (0..count).map(|i| r.start + r.step * i as f64).collect()
                }
            };
            if values.is_empty() || values.len() > MAX_GRID_POINTS {
                return Err(cx.err(
                    "gamma_avg_db",
                    g.span(),
                    format!("needs between 1 and {MAX_GRID_POINTS} points"),
                ));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(cx.err("gamma_avg_db", g.span(), "values must be finite"));
            }
            if values.windows(2).any(|w| w[0] >= w[1]) {
                return Err(cx.err("gamma_avg_db", g.span(), "values must be strictly increasing"));
            }
            values
        }
    };

    let mut mc = McSettings::default();
    if let Some(m) = &doc.mc {
        let count = |key: &str, v: &Spanned<i64>| -> Result<u64, CliError> {
            if *v.get_ref() >= 1 {
                Ok(*v.get_ref() as u64)
            } else {
                Err(cx.err(key, v.span(), format!("must be at least 1, got {}", v.get_ref())))
            }
        };
        if let Some(t) = &m.trials {
            mc.trials = count("mc.trials", t)?;
        }
        if let Some(t) = &m.chunk_size {
            mc.chunk_size = count("mc.chunk_size", t)?;
        }
        if let Some(s) = &m.seed {
            if *s.get_ref() < 0 {
                return Err(cx.err("mc.seed", s.span(), "must be non-negative"));
            }
            mc.seed = *s.get_ref() as u64;
        }
        if let Some(c) = &m.combining {
            mc.combining = match c.get_ref().as_str() {
                "exact" => CombiningMode::Exact,
                "min-approx" => CombiningMode::MinApprox,
                other => {
                    return Err(cx.err(
                        "mc.combining",
                        c.span(),
                        format!("unknown mode \"{other}\" (exact, min-approx)"),
                    ))
                }
            };
        }
    }

    Ok(SweepSpec {
        metric,
        methods,
        gamma_avg_db,
        regimes,
        relays,
        n_users,
        gamma_th_db,
        c,
        eta,
        mc,
    })
}

/// Printed vs customary Rytov mapping for regimes defined through σ_R².
pub fn rytov_alpha_pair(model: &RegimeModel) -> Option<(f64, f64)> {
    match *model {
        RegimeModel::Rytov { rytov_var, .. } => {
            let printed = rytov_to_gg_params(rytov_var).ok()?.0;
            let other = linklab_core::analytic::printed::rytov_with_outer_exponents(rytov_var).0;
            Some((printed, other))
        }
        _ => None,
    }
}

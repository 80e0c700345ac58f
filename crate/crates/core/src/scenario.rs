// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

//! TOML scenario files: a reaction graph, rate bindings, an initial state and
//! an integration plan. Running a scenario yields a time series and optional
//! operator reports, written as CSV, text and JSON.
//!
//! ```toml
//! schema_version = 1
//! outputs = ["timeseries", "rates-report"]
//!
//! [graph]
//! builtin = "StandardRP"
//!
//! [rates]
//! kS = 1e6          # 1/s
//! kT = "1e4 1/s"
//!
//! [initial]
//! superposition = { S = 0.7071067811865476, T = 0.7071067811865476 }
//!
//! [integration]
//! method = "exact"
//! t_final = "5e-6 s"
//! samples = 51
//! ```
//!
//! All quantities are SI. A bare number is taken in the SI unit of its field;
//! a string may carry that unit explicitly (`1/s` or `s^-1` for rates,
//! `rad/s` for angular frequencies, `s` for times). Any other unit is an
//! error.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::densop::{BasisLabel, DensityOperator, TraceClass};
use crate::error::Error;
use crate::generators::{self, StepGuard};
use crate::linalg::{self, CMatrix, C64};
use crate::network::{self, BuiltinGraph, Edge, EdgeKind, GraphTemplate, RateExpr, ReactionGraph};
use crate::radical_pair::{self, ConsistencyReport, RPRates};
use crate::series::{self, TimeSeries};

pub const SCHEMA_VERSION: i64 = 1;
/// Tolerance on mixture weights and superposition norms.
pub const WEIGHT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    Schema,
    Unit,
}

/// One problem in a config, located by a dotted path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub path: String,
    pub kind: ViolationKind,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ViolationKind::Schema => "schema",
            ViolationKind::Unit => "unit",
        };
        write!(f, "{}: {} ({kind})", self.path, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("{} config violation(s): {}", .0.len(), join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl ConfigError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            ConfigError::Syntax(_) => &[],
            ConfigError::Invalid(v) => v,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Config { path: String, source: ConfigError },
    #[error("numeric failure: {0}")]
    Numeric(#[from] Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl ScenarioError {
    /// Process exit code: 2 config, 3 numeric or diagnostic, 1 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config { .. } => 2,
            ScenarioError::Numeric(_) => 3,
            ScenarioError::Io { .. } => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            ScenarioError::Config { path, source } => serde_json::json!({
                "error": match source {
                    ConfigError::Syntax(_) => "syntax",
                    ConfigError::Invalid(_) => "config",
                },
                "file": path,
                "message": source.to_string(),
                "violations": source.violations(),
            }),
            ScenarioError::Numeric(e) => {
                let mut v = serde_json::json!({ "error": "numeric", "message": e.to_string() });
                if let Error::Sample { index, time, .. } = e {
                    v["sample_index"] = serde_json::json!(index);
                    v["time"] = serde_json::json!(time);
                }
                v
            }
            ScenarioError::Io { path, source } => serde_json::json!({
                "error": "io",
                "file": path,
                "message": source.to_string(),
            }),
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        ScenarioError::Io { path: path.display().to_string(), source }
    }
}

// ---- raw schema ---------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: i64,
    #[serde(default)]
    outputs: Option<Vec<String>>,
    graph: RawGraph,
    #[serde(default)]
    rates: BTreeMap<String, RawQuantity>,
    initial: RawInitial,
    integration: RawIntegration,
    #[serde(default)]
    report: Option<RawReport>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawQuantity {
    Number(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    builtin: Option<String>,
    n_sites: Option<usize>,
    nodes: Option<Vec<RawNode>>,
    edges: Option<Vec<RawEdge>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    site: usize,
    name: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    kind: String,
    from: Option<usize>,
    to: Option<usize>,
    j: Option<usize>,
    k: Option<usize>,
    rate: Option<RawQuantity>,
    probability: Option<f64>,
    omega_j: Option<RawQuantity>,
    omega_k: Option<RawQuantity>,
    coupling: Option<RawQuantity>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    state: Option<String>,
    mixture: Option<BTreeMap<String, f64>>,
    superposition: Option<BTreeMap<String, RawAmplitude>>,
    matrix: Option<RawMatrix>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawAmplitude {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    re: Vec<Vec<f64>>,
    im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegration {
    method: String,
    t_final: RawQuantity,
    dt: Option<RawQuantity>,
    samples: i64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReport {
    measured_rate: Option<RawQuantity>,
}

// ---- validated config ---------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Stepwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OutputKind {
    #[serde(rename = "timeseries")]
    TimeSeries,
    #[serde(rename = "rates-report")]
    RatesReport,
    #[serde(rename = "consistency-report")]
    ConsistencyReport,
}

impl OutputKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutputKind::TimeSeries => "timeseries",
            OutputKind::RatesReport => "rates-report",
            OutputKind::ConsistencyReport => "consistency-report",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [OutputKind::TimeSeries, OutputKind::RatesReport, OutputKind::ConsistencyReport]
            .into_iter()
            .find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Integration {
    pub method: Method,
    pub t_final: f64,
    pub dt: Option<f64>,
    pub samples: usize,
}

impl Integration {
    pub fn times(&self) -> Vec<f64> {
        series::uniform_times(self.t_final, self.samples)
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub graph: ReactionGraph,
    pub builtin: Option<BuiltinGraph>,
    pub rates: BTreeMap<String, f64>,
    pub initial: DensityOperator,
    pub integration: Integration,
    pub outputs: Vec<OutputKind>,
    pub measured_rate: Option<f64>,
}

impl ScenarioConfig {
    /// `kS`, `kT` and optional `q` from the rate bindings.
    pub fn report_rates(&self) -> Option<RPRates> {
        let ks = *self.rates.get("kS")?;
        let kt = *self.rates.get("kT")?;
        let q = self.rates.get("q").copied().unwrap_or(0.0);
        RPRates::new(ks, kt).ok()?.with_q(q).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Dimension {
    Rate,
    Angular,
    Time,
}

impl Dimension {
    fn units(&self) -> &'static [&'static str] {
        match self {
            Dimension::Rate => &["1/s", "s^-1"],
            Dimension::Angular => &["rad/s"],
            Dimension::Time => &["s"],
        }
    }

    fn of_rate_name(name: &str) -> Self {
        if name.starts_with("omega") || name.starts_with("Omega") {
            Dimension::Angular
        } else {
            Dimension::Rate
        }
    }
}

struct Collector(Vec<Violation>);

impl Collector {
    fn schema(&mut self, path: impl Into<String>, reason: impl Into<String>) {
        self.0.push(Violation { path: path.into(), kind: ViolationKind::Schema, reason: reason.into() });
    }

    fn unit(&mut self, path: impl Into<String>, reason: impl Into<String>) {
        self.0.push(Violation { path: path.into(), kind: ViolationKind::Unit, reason: reason.into() });
    }

    /// Number with an optional unit suffix.
    fn quantity(&mut self, path: &str, q: &RawQuantity, dim: Dimension) -> Option<f64> {
        match q {
            RawQuantity::Number(v) => Some(*v),
            RawQuantity::Text(t) => {
                let t = t.trim();
                let (num, unit) = match t.find(char::is_whitespace) {
                    Some(i) => (&t[..i], t[i..].trim()),
                    None => (t, ""),
                };
                let Ok(v) = num.parse::<f64>() else {
                    self.schema(path, format!("`{t}` is not a number with an optional unit"));
                    return None;
                };
                if !unit.is_empty() && !dim.units().contains(&unit) {
                    self.unit(path, format!("unit `{unit}` not accepted; use {}", dim.units().join(" or ")));
                    return None;
                }
                Some(v)
            }
        }
    }

    /// Numbers or quantity strings become values; other strings name a rate.
    fn rate_expr(&mut self, path: &str, q: &RawQuantity, dim: Dimension) -> Option<RateExpr> {
        match q {
            RawQuantity::Text(t) if !t.trim_start().starts_with(|c: char| c.is_ascii_digit() || "+-.".contains(c)) => {
                Some(RateExpr::Param(t.trim().to_string()))
            }
            other => self.quantity(path, other, dim).map(RateExpr::Value),
        }
    }
}

/// Parse and validate a scenario file's text.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let value: toml::Value = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.message().to_string()))?;
    let raw: RawConfig = value.try_into().map_err(|e: toml::de::Error| {
        ConfigError::Invalid(vec![Violation {
            path: "<document>".into(),
            kind: ViolationKind::Schema,
            reason: e.message().to_string(),
        }])
    })?;
    let mut c = Collector(Vec::new());
    let out = validate(raw, &mut c);
    match out {
        Some(cfg) if c.0.is_empty() => Ok(cfg),
        _ => Err(ConfigError::Invalid(c.0)),
    }
}

fn validate(raw: RawConfig, c: &mut Collector) -> Option<ScenarioConfig> {
    if raw.schema_version != SCHEMA_VERSION {
        c.schema("schema_version", format!("unsupported version {}; expected {SCHEMA_VERSION}", raw.schema_version));
    }

    let mut outputs = Vec::new();
    for (i, o) in raw.outputs.clone().unwrap_or_else(|| vec!["timeseries".into()]).iter().enumerate() {
        match OutputKind::parse(o) {
            Some(k) if outputs.contains(&k) => c.schema(format!("outputs[{i}]"), format!("`{o}` listed twice")),
            Some(k) => outputs.push(k),
            None => c.schema(
                format!("outputs[{i}]"),
                format!("unknown output `{o}`; expected timeseries, rates-report or consistency-report"),
            ),
        }
    }
    if outputs.is_empty() && raw.outputs.is_some() {
        c.schema("outputs", "at least one output is required");
    }

    let integration = validate_integration(&raw.integration, c);

    let mut rates = BTreeMap::new();
    for (name, q) in &raw.rates {
        let dim = Dimension::of_rate_name(name);
        if let Some(v) = c.quantity(&format!("rates.{name}"), q, dim) {
            if !v.is_finite() {
                c.schema(format!("rates.{name}"), "must be finite");
            } else if dim == Dimension::Rate && v < 0.0 {
                c.schema(format!("rates.{name}"), "rates must be nonnegative");
            }
            rates.insert(name.clone(), v);
        }
    }

    let measured_rate = raw.report.as_ref().and_then(|r| r.measured_rate.as_ref()).and_then(|q| {
        let v = c.quantity("report.measured_rate", q, Dimension::Rate)?;
        if !(v >= 0.0) {
            c.schema("report.measured_rate", "must be nonnegative");
        }
        Some(v)
    });

    let step_dt = integration.as_ref().and_then(|i| match i.method {
        Method::Stepwise => i.dt,
        Method::Exact => None,
    });
    let (template, builtin) = validate_graph(&raw.graph, step_dt, c)?;

    let mut used: Vec<String> = template.parameters();
    for p in &used {
        if !rates.contains_key(p) && !raw.rates.contains_key(p) {
            c.schema(format!("rates.{p}"), "required by the graph but not given");
        }
    }
    let wants_report = outputs.iter().any(|o| *o != OutputKind::TimeSeries);
    if wants_report {
        for p in ["kS", "kT"] {
            if !raw.rates.contains_key(p) {
                c.schema(format!("rates.{p}"), "required by the requested reports");
            }
        }
        used.extend(["kS", "kT", "q"].map(String::from));
    }
    if outputs.contains(&OutputKind::ConsistencyReport) && measured_rate.is_none() {
        c.schema("report.measured_rate", "required by consistency-report");
    }
    for name in raw.rates.keys() {
        if !used.contains(name) {
            c.schema(format!("rates.{name}"), "not used by the graph or any report");
        }
    }

    let graph = if c.0.is_empty() {
        match template.bind(&rates) {
            Ok(g) => Some(g),
            Err(e) => {
                c.schema("graph", e.to_string());
                None
            }
        }
    } else {
        None
    };

    if let (Some(g), Some(i)) = (&graph, &integration) {
        if i.method == Method::Stepwise {
            if let Some(dt) = i.dt {
                if let Err(e) = StepGuard::default().check(g.max_rate(), dt) {
                    c.schema("integration.dt", format!("{e}; reduce dt"));
                }
            }
        }
    }

    let initial = graph.as_ref().and_then(|g| validate_initial(&raw.initial, g, c));
    let (graph, integration, initial) = (graph?, integration?, initial?);
    Some(ScenarioConfig {
        graph,
        builtin,
        rates,
        initial,
        integration,
        outputs,
        measured_rate,
    })
}

fn validate_integration(raw: &RawIntegration, c: &mut Collector) -> Option<Integration> {
    let method = match raw.method.as_str() {
        "exact" => Some(Method::Exact),
        "stepwise" => Some(Method::Stepwise),
        other => {
            c.schema("integration.method", format!("unknown method `{other}`; expected exact or stepwise"));
            None
        }
    };
    let t_final = c.quantity("integration.t_final", &raw.t_final, Dimension::Time);
    if let Some(t) = t_final {
        if !(t > 0.0 && t.is_finite()) {
            c.schema("integration.t_final", "must be positive");
        }
    }
    let dt = raw.dt.as_ref().and_then(|q| c.quantity("integration.dt", q, Dimension::Time));
    if let Some(d) = dt {
        if !(d > 0.0 && d.is_finite()) {
            c.schema("integration.dt", "must be positive");
        }
    }
    if method == Some(Method::Stepwise) && raw.dt.is_none() {
        c.schema("integration.dt", "required by the stepwise method");
    }
    if raw.samples < 2 {
        c.schema("integration.samples", "at least 2 samples are required");
    }
    Some(Integration {
        method: method?,
        t_final: t_final?,
        dt,
        samples: usize::try_from(raw.samples).ok()?,
    })
}

fn validate_graph(
    raw: &RawGraph,
    step_dt: Option<f64>,
    c: &mut Collector,
) -> Option<(GraphTemplate, Option<BuiltinGraph>)> {
    if let Some(name) = &raw.builtin {
        if raw.n_sites.is_some() || raw.nodes.is_some() || raw.edges.is_some() {
            c.schema("graph", "give either `builtin` or an explicit graph, not both");
        }
        return match name.parse::<BuiltinGraph>() {
            Ok(b) => Some((network::builtin_graph(b), Some(b))),
            Err(_) => {
                let names: Vec<&str> = BuiltinGraph::ALL.iter().map(|b| b.as_str()).collect();
                c.schema("graph.builtin", format!("unknown graph `{name}`; expected one of {}", names.join(", ")));
                None
            }
        };
    }
    let Some(n_sites) = raw.n_sites else {
        c.schema("graph", "needs `builtin` or `n_sites` with `edges`");
        return None;
    };
    let nodes: Vec<(usize, String)> = raw
        .nodes
        .iter()
        .flatten()
        .map(|n| (n.site, n.name.clone()))
        .collect();
    let mut edges = Vec::new();
    for (i, e) in raw.edges.iter().flatten().enumerate() {
        let path = format!("graph.edges[{i}]");
        if let Some(edge) = validate_edge(&path, e, step_dt, c) {
            edges.push(edge);
        }
    }
    let template = GraphTemplate { n_sites, nodes, edges };
    // structural checks with placeholder rates
    let probe: BTreeMap<String, f64> = template.parameters().into_iter().map(|p| (p, 0.0)).collect();
    if let Err(e) = template.bind(&probe) {
        c.schema("graph", e.to_string());
    }
    Some((template, None))
}

fn validate_edge(path: &str, e: &RawEdge, step_dt: Option<f64>, c: &mut Collector) -> Option<EdgeKind<RateExpr>> {
    let need = |c: &mut Collector, v: Option<usize>, field: &str| {
        if v.is_none() {
            c.schema(format!("{path}.{field}"), format!("required for {} edges", e.kind));
        }
        v
    };
    let forbid = |c: &mut Collector, present: bool, field: &str| {
        if present {
            c.schema(format!("{path}.{field}"), format!("not allowed on {} edges", e.kind));
        }
    };
    let incoherent_rate = |c: &mut Collector| -> Option<RateExpr> {
        match (&e.rate, e.probability) {
            (Some(r), None) => c.rate_expr(&format!("{path}.rate"), r, Dimension::Rate),
            (None, Some(p)) => match step_dt {
                Some(dt) => match network::rate_from_step_probability(p, dt) {
                    Ok(k) => Some(RateExpr::Value(k)),
                    Err(err) => {
                        c.schema(format!("{path}.probability"), err.to_string());
                        None
                    }
                },
                None => {
                    c.schema(format!("{path}.probability"), "per-step probabilities need the stepwise method with dt");
                    None
                }
            },
            (Some(_), Some(_)) => {
                c.schema(path, "give `rate` or `probability`, not both");
                None
            }
            (None, None) => {
                c.schema(format!("{path}.rate"), "required");
                None
            }
        }
    };
    match e.kind.as_str() {
        "damping" => {
            forbid(c, e.j.is_some() || e.k.is_some(), "j/k");
            forbid(c, e.omega_j.is_some() || e.omega_k.is_some() || e.coupling.is_some(), "omega_j/omega_k/coupling");
            let from = need(c, e.from, "from");
            let to = need(c, e.to, "to");
            let rate = incoherent_rate(c);
            Some(EdgeKind::Damping { from: from?, to: to?, rate: rate? })
        }
        "dephasing" => {
            forbid(c, e.from.is_some() || e.to.is_some(), "from/to");
            forbid(c, e.omega_j.is_some() || e.omega_k.is_some() || e.coupling.is_some(), "omega_j/omega_k/coupling");
            let j = need(c, e.j, "j");
            let k = need(c, e.k, "k");
            let rate = incoherent_rate(c);
            Some(EdgeKind::Dephasing { j: j?, k: k?, rate: rate? })
        }
        "coherent" => {
            forbid(c, e.from.is_some() || e.to.is_some(), "from/to");
            forbid(c, e.rate.is_some() || e.probability.is_some(), "rate/probability");
            let j = need(c, e.j, "j");
            let k = need(c, e.k, "k");
            let mut field = |name: &str, q: &Option<RawQuantity>| match q {
                Some(q) => c.rate_expr(&format!("{path}.{name}"), q, Dimension::Angular),
                None => {
                    c.schema(format!("{path}.{name}"), "required for coherent edges");
                    None
                }
            };
            let omega_j = field("omega_j", &e.omega_j);
            let omega_k = field("omega_k", &e.omega_k);
            let coupling = field("coupling", &e.coupling);
            Some(EdgeKind::Coherent { j: j?, k: k?, omega_j: omega_j?, omega_k: omega_k?, coupling: coupling? })
        }
        other => {
            c.schema(format!("{path}.kind"), format!("unknown kind `{other}`; expected damping, dephasing or coherent"));
            None
        }
    }
}

fn validate_initial(raw: &RawInitial, g: &ReactionGraph, c: &mut Collector) -> Option<DensityOperator> {
    let basis = g.basis();
    let given = [raw.state.is_some(), raw.mixture.is_some(), raw.superposition.is_some(), raw.matrix.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    if given != 1 {
        c.schema("initial", "give exactly one of state, mixture, superposition or matrix");
        return None;
    }
    let n = basis.dim();
    let resolve = |c: &mut Collector, path: String, label: &str| match basis.index_of(&BasisLabel::parse(label)) {
        Ok(i) => Some(i),
        Err(_) => {
            c.schema(path, format!("unknown basis label `{label}`"));
            None
        }
    };
    let matrix = if let Some(s) = &raw.state {
        let i = resolve(c, "initial.state".into(), s)?;
        linalg::projector(n, i)
    } else if let Some(mix) = &raw.mixture {
        let mut m = CMatrix::zeros(n, n);
        let mut total = 0.0;
        for (label, &w) in mix {
            let path = format!("initial.mixture.{label}");
            if !(w >= 0.0) {
                c.schema(path.clone(), "weights must be nonnegative");
            }
            total += w;
            if let Some(i) = resolve(c, path, label) {
                m[(i, i)] += linalg::re(w);
            }
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            c.schema("initial.mixture", format!("weights sum to {total}, not 1"));
            return None;
        }
        m
    } else if let Some(sup) = &raw.superposition {
        let mut v = vec![C64::new(0.0, 0.0); n];
        for (label, a) in sup {
            let amp = match a {
                RawAmplitude::Real(x) => C64::new(*x, 0.0),
                RawAmplitude::Complex([x, y]) => C64::new(*x, *y),
            };
            if let Some(i) = resolve(c, format!("initial.superposition.{label}"), label) {
                v[i] += amp;
            }
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > WEIGHT_TOL {
            c.schema("initial.superposition", format!("squared amplitudes sum to {norm}, not 1"));
            return None;
        }
        CMatrix::from_fn(n, n, |a, b| v[a] * v[b].conj())
    } else {
        let raw_m = raw.matrix.as_ref().expect("counted above");
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !shape_ok(&raw_m.re) || raw_m.im.as_ref().is_some_and(|im| !shape_ok(im)) {
            c.schema("initial.matrix", format!("must be {n}×{n}"));
            return None;
        }
        CMatrix::from_fn(n, n, |a, b| {
            C64::new(raw_m.re[a][b], raw_m.im.as_ref().map_or(0.0, |im| im[a][b]))
        })
    };
    match DensityOperator::new(matrix, basis, TraceClass::Normalized) {
        Ok(rho) => Some(rho),
        Err(e) => {
            c.schema("initial", e.to_string());
            None
        }
    }
}

// ---- running ------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub series: TimeSeries,
    pub rates_report: Option<ConsistencyReport>,
    pub consistency_report: Option<ConsistencyReport>,
}

/// Propagate and build the requested reports.
pub fn run(cfg: &ScenarioConfig) -> Result<ScenarioOutput, Error> {
    let times = cfg.integration.times();
    let series = match cfg.integration.method {
        Method::Exact => generators::propagate_exact_series(&cfg.graph.total_generator(), &cfg.initial, &times)?,
        Method::Stepwise => {
            let dt = cfg.integration.dt.ok_or_else(|| Error::BadRates("stepwise run without dt".into()))?;
            generators::propagate_stepwise(&cfg.graph, &cfg.initial, &times, dt, StepGuard::default())?
        }
    };
    let report = |measured| -> Result<ConsistencyReport, Error> {
        let r = cfg
            .report_rates()
            .ok_or_else(|| Error::BadRates("reports need kS and kT".into()))?;
        compare_operators(r.ks, r.kt, r.q_extra, measured)
    };
    let rates_report = if cfg.outputs.contains(&OutputKind::RatesReport) {
        Some(report(None)?)
    } else {
        None
    };
    let consistency_report = if cfg.outputs.contains(&OutputKind::ConsistencyReport) {
        Some(report(cfg.measured_rate)?)
    } else {
        None
    };
    Ok(ScenarioOutput { series, rates_report, consistency_report })
}

/// Catalogue table: trace behaviour, singlet–triplet dephasing rate and,
/// given a measured rate, a consistency verdict per operator.
pub fn compare_operators(ks: f64, kt: f64, q_extra: f64, measured: Option<f64>) -> Result<ConsistencyReport, Error> {
    let r = RPRates::new(ks, kt)?.with_q(q_extra)?;
    radical_pair::consistency_report(&r, measured)
}

fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text: `t`, `re_rho_i_j`, `im_rho_i_j` over the upper triangle and
/// diagonal (1-based), then `trace`, `min_eig`, `herm_defect`.
pub fn timeseries_csv(ts: &TimeSeries) -> String {
    let mut out = String::new();
    let n = ts.snapshots().first().map_or(0, |s| s.dim());
    let mut header = vec!["t".to_string()];
    for i in 0..n {
        for j in i..n {
            header.push(format!("re_rho_{}_{}", i + 1, j + 1));
            header.push(format!("im_rho_{}_{}", i + 1, j + 1));
        }
    }
    header.extend(["trace", "min_eig", "herm_defect"].map(String::from));
    out.push_str(&header.join(","));
    out.push('\n');
    for ((t, s), d) in ts.times().iter().zip(ts.snapshots()).zip(ts.diagnostics()) {
        let m = s.matrix();
        let mut row = vec![fmt_num(*t)];
        for i in 0..n {
            for j in i..n {
                row.push(fmt_num(m[(i, j)].re));
                row.push(fmt_num(m[(i, j)].im));
            }
        }
        row.push(fmt_num(d.trace));
        row.push(fmt_num(d.min_eigenvalue));
        row.push(fmt_num(d.hermiticity_defect));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Plain-text rendering of a report table.
pub fn report_text(r: &ConsistencyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "kS = {} 1/s, kT = {} 1/s, q = {} 1/s", r.ks, r.kt, r.q_extra);
    if let Some(m) = r.measured_rate {
        let _ = writeln!(out, "measured S-T dephasing rate = {m} 1/s");
    }
    let _ = writeln!(out, "{:<20} {:<12} {:>24}  verdict", "operator", "trace", "S-T rate (1/s)");
    for row in &r.rows {
        let verdict = match row.consistent {
            Some(true) => "consistent",
            Some(false) => "INCONSISTENT",
            None => "-",
        };
        let _ = writeln!(
            out,
            "{:<20} {:<12} {:>24}  {verdict}",
            row.operator, row.trace_behavior, format!("{}", row.predicted_rate)
        );
    }
    out
}

/// Write `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), ScenarioError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| ScenarioError::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| ScenarioError::io(path, e))?;
    tmp.flush().map_err(|e| ScenarioError::io(path, e))?;
    tmp.persist(path).map_err(|e| ScenarioError::io(path, e.error))?;
    Ok(())
}

/// Write every output as `<dir>/<stem>.<kind>.<ext>`; returns the paths.
pub fn write_outputs(
    cfg: &ScenarioConfig,
    out: &ScenarioOutput,
    dir: &Path,
    stem: &str,
) -> Result<Vec<PathBuf>, ScenarioError> {
    std::fs::create_dir_all(dir).map_err(|e| ScenarioError::io(dir, e))?;
    let mut written = Vec::new();
    if cfg.outputs.contains(&OutputKind::TimeSeries) {
        let p = dir.join(format!("{stem}.timeseries.csv"));
        write_atomic(&p, timeseries_csv(&out.series).as_bytes())?;
        written.push(p);
    }
    for (kind, rep) in [
        (OutputKind::RatesReport, &out.rates_report),
        (OutputKind::ConsistencyReport, &out.consistency_report),
    ] {
        if let Some(r) = rep {
            let txt = dir.join(format!("{stem}.{}.txt", kind.as_str()));
            write_atomic(&txt, report_text(r).as_bytes())?;
            let json = dir.join(format!("{stem}.{}.json", kind.as_str()));
            let body = serde_json::to_string_pretty(r).expect("report serializes");
            write_atomic(&json, format!("{body}\n").as_bytes())?;
            written.push(txt);
            written.push(json);
        }
    }
    Ok(written)
}

/// Read, validate, run and write one scenario file.
pub fn simulate_file(path: &Path, output_dir: &Path) -> Result<Vec<PathBuf>, ScenarioError> {
    let cfg = load_config(path)?;
    let out = run(&cfg)?;
    write_outputs(&cfg, &out, output_dir, &file_stem(path))
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::io(path, e))?;
    parse_config(&text).map_err(|source| ScenarioError::Config { path: path.display().to_string(), source })
}

pub fn file_stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "scenario".into(), |s| s.to_string_lossy().into_owned())
}

/// Edges of a bound graph, for display.
pub fn describe_graph(g: &ReactionGraph) -> Vec<String> {
    g.edges().iter().map(Edge::to_string).collect()
}

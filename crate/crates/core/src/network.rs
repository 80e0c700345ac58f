// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

//! Reaction graphs: nodes are walker sites, edges are damping, dephasing or
//! coherent couplings. A graph yields a total generator and a per-step map.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::densop::{Basis, BasisLabel};
use crate::error::{Error, Result};
use crate::generators::{self, Generator, StepGuard, StepMaps};
use crate::maps::{self, KrausMap};

/// A rate that is either a number or the name of a parameter bound later.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RateExpr {
    Value(f64),
    Param(String),
}

impl RateExpr {
    pub fn param(name: &str) -> Self {
        RateExpr::Param(name.to_string())
    }

    pub fn resolve(&self, bindings: &BTreeMap<String, f64>) -> Result<f64> {
        match self {
            RateExpr::Value(v) => Ok(*v),
            RateExpr::Param(p) => bindings
                .get(p)
                .copied()
                .ok_or_else(|| Error::BadRates(format!("parameter `{p}` is not bound"))),
        }
    }
}

impl From<f64> for RateExpr {
    fn from(v: f64) -> Self {
        RateExpr::Value(v)
    }
}

/// Edge kinds, generic over how rates are written.
///
/// `Damping` moves population from site `from` to site `to`, i.e. it applies
/// `L_jk` with `j = to`, `k = from`. `Dephasing { j, k }` applies `S_jk`,
/// which damps the coherences of site `k`. `Coherent` is undirected.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeKind<R = f64> {
    Damping { from: usize, to: usize, rate: R },
    Dephasing { j: usize, k: usize, rate: R },
    Coherent { j: usize, k: usize, omega_j: R, omega_k: R, coupling: R },
}

pub type Edge = EdgeKind<f64>;

impl<R> EdgeKind<R> {
    fn order(&self) -> u8 {
        match self {
            EdgeKind::Damping { .. } => 0,
            EdgeKind::Dephasing { .. } => 1,
            EdgeKind::Coherent { .. } => 2,
        }
    }

    fn endpoints(&self) -> (usize, usize) {
        match self {
            EdgeKind::Damping { from, to, .. } => (*from, *to),
            EdgeKind::Dephasing { j, k, .. } | EdgeKind::Coherent { j, k, .. } => (*j, *k),
        }
    }

    /// Identity used for duplicate detection; coherent edges are unordered.
    fn key(&self) -> (u8, usize, usize) {
        let (a, b) = self.endpoints();
        match self {
            EdgeKind::Coherent { .. } => (2, a.min(b), a.max(b)),
            _ => (self.order(), a, b),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            EdgeKind::Damping { .. } => "damping",
            EdgeKind::Dephasing { .. } => "dephasing",
            EdgeKind::Coherent { .. } => "coherent",
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeKind::Damping { from, to, rate } => write!(f, "damping {from}→{to} at {rate} 1/s"),
            EdgeKind::Dephasing { j, k, rate } => write!(f, "dephasing ({j},{k}) at {rate} 1/s"),
            EdgeKind::Coherent { j, k, omega_j, omega_k, coupling } => {
                write!(f, "coherent {j}↔{k} (ω_{j}={omega_j}, ω_{k}={omega_k}, Ω={coupling} rad/s)")
            }
        }
    }
}

impl EdgeKind<RateExpr> {
    pub fn bind(&self, b: &BTreeMap<String, f64>) -> Result<Edge> {
        Ok(match self {
            EdgeKind::Damping { from, to, rate } => EdgeKind::Damping {
                from: *from,
                to: *to,
                rate: rate.resolve(b)?,
            },
            EdgeKind::Dephasing { j, k, rate } => EdgeKind::Dephasing {
                j: *j,
                k: *k,
                rate: rate.resolve(b)?,
            },
            EdgeKind::Coherent { j, k, omega_j, omega_k, coupling } => EdgeKind::Coherent {
                j: *j,
                k: *k,
                omega_j: omega_j.resolve(b)?,
                omega_k: omega_k.resolve(b)?,
                coupling: coupling.resolve(b)?,
            },
        })
    }
}

/// A graph whose rates may still refer to named parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphTemplate {
    pub n_sites: usize,
    pub nodes: Vec<(usize, String)>,
    pub edges: Vec<EdgeKind<RateExpr>>,
}

impl GraphTemplate {
    /// Names of every parameter referenced by the edges, sorted.
    pub fn parameters(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut add = |r: &RateExpr| {
            if let RateExpr::Param(p) = r {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
        };
        for e in &self.edges {
            match e {
                EdgeKind::Damping { rate, .. } | EdgeKind::Dephasing { rate, .. } => add(rate),
                EdgeKind::Coherent { omega_j, omega_k, coupling, .. } => {
                    add(omega_j);
                    add(omega_k);
                    add(coupling);
                }
            }
        }
        out.sort();
        out
    }

    pub fn bind(&self, bindings: &BTreeMap<String, f64>) -> Result<ReactionGraph> {
        let edges = self.edges.iter().map(|e| e.bind(bindings)).collect::<Result<Vec<_>>>()?;
        ReactionGraph::new(self.n_sites, self.nodes.clone(), edges)
    }
}

/// A validated graph with numeric rates.
#[derive(Debug, Clone, PartialEq)]
pub struct ReactionGraph {
    n_sites: usize,
    nodes: Vec<(usize, String)>,
    edges: Vec<Edge>,
}

impl ReactionGraph {
    /// Validates endpoints, duplicates, rate signs and per-site energies.
    pub fn new(n_sites: usize, nodes: Vec<(usize, String)>, edges: Vec<Edge>) -> Result<Self> {
        let problems = validate(n_sites, &nodes, &edges);
        if !problems.is_empty() {
            return Err(Error::InvalidGraph(problems.join("; ")));
        }
        Ok(Self { n_sites, nodes, edges })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn nodes(&self) -> &[(usize, String)] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Site basis carrying the node names.
    pub fn basis(&self) -> Basis {
        let names: Vec<(usize, &str)> = self.nodes.iter().map(|(s, n)| (*s, n.as_str())).collect();
        Basis::named_sites(self.n_sites, &names).expect("node names validated")
    }

    pub fn site_of(&self, label: &str) -> Result<usize> {
        Ok(self.basis().index_of(&BasisLabel::parse(label))? + 1)
    }

    fn edge_generator(&self, e: &Edge) -> Result<Generator> {
        let n = self.n_sites;
        match *e {
            EdgeKind::Damping { from, to, rate } => Generator::amplitude_damping(to, from, rate, n),
            EdgeKind::Dephasing { j, k, rate } => Generator::dephasing(j, k, rate, n),
            EdgeKind::Coherent { j, k, omega_j, omega_k, coupling } => {
                Generator::unitary(j, k, omega_j, omega_k, coupling, n)
            }
        }
    }

    /// Sum of one generator per edge, ordered damping, dephasing, coherent and
    /// then by endpoints, so the result does not depend on declaration order.
    pub fn total_generator(&self) -> Generator {
        if self.edges.is_empty() {
            log::warn!("graph has no edges; generator is zero");
        }
        let mut edges: Vec<&Edge> = self.edges.iter().collect();
        edges.sort_by_key(|e| (e.order(), e.endpoints()));
        let parts = edges
            .into_iter()
            .map(|e| self.edge_generator(e).expect("edges validated"))
            .collect();
        generators::generator_of_composition(self.n_sites, parts).expect("dimensions agree")
    }

    fn edge_map(&self, e: &Edge, dt: f64) -> Result<KrausMap> {
        let n = self.n_sites;
        match *e {
            EdgeKind::Damping { from, to, rate } => maps::amplitude_damping_rate(to, from, rate, dt, n),
            EdgeKind::Dephasing { j, k, rate } => maps::dephasing_rate(j, k, rate, dt, n),
            EdgeKind::Coherent { j, k, omega_j, omega_k, coupling } => {
                maps::unitary_map(j, k, omega_j, omega_k, coupling, dt, n)
            }
        }
    }

    /// First-order per-edge maps in declared order (`edges[0]` acts first).
    pub fn edge_maps(&self, dt: f64) -> Result<Vec<KrausMap>> {
        self.edges.iter().map(|e| self.edge_map(e, dt)).collect()
    }

    /// One-step map with the default step guard.
    pub fn step_map(&self, dt: f64) -> Result<KrausMap> {
        self.step_map_guarded(dt, StepGuard::default())
    }

    pub fn step_map_guarded(&self, dt: f64, guard: StepGuard) -> Result<KrausMap> {
        guard.check(self.max_rate(), dt)?;
        maps::compose_sequence(self.n_sites, &self.edge_maps(dt)?)
    }

    /// Largest damping or dephasing rate.
    pub fn max_rate(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| match e {
                EdgeKind::Damping { rate, .. } | EdgeKind::Dephasing { rate, .. } => *rate,
                EdgeKind::Coherent { .. } => 0.0,
            })
            .fold(0.0, f64::max)
    }

    /// Same graph with edges in reverse order.
    pub fn reversed(&self) -> Self {
        let mut g = self.clone();
        g.edges.reverse();
        g
    }
}

impl StepMaps for ReactionGraph {
    fn dim(&self) -> usize {
        self.n_sites
    }

    fn step_maps(&self, dt: f64) -> Result<Vec<KrausMap>> {
        self.edge_maps(dt)
    }

    fn max_incoherent_rate(&self) -> f64 {
        self.max_rate()
    }
}

/// Rate `k = p / dt` for a per-step probability `p`.
pub fn rate_from_step_probability(p: f64, dt: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadProbability(p));
    }
    if !(dt > 0.0) {
        return Err(Error::BadRates(format!("time step {dt} must be positive")));
    }
    let k = p / dt;
    log::info!("step probability {p} at dt={dt} s read as rate {k} 1/s");
    Ok(k)
}

fn validate(n_sites: usize, nodes: &[(usize, String)], edges: &[Edge]) -> Vec<String> {
    let mut out = Vec::new();
    if n_sites == 0 {
        out.push("graph needs at least one site".to_string());
    }
    for (i, (site, name)) in nodes.iter().enumerate() {
        if *site == 0 || *site > n_sites {
            out.push(format!("node {i}: site {site} outside 1..={n_sites}"));
        }
        if name.is_empty() || name.parse::<usize>().is_ok() {
            out.push(format!("node {i}: name `{name}` must be non-empty and not a number"));
        }
        if nodes[..i].iter().any(|(s, n)| s == site || n == name) {
            out.push(format!("node {i}: duplicate site or name"));
        }
    }
    let mut energies: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        let (a, b) = e.endpoints();
        if a == 0 || b == 0 || a > n_sites || b > n_sites {
            out.push(format!("edge {i} ({}): endpoint outside 1..={n_sites}", e.name()));
        }
        if a == b {
            out.push(format!("edge {i} ({}): endpoints coincide", e.name()));
        }
        if edges[..i].iter().any(|p| p.key() == e.key()) {
            out.push(format!("edge {i} ({}): duplicate of an earlier edge", e.name()));
        }
        match *e {
            EdgeKind::Damping { rate, .. } | EdgeKind::Dephasing { rate, .. } => {
                if !(rate.is_finite() && rate >= 0.0) {
                    out.push(format!("edge {i} ({}): rate {rate} must be finite and nonnegative", e.name()));
                }
            }
            EdgeKind::Coherent { j, k, omega_j, omega_k, coupling } => {
                if ![omega_j, omega_k, coupling].iter().all(|x| x.is_finite()) {
                    out.push(format!("edge {i} (coherent): parameters must be finite"));
                }
                for (site, w) in [(j, omega_j), (k, omega_k)] {
                    match energies.get(&site) {
                        Some(&(prev, at)) if prev != w => out.push(format!(
                            "edge {i} (coherent): ω_{site}={w} disagrees with {prev} from edge {at}; \
                             use one site energy per site"
                        )),
                        Some(_) => {}
                        None => {
                            energies.insert(site, (w, i));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Prebuilt radical-pair graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BuiltinGraph {
    /// `S=ψ1 → P_S=ψ2` at `kS`, `T=ψ3 → P_T=ψ4` at `kT`.
    StandardRP,
    /// `S=ψ1 → P=ψ2` at `kS`, `T=ψ3 → P=ψ2` at `kT`.
    LumpedProducts,
    /// StandardRP plus coherent `1↔3` and dephasing `(3,1)` at `q`.
    ExperimentRP,
    /// StandardRP plus dephasing `(3,1)` and `(1,3)` at the same `q`.
    SymmetricDephasingRP,
}

impl BuiltinGraph {
    pub const ALL: [BuiltinGraph; 4] = [
        BuiltinGraph::StandardRP,
        BuiltinGraph::LumpedProducts,
        BuiltinGraph::ExperimentRP,
        BuiltinGraph::SymmetricDephasingRP,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BuiltinGraph::StandardRP => "StandardRP",
            BuiltinGraph::LumpedProducts => "LumpedProducts",
            BuiltinGraph::ExperimentRP => "ExperimentRP",
            BuiltinGraph::SymmetricDephasingRP => "SymmetricDephasingRP",
        }
    }
}

impl FromStr for BuiltinGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

fn rp_nodes() -> Vec<(usize, String)> {
    [(1, "S"), (2, "P_S"), (3, "T"), (4, "P_T")]
        .iter()
        .map(|(s, n)| (*s, n.to_string()))
        .collect()
}

fn standard_edges() -> Vec<EdgeKind<RateExpr>> {
    vec![
        EdgeKind::Damping { from: 1, to: 2, rate: RateExpr::param("kS") },
        EdgeKind::Damping { from: 3, to: 4, rate: RateExpr::param("kT") },
    ]
}

/// Template for a named graph; parameters are `kS`, `kT`, `q`, `omega_S`,
/// `omega_T` and `Omega` as applicable.
pub fn builtin_graph(which: BuiltinGraph) -> GraphTemplate {
    match which {
        BuiltinGraph::StandardRP => GraphTemplate {
            n_sites: 4,
            nodes: rp_nodes(),
            edges: standard_edges(),
        },
        BuiltinGraph::LumpedProducts => GraphTemplate {
            n_sites: 3,
            nodes: vec![(1, "S".into()), (2, "P".into()), (3, "T".into())],
            edges: vec![
                EdgeKind::Damping { from: 1, to: 2, rate: RateExpr::param("kS") },
                EdgeKind::Damping { from: 3, to: 2, rate: RateExpr::param("kT") },
            ],
        },
        BuiltinGraph::ExperimentRP => {
            let mut edges = standard_edges();
            edges.push(EdgeKind::Coherent {
                j: 3,
                k: 1,
                omega_j: RateExpr::param("omega_T"),
                omega_k: RateExpr::param("omega_S"),
                coupling: RateExpr::param("Omega"),
            });
            edges.push(EdgeKind::Dephasing { j: 3, k: 1, rate: RateExpr::param("q") });
            GraphTemplate { n_sites: 4, nodes: rp_nodes(), edges }
        }
        BuiltinGraph::SymmetricDephasingRP => {
            let mut edges = standard_edges();
            edges.push(EdgeKind::Dephasing { j: 3, k: 1, rate: RateExpr::param("q") });
            edges.push(EdgeKind::Dephasing { j: 1, k: 3, rate: RateExpr::param("q") });
            GraphTemplate { n_sites: 4, nodes: rp_nodes(), edges }
        }
    }
}

/// Look up a builtin by name.
pub fn builtin_graph_named(name: &str) -> Result<GraphTemplate> {
    Ok(builtin_graph(name.parse()?))
}

/// Bindings from `(name, value)` pairs.
pub fn bindings(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

//! Radical-pair reaction operators: the literature operators on the minimal
//! `{S, T}` basis, the quantum-walk operator on `{S, P_S, T, P_T}`, its
//! reductions, dephasing variants, and singlet–triplet dephasing rates.
//!
//! Site conventions: `S = ψ1`, `P_S = ψ2`, `T = ψ3`, `P_T = ψ4`, so that
//! `kS ≡ k21` and `kT ≡ k43`. The reduced null-state basis is
//! `{N = |0,0⟩, T = |0,1⟩, S = |1,0⟩}` over `(n1, n3)`.

use serde::Serialize;

use crate::densop::{Basis, DensityOperator, TraceClass};
use crate::error::{Error, Result};
use crate::generators::{self, Generator, Term, TraceBehavior};
use crate::linalg::{self, CMatrix};
use crate::series;

/// Index of `S` and `T` in [`Basis::minimal`].
pub const MIN_S: usize = 0;
pub const MIN_T: usize = 1;
/// Indices in [`Basis::reduced_null`].
pub const NULL_N: usize = 0;
pub const NULL_T: usize = 1;
pub const NULL_S: usize = 2;
/// Relative tolerance for the proportionality check in [`st_dephasing_rate`].
pub const PROPORTIONALITY_TOL: f64 = 1e-10;

/// Effective two-level coupling between `S` and `T` (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherentParams {
    pub omega_s: f64,
    pub omega_t: f64,
    pub coupling: f64,
}

/// Recombination rates in 1/s, optional extra dephasing and coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RPRates {
    pub ks: f64,
    pub kt: f64,
    pub q_extra: f64,
    pub coherent: Option<CoherentParams>,
}

impl RPRates {
    pub fn new(ks: f64, kt: f64) -> Result<Self> {
        let r = Self {
            ks,
            kt,
            q_extra: 0.0,
            coherent: None,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn with_q(mut self, q: f64) -> Result<Self> {
        self.q_extra = q;
        self.validate()?;
        Ok(self)
    }

    pub fn with_coherent(mut self, omega_s: f64, omega_t: f64, coupling: f64) -> Result<Self> {
        self.coherent = Some(CoherentParams { omega_s, omega_t, coupling });
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("kS", self.ks), ("kT", self.kt), ("q", self.q_extra)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::BadRates(format!("{name}={v} must be finite and nonnegative")));
            }
        }
        if let Some(c) = self.coherent {
            if ![c.omega_s, c.omega_t, c.coupling].iter().all(|x| x.is_finite()) {
                return Err(Error::BadRates("coherent parameters must be finite".into()));
            }
        }
        Ok(())
    }
}

fn minimal_projectors() -> (CMatrix, CMatrix, CMatrix) {
    (linalg::projector(2, MIN_S), linalg::projector(2, MIN_T), linalg::identity(2))
}

fn haberkorn_terms(r: &RPRates) -> Vec<Term> {
    let (qs, qt, id) = minimal_projectors();
    vec![
        Term::new(-0.5 * r.ks, qs.clone(), id.clone()),
        Term::new(-0.5 * r.ks, id.clone(), qs),
        Term::new(-0.5 * r.kt, qt.clone(), id.clone()),
        Term::new(-0.5 * r.kt, id, qt),
    ]
}

/// `L_H ρ = −½kS{Q_S, ρ} − ½kT{Q_T, ρ}` on `{S, T}`.
pub fn haberkorn(r: &RPRates) -> Generator {
    Generator::terms(2, haberkorn_terms(r)).expect("2×2 terms")
}

/// `L_K ρ = L_H ρ + kS Q_S ρ Q_S + kT Q_T ρ Q_T` on `{S, T}`.
pub fn kominis(r: &RPRates) -> Generator {
    let (qs, qt, _) = minimal_projectors();
    let mut terms = haberkorn_terms(r);
    terms.push(Term::new(r.ks, qs.clone(), qs));
    terms.push(Term::new(r.kt, qt.clone(), qt));
    Generator::terms(2, terms).expect("2×2 terms")
}

/// `L_JH ρ = −(kS + kT) ρ + kS Q_T ρ Q_T + kT Q_S ρ Q_S` on `{S, T}`.
pub fn jones_hore(r: &RPRates) -> Generator {
    let (qs, qt, id) = minimal_projectors();
    Generator::terms(
        2,
        vec![
            Term::new(-(r.ks + r.kt), id.clone(), id),
            Term::new(r.ks, qt.clone(), qt),
            Term::new(r.kt, qs.clone(), qs),
        ],
    )
    .expect("2×2 terms")
}

/// Radical-pair population `N`, decoupled from `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KominisPopulation(pub f64);

/// `N(t + dt) = N(t) [1 − kS ρ_SS dt − kT ρ_TT dt]` for `ρ` on `{S, T}`.
pub fn kominis_population_step(
    n: KominisPopulation,
    rho: &DensityOperator,
    r: &RPRates,
    dt: f64,
) -> Result<KominisPopulation> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: rho.dim() });
    }
    if !(dt >= 0.0) {
        return Err(Error::BadRates(format!("time step {dt} must be nonnegative")));
    }
    let rate_dt = r.ks.max(r.kt) * dt;
    if rate_dt > 1.0 {
        return Err(Error::StepTooLarge { rate_dt, limit: 1.0 });
    }
    let m = rho.matrix();
    let p_s = r.ks * m[(MIN_S, MIN_S)].re * dt;
    let p_t = r.kt * m[(MIN_T, MIN_T)].re * dt;
    Ok(KominisPopulation((n.0 * (1.0 - p_s - p_t)).max(0.0)))
}

/// `(t, N(t), ρ(t))` on a uniform grid of `steps` steps: `ρ` follows `L_K`
/// exactly and `N` is advanced by [`kominis_population_step`].
pub fn kominis_population_trajectory(
    r: &RPRates,
    rho0: &DensityOperator,
    dt: f64,
    steps: usize,
) -> Result<Vec<(f64, KominisPopulation, DensityOperator)>> {
    let times = series::uniform_times(dt * steps as f64, steps + 1);
    let ts = generators::propagate_exact_series(&kominis(r), rho0, &times)?;
    let mut out = Vec::with_capacity(ts.len());
    let mut n = KominisPopulation(1.0);
    for (i, (&t, rho)) in ts.times().iter().zip(ts.snapshots()).enumerate() {
        if i > 0 {
            n = kominis_population_step(n, &ts.snapshots()[i - 1], r, dt)?;
        }
        out.push((t, n, rho.clone()));
    }
    Ok(out)
}

/// `L_QW = L_21(kS) + L_43(kT)` on `{S, P_S, T, P_T}`.
pub fn qw_full(r: &RPRates) -> Generator {
    generators::generator_of_composition(
        4,
        vec![
            Generator::amplitude_damping(2, 1, r.ks, 4).expect("valid"),
            Generator::amplitude_damping(4, 3, r.kt, 4).expect("valid"),
        ],
    )
    .expect("dims agree")
}

/// The `{S, T}` block of [`qw_full`]; trace-decreasing.
pub fn qw_reduced_minimal(r: &RPRates) -> Generator {
    Generator::restricted(qw_full(r), &[1, 3]).expect("valid sites")
}

/// Closed-form generator on `{N, T, S}`:
/// `[kS ρ_SS + kT ρ_TT] |N⟩⟨N| − kT ρ_TT |T⟩⟨T| − kS ρ_SS |S⟩⟨S|
/// − ½(kS + kT)(ρ_ST |S⟩⟨T| + ρ_TS |T⟩⟨S|)`.
pub fn qw_reduced_null(r: &RPRates) -> Generator {
    let qn_s = linalg::ket_bra(3, NULL_N, NULL_S);
    let qn_t = linalg::ket_bra(3, NULL_N, NULL_T);
    let qs = linalg::projector(3, NULL_S);
    let qt = linalg::projector(3, NULL_T);
    let cross = -0.5 * (r.ks + r.kt);
    Generator::terms(
        3,
        vec![
            Term::new(r.ks, qn_s.clone(), qn_s.adjoint()),
            Term::new(r.kt, qn_t.clone(), qn_t.adjoint()),
            Term::new(-r.ks, qs.clone(), qs.clone()),
            Term::new(-r.kt, qt.clone(), qt.clone()),
            Term::new(cross, qs.clone(), qt.clone()),
            Term::new(cross, qt, qs),
        ],
    )
    .expect("3×3 terms")
}

/// Reduced basis for keeping `kept` sites (1-based) of an `n_sites` walk:
/// the empty occupation followed by one-walker occupations, ordered
/// lexicographically in the bits `(n_kept[0], n_kept[1], …)`.
pub fn reduced_walker_basis(n_sites: usize, kept: &[usize]) -> Result<Basis> {
    use crate::densop::{BasisLabel, Occupation};
    let mut entries = vec![(BasisLabel::Occupation(Occupation::new(kept.to_vec(), None)?), None)];
    for &s in kept.iter().rev() {
        entries.push((BasisLabel::Occupation(Occupation::new(kept.to_vec(), Some(s))?), None));
    }
    Basis::new(n_sites, entries)
}

/// Partial trace of a single-walker operator over every site not in `kept`.
///
/// A walker at site `m` maps to the occupation ket with `n_m = 1`. Entries
/// between kept sites carry over; each traced site contributes its diagonal
/// entry to the empty occupation; coherences between a kept and a traced
/// site, or between two traced sites, vanish.
pub fn partial_trace_walker(m: &CMatrix, kept: &[usize]) -> Result<CMatrix> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::NotSquare { rows: n, cols: m.ncols() });
    }
    for (i, &s) in kept.iter().enumerate() {
        if s == 0 || s > n || kept[..i].contains(&s) {
            return Err(Error::BadIndices { j: s, k: s, dim: n });
        }
    }
    let k = kept.len();
    let slot = |site: usize| kept.iter().position(|&s| s == site).map(|p| k - p);
    let mut out = CMatrix::zeros(k + 1, k + 1);
    for a in 0..n {
        match slot(a + 1) {
            Some(ra) => {
                for b in 0..n {
                    if let Some(rb) = slot(b + 1) {
                        out[(ra, rb)] += m[(a, b)];
                    }
                }
            }
            None => out[(0, 0)] += m[(a, a)],
        }
    }
    Ok(out)
}

/// Trace over the product sites `ψ2, ψ4`: 4×4 over `{ψ1..ψ4}` to 3×3 over
/// `{N, T, S}`.
pub fn partial_trace_products(m: &CMatrix) -> Result<CMatrix> {
    if m.nrows() != 4 || m.ncols() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: m.nrows() });
    }
    partial_trace_walker(m, &[1, 3])
}

/// [`partial_trace_products`] applied to a state.
pub fn reduce_state(rho: &DensityOperator) -> Result<DensityOperator> {
    let m = partial_trace_products(rho.matrix())?;
    DensityOperator::new(m, Basis::reduced_null(), rho.class())
}

/// Embed a reduced state into `{S, P_S, T, P_T}` with the null population
/// assigned to the products in the ratio `w_ps : (1 − w_ps)` and no
/// radical–product coherences.
pub fn embed_reduced(rho_r: &DensityOperator, w_ps: f64) -> Result<DensityOperator> {
    if rho_r.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: rho_r.dim() });
    }
    if !(0.0..=1.0).contains(&w_ps) {
        return Err(Error::BadProbability(w_ps));
    }
    let r = rho_r.matrix();
    let mut m = CMatrix::zeros(4, 4);
    let map = [(NULL_S, 0), (NULL_T, 2)];
    for &(ra, a) in &map {
        for &(rb, b) in &map {
            m[(a, b)] = r[(ra, rb)];
        }
    }
    m[(1, 1)] = r[(NULL_N, NULL_N)] * w_ps;
    m[(3, 3)] = r[(NULL_N, NULL_N)] * (1.0 - w_ps);
    DensityOperator::new(m, Basis::radical_pair(), rho_r.class())
}

/// `X_31(q) = S_13(q) + S_31(q)` on `{S, P_S, T, P_T}`.
pub fn symmetric_dephasing(q: f64) -> Result<Generator> {
    generators::generator_of_composition(
        4,
        vec![Generator::dephasing(1, 3, q, 4)?, Generator::dephasing(3, 1, q, 4)?],
    )
}

/// Reduced symmetric dephasing on `{N, T, S}`: `−q (Q_S ρ Q_T + Q_T ρ Q_S)`.
pub fn reduced_symmetric_dephasing(q: f64) -> Result<Generator> {
    if !(q.is_finite() && q >= 0.0) {
        return Err(Error::BadRates(format!("q={q} must be finite and nonnegative")));
    }
    let qs = linalg::projector(3, NULL_S);
    let qt = linalg::projector(3, NULL_T);
    Generator::terms(3, vec![Term::new(-q, qs.clone(), qt.clone()), Term::new(-q, qt, qs)])
}

/// `S_31(kS) + S_13(kT)` restricted to `{S, T}`; this only removes
/// coherence and equals [`kominis`].
pub fn kominis_via_dephasing(r: &RPRates) -> Generator {
    let sum = generators::generator_of_composition(
        4,
        vec![
            Generator::dephasing(3, 1, r.ks, 4).expect("valid"),
            Generator::dephasing(1, 3, r.kt, 4).expect("valid"),
        ],
    )
    .expect("dims agree");
    Generator::restricted(sum, &[1, 3]).expect("valid sites")
}

/// Haberkorn loss plus the Kominis dephasing term, `(L_H + L_K) ρ`.
pub fn loss_plus_dephasing(r: &RPRates) -> Generator {
    generators::generator_of_composition(2, vec![haberkorn(r), kominis_via_dephasing(r)]).expect("dims agree")
}

/// Which index carries the extra dephasing in [`experiment_model_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DephasingDirection {
    /// `S_31`, damping the coherences of `S = ψ1`.
    ThreeOne,
    /// `S_13`, damping the coherences of `T = ψ3`.
    OneThree,
}

/// `−i[H_31, ρ] + L_21(kS) + L_43(kT) + S_31(q_extra)`.
pub fn experiment_model(r: &RPRates) -> Generator {
    experiment_model_with(r, DephasingDirection::ThreeOne)
}

pub fn experiment_model_with(r: &RPRates, direction: DephasingDirection) -> Generator {
    let mut parts = Vec::with_capacity(4);
    if let Some(c) = r.coherent {
        parts.push(Generator::unitary(3, 1, c.omega_t, c.omega_s, c.coupling, 4).expect("valid"));
    }
    parts.push(Generator::amplitude_damping(2, 1, r.ks, 4).expect("valid"));
    parts.push(Generator::amplitude_damping(4, 3, r.kt, 4).expect("valid"));
    let (j, k) = match direction {
        DephasingDirection::ThreeOne => (3, 1),
        DephasingDirection::OneThree => (1, 3),
    };
    parts.push(Generator::dephasing(j, k, r.q_extra, 4).expect("valid"));
    generators::generator_of_composition(4, parts).expect("dims agree")
}

/// `−Re(dρ_ST)` for the probe `ρ = |S⟩⟨T|` (indices 0-based in the
/// generator's space). Fails if the probe leaks into any other entry.
pub fn st_dephasing_rate(g: &Generator, s: usize, t: usize) -> Result<f64> {
    let n = g.dim();
    if s >= n || t >= n || s == t {
        return Err(Error::BadIndices { j: s + 1, k: t + 1, dim: n });
    }
    let d = g.act(&linalg::ket_bra(n, s, t))?;
    let scale = g.scale().max(d[(s, t)].norm()).max(f64::MIN_POSITIVE);
    let tolerance = PROPORTIONALITY_TOL * scale;
    let mut leakage = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            if (a, b) != (s, t) {
                leakage = leakage.max(d[(a, b)].norm());
            }
        }
    }
    if leakage > tolerance {
        return Err(Error::NotExponentialCoherenceDecay { leakage, tolerance });
    }
    Ok(-d[(s, t)].re)
}

/// [`st_dephasing_rate`] with `S`, `T` looked up by name in `basis`.
pub fn st_dephasing_rate_in(g: &Generator, basis: &Basis) -> Result<f64> {
    st_dephasing_rate(g, basis.index_of_str("S")?, basis.index_of_str("T")?)
}

/// One operator of the catalogue with the basis it acts on.
#[derive(Debug, Clone)]
pub struct CatalogueEntry {
    pub name: &'static str,
    pub generator: Generator,
    pub basis: Basis,
}

/// Every reaction operator, in report order. `experiment_model` is included
/// with the configured `q_extra` and without coherent coupling.
pub fn catalogue(r: &RPRates) -> Vec<CatalogueEntry> {
    let plain = RPRates { coherent: None, ..*r };
    vec![
        CatalogueEntry { name: "haberkorn", generator: haberkorn(r), basis: Basis::minimal() },
        CatalogueEntry { name: "kominis", generator: kominis(r), basis: Basis::minimal() },
        CatalogueEntry { name: "jones_hore", generator: jones_hore(r), basis: Basis::minimal() },
        CatalogueEntry { name: "qw_full", generator: qw_full(r), basis: Basis::radical_pair() },
        CatalogueEntry { name: "qw_reduced_minimal", generator: qw_reduced_minimal(r), basis: Basis::minimal() },
        CatalogueEntry { name: "qw_reduced_null", generator: qw_reduced_null(r), basis: Basis::reduced_null() },
        CatalogueEntry {
            name: "experiment_model",
            generator: experiment_model(&plain),
            basis: Basis::radical_pair(),
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyRow {
    pub operator: String,
    pub trace_behavior: String,
    pub predicted_rate: f64,
    /// `predicted_rate ≤ measured_rate`; `None` without a measurement.
    pub consistent: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub ks: f64,
    pub kt: f64,
    pub q_extra: f64,
    pub measured_rate: Option<f64>,
    pub rows: Vec<ConsistencyRow>,
}

impl ConsistencyReport {
    pub fn inconsistent(&self) -> Vec<&str> {
        self.rows
            .iter()
            .filter(|r| r.consistent == Some(false))
            .map(|r| r.operator.as_str())
            .collect()
    }

    pub fn rate_of(&self, operator: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.operator == operator).map(|r| r.predicted_rate)
    }
}

fn behavior_label(b: TraceBehavior) -> String {
    b.as_str().to_string()
}

/// Predicted singlet–triplet dephasing rate of every catalogue operator and,
/// given a measured rate, whether the prediction stays at or below it.
pub fn consistency_report(r: &RPRates, measured_rate: Option<f64>) -> Result<ConsistencyReport> {
    r.validate()?;
    if let Some(m) = measured_rate {
        if !(m >= 0.0) {
            return Err(Error::BadRates(format!("measured rate {m} must be nonnegative")));
        }
    }
    let mut rows = Vec::new();
    for e in catalogue(r) {
        let rate = st_dephasing_rate_in(&e.generator, &e.basis)?;
        rows.push(ConsistencyRow {
            operator: e.name.to_string(),
            trace_behavior: behavior_label(e.generator.trace_behavior()),
            predicted_rate: rate,
            consistent: measured_rate.map(|m| rate <= m),
        });
    }
    Ok(ConsistencyReport {
        ks: r.ks,
        kt: r.kt,
        q_extra: r.q_extra,
        measured_rate,
        rows,
    })
}

/// Recombination-only dephasing check against a measured rate.
pub fn maeda_consistency_check(measured_rate: f64, ks: f64, kt: f64) -> Result<ConsistencyReport> {
    consistency_report(&RPRates::new(ks, kt)?, Some(measured_rate))
}

/// Normalized `|S⟩⟨S|` on [`Basis::radical_pair`].
pub fn singlet_state() -> DensityOperator {
    DensityOperator::diagonal(&[1.0, 0.0, 0.0, 0.0], Basis::radical_pair(), TraceClass::Normalized)
        .expect("valid state")
}

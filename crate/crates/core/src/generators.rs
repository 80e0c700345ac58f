// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

//! Generators `dρ/dt = G ρ` of the map families, their column-stacked
//! Liouvillian matrices, and exact and stepwise propagation.
//!
//! The primitive kinds are evaluated entrywise in [`Generator::act`]; the
//! Liouvillian is assembled independently from the operator form
//! `Σ c · A ρ B ↦ Σ c (Bᵀ ⊗ A)`.

use std::sync::OnceLock;

use crate::densop::{DensityOperator, TraceClass};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::maps::{self, KrausMap};
use crate::series::TimeSeries;

/// Symmetrization larger than this is reported as a diagnostic.
pub const SYMMETRIZATION_WARN: f64 = 1e-8;
/// Default step guard: `max(k, q) · dt` may not exceed this.
pub const DEFAULT_MAX_RATE_DT: f64 = 0.1;

/// One superoperator term `coeff · left · ρ · right`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: C64,
    pub left: CMatrix,
    pub right: CMatrix,
}

impl Term {
    pub fn new(coeff: f64, left: CMatrix, right: CMatrix) -> Self {
        Self {
            coeff: linalg::re(coeff),
            left,
            right,
        }
    }

    fn apply(&self, rho: &CMatrix) -> CMatrix {
        (&self.left * rho * &self.right) * self.coeff
    }
}

#[derive(Debug, Clone)]
pub enum GeneratorKind {
    /// `k [Q_jk ρ Q_jk† − ½ Q_k ρ − ½ ρ Q_k]`, transfer `ψ_k → ψ_j`.
    AmplitudeDamping { j: usize, k: usize, rate: f64 },
    /// `q [Q_k ρ Q_k − ½ Q_k ρ − ½ ρ Q_k]`.
    Dephasing { j: usize, k: usize, rate: f64 },
    /// `−i [H_jk, ρ]`.
    Unitary { j: usize, k: usize, omega_j: f64, omega_k: f64, coupling: f64 },
    Sum(Vec<Generator>),
    /// Arbitrary linear combination of `A ρ B` terms.
    Terms(Vec<Term>),
    /// `inner` read off on the subspace spanned by `sites` (1-based), with the
    /// rest of the space set to zero.
    Restricted { inner: Box<Generator>, sites: Vec<usize> },
}

/// How a generator changes `tr ρ` on physical states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceBehavior {
    Preserving,
    Decreasing,
    Increasing,
    Indefinite,
}

impl TraceBehavior {
    pub fn as_str(&self) -> &'static str {
        match self {
            TraceBehavior::Preserving => "preserving",
            TraceBehavior::Decreasing => "decreasing",
            TraceBehavior::Increasing => "increasing",
            TraceBehavior::Indefinite => "indefinite",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Generator {
    dim: usize,
    kind: GeneratorKind,
    liouvillian: OnceLock<Liouvillian>,
}

fn check_pair(j: usize, k: usize, dim: usize) -> Result<()> {
    if j == 0 || k == 0 || j > dim || k > dim || j == k {
        return Err(Error::BadIndices { j, k, dim });
    }
    Ok(())
}

fn check_rate(rate: f64) -> Result<()> {
    if rate.is_finite() && rate >= 0.0 {
        Ok(())
    } else {
        Err(Error::BadRates(format!("rate {rate} must be finite and nonnegative")))
    }
}

impl Generator {
    fn from_kind(dim: usize, kind: GeneratorKind) -> Self {
        Self {
            dim,
            kind,
            liouvillian: OnceLock::new(),
        }
    }

    /// `L_jk` with rate `k_jk` (1/s).
    pub fn amplitude_damping(j: usize, k: usize, rate: f64, dim: usize) -> Result<Self> {
        check_pair(j, k, dim)?;
        check_rate(rate)?;
        Ok(Self::from_kind(dim, GeneratorKind::AmplitudeDamping { j, k, rate }))
    }

    /// `S_jk` with rate `q_jk` (1/s).
    pub fn dephasing(j: usize, k: usize, rate: f64, dim: usize) -> Result<Self> {
        check_pair(j, k, dim)?;
        check_rate(rate)?;
        Ok(Self::from_kind(dim, GeneratorKind::Dephasing { j, k, rate }))
    }

    /// `R_jk` for `H_jk` with energies and coupling in rad/s.
    pub fn unitary(j: usize, k: usize, omega_j: f64, omega_k: f64, coupling: f64, dim: usize) -> Result<Self> {
        check_pair(j, k, dim)?;
        if ![omega_j, omega_k, coupling].iter().all(|x| x.is_finite()) {
            return Err(Error::BadRates("Hamiltonian parameters must be finite".into()));
        }
        Ok(Self::from_kind(
            dim,
            GeneratorKind::Unitary { j, k, omega_j, omega_k, coupling },
        ))
    }

    pub fn terms(dim: usize, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            for m in [&t.left, &t.right] {
                if m.nrows() != dim || m.ncols() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: m.nrows(),
                    });
                }
            }
        }
        Ok(Self::from_kind(dim, GeneratorKind::Terms(terms)))
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_kind(dim, GeneratorKind::Sum(Vec::new()))
    }

    /// Restrict `inner` to the sites `sites` (1-based, in the given order).
    pub fn restricted(inner: Generator, sites: &[usize]) -> Result<Self> {
        for (n, &s) in sites.iter().enumerate() {
            if s == 0 || s > inner.dim || sites[..n].contains(&s) {
                return Err(Error::BadIndices { j: s, k: s, dim: inner.dim });
            }
        }
        Ok(Self::from_kind(
            sites.len(),
            GeneratorKind::Restricted {
                inner: Box::new(inner),
                sites: sites.to_vec(),
            },
        ))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &GeneratorKind {
        &self.kind
    }

    /// `dρ/dt` for an arbitrary (not necessarily physical) matrix.
    pub fn act(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.nrows(),
            });
        }
        Ok(self.act_unchecked(rho))
    }

    pub fn act_state(&self, rho: &DensityOperator) -> Result<CMatrix> {
        self.act(rho.matrix())
    }

    fn act_unchecked(&self, rho: &CMatrix) -> CMatrix {
        let n = self.dim;
        match &self.kind {
            GeneratorKind::AmplitudeDamping { j, k, rate } => {
                let (j, k) = (j - 1, k - 1);
                let mut out = CMatrix::zeros(n, n);
                out[(j, j)] += rho[(k, k)] * *rate;
                let half = 0.5 * rate;
                for m in 0..n {
                    out[(k, m)] -= rho[(k, m)] * half;
                    out[(m, k)] -= rho[(m, k)] * half;
                }
                out
            }
            GeneratorKind::Dephasing { k, rate, .. } => {
                let k = k - 1;
                let mut out = CMatrix::zeros(n, n);
                let half = 0.5 * rate;
                for m in (0..n).filter(|&m| m != k) {
                    out[(k, m)] = -rho[(k, m)] * half;
                    out[(m, k)] = -rho[(m, k)] * half;
                }
                out
            }
            GeneratorKind::Unitary { j, k, omega_j, omega_k, coupling } => {
                let h = maps::two_site_hamiltonian(*j, *k, *omega_j, *omega_k, *coupling, n)
                    .expect("indices validated at construction");
                let comm = &h * rho - rho * &h;
                comm * C64::new(0.0, -1.0)
            }
            GeneratorKind::Sum(parts) => parts
                .iter()
                .fold(CMatrix::zeros(n, n), |acc, g| acc + g.act_unchecked(rho)),
            GeneratorKind::Terms(terms) => terms
                .iter()
                .fold(CMatrix::zeros(n, n), |acc, t| acc + t.apply(rho)),
            GeneratorKind::Restricted { inner, sites } => {
                let idx: Vec<usize> = sites.iter().map(|s| s - 1).collect();
                let full = linalg::embed(rho, &idx, inner.dim);
                linalg::block(&inner.act_unchecked(&full), &idx)
            }
        }
    }

    /// Operator-form expansion `Σ c · A ρ B` of this generator.
    pub fn expand_terms(&self) -> Vec<Term> {
        let n = self.dim;
        match &self.kind {
            GeneratorKind::AmplitudeDamping { j, k, rate } => {
                let q = linalg::ket_bra(n, j - 1, k - 1);
                let qk = linalg::projector(n, k - 1);
                let id = linalg::identity(n);
                vec![
                    Term::new(*rate, q.clone(), q.adjoint()),
                    Term::new(-0.5 * rate, qk.clone(), id.clone()),
                    Term::new(-0.5 * rate, id, qk),
                ]
            }
            GeneratorKind::Dephasing { k, rate, .. } => {
                let qk = linalg::projector(n, k - 1);
                let id = linalg::identity(n);
                vec![
                    Term::new(*rate, qk.clone(), qk.clone()),
                    Term::new(-0.5 * rate, qk.clone(), id.clone()),
                    Term::new(-0.5 * rate, id, qk),
                ]
            }
            GeneratorKind::Unitary { j, k, omega_j, omega_k, coupling } => {
                let h = maps::two_site_hamiltonian(*j, *k, *omega_j, *omega_k, *coupling, n)
                    .expect("indices validated at construction");
                let id = linalg::identity(n);
                vec![
                    Term { coeff: C64::new(0.0, -1.0), left: h.clone(), right: id.clone() },
                    Term { coeff: C64::new(0.0, 1.0), left: id, right: h },
                ]
            }
            GeneratorKind::Sum(parts) => parts.iter().flat_map(|g| g.expand_terms()).collect(),
            GeneratorKind::Terms(terms) => terms.clone(),
            GeneratorKind::Restricted { inner, sites } => {
                let idx: Vec<usize> = sites.iter().map(|s| s - 1).collect();
                let e = linalg::isometry(&idx, inner.dim);
                let et = e.transpose();
                inner
                    .expand_terms()
                    .into_iter()
                    .map(|t| Term {
                        coeff: t.coeff,
                        left: &et * &t.left * &e,
                        right: &et * &t.right * &e,
                    })
                    .collect()
            }
        }
    }

    /// Cached column-stacking Liouvillian.
    pub fn liouvillian(&self) -> &Liouvillian {
        self.liouvillian.get_or_init(|| Liouvillian::from_terms(self.dim, &self.expand_terms()))
    }

    pub fn to_liouvillian(&self) -> Liouvillian {
        self.liouvillian().clone()
    }

    /// Operator `T` with `tr(G ρ) = tr(T ρ)` for every `ρ`.
    pub fn trace_functional(&self) -> CMatrix {
        self.expand_terms()
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, t| acc + (&t.right * &t.left) * t.coeff)
    }

    pub fn trace_behavior(&self) -> TraceBehavior {
        let t = self.trace_functional();
        let scale = self.scale().max(1.0);
        let tol = 1e-12 * scale;
        if linalg::max_abs(&t) <= tol {
            return TraceBehavior::Preserving;
        }
        let ev = linalg::hermitian_eigenvalues(&t);
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        if hi <= tol {
            TraceBehavior::Decreasing
        } else if lo >= -tol {
            TraceBehavior::Increasing
        } else {
            TraceBehavior::Indefinite
        }
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_behavior() == TraceBehavior::Preserving
    }

    /// Largest incoherent (damping or dephasing) rate, used by step guards.
    pub fn max_incoherent_rate(&self) -> f64 {
        match &self.kind {
            GeneratorKind::AmplitudeDamping { rate, .. } | GeneratorKind::Dephasing { rate, .. } => *rate,
            GeneratorKind::Unitary { .. } => 0.0,
            GeneratorKind::Sum(parts) => parts.iter().map(|g| g.max_incoherent_rate()).fold(0.0, f64::max),
            GeneratorKind::Terms(terms) => terms.iter().map(|t| t.coeff.norm()).fold(0.0, f64::max),
            GeneratorKind::Restricted { inner, .. } => inner.max_incoherent_rate(),
        }
    }

    /// Magnitude of the largest coefficient, for relative tolerances.
    pub fn scale(&self) -> f64 {
        match &self.kind {
            GeneratorKind::Unitary { omega_j, omega_k, coupling, .. } => {
                omega_j.abs().max(omega_k.abs()).max(coupling.abs())
            }
            GeneratorKind::Sum(parts) => parts.iter().map(|g| g.scale()).fold(0.0, f64::max),
            GeneratorKind::Restricted { inner, .. } => inner.scale(),
            _ => self.max_incoherent_rate(),
        }
    }
}

/// Generator of a composition of infinitesimal maps: the sum `Σ_i gens[i]`.
pub fn generator_of_composition(dim: usize, gens: Vec<Generator>) -> Result<Generator> {
    for g in &gens {
        if g.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: g.dim,
            });
        }
    }
    Ok(Generator::from_kind(dim, GeneratorKind::Sum(gens)))
}

/// Matrix of a generator acting on `vec(ρ)` (column stacking).
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    dim: usize,
    matrix: CMatrix,
}

impl Liouvillian {
    fn from_terms(dim: usize, terms: &[Term]) -> Self {
        let mut matrix = CMatrix::zeros(dim * dim, dim * dim);
        for t in terms {
            matrix += linalg::kron(&t.right.transpose(), &t.left) * t.coeff;
        }
        Self { dim, matrix }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        linalg::unvectorize(&(&self.matrix * linalg::vectorize(rho)), self.dim)
    }

    /// `exp(L t)` as a matrix on `vec(ρ)`.
    pub fn propagator(&self, t: f64) -> Result<CMatrix> {
        let p = linalg::expm(&(&self.matrix * linalg::re(t)));
        if p.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(p)
        } else {
            Err(Error::NonConvergent)
        }
    }
}

fn output_class(g: &Generator, rho0: &DensityOperator) -> TraceClass {
    if rho0.class() == TraceClass::Normalized && g.is_trace_preserving() {
        TraceClass::Normalized
    } else {
        TraceClass::Subnormalized
    }
}

fn finish(raw: CMatrix, rho0: &DensityOperator, class: TraceClass) -> Result<(DensityOperator, f64)> {
    let sym = linalg::hermitian_part(&raw);
    let defect = linalg::max_abs(&(&raw - &sym));
    if defect > SYMMETRIZATION_WARN {
        log::warn!("symmetrization removed {defect:e}");
    } else {
        log::trace!("symmetrization removed {defect:e}");
    }
    let state = DensityOperator::new(sym, rho0.basis().clone(), class)?;
    Ok((state, defect))
}

/// `ρ(t)` with `vec ρ(t) = exp(L t) vec ρ(0)`, symmetrized and validated.
pub fn propagate_exact(g: &Generator, rho0: &DensityOperator, t: f64) -> Result<DensityOperator> {
    if !(t >= 0.0) {
        return Err(Error::BadRates(format!("propagation time {t} must be nonnegative")));
    }
    if rho0.dim() != g.dim {
        return Err(Error::DimensionMismatch { expected: g.dim, found: rho0.dim() });
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let l = g.liouvillian();
    let v = l.propagator(t)? * linalg::vectorize(rho0.matrix());
    Ok(finish(linalg::unvectorize(&v, g.dim), rho0, output_class(g, rho0))?.0)
}

/// Exact propagation sampled at `times` (nonnegative, strictly increasing).
/// Equal consecutive intervals reuse one propagator.
pub fn propagate_exact_series(g: &Generator, rho0: &DensityOperator, times: &[f64]) -> Result<TimeSeries> {
    if rho0.dim() != g.dim {
        return Err(Error::DimensionMismatch { expected: g.dim, found: rho0.dim() });
    }
    let class = output_class(g, rho0);
    let l = g.liouvillian();
    let mut series = TimeSeries::new();
    let mut v = linalg::vectorize(rho0.matrix());
    let mut t_prev = 0.0;
    let mut cached: Option<(f64, CMatrix)> = None;
    for (index, &t) in times.iter().enumerate() {
        let wrap = |e: Error| Error::Sample { index, time: t, source: Box::new(e) };
        let dt = t - t_prev;
        if !(dt >= 0.0) || (index > 0 && dt == 0.0) {
            return Err(wrap(Error::BadRates("sample times must increase".into())));
        }
        if dt > 0.0 {
            let reuse = matches!(&cached, Some((h, _)) if (h - dt).abs() <= 1e-12 * dt);
            if !reuse {
                cached = Some((dt, l.propagator(dt).map_err(wrap)?));
            }
            v = &cached.as_ref().expect("set above").1 * v;
        }
        let (state, defect) = finish(linalg::unvectorize(&v, g.dim), rho0, class).map_err(wrap)?;
        series.push(t, state, defect).map_err(wrap)?;
        t_prev = t;
    }
    Ok(series)
}

/// A source of per-step Kraus maps, applied in order within each step.
pub trait StepMaps {
    fn dim(&self) -> usize;
    fn step_maps(&self, dt: f64) -> Result<Vec<KrausMap>>;
    fn max_incoherent_rate(&self) -> f64;
}

impl StepMaps for Generator {
    fn dim(&self) -> usize {
        self.dim
    }

    /// First-order maps for each primitive part: damping with `γ = k dt`,
    /// dephasing with `μ = q dt`, and the exact unitary over `dt`.
    fn step_maps(&self, dt: f64) -> Result<Vec<KrausMap>> {
        let n = self.dim;
        match &self.kind {
            GeneratorKind::AmplitudeDamping { j, k, rate } => {
                Ok(vec![maps::amplitude_damping_rate(*j, *k, *rate, dt, n)?])
            }
            GeneratorKind::Dephasing { j, k, rate } => Ok(vec![maps::dephasing_rate(*j, *k, *rate, dt, n)?]),
            GeneratorKind::Unitary { j, k, omega_j, omega_k, coupling } => {
                Ok(vec![maps::unitary_map(*j, *k, *omega_j, *omega_k, *coupling, dt, n)?])
            }
            GeneratorKind::Sum(parts) => {
                let mut out = Vec::new();
                for p in parts {
                    out.extend(p.step_maps(dt)?);
                }
                Ok(out)
            }
            GeneratorKind::Terms(_) | GeneratorKind::Restricted { .. } => Err(Error::InvalidGraph(
                "generator has no two-site Kraus decomposition".into(),
            )),
        }
    }

    fn max_incoherent_rate(&self) -> f64 {
        Generator::max_incoherent_rate(self)
    }
}

/// Limit on `max(k, q) · dt` for stepwise propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepGuard {
    pub max_rate_dt: f64,
}

impl Default for StepGuard {
    fn default() -> Self {
        Self {
            max_rate_dt: DEFAULT_MAX_RATE_DT,
        }
    }
}

impl StepGuard {
    pub fn check(&self, rate: f64, dt: f64) -> Result<()> {
        let rate_dt = rate * dt;
        if rate_dt > self.max_rate_dt {
            return Err(Error::StepTooLarge {
                rate_dt,
                limit: self.max_rate_dt,
            });
        }
        Ok(())
    }
}

/// Repeated application of the step maps. Each interval between samples is
/// split into equal steps no longer than `dt`.
pub fn propagate_stepwise<B: StepMaps + ?Sized>(
    builder: &B,
    rho0: &DensityOperator,
    times: &[f64],
    dt: f64,
    guard: StepGuard,
) -> Result<TimeSeries> {
    if !(dt > 0.0) {
        return Err(Error::BadRates(format!("time step {dt} must be positive")));
    }
    guard.check(builder.max_incoherent_rate(), dt)?;
    if rho0.dim() != builder.dim() {
        return Err(Error::DimensionMismatch { expected: builder.dim(), found: rho0.dim() });
    }
    let mut series = TimeSeries::new();
    let mut rho = rho0.matrix().clone();
    let mut t_prev = 0.0;
    let mut cached: Option<(f64, Vec<KrausMap>)> = None;
    let mut preserving = true;
    for (index, &t) in times.iter().enumerate() {
        let wrap = |e: Error| Error::Sample { index, time: t, source: Box::new(e) };
        let span = t - t_prev;
        if !(span >= 0.0) || (index > 0 && span == 0.0) {
            return Err(wrap(Error::BadRates("sample times must increase".into())));
        }
        if span > 0.0 {
            let steps = ((span / dt) - 1e-9).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            let reuse = matches!(&cached, Some((hh, _)) if (hh - h).abs() <= 1e-12 * h);
            if !reuse {
                let built = builder.step_maps(h).map_err(wrap)?;
                cached = Some((h, built));
            }
            let seq = &cached.as_ref().expect("set above").1;
            preserving &= seq.iter().all(|m| m.is_preserving());
            for _ in 0..steps {
                for m in seq {
                    rho = m.apply_matrix(&rho).map_err(wrap)?;
                }
            }
        }
        let class = if preserving && rho0.class() == TraceClass::Normalized {
            TraceClass::Normalized
        } else {
            TraceClass::Subnormalized
        };
        let (state, defect) = finish(rho.clone(), rho0, class).map_err(wrap)?;
        rho = state.matrix().clone();
        series.push(t, state, defect).map_err(wrap)?;
        t_prev = t;
    }
    Ok(series)
}

/// `(M(dt) ρ − ρ) / dt` for a step map applied to `ρ`.
pub fn finite_difference(maps_in_order: &[KrausMap], rho: &CMatrix, dt: f64) -> Result<CMatrix> {
    let mut out = rho.clone();
    for m in maps_in_order {
        out = m.apply_matrix(&out)?;
    }
    Ok((out - rho) * linalg::re(1.0 / dt))
}

// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

//! Operator-sum (Kraus) maps and the two-site families they are built from:
//! amplitude damping, dephasing and unitary evolution.
//!
//! Site indices passed to the constructors are 1-based. A map `M_jk` with
//! subscripts `(j, k)` moves population from `ψ_k` to `ψ_j`; swapping the
//! subscripts reverses the process.

use crate::densop::{DensityOperator, TraceClass};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Completeness tolerance `‖Σ K†K − 1‖_max`.
pub const COMPLETENESS_TOL: f64 = 1e-12;
/// Kraus operators smaller than this (max-norm) are dropped when composing.
pub const PRUNE_TOL: f64 = 1e-15;
/// Below this value of `2ζΔt` the transition probability uses a series.
pub const ALPHA_SERIES_THRESHOLD: f64 = 1e-6;

const NO_JUMP: &str = "no jump";

/// An ordered set of Kraus operators `K^(n)` with per-branch labels.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausMap {
    dim: usize,
    operators: Vec<CMatrix>,
    labels: Vec<String>,
    duration: Option<f64>,
    preserving: bool,
}

impl KrausMap {
    /// Trace preservation is detected from the completeness relation.
    pub fn new(operators: Vec<CMatrix>, labels: Vec<String>, duration: Option<f64>) -> Result<Self> {
        let dim = match operators.first() {
            Some(k) => k.nrows(),
            None => return Err(Error::InvalidBasis("Kraus map without operators".into())),
        };
        if labels.len() != operators.len() {
            return Err(Error::DimensionMismatch {
                expected: operators.len(),
                found: labels.len(),
            });
        }
        for k in &operators {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: k.nrows().max(k.ncols()),
                });
            }
        }
        if let Some(dt) = duration {
            if !(dt >= 0.0) {
                return Err(Error::BadRates(format!("map duration {dt} is negative")));
            }
        }
        let mut map = Self {
            dim,
            operators,
            labels,
            duration,
            preserving: false,
        };
        map.preserving = map.completeness_defect() <= COMPLETENESS_TOL;
        Ok(map)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            operators: vec![linalg::identity(dim)],
            labels: vec!["identity".into()],
            duration: None,
            preserving: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn branch_count(&self) -> usize {
        self.operators.len()
    }

    /// The time step `Δt` this map represents, when it was built from rates.
    pub fn duration(&self) -> Option<f64> {
        self.duration
    }

    pub fn is_preserving(&self) -> bool {
        self.preserving
    }

    /// `Σ K†K`.
    pub fn effect_sum(&self) -> CMatrix {
        self.operators
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, k| acc + k.adjoint() * k)
    }

    pub fn completeness_defect(&self) -> f64 {
        linalg::max_abs(&(self.effect_sum() - linalg::identity(self.dim)))
    }

    /// `Σ K ρ K†` on an arbitrary matrix (no symmetrization, no validation).
    pub fn apply_matrix(&self, rho: &CMatrix) -> Result<CMatrix> {
        self.check_dim(rho.nrows())?;
        Ok(self
            .operators
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, k| acc + k * rho * k.adjoint()))
    }

    /// Apply the map to a state. The result is exactly Hermitian; it is
    /// normalized only if both the map and the input are.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let out = linalg::hermitian_part(&self.apply_matrix(rho.matrix())?);
        let class = match (self.preserving, rho.class()) {
            (true, TraceClass::Normalized) => TraceClass::Normalized,
            _ => TraceClass::Subnormalized,
        };
        DensityOperator::new(out, rho.basis().clone(), class)
    }

    /// `℘_n = tr[K^(n)† K^(n) ρ]`.
    pub fn branch_probability(&self, n: usize, rho: &DensityOperator) -> Result<f64> {
        let k = self.branch(n)?;
        self.check_dim(rho.dim())?;
        Ok(linalg::trace(&(k.adjoint() * k * rho.matrix())).re)
    }

    /// Unnormalized conditioned state `K^(n) ρ K^(n)†` and its trace.
    pub fn conditioned_state(&self, n: usize, rho: &DensityOperator) -> Result<(DensityOperator, f64)> {
        let k = self.branch(n)?;
        self.check_dim(rho.dim())?;
        let out = linalg::hermitian_part(&(k * rho.matrix() * k.adjoint()));
        let p = linalg::trace(&out).re;
        let state = DensityOperator::new(out, rho.basis().clone(), TraceClass::Subnormalized)?;
        Ok((state, p))
    }

    fn branch(&self, n: usize) -> Result<&CMatrix> {
        self.operators.get(n).ok_or(Error::BranchOutOfRange {
            index: n,
            count: self.operators.len(),
        })
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }
}

/// `outer ∘ inner`: `inner` acts first. Branches are every product
/// `K_outer^(m) K_inner^(n)` (outer index major); vanishing products are
/// pruned.
pub fn compose(outer: &KrausMap, inner: &KrausMap) -> Result<KrausMap> {
    if outer.dim != inner.dim {
        return Err(Error::DimensionMismatch {
            expected: outer.dim,
            found: inner.dim,
        });
    }
    let mut operators = Vec::new();
    let mut labels = Vec::new();
    for (ko, lo) in outer.operators.iter().zip(&outer.labels) {
        for (ki, li) in inner.operators.iter().zip(&inner.labels) {
            let k = ko * ki;
            if linalg::max_abs(&k) < PRUNE_TOL {
                continue;
            }
            operators.push(k);
            labels.push(combine_labels(li, lo));
        }
    }
    if operators.is_empty() {
        operators.push(CMatrix::zeros(outer.dim, outer.dim));
        labels.push("annihilated".into());
    }
    let duration = match (outer.duration, inner.duration) {
        (None, d) | (d, None) => d,
        (Some(a), Some(b)) if a == b => Some(a),
        (Some(a), Some(b)) => Some(a + b),
    };
    let preserving = outer.preserving && inner.preserving;
    let mut map = KrausMap {
        dim: outer.dim,
        operators,
        labels,
        duration,
        preserving,
    };
    // Completeness of the product is re-measured, not inherited.
    if preserving && map.completeness_defect() > COMPLETENESS_TOL {
        map.preserving = false;
    }
    Ok(map)
}

/// Compose a sequence applied first-to-last (`maps[0]` acts first).
pub fn compose_sequence(dim: usize, maps: &[KrausMap]) -> Result<KrausMap> {
    maps.iter()
        .try_fold(KrausMap::identity(dim), |acc, m| compose(m, &acc))
}

fn is_neutral(label: &str) -> bool {
    label == "identity" || label.starts_with("no ") || label.starts_with("unitary")
}

fn combine_labels(first: &str, second: &str) -> String {
    let parts: Vec<&str> = first
        .split(" + ")
        .chain(second.split(" + "))
        .filter(|p| !is_neutral(p))
        .collect();
    if parts.is_empty() {
        NO_JUMP.to_string()
    } else {
        parts.join(" + ")
    }
}

fn check_pair(j: usize, k: usize, dim: usize) -> Result<(usize, usize)> {
    if j == 0 || k == 0 || j > dim || k > dim || j == k {
        return Err(Error::BadIndices { j, k, dim });
    }
    Ok((j - 1, k - 1))
}

fn check_probability(p: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::BadProbability(p))
    }
}

fn rate_times_dt(rate: f64, dt: f64) -> Result<f64> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::BadRates(format!("rate {rate} must be finite and nonnegative")));
    }
    if !(dt >= 0.0) {
        return Err(Error::BadRates(format!("time step {dt} must be nonnegative")));
    }
    let p = rate * dt;
    if p > 1.0 {
        return Err(Error::StepTooLarge { rate_dt: p, limit: 1.0 });
    }
    Ok(p)
}

/// Amplitude damping `M_jk`: transition `ψ_k → ψ_j` with probability `γ`.
///
/// `M^(1) = √γ |ψ_j⟩⟨ψ_k|`, `M^(2) = P_k + √(1−γ) Q_k`.
pub fn amplitude_damping(j: usize, k: usize, gamma: f64, dim: usize) -> Result<KrausMap> {
    let (jj, kk) = check_pair(j, k, dim)?;
    let gamma = check_probability(gamma)?;
    let jump = linalg::ket_bra(dim, jj, kk) * linalg::re(gamma.sqrt());
    let mut stay = linalg::identity(dim);
    stay[(kk, kk)] = linalg::re((1.0 - gamma).sqrt());
    Ok(KrausMap {
        dim,
        operators: vec![jump, stay],
        labels: vec![format!("jump {k}→{j}"), NO_JUMP.into()],
        duration: None,
        preserving: true,
    })
}

/// Amplitude damping over a step `dt` with `γ = rate·dt`.
pub fn amplitude_damping_rate(j: usize, k: usize, rate: f64, dt: f64, dim: usize) -> Result<KrausMap> {
    let gamma = rate_times_dt(rate, dt)?;
    log::debug!("damping {k}->{j}: gamma = {rate} * {dt} = {gamma}");
    let mut map = amplitude_damping(j, k, gamma, dim)?;
    map.duration = Some(dt);
    Ok(map)
}

/// Dephasing `V_jk` with probability `μ`; projects with `Q_k`.
///
/// `V^(1) = √μ Q_k`, `V^(2) = P_k + √(1−μ) Q_k`. Populations are untouched and
/// every coherence in row/column `k` shrinks by `√(1−μ)`.
pub fn dephasing(j: usize, k: usize, mu: f64, dim: usize) -> Result<KrausMap> {
    let (_, kk) = check_pair(j, k, dim)?;
    let mu = check_probability(mu)?;
    let event = linalg::projector(dim, kk) * linalg::re(mu.sqrt());
    let mut stay = linalg::identity(dim);
    stay[(kk, kk)] = linalg::re((1.0 - mu).sqrt());
    Ok(KrausMap {
        dim,
        operators: vec![event, stay],
        labels: vec![format!("dephase {j},{k}"), "no dephasing".into()],
        duration: None,
        preserving: true,
    })
}

pub fn dephasing_rate(j: usize, k: usize, rate: f64, dt: f64, dim: usize) -> Result<KrausMap> {
    let mu = rate_times_dt(rate, dt)?;
    log::debug!("dephasing {j},{k}: mu = {rate} * {dt} = {mu}");
    let mut map = dephasing(j, k, mu, dim)?;
    map.duration = Some(dt);
    Ok(map)
}

/// `H_jk = ω_j Q_j + ω_k Q_k + Ω (Q_jk + Q_kj)` embedded in `dim` sites (ħ = 1).
pub fn two_site_hamiltonian(
    j: usize,
    k: usize,
    omega_j: f64,
    omega_k: f64,
    coupling: f64,
    dim: usize,
) -> Result<CMatrix> {
    let (jj, kk) = check_pair(j, k, dim)?;
    let mut h = CMatrix::zeros(dim, dim);
    h[(jj, jj)] = linalg::re(omega_j);
    h[(kk, kk)] = linalg::re(omega_k);
    h[(jj, kk)] = linalg::re(coupling);
    h[(kk, jj)] = linalg::re(coupling);
    Ok(h)
}

/// Single-branch unitary map `U = exp(−i H_jk Δt)`.
pub fn unitary_map(
    j: usize,
    k: usize,
    omega_j: f64,
    omega_k: f64,
    coupling: f64,
    dt: f64,
    dim: usize,
) -> Result<KrausMap> {
    if !(dt >= 0.0) {
        return Err(Error::BadRates(format!("time step {dt} must be nonnegative")));
    }
    let h = two_site_hamiltonian(j, k, omega_j, omega_k, coupling, dim)?;
    let u = if dt == 0.0 {
        linalg::identity(dim)
    } else {
        linalg::unitary_from_hamiltonian(&h, dt)
    };
    Ok(KrausMap {
        dim,
        operators: vec![u],
        labels: vec![format!("unitary {j}↔{k}")],
        duration: Some(dt),
        preserving: true,
    })
}

/// `α_jk(Δt) = |⟨ψ_j| exp(−i H_jk Δt) |ψ_k⟩|² = (Ω²/2ζ²)[1 − cos 2ζΔt]` with
/// `ζ = ½√((ω_k − ω_j)² + 4Ω²)`.
pub fn transition_probability_alpha(omega_j: f64, omega_k: f64, coupling: f64, dt: f64) -> f64 {
    let detuning = omega_k - omega_j;
    let zeta = 0.5 * detuning.hypot(2.0 * coupling);
    let x = zeta * dt;
    if 2.0 * x.abs() < ALPHA_SERIES_THRESHOLD {
        // (Ω Δt)² sinc²(ζΔt), sinc² x ≈ 1 − x²/3
        let wt = coupling * dt;
        return (wt * wt * (1.0 - x * x / 3.0)).clamp(0.0, 1.0);
    }
    // 1 − cos 2x = 2 sin² x avoids cancellation for small x.
    let ratio = coupling / zeta;
    (ratio * ratio * x.sin().powi(2)).clamp(0.0, 1.0)
}

/// Parameters of the three canonical two-site families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapParams {
    AmplitudeDamping { j: usize, k: usize, gamma: f64 },
    Dephasing { j: usize, k: usize, mu: f64 },
    Unitary { j: usize, k: usize, omega_j: f64, omega_k: f64, coupling: f64, dt: f64 },
}

impl MapParams {
    pub fn build(&self, dim: usize) -> Result<KrausMap> {
        match *self {
            MapParams::AmplitudeDamping { j, k, gamma } => amplitude_damping(j, k, gamma, dim),
            MapParams::Dephasing { j, k, mu } => dephasing(j, k, mu, dim),
            MapParams::Unitary { j, k, omega_j, omega_k, coupling, dt } => {
                unitary_map(j, k, omega_j, omega_k, coupling, dt, dim)
            }
        }
    }
}

/// Branch-conditioned states of the lumped-product walk `M_23(dt) M_21(dt)` on
/// the basis `{ψ1 = S, ψ2 = P, ψ3 = T}`.
///
/// Returns `jump 1→2`, `jump 3→2` and `no jump`, in that order. The jump
/// branches are `k·dt·ρ_kk |ψ2⟩⟨ψ2|`; the no-jump branch agrees with the
/// Haberkorn increment to first order in `dt`.
pub fn minimal_basis_conditionals(
    k21: f64,
    k23: f64,
    dt: f64,
    rho: &DensityOperator,
) -> Result<Vec<(String, DensityOperator)>> {
    if rho.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: rho.dim(),
        });
    }
    let m21 = amplitude_damping_rate(2, 1, k21, dt, 3)?;
    let m23 = amplitude_damping_rate(2, 3, k23, dt, 3)?;
    let total = compose(&m23, &m21)?;
    let mut out = Vec::with_capacity(3);
    for wanted in ["jump 1→2", "jump 3→2", NO_JUMP] {
        let state = match total.labels.iter().position(|l| l == wanted) {
            Some(n) => total.conditioned_state(n, rho)?.0,
            // a zero rate still has a (vanishing) jump branch
            None => DensityOperator::new(
                CMatrix::zeros(3, 3),
                rho.basis().clone(),
                TraceClass::Subnormalized,
            )?,
        };
        out.push((wanted.to_string(), state));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densop::Basis;
    use crate::linalg::{re, C64};

    fn site_state(dim: usize, site: usize) -> Result<DensityOperator> {
        DensityOperator::pure_basis_state(Basis::sites(dim), &crate::densop::BasisLabel::Site(site))
    }

    fn generic_2x2() -> DensityOperator {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[re(0.6), C64::new(0.2, 0.1), C64::new(0.2, -0.1), re(0.4)],
        );
        DensityOperator::new(m, Basis::sites(2), TraceClass::Normalized).unwrap()
    }

    #[test]
    fn identity_map_leaves_state_unchanged() {
        let rho = generic_2x2();
        let out = KrausMap::identity(2).apply(&rho).unwrap();
        assert!((out.matrix() - rho.matrix()).camax() < 1e-16);
    }

    #[test]
    fn certain_damping_moves_everything() {
        let out = amplitude_damping(2, 1, 1.0, 2).unwrap().apply(&site_state(2, 1).unwrap()).unwrap();
        assert!((out.matrix() - linalg::projector(2, 1)).camax() < 1e-16);
    }

    #[test]
    fn two_state_damping_matrix() {
        let g = 0.3;
        let rho = generic_2x2();
        let r = rho.matrix();
        let out = amplitude_damping(2, 1, g, 2).unwrap().apply(&rho).unwrap();
        let s = (1.0_f64 - g).sqrt();
        let expected = CMatrix::from_row_slice(
            2,
            2,
            &[r[(0, 0)] * (1.0 - g), r[(0, 1)] * s, r[(1, 0)] * s, r[(1, 1)] + r[(0, 0)] * g],
        );
        assert!((out.matrix() - expected).camax() < 1e-15);
    }

    #[test]
    fn branch_probabilities() {
        let rho = generic_2x2();
        let zero = amplitude_damping(2, 1, 0.0, 2).unwrap();
        assert_eq!(zero.branch_probability(0, &rho).unwrap(), 0.0);

        let g = 0.25;
        let m = amplitude_damping(2, 1, g, 2).unwrap();
        assert!((m.branch_probability(0, &rho).unwrap() - g * 0.6).abs() < 1e-15);
        let total: f64 = (0..2).map(|n| m.branch_probability(n, &rho).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-15);

        let p2 = site_state(2, 2).unwrap();
        let (state, p) = m.conditioned_state(1, &p2).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert!((state.matrix() - p2.matrix()).camax() < 1e-15);
        assert!(matches!(m.branch_probability(2, &rho), Err(Error::BranchOutOfRange { .. })));
    }

    #[test]
    fn damping_edge_cases() {
        let rho = DensityOperator::maximally_mixed(Basis::sites(4));
        let out = amplitude_damping(2, 1, 0.0, 4).unwrap().apply(&rho).unwrap();
        assert!((out.matrix() - rho.matrix()).camax() < 1e-16);

        let out = amplitude_damping(4, 3, 0.25, 4).unwrap().apply(&site_state(4, 3).unwrap()).unwrap();
        let expected = linalg::projector(4, 2) * re(0.75) + linalg::projector(4, 3) * re(0.25);
        assert!((out.matrix() - expected).camax() < 1e-15);

        assert!(matches!(amplitude_damping(1, 1, 0.1, 2), Err(Error::BadIndices { .. })));
        assert!(matches!(amplitude_damping(3, 1, 0.1, 2), Err(Error::BadIndices { .. })));
        assert!(matches!(amplitude_damping(2, 1, 1.5, 2), Err(Error::BadProbability(_))));
        assert!(matches!(dephasing(2, 1, -0.1, 2), Err(Error::BadProbability(_))));
        assert!(matches!(amplitude_damping_rate(2, 1, 2.0, 1.0, 2), Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn direction_matters() {
        let a = amplitude_damping(2, 1, 0.3, 3).unwrap();
        let b = amplitude_damping(1, 2, 0.3, 3).unwrap();
        assert_ne!(a.operators(), b.operators());
    }

    #[test]
    fn dephasing_damps_only_coherences() {
        let half = std::f64::consts::FRAC_1_SQRT_2;
        let sup = DensityOperator::pure(&[re(half), re(half)], Basis::sites(2)).unwrap();
        let mu = 0.36;
        let out = dephasing(2, 1, mu, 2).unwrap().apply(&sup).unwrap();
        let m = out.matrix();
        assert!((m[(0, 1)] - re(0.5 * (1.0 - mu).sqrt())).norm() < 1e-15);
        assert!((m[(0, 0)] - re(0.5)).norm() < 1e-15);
        assert!((m[(1, 1)] - re(0.5)).norm() < 1e-15);

        let full = dephasing(2, 1, 1.0, 2).unwrap().apply(&sup).unwrap();
        assert!((full.matrix() - linalg::identity(2) * re(0.5)).camax() < 1e-15);

        let none = dephasing(2, 1, 0.0, 2).unwrap().apply(&sup).unwrap();
        assert!((none.matrix() - sup.matrix()).camax() < 1e-15);
    }

    #[test]
    fn unitary_edge_cases() {
        let id = unitary_map(1, 2, 0.3, -1.0, 2.0, 0.0, 2).unwrap();
        assert!((&id.operators()[0] - linalg::identity(2)).camax() < 1e-16);

        let rho = generic_2x2();
        let phases = unitary_map(1, 2, 0.3, -1.4, 0.0, 0.7, 2).unwrap().apply(&rho).unwrap();
        for i in 0..2 {
            assert!((phases.matrix()[(i, i)] - rho.matrix()[(i, i)]).norm() < 1e-14);
        }

        let w = 1.3;
        let dt = std::f64::consts::FRAC_PI_2 / w;
        let flip = unitary_map(1, 2, 0.5, 0.5, w, dt, 2).unwrap().apply(&site_state(2, 2).unwrap()).unwrap();
        assert!((flip.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(unitary_map(1, 2, 0.0, 0.0, 1.0, 1.0, 2).unwrap().completeness_defect() < 1e-12);
    }

    #[test]
    fn alpha_limits() {
        assert_eq!(transition_probability_alpha(0.4, -0.2, 0.0, 3.0), 0.0);
        assert_eq!(transition_probability_alpha(0.0, 0.0, 0.0, 0.0), 0.0);
        for &(w, dt) in &[(1.0, 0.3), (2.5, 1.7), (0.1, 10.0)] {
            let a = transition_probability_alpha(0.7, 0.7, w, dt);
            assert!((a - (w * dt).sin().powi(2)).abs() < 1e-14);
        }
        // series branch
        let a = transition_probability_alpha(0.0, 1e-9, 1e-9, 1e-3);
        assert!((a - 1e-24).abs() < 1e-30);
    }

    #[test]
    fn composition_of_lumped_walk() {
        let (k21, k23, dt) = (2.0, 3.0, 1e-4);
        let m21 = amplitude_damping_rate(2, 1, k21, dt, 3).unwrap();
        let m23 = amplitude_damping_rate(2, 3, k23, dt, 3).unwrap();
        let total = compose(&m23, &m21).unwrap();
        // the double jump vanishes and is pruned
        assert_eq!(total.branch_count(), 3);
        assert!(total.is_preserving());
        assert_eq!(total.duration(), Some(dt));

        let find = |l: &str| total.operators()[total.labels().iter().position(|x| x == l).unwrap()].clone();
        let j12 = linalg::ket_bra(3, 1, 0) * re((k21 * dt).sqrt());
        let j32 = linalg::ket_bra(3, 1, 2) * re((k23 * dt).sqrt());
        let stay = linalg::identity(3)
            - linalg::projector(3, 0) * re(0.5 * k21 * dt)
            - linalg::projector(3, 2) * re(0.5 * k23 * dt);
        assert!((find("jump 1→2") - j12).camax() < 1e-15);
        assert!((find("jump 3→2") - j32).camax() < 1e-15);
        assert!((find("no jump") - stay).camax() < 10.0 * ((k21 + k23) * dt).powi(2));
    }

    #[test]
    fn compose_with_identity_is_neutral() {
        let m = amplitude_damping(2, 1, 0.2, 2).unwrap();
        let c = compose(&KrausMap::identity(2), &m).unwrap();
        assert_eq!(c.operators(), m.operators());
        assert_eq!(c.labels(), m.labels());
        assert!(matches!(
            compose(&m, &KrausMap::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn conditionals_of_lumped_walk() {
        let basis = Basis::lumped_products();
        let (k21, k23, dt) = (1.0, 0.5, 1e-3);
        let s = DensityOperator::pure_basis_state(basis.clone(), &crate::densop::BasisLabel::named("S")).unwrap();
        let out = minimal_basis_conditionals(k21, k23, dt, &s).unwrap();
        assert_eq!(out[2].0, "no jump");
        assert!((out[2].1.matrix() - linalg::projector(3, 0) * re(1.0 - k21 * dt)).camax() < 1e-15);
        assert!((out[0].1.matrix() - linalg::projector(3, 1) * re(k21 * dt)).camax() < 1e-15);

        let p = DensityOperator::pure_basis_state(basis, &crate::densop::BasisLabel::named("P")).unwrap();
        let out = minimal_basis_conditionals(k21, k23, dt, &p).unwrap();
        assert_eq!(out[2].1.matrix(), p.matrix());

        let bad = minimal_basis_conditionals(-1.0, 0.0, dt, &p);
        assert!(matches!(bad, Err(Error::BadRates(_))));
    }

    #[test]
    fn map_params_build() {
        let m = MapParams::Dephasing { j: 3, k: 1, mu: 0.2 }.build(4).unwrap();
        assert_eq!(m.branch_count(), 2);
        assert!(m.is_preserving());
        let one = crate::linalg::ONE;
        assert_eq!(m.operators()[1][(1, 1)], one);
    }
}

// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

//! Density operators over labeled site and occupation bases.
//!
//! Site numbers in labels are 1-based (`ψ_1 … ψ_N`); matrix indices are
//! 0-based positions in the [`Basis`].

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};

/// Maximum tolerated `|ρ_mn − conj(ρ_nm)|`.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Most negative eigenvalue accepted as roundoff.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// `|tr ρ − 1|` allowed for a normalized state.
pub const NORMALIZATION_TOL: f64 = 1e-10;
/// Slack on the admissible trace interval `[0, 1]`.
pub const TRACE_SLACK: f64 = 1e-12;

/// Occupation-number ket `|n_a, n_b, …⟩` over an ordered set of sites with at
/// most one walker present.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Occupation {
    modes: Vec<usize>,
    occupied: Option<usize>,
}

impl Occupation {
    /// `modes` are 1-based site numbers; `occupied` must be one of them.
    pub fn new(modes: Vec<usize>, occupied: Option<usize>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidBasis("occupation ket over no modes".into()));
        }
        if let Some(site) = occupied {
            if !modes.contains(&site) {
                return Err(Error::InvalidBasis(format!(
                    "occupied site {site} is not one of the modes {modes:?}"
                )));
            }
        }
        Ok(Self { modes, occupied })
    }

    /// Build from explicit occupation numbers; rejects more than one walker.
    pub fn from_bits(modes: Vec<usize>, bits: &[u8]) -> Result<Self> {
        if bits.len() != modes.len() {
            return Err(Error::DimensionMismatch {
                expected: modes.len(),
                found: bits.len(),
            });
        }
        let set: Vec<usize> = bits
            .iter()
            .zip(&modes)
            .filter_map(|(&b, &m)| match b {
                0 => None,
                _ => Some(m),
            })
            .collect();
        if bits.iter().any(|&b| b > 1) || set.len() > 1 {
            return Err(Error::InvalidBasis(format!(
                "occupation {bits:?} violates the single-walker rule"
            )));
        }
        Self::new(modes, set.first().copied())
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn occupied(&self) -> Option<usize> {
        self.occupied
    }

    pub fn bits(&self) -> Vec<u8> {
        self.modes
            .iter()
            .map(|&m| u8::from(self.occupied == Some(m)))
            .collect()
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits: Vec<String> = self.bits().iter().map(|b| b.to_string()).collect();
        write!(f, "|{}⟩", bits.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    /// Walker at site `ψ_k` (1-based).
    Site(usize),
    Occupation(Occupation),
    /// Display name such as `S`, `T`, `N`, `P_S`.
    Named(String),
}

impl BasisLabel {
    pub fn named(name: impl Into<String>) -> Self {
        BasisLabel::Named(name.into())
    }

    /// An integer is read as a site number; anything else as a name.
    pub fn parse(text: &str) -> Self {
        let text = text.trim();
        match text.parse::<usize>() {
            Ok(site) => BasisLabel::Site(site),
            Err(_) => BasisLabel::Named(text.to_string()),
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Site(k) => write!(f, "ψ{k}"),
            BasisLabel::Occupation(o) => write!(f, "{o}"),
            BasisLabel::Named(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct BasisEntry {
    label: BasisLabel,
    name: Option<String>,
}

/// Ordered basis; position `i` is matrix index `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    n_sites: usize,
    entries: Vec<BasisEntry>,
}

impl Basis {
    /// `entries` pair a site or occupation label with an optional name.
    /// `n_sites` is the size of the graph the labels refer to.
    pub fn new(n_sites: usize, entries: Vec<(BasisLabel, Option<String>)>) -> Result<Self> {
        if n_sites == 0 || entries.is_empty() {
            return Err(Error::InvalidBasis("empty basis".into()));
        }
        let mut out: Vec<BasisEntry> = Vec::with_capacity(entries.len());
        for (label, name) in entries {
            match &label {
                BasisLabel::Site(k) if *k == 0 || *k > n_sites => {
                    return Err(Error::InvalidBasis(format!(
                        "site {k} outside 1..={n_sites}"
                    )));
                }
                BasisLabel::Occupation(o) if o.modes().iter().any(|&m| m == 0 || m > n_sites) => {
                    return Err(Error::InvalidBasis(format!(
                        "occupation modes {:?} outside 1..={n_sites}",
                        o.modes()
                    )));
                }
                BasisLabel::Named(_) => {
                    return Err(Error::InvalidBasis(
                        "a basis entry needs a site or occupation label".into(),
                    ));
                }
                _ => {}
            }
            if out.iter().any(|e| e.label == label) {
                return Err(Error::InvalidBasis(format!("duplicate label {label}")));
            }
            if let Some(n) = &name {
                if n.parse::<usize>().is_ok() {
                    return Err(Error::InvalidBasis(format!("name `{n}` looks like a site number")));
                }
                if out.iter().any(|e| e.name.as_deref() == Some(n.as_str())) {
                    return Err(Error::InvalidBasis(format!("duplicate name {n}")));
                }
            }
            out.push(BasisEntry { label, name });
        }
        Ok(Self { n_sites, entries: out })
    }

    /// Unnamed sites `ψ_1 … ψ_n`.
    pub fn sites(n: usize) -> Self {
        Self::new(n, (1..=n).map(|k| (BasisLabel::Site(k), None)).collect())
            .expect("site basis is always valid")
    }

    pub fn named_sites(n: usize, names: &[(usize, &str)]) -> Result<Self> {
        let entries = (1..=n)
            .map(|k| {
                let name = names
                    .iter()
                    .find(|(s, _)| *s == k)
                    .map(|(_, nm)| nm.to_string());
                (BasisLabel::Site(k), name)
            })
            .collect();
        Self::new(n, entries)
    }

    /// `S ≡ ψ1, P_S ≡ ψ2, T ≡ ψ3, P_T ≡ ψ4`.
    pub fn radical_pair() -> Self {
        Self::named_sites(4, &[(1, "S"), (2, "P_S"), (3, "T"), (4, "P_T")]).unwrap()
    }

    /// `S ≡ ψ1, P ≡ ψ2, T ≡ ψ3` with both products lumped into one site.
    pub fn lumped_products() -> Self {
        Self::named_sites(3, &[(1, "S"), (2, "P"), (3, "T")]).unwrap()
    }

    /// The two radical-pair states `{S ≡ ψ1, T ≡ ψ3}` with products excluded.
    pub fn minimal() -> Self {
        Self::new(
            4,
            vec![
                (BasisLabel::Site(1), Some("S".into())),
                (BasisLabel::Site(3), Some("T".into())),
            ],
        )
        .unwrap()
    }

    /// Reduced radical-pair space `{N = |0,0⟩, T = |0,1⟩, S = |1,0⟩}` over
    /// occupation numbers `(n_1, n_3)`.
    pub fn reduced_null() -> Self {
        let occ = |o: Option<usize>| BasisLabel::Occupation(Occupation::new(vec![1, 3], o).unwrap());
        Self::new(
            4,
            vec![
                (occ(None), Some("N".into())),
                (occ(Some(3)), Some("T".into())),
                (occ(Some(1)), Some("S".into())),
            ],
        )
        .unwrap()
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn label(&self, index: usize) -> Option<&BasisLabel> {
        self.entries.get(index).map(|e| &e.label)
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.entries.get(index).and_then(|e| e.name.as_deref())
    }

    /// Name if present, otherwise the label rendered as text.
    pub fn display(&self, index: usize) -> String {
        match self.entries.get(index) {
            Some(BasisEntry { name: Some(n), .. }) => n.clone(),
            Some(e) => e.label.to_string(),
            None => format!("#{index}"),
        }
    }

    /// 0-based position of `label` (names resolve through the entry names).
    pub fn index_of(&self, label: &BasisLabel) -> Result<usize> {
        let found = match label {
            BasisLabel::Named(n) => self
                .entries
                .iter()
                .position(|e| e.name.as_deref() == Some(n.as_str())),
            other => self.entries.iter().position(|e| &e.label == other),
        };
        found.ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn index_of_str(&self, text: &str) -> Result<usize> {
        self.index_of(&BasisLabel::parse(text))
    }

    /// 1-based site number of an entry, when it is a site label.
    pub fn site_of(&self, index: usize) -> Option<usize> {
        match self.label(index)? {
            BasisLabel::Site(k) => Some(*k),
            _ => None,
        }
    }

    pub fn sites_vec(&self) -> Vec<usize> {
        (0..self.dim()).filter_map(|i| self.site_of(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceClass {
    Normalized,
    Subnormalized,
}

/// Validity measurements taken when an operator is constructed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub trace: f64,
    pub min_eigenvalue: f64,
    pub hermiticity_defect: f64,
}

impl Diagnostics {
    pub fn measure(m: &CMatrix) -> Self {
        let ev = linalg::hermitian_eigenvalues(m);
        Self {
            trace: linalg::trace(m).re,
            min_eigenvalue: ev.first().copied().unwrap_or(0.0),
            hermiticity_defect: linalg::hermiticity_defect(m),
        }
    }
}

/// A validated (possibly subnormalized) density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
    basis: Basis,
    class: TraceClass,
    diagnostics: Diagnostics,
}

impl DensityOperator {
    pub fn new(entries: CMatrix, basis: Basis, class: TraceClass) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        if entries.nrows() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: entries.nrows(),
            });
        }
        let hermiticity_defect = linalg::hermiticity_defect(&entries);
        if !(hermiticity_defect <= HERMITICITY_TOL) {
            return Err(Error::NonHermitian {
                defect: hermiticity_defect,
            });
        }
        let trace = linalg::trace(&entries).re;
        let trace_ok = match class {
            TraceClass::Normalized => (trace - 1.0).abs() <= NORMALIZATION_TOL,
            TraceClass::Subnormalized => (-TRACE_SLACK..=1.0 + TRACE_SLACK).contains(&trace),
        };
        if !trace_ok {
            return Err(Error::TraceOutOfRange { trace });
        }
        let diagnostics = Diagnostics::measure(&entries);
        if !(diagnostics.min_eigenvalue >= -POSITIVITY_TOL) {
            return Err(Error::NegativeEigenvalue {
                min_eigenvalue: diagnostics.min_eigenvalue,
            });
        }
        Ok(Self {
            matrix: entries,
            basis,
            class,
            diagnostics,
        })
    }

    /// `|label⟩⟨label|`.
    pub fn pure_basis_state(basis: Basis, label: &BasisLabel) -> Result<Self> {
        let i = basis.index_of(label)?;
        let m = linalg::projector(basis.dim(), i);
        Self::new(m, basis, TraceClass::Normalized)
    }

    /// `|ψ⟩⟨ψ|` for a normalized amplitude vector.
    pub fn pure(amplitudes: &[C64], basis: Basis) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: amplitudes.len(),
            });
        }
        let n = amplitudes.len();
        let m = CMatrix::from_fn(n, n, |i, j| amplitudes[i] * amplitudes[j].conj());
        Self::new(m, basis, TraceClass::Normalized)
    }

    /// `Σ_k w_k |k⟩⟨k|`.
    pub fn diagonal(weights: &[f64], basis: Basis, class: TraceClass) -> Result<Self> {
        if weights.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: weights.len(),
            });
        }
        let n = weights.len();
        let m = CMatrix::from_fn(n, n, |i, j| if i == j { linalg::re(weights[i]) } else { linalg::ZERO });
        Self::new(m, basis, class)
    }

    pub fn maximally_mixed(basis: Basis) -> Self {
        let n = basis.dim();
        let w = vec![1.0 / n as f64; n];
        Self::diagonal(&w, basis, TraceClass::Normalized).expect("maximally mixed state is valid")
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn class(&self) -> TraceClass {
        self.class
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn diagnostics(&self) -> Diagnostics {
        self.diagnostics
    }

    pub fn trace(&self) -> f64 {
        self.diagnostics.trace
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.diagnostics.min_eigenvalue
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.diagnostics.hermiticity_defect
    }

    /// `⟨bra|ρ|ket⟩`.
    pub fn matrix_element(&self, bra: &BasisLabel, ket: &BasisLabel) -> Result<C64> {
        let i = self.basis.index_of(bra)?;
        let j = self.basis.index_of(ket)?;
        Ok(self.matrix[(i, j)])
    }

    pub fn element(&self, bra: &str, ket: &str) -> Result<C64> {
        self.matrix_element(&BasisLabel::parse(bra), &BasisLabel::parse(ket))
    }

    pub fn population(&self, label: &str) -> Result<f64> {
        Ok(self.element(label, label)?.re)
    }
}

// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

//! Small dense complex linear-algebra helpers shared by every module.
//!
//! All indices here are 0-based. Vectorization is column-stacking:
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `|i⟩⟨i|` in dimension `dim`.
pub fn projector(dim: usize, i: usize) -> CMatrix {
    ket_bra(dim, i, i)
}

/// `|i⟩⟨j|` in dimension `dim`.
pub fn ket_bra(dim: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    m[(i, j)] = ONE;
    m
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// `max |m_ij - conj(m_ji)|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(m + m†) / 2`, which is exactly Hermitian in floating point.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        out[(i, i)] = re(m[(i, i)].re);
        for j in (i + 1)..n {
            let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    out
}

pub fn trace(m: &CMatrix) -> C64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = hermitian_part(m);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Column-stacking vectorization.
pub fn vectorize(m: &CMatrix) -> CVector {
    // nalgebra storage is column-major, so the raw slice is already vec(m).
    CVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &CVector, dim: usize) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// Matrix exponential (scaling and squaring with Padé approximants).
pub fn expm(m: &CMatrix) -> CMatrix {
    if m.nrows() == 0 {
        return m.clone();
    }
    m.clone().exp()
}

/// `exp(-i H t)` for Hermitian `H`, through its eigendecomposition.
pub fn unitary_from_hamiltonian(h: &CMatrix, t: f64) -> CMatrix {
    let eig = hermitian_part(h).symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = CMatrix::from_diagonal(&CVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&lam| C64::from_polar(1.0, -lam * t)),
    ));
    v * phases * v.adjoint()
}

/// Zero-pad a `sites.len()`-dimensional matrix into `dim`, placing row/col `a`
/// at `sites[a]`.
pub fn embed(m: &CMatrix, sites: &[usize], dim: usize) -> CMatrix {
    let mut out = CMatrix::zeros(dim, dim);
    for (a, &sa) in sites.iter().enumerate() {
        for (b, &sb) in sites.iter().enumerate() {
            out[(sa, sb)] = m[(a, b)];
        }
    }
    out
}

/// The `sites × sites` block of `m`.
pub fn block(m: &CMatrix, sites: &[usize]) -> CMatrix {
    let r = sites.len();
    CMatrix::from_fn(r, r, |a, b| m[(sites[a], sites[b])])
}

/// Isometry whose columns are the basis vectors `sites` of a `dim`-space.
pub fn isometry(sites: &[usize], dim: usize) -> CMatrix {
    let mut e = CMatrix::zeros(dim, sites.len());
    for (a, &s) in sites.iter().enumerate() {
        e[(s, a)] = ONE;
    }
    e
}

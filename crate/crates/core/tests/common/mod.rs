// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use qwkin::linalg::{CMatrix, C64};
use qwkin::{Basis, DensityOperator, TraceClass};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(n: usize, m: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(n, m, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Hermitian with entries of order one; not necessarily positive.
pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
    let a = random_complex(n, n, rng);
    (&a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// `A A† / tr(A A†)`, a full-rank state almost surely.
pub fn random_density_matrix(n: usize, rng: &mut impl Rng) -> CMatrix {
    let a = random_complex(n, n, rng);
    let p = &a * a.adjoint();
    let tr: f64 = (0..n).map(|i| p[(i, i)].re).sum();
    qwkin::linalg::hermitian_part(&(p / C64::new(tr, 0.0)))
}

pub fn random_state(basis: Basis, rng: &mut impl Rng) -> DensityOperator {
    let m = random_density_matrix(basis.dim(), rng);
    DensityOperator::new(m, basis, TraceClass::Normalized).expect("random state is valid")
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

/// Radical-pair state with zero coherences between `{S, T}` and the products.
pub fn random_decoupled_rp_state(rng: &mut impl Rng) -> DensityOperator {
    let rp = random_density_matrix(2, rng);
    let prod = random_density_matrix(2, rng);
    let w: f64 = rng.random_range(0.05..0.95);
    let mut m = CMatrix::zeros(4, 4);
    let rp_sites = [0, 2];
    let prod_sites = [1, 3];
    for a in 0..2 {
        for b in 0..2 {
            m[(rp_sites[a], rp_sites[b])] = rp[(a, b)] * w;
            m[(prod_sites[a], prod_sites[b])] = prod[(a, b)] * (1.0 - w);
        }
    }
    DensityOperator::new(m, Basis::radical_pair(), TraceClass::Normalized).expect("valid state")
}

// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

//! Build the three map families, compose them and inspect the branches.
//!
//! ```text
//! cargo run --example kraus_maps
//! ```

use qwkin::maps;
use qwkin::{Basis, BasisLabel, DensityOperator};

fn main() -> qwkin::Result<()> {
    let dt = 1e-8;
    let (k21, k23) = (1e6, 2e5);

    // Two recombination channels feeding the same product site.
    let m21 = maps::amplitude_damping_rate(2, 1, k21, dt, 3)?;
    let m23 = maps::amplitude_damping_rate(2, 3, k23, dt, 3)?;
    let step = maps::compose(&m23, &m21)?;
    println!("composed step: {} branches, completeness defect {:.1e}", step.branch_count(), step.completeness_defect());

    let a = std::f64::consts::FRAC_1_SQRT_2;
    let rho = DensityOperator::pure(&[a.into(), 0.0.into(), a.into()], Basis::lumped_products())?;
    for (n, label) in step.labels().iter().enumerate() {
        let (_, p) = step.conditioned_state(n, &rho)?;
        println!("  {label:<10} p = {p:.6e}");
    }

    // Dephasing keeps populations and shrinks the coherence by sqrt(1 - mu).
    let deph = maps::dephasing(1, 3, 0.19, 3)?;
    let out = deph.apply(&rho)?;
    println!("dephased rho_13 = {:.6}", out.matrix()[(0, 2)].re);

    // A resonant unitary swaps the walker after a quarter period.
    let omega = 1e6;
    let dt_swap = std::f64::consts::FRAC_PI_2 / omega;
    let u = maps::unitary_map(1, 3, 0.0, 0.0, omega, dt_swap, 3)?;
    let t = DensityOperator::pure_basis_state(Basis::lumped_products(), &BasisLabel::named("T"))?;
    println!(
        "after swap: p(S) = {:.12}, alpha = {:.12}",
        u.apply(&t)?.population("S")?,
        maps::transition_probability_alpha(0.0, 0.0, omega, dt_swap)
    );
    Ok(())
}

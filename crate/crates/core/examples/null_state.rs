// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

//! Trace out the product sites and follow the closed three-state model
//! with its null state.

use qwkin::generators;
use qwkin::radical_pair::{self as rp, RPRates};
use qwkin::series::uniform_times;

fn main() -> qwkin::Result<()> {
    let r = RPRates::new(1e6, 3e5)?;
    let full = rp::qw_full(&r);
    let reduced = rp::qw_reduced_null(&r);

    let a = std::f64::consts::FRAC_1_SQRT_2;
    let rho0 = qwkin::DensityOperator::pure(&[a.into(), 0.0.into(), a.into(), 0.0.into()], qwkin::Basis::radical_pair())?;
    let rho0_r = rp::reduce_state(&rho0)?;

    let times = uniform_times(5e-6, 6);
    let a_full = generators::propagate_exact_series(&full, &rho0, &times)?;
    let a_red = generators::propagate_exact_series(&reduced, &rho0_r, &times)?;

    println!("{:>9} {:>10} {:>10} {:>10} {:>10}", "t (s)", "rho_NN", "rho_SS", "|rho_ST|", "gap");
    for ((t, f), r) in times.iter().zip(a_full.snapshots()).zip(a_red.snapshots()) {
        let traced = rp::partial_trace_products(f.matrix())?;
        let gap = (&traced - r.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let m = r.matrix();
        println!(
            "{t:>9.1e} {:>10.6} {:>10.6} {:>10.6} {gap:>10.1e}",
            m[(rp::NULL_N, rp::NULL_N)].re,
            m[(rp::NULL_S, rp::NULL_S)].re,
            m[(rp::NULL_S, rp::NULL_T)].norm()
        );
    }
    Ok(())
}

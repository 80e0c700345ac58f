// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

//! Extra singlet-triplet dephasing in the experiment model. Both directions
//! damp `rho_ST` alike; they differ only on radical-product coherences.

use qwkin::generators;
use qwkin::radical_pair::{self as rp, DephasingDirection, RPRates};
use qwkin::series::uniform_times;
use qwkin::{Basis, DensityOperator, TraceClass};

fn max_gap(r: &RPRates, rho0: &DensityOperator) -> qwkin::Result<f64> {
    let times = uniform_times(5e-6, 26);
    let a = generators::propagate_exact_series(&rp::experiment_model_with(r, DephasingDirection::ThreeOne), rho0, &times)?;
    let b = generators::propagate_exact_series(&rp::experiment_model_with(r, DephasingDirection::OneThree), rho0, &times)?;
    Ok(a.snapshots()
        .iter()
        .zip(b.snapshots())
        .flat_map(|(x, y)| (x.matrix() - y.matrix()).iter().map(|z| z.norm()).collect::<Vec<_>>())
        .fold(0.0, f64::max))
}

fn main() -> qwkin::Result<()> {
    let r = RPRates::new(1e6, 2e5)?.with_q(5e5)?;
    println!("S-T dephasing rate with q: {:.4e} 1/s", rp::st_dephasing_rate(&rp::experiment_model(&r), 0, 2)?);

    let mixed = DensityOperator::diagonal(&[0.5, 0.0, 0.5, 0.0], Basis::radical_pair(), TraceClass::Normalized)?;
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let st = DensityOperator::pure(&[a.into(), 0.0.into(), a.into(), 0.0.into()], Basis::radical_pair())?;
    let s_ps = DensityOperator::pure(&[a.into(), a.into(), 0.0.into(), 0.0.into()], Basis::radical_pair())?;

    println!("direction gap, mixed start:  {:.2e}", max_gap(&r, &mixed)?);
    println!("direction gap, S+T start:    {:.2e}", max_gap(&r, &st)?);
    println!("direction gap, S+P_S start:  {:.2e}", max_gap(&r, &s_ps)?);

    let driven = r.with_coherent(0.0, 3e6, 1e6)?;
    println!("direction gap, mixed start, driven: {:.2e}", max_gap(&driven, &mixed)?);
    Ok(())
}

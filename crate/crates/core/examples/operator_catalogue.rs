// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

//! Singlet-triplet dephasing rates of every reaction operator, checked
//! against a measured rate.

use qwkin::radical_pair::{self as rp, RPRates};

fn main() -> qwkin::Result<()> {
    let (ks, kt) = (2e6, 1e4);
    let measured = 1.5e6;
    let r = RPRates::new(ks, kt)?;

    for entry in rp::catalogue(&r) {
        println!("{:<20} dim {}  {}", entry.name, entry.generator.dim(), entry.generator.trace_behavior().as_str());
    }

    let report = rp::maeda_consistency_check(measured, ks, kt)?;
    println!("\nmeasured S-T dephasing: {measured:e} 1/s");
    for row in &report.rows {
        let verdict = match row.consistent {
            Some(true) => "ok",
            Some(false) => "exceeds measurement",
            None => "-",
        };
        println!("{:<20} {:>12.4e}  {verdict}", row.operator, row.predicted_rate);
    }
    println!("inconsistent: {:?}", report.inconsistent());
    Ok(())
}

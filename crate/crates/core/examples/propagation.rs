// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

//! Exact propagation through the Liouvillian next to step-by-step Kraus maps.

use qwkin::generators::{self, StepGuard};
use qwkin::network::{self, BuiltinGraph};
use qwkin::radical_pair as rp;
use qwkin::series::uniform_times;

fn main() -> qwkin::Result<()> {
    let graph = network::builtin_graph(BuiltinGraph::StandardRP).bind(&network::bindings(&[("kS", 1e6), ("kT", 1e5)]))?;
    let g = graph.total_generator();
    println!("generator is {}", g.trace_behavior().as_str());

    let times = uniform_times(4e-6, 9);
    let rho0 = rp::singlet_state();
    let exact = generators::propagate_exact_series(&g, &rho0, &times)?;

    println!("{:>10} {:>12} {:>12} {:>12}", "t (s)", "exact rho11", "dt=1e-8", "dt=1e-9");
    let coarse = generators::propagate_stepwise(&graph, &rho0, &times, 1e-8, StepGuard::default())?;
    let fine = generators::propagate_stepwise(&graph, &rho0, &times, 1e-9, StepGuard::default())?;
    for (i, t) in times.iter().enumerate() {
        let pick = |ts: &qwkin::TimeSeries| ts.snapshots()[i].matrix()[(0, 0)].re;
        println!("{t:>10.2e} {:>12.8} {:>12.8} {:>12.8}", pick(&exact), pick(&coarse), pick(&fine));
    }

    let last = exact.diagnostics().last().expect("non-empty");
    println!("final trace {:.15}, min eigenvalue {:.2e}", last.trace, last.min_eigenvalue);
    Ok(())
}

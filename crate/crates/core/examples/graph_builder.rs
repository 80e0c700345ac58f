// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

//! Declare a reaction graph edge by edge and look at its generator.

use qwkin::network::{EdgeKind, ReactionGraph};
use qwkin::{generators, Basis, BasisLabel, DensityOperator};

fn main() -> qwkin::Result<()> {
    // donor <-> bridge coherent hop, bridge -> acceptor loss, bridge dephasing
    let graph = ReactionGraph::new(
        3,
        vec![(1, "D".into()), (2, "B".into()), (3, "A".into())],
        vec![
            EdgeKind::Coherent { j: 1, k: 2, omega_j: 0.0, omega_k: 0.5, coupling: 1.0 },
            EdgeKind::Damping { from: 2, to: 3, rate: 0.4 },
            EdgeKind::Dephasing { j: 1, k: 2, rate: 0.2 },
        ],
    )?;
    for e in graph.edges() {
        println!("edge: {e}");
    }

    let g = graph.total_generator();
    let l = g.liouvillian();
    println!("Liouvillian {}x{}, {}", l.matrix().nrows(), l.matrix().ncols(), g.trace_behavior().as_str());

    let basis: Basis = graph.basis();
    let rho0 = DensityOperator::pure_basis_state(basis, &BasisLabel::named("D"))?;
    for t in [0.0, 2.0, 5.0, 10.0, 20.0] {
        let rho = generators::propagate_exact(&g, &rho0, t)?;
        println!(
            "t = {t:>4}: D {:.4}  B {:.4}  A {:.4}",
            rho.population("D")?,
            rho.population("B")?,
            rho.population("A")?
        );
    }

    let step = graph.step_map(1e-3)?;
    println!("one step of 1e-3: {} Kraus operators", step.branch_count());
    Ok(())
}

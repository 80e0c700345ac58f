// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite: one PASS/FAIL line per criterion, with its runtime.

mod common;

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use qwkin::generators::{self, Generator, StepMaps};
use qwkin::linalg::{self, CMatrix, C64};
use qwkin::maps::{self, KrausMap};
use qwkin::network::{self, BuiltinGraph, ReactionGraph};
use qwkin::radical_pair::{self as rp, DephasingDirection, RPRates};
use qwkin::series::uniform_times;
use qwkin::{Basis, DensityOperator, TraceClass};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---- hand-written matrices --------------------------------------------------

/// Four-site quantum-walk increment with `k21` and `k43`.
fn gold_qw_full(r: &CMatrix, k21: f64, k43: f64) -> CMatrix {
    let p = |i: usize, j: usize| r[(i - 1, j - 1)];
    let h = 0.5;
    let s = k21 + k43;
    let z = C64::new(0.0, 0.0);
    CMatrix::from_row_slice(
        4,
        4,
        &[
            p(1, 1) * -k21, p(1, 2) * (-h * k21), p(1, 3) * (-h * s), p(1, 4) * (-h * k21),
            p(2, 1) * (-h * k21), p(1, 1) * k21, p(2, 3) * (-h * k43), z,
            p(3, 1) * (-h * s), p(3, 2) * (-h * k43), p(3, 3) * -k43, p(3, 4) * (-h * k43),
            p(4, 1) * (-h * k21), z, p(4, 3) * (-h * k43), p(3, 3) * k43,
        ],
    )
}

/// Three-site lumped-product increment, rows and columns ordered `(P, T, S)`
/// for a site-ordered input `ψ1 = S, ψ2 = P, ψ3 = T`.
fn gold_lumped(r: &CMatrix, k21: f64, k23: f64) -> CMatrix {
    let p = |i: usize, j: usize| r[(i - 1, j - 1)];
    let h = 0.5;
    let s = k21 + k23;
    CMatrix::from_row_slice(
        3,
        3,
        &[
            p(1, 1) * k21 + p(3, 3) * k23, p(2, 3) * (-h * k23), p(2, 1) * (-h * k21),
            p(3, 2) * (-h * k23), p(3, 3) * -k23, p(3, 1) * (-h * s),
            p(1, 2) * (-h * k21), p(1, 3) * (-h * s), p(1, 1) * -k21,
        ],
    )
}

/// Reduced increment on `(N, T, S)` from a four-site input.
fn gold_reduced(r: &CMatrix, k21: f64, k43: f64) -> CMatrix {
    let p = |i: usize, j: usize| r[(i - 1, j - 1)];
    let h = 0.5;
    let s = k21 + k43;
    let z = C64::new(0.0, 0.0);
    CMatrix::from_row_slice(
        3,
        3,
        &[
            p(1, 1) * k21 + p(3, 3) * k43, z, z,
            z, p(3, 3) * -k43, p(3, 1) * (-h * s),
            z, p(1, 3) * (-h * s), p(1, 1) * -k21,
        ],
    )
}

/// Symmetric dephasing between sites 1 and 3.
fn gold_x31(r: &CMatrix, q: f64) -> CMatrix {
    let p = |i: usize, j: usize| r[(i - 1, j - 1)];
    let h = 0.5;
    let z = C64::new(0.0, 0.0);
    CMatrix::from_row_slice(
        4,
        4,
        &[
            z, p(1, 2) * (-h * q), p(1, 3) * -q, p(1, 4) * (-h * q),
            p(2, 1) * (-h * q), z, p(2, 3) * (-h * q), z,
            p(3, 1) * -q, p(3, 2) * (-h * q), z, p(3, 4) * (-h * q),
            p(4, 1) * (-h * q), z, p(4, 3) * (-h * q), z,
        ],
    )
}

fn lumped_graph(ks: f64, kt: f64) -> ReactionGraph {
    network::builtin_graph(BuiltinGraph::LumpedProducts)
        .bind(&network::bindings(&[("kS", ks), ("kT", kt)]))
        .unwrap()
}

// ---- criteria -----------------------------------------------------------------

fn c1_golden_matrices() -> Outcome {
    let mut rng = rng(1);
    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let ks = rng.random_range(0.0..5.0);
        let kt = rng.random_range(0.0..5.0);
        let q = rng.random_range(0.0..5.0);
        let r = RPRates::new(ks, kt).unwrap();
        let rho4 = random_hermitian(4, &mut rng);
        let rho3 = random_hermitian(3, &mut rng);

        let d = rp::qw_full(&r).act(&rho4).unwrap();
        worst = worst.max(max_diff(&d, &gold_qw_full(&rho4, ks, kt)));

        let d3 = lumped_graph(ks, kt).total_generator().act(&rho3).unwrap();
        let order = [1, 2, 0];
        let permuted = CMatrix::from_fn(3, 3, |a, b| d3[(order[a], order[b])]);
        worst = worst.max(max_diff(&permuted, &gold_lumped(&rho3, ks, kt)));

        let red = rp::partial_trace_products(&d).unwrap();
        worst = worst.max(max_diff(&red, &gold_reduced(&rho4, ks, kt)));

        let x = rp::symmetric_dephasing(q).unwrap().act(&rho4).unwrap();
        worst = worst.max(max_diff(&x, &gold_x31(&rho4, q)));
    }
    check(worst <= 1e-12, || format!("max error {worst:e}"))?;
    Ok(format!("200 inputs, max error {worst:.1e}"))
}

fn c2_operator_identities() -> Outcome {
    let mut rng = rng(2);
    let (mut e1, mut e2) = (0.0_f64, 0.0_f64);
    for _ in 0..1000 {
        let r = RPRates::new(rng.random_range(0.0..5.0), rng.random_range(0.0..5.0)).unwrap();
        let rho = random_hermitian(2, &mut rng);
        let h = rp::haberkorn(&r).act(&rho).unwrap();
        e1 = e1.max(max_diff(&rp::qw_reduced_minimal(&r).act(&rho).unwrap(), &h));
        let k = rp::kominis(&r).act(&rho).unwrap();
        e2 = e2.max(max_diff(&rp::kominis_via_dephasing(&r).act(&rho).unwrap(), &k));
    }
    check(e1 <= 1e-14 && e2 <= 1e-14, || format!("errors {e1:e}, {e2:e}"))?;
    Ok(format!("1000 inputs, max errors {e1:.1e} / {e2:.1e}"))
}

fn c3_dephasing_rate_table() -> Outcome {
    let mut worst = 0.0_f64;
    let mut ratio_worst = 0.0_f64;
    let grid: Vec<f64> = (0..20).map(|i| 1e7 * i as f64 / 19.0).collect();
    for &ks in &grid {
        for &kt in &grid {
            let r = RPRates::new(ks, kt).unwrap();
            let half = (ks + kt) / 2.0;
            let rel = |got: f64, want: f64| {
                if want == 0.0 {
                    got.abs()
                } else {
                    ((got - want) / want).abs()
                }
            };
            let h = rp::st_dephasing_rate(&rp::haberkorn(&r), rp::MIN_S, rp::MIN_T).map_err(|e| e.to_string())?;
            let k = rp::st_dephasing_rate(&rp::kominis(&r), rp::MIN_S, rp::MIN_T).map_err(|e| e.to_string())?;
            let q = rp::st_dephasing_rate(&rp::qw_full(&r), 0, 2).map_err(|e| e.to_string())?;
            let jh = rp::st_dephasing_rate(&rp::jones_hore(&r), rp::MIN_S, rp::MIN_T).map_err(|e| e.to_string())?;
            worst = worst.max(rel(h, half)).max(rel(k, half)).max(rel(q, half)).max(rel(jh, ks + kt));
            if ks + kt > 0.0 {
                ratio_worst = ratio_worst.max((jh / h - 2.0).abs());
            }
        }
    }
    check(worst <= 1e-12 && ratio_worst <= 1e-12, || {
        format!("relative error {worst:e}, ratio deviation {ratio_worst:e}")
    })?;
    Ok(format!("400 rate pairs, max relative error {worst:.1e}, JH/H = 2 within {ratio_worst:.1e}"))
}

fn random_pair(dim: usize, rng: &mut impl Rng) -> (usize, usize) {
    let j = rng.random_range(1..=dim);
    let mut k = rng.random_range(1..=dim);
    while k == j {
        k = rng.random_range(1..=dim);
    }
    (j, k)
}

fn random_map(dim: usize, rng: &mut impl Rng) -> KrausMap {
    let (j, k) = random_pair(dim, rng);
    match rng.random_range(0..3) {
        0 => {
            let g = if rng.random_bool(0.1) { 1.0 } else { rng.random_range(0.0..=1.0) };
            maps::amplitude_damping(j, k, g, dim).unwrap()
        }
        1 => {
            let m = if rng.random_bool(0.1) { 0.0 } else { rng.random_range(0.0..=1.0) };
            maps::dephasing(j, k, m, dim).unwrap()
        }
        _ => maps::unitary_map(
            j,
            k,
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
            rng.random_range(0.0..3.0),
            dim,
        )
        .unwrap(),
    }
}

fn c4_kraus_validity() -> Outcome {
    let mut rng = rng(4);
    let mut worst = 0.0_f64;
    let mut composed = 0;
    let mut pruned = 0;
    for draw in 0..10_000 {
        let dim = rng.random_range(2..=6);
        let map = match draw % 4 {
            0 | 1 => random_map(dim, &mut rng),
            2 => {
                composed += 1;
                let n = rng.random_range(2..=3);
                let parts: Vec<KrausMap> = (0..n).map(|_| random_map(dim, &mut rng)).collect();
                maps::compose_sequence(dim, &parts).unwrap()
            }
            _ => {
                // two jumps into the same site: the double-jump product vanishes
                let dt = rng.random_range(0.0..0.1);
                let k21 = rng.random_range(0.0..=1.0);
                let k23 = rng.random_range(0.0..=1.0);
                let m21 = maps::amplitude_damping_rate(2, 1, k21, dt, 3).unwrap();
                let m23 = maps::amplitude_damping_rate(2, 3, k23, dt, 3).unwrap();
                let m = maps::compose(&m23, &m21).unwrap();
                if k21 * dt > 0.0 && k23 * dt > 0.0 {
                    pruned += 1;
                    check(m.branch_count() == 3, || format!("{} branches after pruning", m.branch_count()))?;
                }
                m
            }
        };
        check(map.is_preserving(), || format!("draw {draw}: map not flagged preserving"))?;
        worst = worst.max(map.completeness_defect());
    }
    check(worst <= 1e-12, || format!("completeness defect {worst:e}"))?;
    Ok(format!("10000 maps ({composed} composed, {pruned} pruned), max defect {worst:.1e}"))
}

struct Case {
    name: &'static str,
    builder: Box<dyn StepMaps>,
    generator: Generator,
    scale: f64,
}

fn graph_case(name: &'static str, which: BuiltinGraph, pairs: &[(&str, f64)]) -> Case {
    let g = network::builtin_graph(which).bind(&network::bindings(pairs)).unwrap();
    let scale = pairs.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    Case { name, generator: g.total_generator(), builder: Box::new(g), scale }
}

fn c5_map_generator_consistency() -> Outcome {
    let cases = vec![
        {
            let g = Generator::amplitude_damping(2, 1, 1.7, 3).unwrap();
            Case { name: "damping", builder: Box::new(g.clone()), generator: g, scale: 1.7 }
        },
        {
            let g = Generator::dephasing(3, 1, 0.9, 4).unwrap();
            Case { name: "dephasing", builder: Box::new(g.clone()), generator: g, scale: 0.9 }
        },
        {
            let g = Generator::unitary(3, 1, 0.4, -1.1, 1.3, 4).unwrap();
            Case { name: "unitary", builder: Box::new(g.clone()), generator: g, scale: 1.3 }
        },
        graph_case("StandardRP", BuiltinGraph::StandardRP, &[("kS", 1.0), ("kT", 0.3)]),
        graph_case("LumpedProducts", BuiltinGraph::LumpedProducts, &[("kS", 1.0), ("kT", 0.6)]),
        graph_case(
            "ExperimentRP",
            BuiltinGraph::ExperimentRP,
            &[("kS", 1.0), ("kT", 0.2), ("q", 0.5), ("omega_S", 0.3), ("omega_T", -0.8), ("Omega", 0.7)],
        ),
        graph_case("SymmetricDephasingRP", BuiltinGraph::SymmetricDephasingRP, &[("kS", 1.0), ("kT", 0.2), ("q", 0.5)]),
    ];
    let mut rng = rng(5);
    let mut slopes = Vec::new();
    for case in &cases {
        let rho = random_density_matrix(case.generator.dim(), &mut rng);
        let g_rho = case.generator.act(&rho).unwrap();
        let dts: Vec<f64> = [1e-3, 1e-4, 1e-5, 1e-6].iter().map(|d| d / case.scale).collect();
        let errs: Vec<f64> = dts
            .iter()
            .map(|&dt| {
                let seq = case.builder.step_maps(dt).unwrap();
                let fd = generators::finite_difference(&seq, &rho, dt).unwrap();
                max_diff(&fd, &g_rho)
            })
            .collect();
        let slope = loglog_slope(&dts, &errs);
        check((0.9..=1.1).contains(&slope), || format!("{}: slope {slope:.3}, errors {errs:?}", case.name))?;
        slopes.push(format!("{} {slope:.3}", case.name));
    }
    Ok(format!("slopes: {}", slopes.join(", ")))
}

fn c6_propagation_physics() -> Outcome {
    let (ks, kt) = (1e6, 1e4);
    let g = rp::qw_full(&RPRates::new(ks, kt).unwrap());
    let times = uniform_times(5.0 / ks, 50);
    let ts = generators::propagate_exact_series(&g, &rp::singlet_state(), &times).map_err(|e| e.to_string())?;
    let (mut pop, mut tr, mut min_eig) = (0.0_f64, 0.0_f64, f64::INFINITY);
    for ((&t, s), d) in ts.times().iter().zip(ts.snapshots()).zip(ts.diagnostics()) {
        let m = s.matrix();
        let e = (-ks * t).exp();
        pop = pop.max((m[(0, 0)].re - e).abs()).max((m[(1, 1)].re - (1.0 - e)).abs());
        tr = tr.max((d.trace - 1.0).abs());
        min_eig = min_eig.min(d.min_eigenvalue);
    }
    check(pop <= 1e-10 && tr <= 1e-10 && min_eig >= -1e-8, || {
        format!("population error {pop:e}, trace error {tr:e}, min eigenvalue {min_eig:e}")
    })?;
    Ok(format!("50 samples, population error {pop:.1e}, trace error {tr:.1e}, min eig {min_eig:.1e}"))
}

fn alpha_oracle(wj: f64, wk: f64, omega: f64, dt: f64) -> f64 {
    let h = maps::two_site_hamiltonian(1, 2, wj, wk, omega, 2).unwrap();
    let u = linalg::expm(&(h * C64::new(0.0, -dt)));
    u[(0, 1)].norm_sqr()
}

fn c7_alpha_oracle() -> Outcome {
    let mut rng = rng(7);
    let mut worst = 0.0_f64;
    let mut near_zero = 0;
    for draw in 0..10_000 {
        let (wj, wk, om, dt) = match draw % 5 {
            // generic
            0 | 1 => (
                rng.random_range(-10.0..10.0),
                rng.random_range(-10.0..10.0),
                rng.random_range(-5.0..5.0),
                rng.random_range(0.0..3.0),
            ),
            // degenerate energies
            2 => {
                let w = rng.random_range(-10.0..10.0);
                (w, w, rng.random_range(-5.0..5.0), rng.random_range(0.0..3.0))
            }
            // 2ζΔt near or below the series threshold
            3 => {
                near_zero += 1;
                let w = rng.random_range(-1.0..1.0);
                let tiny = 10f64.powf(rng.random_range(-12.0..-5.0));
                (w, w + tiny * rng.random_range(-1.0..1.0), tiny * rng.random_range(-1.0..1.0), rng.random_range(0.0..3.0))
            }
            // uncoupled or zero duration
            _ => {
                if rng.random_bool(0.5) {
                    (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0), 0.0, rng.random_range(0.0..3.0))
                } else {
                    (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0), rng.random_range(-5.0..5.0), 0.0)
                }
            }
        };
        let a = maps::transition_probability_alpha(wj, wk, om, dt);
        check((0.0..=1.0).contains(&a), || format!("α = {a} outside [0, 1]"))?;
        let err = (a - alpha_oracle(wj, wk, om, dt)).abs();
        check(err <= 1e-10, || format!("ω_j={wj}, ω_k={wk}, Ω={om}, Δt={dt}: error {err:e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("10000 draws ({near_zero} near ζ→0), max error {worst:.1e}"))
}

fn c8_null_state_closure() -> Outcome {
    let (ks, kt) = (2e5, 7e4);
    let r = RPRates::new(ks, kt).unwrap();
    let g = rp::qw_reduced_null(&r);
    let s0 = DensityOperator::diagonal(&[0.0, 0.0, 1.0], Basis::reduced_null(), TraceClass::Normalized).unwrap();
    let times = uniform_times(5.0 / ks, 50);
    let ts = generators::propagate_exact_series(&g, &s0, &times).map_err(|e| e.to_string())?;
    let mut pop = 0.0_f64;
    for (&t, s) in ts.times().iter().zip(ts.snapshots()) {
        pop = pop.max((s.matrix()[(rp::NULL_N, rp::NULL_N)].re - (1.0 - (-ks * t).exp())).abs());
    }
    check(pop <= 1e-10, || format!("ρ_NN error {pop:e}"))?;

    let mut rng = rng(8);
    let mut comm = 0.0_f64;
    for _ in 0..1000 {
        let r = RPRates::new(rng.random_range(0.0..5.0), rng.random_range(0.0..5.0)).unwrap();
        let rho = random_decoupled_rp_state(&mut rng);
        let lhs = rp::partial_trace_products(&rp::qw_full(&r).act(rho.matrix()).unwrap()).unwrap();
        let reduced = rp::partial_trace_products(rho.matrix()).unwrap();
        let rhs = rp::qw_reduced_null(&r).act(&reduced).unwrap();
        comm = comm.max(max_diff(&lhs, &rhs));
    }
    check(comm <= 1e-12, || format!("commutation error {comm:e}"))?;
    Ok(format!("ρ_NN error {pop:.1e}, partial-trace commutation error {comm:.1e} over 1000 states"))
}

fn c9_asymmetry_irrelevance() -> Outcome {
    let mut rng = rng(9);
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let ks = rng.random_range(1e5..1e6);
        let kt = rng.random_range(1e4..1e6);
        let q = rng.random_range(0.0..1e6);
        let r = RPRates::new(ks, kt)
            .unwrap()
            .with_q(q)
            .unwrap()
            .with_coherent(rng.random_range(-1e6..1e6), rng.random_range(-1e6..1e6), 0.0)
            .unwrap();
        let w: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|x| x / total).collect();
        let rho0 = DensityOperator::diagonal(&w, Basis::radical_pair(), TraceClass::Normalized).unwrap();
        let times = uniform_times(5.0 * std::f64::consts::LN_2 / ks.min(kt), 50);
        let a = generators::propagate_exact_series(&rp::experiment_model_with(&r, DephasingDirection::ThreeOne), &rho0, &times)
            .map_err(|e| e.to_string())?;
        let b = generators::propagate_exact_series(&rp::experiment_model_with(&r, DephasingDirection::OneThree), &rho0, &times)
            .map_err(|e| e.to_string())?;
        for (x, y) in a.snapshots().iter().zip(b.snapshots()) {
            worst = worst.max(max_diff(x.matrix(), y.matrix()));
        }
    }
    check(worst <= 1e-12, || format!("trajectory difference {worst:e}"))?;
    Ok(format!("10 diagonal initial states, max difference {worst:.1e}"))
}

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_qwkin"))
}

fn c10_cli_determinism() -> Outcome {
    let config = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/reference.toml");
    let mut csvs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let status = Command::new(bin())
            .args(["simulate", "--config"])
            .arg(&config)
            .arg("--output-dir")
            .arg(dir.path())
            .output()
            .map_err(|e| e.to_string())?;
        check(status.status.success(), || format!("simulate failed: {}", String::from_utf8_lossy(&status.stderr)))?;
        csvs.push(std::fs::read(dir.path().join("reference.timeseries.csv")).map_err(|e| e.to_string())?);
    }
    check(csvs[0] == csvs[1], || "CSV outputs differ between runs".into())?;

    let out = Command::new(bin())
        .args(["rates", "--ks", "1", "--kt", "0", "--measured", "0.7", "--json"])
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.success(), || "rates failed".into())?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let flagged: Vec<&str> = v["rows"]
        .as_array()
        .ok_or("rows missing")?
        .iter()
        .filter(|r| r["consistent"] == serde_json::Value::Bool(false))
        .filter_map(|r| r["operator"].as_str())
        .collect();
    check(flagged == ["jones_hore"], || format!("flagged {flagged:?}"))?;
    Ok(format!("{} CSV bytes identical across runs; flagged {flagged:?}", csvs[0].len()))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "golden matrices", Duration::from_secs(1), c1_golden_matrices),
        (2, "operator identities", Duration::from_secs(1), c2_operator_identities),
        (3, "dephasing-rate table", Duration::from_secs(1), c3_dephasing_rate_table),
        (4, "Kraus validity", Duration::from_secs(10), c4_kraus_validity),
        (5, "map-generator consistency", Duration::from_secs(10), c5_map_generator_consistency),
        (6, "propagation physics", Duration::from_secs(1), c6_propagation_physics),
        (7, "alpha oracle", Duration::from_secs(10), c7_alpha_oracle),
        (8, "null-state closure", Duration::from_secs(1), c8_null_state_closure),
        (9, "asymmetry irrelevance", Duration::from_secs(1), c9_asymmetry_irrelevance),
        (10, "CLI determinism", Duration::from_secs(1), c10_cli_determinism),
    ];
    let mut failed = 0;
    for (n, name, budget, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let verdict = match outcome {
            Ok(detail) if elapsed <= budget => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("{detail}; runtime over budget {budget:?}")),
            Err(why) => ("FAIL", why),
        };
        if verdict.0 == "FAIL" {
            failed += 1;
        }
        println!("{} criterion {n:>2} ({name}): {} [{:.3} s]", verdict.0, verdict.1, elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}

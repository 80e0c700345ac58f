// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

//! Parse a scenario, run it and write its outputs, as `qwkin simulate` does.

use qwkin::scenario;

const CONFIG: &str = r#"
schema_version = 1
outputs = ["timeseries", "consistency-report"]

[graph]
builtin = "StandardRP"

[rates]
kS = "1e6 1/s"
kT = "1e4 1/s"

[initial]
superposition = { S = 0.7071067811865476, T = 0.7071067811865476 }

[integration]
method = "exact"
t_final = "3e-6 s"
samples = 7

[report]
measured_rate = "6e5 1/s"
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = scenario::parse_config(CONFIG)?;
    for line in scenario::describe_graph(&cfg.graph) {
        println!("{line}");
    }

    let out = scenario::run(&cfg)?;
    print!("{}", scenario::timeseries_csv(&out.series));
    if let Some(r) = &out.consistency_report {
        print!("{}", scenario::report_text(r));
    }

    let dir = tempfile::tempdir()?;
    for f in scenario::write_outputs(&cfg, &out, dir.path(), "example")? {
        println!("wrote {}", f.display());
    }
    Ok(())
}

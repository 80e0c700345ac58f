// Copyright 2026 qwkin Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, Subcommand};

use qwkin::scenario::{self, ScenarioError};

#[derive(Parser)]
#[command(name = "qwkin", version, about = "Quantum-walk reaction kinetics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenario files.
    Simulate {
        #[arg(long = "config", required = true, num_args = 1..)]
        configs: Vec<PathBuf>,
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
        /// Scenarios to run in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Singlet–triplet dephasing rate of every reaction operator.
    Rates {
        #[arg(long = "ks")]
        ks: f64,
        #[arg(long = "kt")]
        kt: f64,
        #[arg(long, default_value_t = 0.0)]
        q: f64,
        /// Measured S–T dephasing rate (1/s) to check predictions against.
        #[arg(long)]
        measured: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Check a scenario file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn report_error(e: &ScenarioError) {
    eprintln!("error: {e}");
    eprintln!("{}", e.to_json());
}

fn simulate(configs: Vec<PathBuf>, output_dir: PathBuf, jobs: usize) -> i32 {
    let mut stems: Vec<String> = configs.iter().map(|p| scenario::file_stem(p)).collect();
    stems.sort();
    if stems.windows(2).any(|w| w[0] == w[1]) {
        eprintln!("error: two configs share a file stem; their outputs would collide");
        return 2;
    }
    let next = AtomicUsize::new(0);
    let worst = Mutex::new(0);
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, configs.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(path) = configs.get(i) else { break };
                match scenario::simulate_file(path, &output_dir) {
                    Ok(files) => {
                        for f in files {
                            println!("wrote {}", f.display());
                        }
                    }
                    Err(e) => {
                        report_error(&e);
                        let mut w = worst.lock().expect("lock");
                        *w = (*w).max(e.exit_code());
                    }
                }
            });
        }
    });
    worst.into_inner().expect("lock")
}

fn rates(ks: f64, kt: f64, q: f64, measured: Option<f64>, json: bool) -> i32 {
    match scenario::compare_operators(ks, kt, q, measured) {
        Ok(r) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
            } else {
                print!("{}", scenario::report_text(&r));
            }
            0
        }
        Err(e) => {
            let e = ScenarioError::Numeric(e);
            report_error(&e);
            2
        }
    }
}

fn validate(config: PathBuf) -> i32 {
    match scenario::load_config(&config) {
        Ok(cfg) => {
            println!(
                "ok: {} ({} sites, {} edges, {} samples)",
                config.display(),
                cfg.graph.n_sites(),
                cfg.graph.edges().len(),
                cfg.integration.samples
            );
            0
        }
        Err(e) => {
            if let ScenarioError::Config { source, .. } = &e {
                for v in source.violations() {
                    eprintln!("  {v}");
                }
            }
            report_error(&e);
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Simulate { configs, output_dir, jobs } => simulate(configs, output_dir, jobs),
        Command::Rates { ks, kt, q, measured, json } => rates(ks, kt, q, measured, json),
        Command::Validate { config } => validate(config),
    };
    ExitCode::from(code as u8)
}

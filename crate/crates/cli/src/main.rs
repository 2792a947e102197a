//! Command-line front end for the hybrid quantum-spectral Poisson solver.
//!
//! Exit codes: 0 success, 1 pipeline failure, 2 usage error.

mod config;

use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};

use config::{resolve, RunArgs, RunConfig, UsageError};
use qpoisson::bench::{run_benchmark, run_scaling_sweep, sweep_csv, BenchConfig};
use qpoisson::io;
use qpoisson::pipeline::{
    run_classical, run_quantum, ClassicalRunConfig, Estimator, QuantumRunConfig,
};
use qpoisson::spectral::mse;

#[derive(Parser)]
#[command(
    name = "qpoisson",
    version,
    about = "Hybrid quantum-spectral solver for the 2D Poisson equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the quantum pipeline and write solution/coefficient CSVs
    Solve(RunArgs),
    /// Run the classical spectral baseline
    Classical(RunArgs),
    /// Run both pipelines and print the quantum-vs-classical MSE
    Compare(RunArgs),
    /// Phase-level benchmark of both pipelines (report.json)
    Bench(RunArgs),
    /// Scaling sweep over square grids n = m (sweep.csv)
    Sweep(RunArgs),
    /// List the source-function catalog
    ListSources,
}

fn main() {
    let cli = Cli::parse();
    let args = match &cli.command {
        Command::Solve(a)
        | Command::Classical(a)
        | Command::Compare(a)
        | Command::Bench(a)
        | Command::Sweep(a) => a.clone(),
        Command::ListSources => {
            list_sources();
            std::process::exit(0);
        }
    };
    let cfg = match resolve(&args) {
        Ok(cfg) => cfg,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
    };
    let outcome = match &cli.command {
        Command::Solve(_) => cmd_solve(&cfg),
        Command::Classical(_) => cmd_classical(&cfg),
        Command::Compare(_) => cmd_compare(&cfg),
        Command::Bench(_) => cmd_bench(&cfg),
        Command::Sweep(_) => cmd_sweep(&cfg),
        Command::ListSources => unreachable!(),
    };
    match outcome {
        Ok(()) => std::process::exit(0),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}

fn quantum_config(cfg: &RunConfig) -> QuantumRunConfig {
    QuantumRunConfig {
        grid: cfg.grid,
        source: cfg.source,
        shots: cfg.shots,
        seed: cfg.seed,
        mode: cfg.mode,
        estimator: Estimator::BinMap,
        correction: cfg.correction,
        truncation: cfg.truncation,
        sign: cfg.sign,
        shift: cfg.shift,
        parallel: cfg.parallel,
    }
}

fn classical_config(cfg: &RunConfig) -> ClassicalRunConfig {
    ClassicalRunConfig {
        grid: cfg.grid,
        source: cfg.source,
        quadrature: cfg.quadrature,
        modes: cfg.classical_modes,
        shift: cfg.shift,
    }
}

fn bench_config(cfg: &RunConfig) -> BenchConfig {
    BenchConfig {
        grid: cfg.grid,
        source: cfg.source,
        shots: cfg.shots,
        seed: cfg.seed,
        mode: cfg.mode,
        correction: cfg.correction,
        truncation: cfg.truncation,
        sign: cfg.sign,
        shift: cfg.shift,
        quadrature: cfg.quadrature,
        classical_modes: cfg.classical_modes,
        repeat: cfg.repeat,
        parallel: cfg.parallel,
    }
}

fn cmd_solve(cfg: &RunConfig) -> Result<(), Box<dyn std::error::Error>> {
    let run = run_quantum(&quantum_config(cfg))?;
    let mut files = vec![
        ("solution.csv".to_string(), io::solution_csv(&run.solution)),
        (
            "coefficients.csv".to_string(),
            io::spectrum_csv(&run.estimate),
        ),
    ];
    if let Some(counts) = &run.counts {
        files.push(("counts.csv".to_string(), io::counts_csv(counts)));
    }
    if let Some(state) = &run.post_qft {
        files.push(("state.csv".to_string(), io::state_csv(state)));
    }
    files.push((
        "solution.matrix.txt".to_string(),
        io::solution_gnuplot_matrix(&run.solution),
    ));
    write_outputs(&cfg.output_dir, &files)?;
    Ok(())
}

fn cmd_classical(cfg: &RunConfig) -> Result<(), Box<dyn std::error::Error>> {
    let run = run_classical(&classical_config(cfg))?;
    let files = vec![
        ("solution.csv".to_string(), io::solution_csv(&run.solution)),
        (
            "coefficients.csv".to_string(),
            io::classical_coefficients_csv(&run.coefficients, cfg.grid.lx, cfg.grid.ly),
        ),
        (
            "solution.matrix.txt".to_string(),
            io::solution_gnuplot_matrix(&run.solution),
        ),
    ];
    write_outputs(&cfg.output_dir, &files)?;
    Ok(())
}

fn cmd_compare(cfg: &RunConfig) -> Result<(), Box<dyn std::error::Error>> {
    let q = run_quantum(&quantum_config(cfg))?;
    let c = run_classical(&classical_config(cfg))?;
    let err = mse(&q.solution, &c.solution)?;
    let files = vec![
        ("solution.csv".to_string(), io::solution_csv(&q.solution)),
        (
            "solution_classical.csv".to_string(),
            io::solution_csv(&c.solution),
        ),
        (
            "coefficients.csv".to_string(),
            io::spectrum_csv(&q.estimate),
        ),
    ];
    write_outputs(&cfg.output_dir, &files)?;
    println!("mse {err:e}");
    Ok(())
}

fn cmd_bench(cfg: &RunConfig) -> Result<(), Box<dyn std::error::Error>> {
    let report = run_benchmark(&bench_config(cfg))?;
    let files = vec![(
        "report.json".to_string(),
        serde_json::to_string_pretty(&report)? + "\n",
    )];
    write_outputs(&cfg.output_dir, &files)?;
    print!("{}", report.to_text());
    Ok(())
}

fn cmd_sweep(cfg: &RunConfig) -> Result<(), Box<dyn std::error::Error>> {
    let (min_q, max_q) = cfg.sweep_qubits;
    let reports = run_scaling_sweep(&bench_config(cfg), min_q..=max_q)?;
    let files = vec![
        ("sweep.csv".to_string(), sweep_csv(&reports)),
        (
            "sweep_reports.json".to_string(),
            serde_json::to_string_pretty(&reports)? + "\n",
        ),
    ];
    write_outputs(&cfg.output_dir, &files)?;
    for report in &reports {
        println!(
            "{} points: quantum {:.6}s, classical {:.6}s, mse {:e}",
            report.config.grid.nx * report.config.grid.ny,
            report.totals[0].wall_time_s,
            report.totals[1].wall_time_s,
            report.mse
        );
    }
    Ok(())
}

fn list_sources() {
    println!("sinusoid                sin(k1 pi x) sin(k2 pi y)            [--k1 --k2]");
    println!("polynomial-bump         x(1-x) y(1-y)");
    println!("anisotropic-sinusoid    sin(k1 pi x) sin(k2 pi y) (x^2 + 2xy + 3y^2 - x + 4y + 5)   [--k1 --k2]");
    println!("gaussian                exp(-((x-x0)^2 + (y-y0)^2))          [--x0 --y0]");
    println!("gaussian-plus-sinusoid  gaussian + sinusoid                  [--k1 --k2 --x0 --y0]");
}

/// Write all artifacts or none: on any failure, files created by this run
/// are removed before returning the error.
fn write_outputs(dir: &Path, files: &[(String, String)]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut written: Vec<PathBuf> = Vec::new();
    for (name, content) in files {
        let path = dir.join(name);
        match std::fs::write(&path, content) {
            Ok(()) => written.push(path),
            Err(e) => {
                for p in written {
                    std::fs::remove_file(p).ok();
                }
                return Err(e);
            }
        }
    }
    Ok(())
}

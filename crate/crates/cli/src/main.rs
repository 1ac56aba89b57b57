//! Batch verification driver: every reconstruction and degeneration check
//! as a subcommand with machine-readable reports.
//!
//! Exit codes: 0 when every check passes, 1 when any check fails, 2 on
//! usage or configuration errors.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use tropical_bundle::report::Report;

use config::{load_file, parse_constants, FileConfig, RunConfig};

#[derive(Parser)]
#[command(
    name = "tropical-bundle",
    about = "Exact and numeric verification of rank-2 bundle reconstruction from tropical multi-section data",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML config file; explicit flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Gluing constants, e.g. "a0=-1,b0=1,a1=1,b1=1,a2=1,b2=1".
    /// Rationals like 3/2 are accepted; omit b2 to solve for it.
    #[arg(long, global = true)]
    constants: Option<String>,

    /// Work with fully symbolic constants.
    #[arg(long, global = true)]
    parametric: bool,

    /// Drop the holonomy twist (the corrected gluing then fails, by design).
    #[arg(long, global = true)]
    no_twist: bool,

    /// Seed for randomized trials.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Interior grid size for Hessian checks.
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Comma-separated decreasing list of hbar values for sweeps.
    #[arg(long, global = true, value_delimiter = ',')]
    hbar: Option<Vec<f64>>,

    /// Boundary tolerance for region classification.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Number of randomized instantiations in reconstruction checks.
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Write the JSON report here.
    #[arg(long, global = true)]
    json: Option<PathBuf>,

    /// Write CSV artifacts here (sweep rows or flow samples).
    #[arg(long, global = true)]
    csv: Option<PathBuf>,

    /// JSON multi-section file (base fan, sheets, gluings) to validate and
    /// transform in place of the built-in instance.
    #[arg(long, global = true)]
    multisection: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the reference tangent cocycle: defect, regularity, equivariance.
    VerifyTangent,
    /// Reconstruct the rank-2 bundle: naive defect, corrected gluing,
    /// randomized instantiations, solvers.
    Reconstruct,
    /// The cone-complex reconstruction: twist-free corrections and the
    /// contrast with the connected cover.
    AppendixB,
    /// Metric degeneration sweeps: limits, Hessians, Legendre checks.
    Tropicalize,
    /// Gradient-flow local model at the branch point.
    Caustic,
}

fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let file = match &cli.config {
        Some(path) => load_file(path)?,
        None => FileConfig::default(),
    };
    let parametric = cli.parametric || file.parametric.unwrap_or(false);
    let constants_spec = cli.constants.clone().or(file.constants);
    let (constants, b2_autosolved) = if parametric {
        (tropical_bundle::gluing::Constants::Parametric, false)
    } else {
        match constants_spec {
            Some(spec) => parse_constants(&spec)?,
            None => (tropical_bundle::gluing::Constants::default_rational(), false),
        }
    };
    let hbars = cli
        .hbar
        .clone()
        .or(file.hbar)
        .unwrap_or_else(|| vec![0.1, 0.05, 0.025, 0.0125]);
    Ok(RunConfig {
        constants,
        parametric,
        b2_autosolved,
        no_twist: cli.no_twist || file.no_twist.unwrap_or(false),
        seed: cli.seed.or(file.seed).unwrap_or(7),
        grid: cli.grid.or(file.grid).unwrap_or(20),
        hbars,
        tol: cli.tol.or(file.tol).unwrap_or(1e-9),
        trials: cli.trials.or(file.trials).unwrap_or(200),
        json: cli.json.clone().or(file.json),
        csv: cli.csv.clone().or(file.csv),
        multisection: cli.multisection.clone(),
    })
}

fn write_json(report: &Report, path: &PathBuf) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_sweep_csv(sweep: &tropical_bundle::tropic::SweepReport, path: &PathBuf) -> Result<()> {
    let mut out = String::from("x1,x2,hbar,E1,E2,E12,region,err1,err2,err12\n");
    for r in &sweep.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.x1, r.x2, r.hbar, r.e1, r.e2, r.e12, r.region, r.err1, r.err2, r.err12
        ));
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_flow_csv(rows: &[commands::FlowRow], path: &PathBuf) -> Result<()> {
    let mut out = String::from("t,r,theta,f,Q\n");
    for (t, r, theta, f, q) in rows {
        out.push_str(&format!("{t},{r},{theta},{f},{q}\n"));
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn print_summary(report: &Report) {
    for check in &report.checks {
        let status = match check.status {
            tropical_bundle::report::Status::Pass => "PASS",
            tropical_bundle::report::Status::Fail => "FAIL",
            tropical_bundle::report::Status::Skip => "SKIP",
        };
        match &check.detail {
            Some(d) => println!("{status}  {} - {d}", check.name),
            None => println!("{status}  {}", check.name),
        }
    }
    println!(
        "{}: {}",
        report.command,
        if report.passed { "all checks passed" } else { "FAILURES present" }
    );
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    let cfg = resolve_config(&cli)?;
    let started = Instant::now();

    let report = match cli.command {
        Command::VerifyTangent => commands::cmd_verify_tangent(&cfg)?,
        Command::Reconstruct => commands::cmd_reconstruct(&cfg)?,
        Command::AppendixB => commands::cmd_appendix_b(&cfg)?,
        Command::Tropicalize => {
            let (report, sweep) = commands::cmd_tropicalize(&cfg)?;
            if let (Some(sweep), Some(path)) = (sweep, &cfg.csv) {
                write_sweep_csv(&sweep, path)?;
            }
            report
        }
        Command::Caustic => {
            let (report, rows) = commands::cmd_caustic(&cfg)?;
            if let Some(path) = &cfg.csv {
                write_flow_csv(&rows, path)?;
            }
            report
        }
    };

    if let Some(path) = &cfg.json {
        write_json(&report, path)?;
    }
    print_summary(&report);
    // wall-clock stays out of the JSON report so identical runs serialize
    // to identical bytes
    let _ = writeln!(
        std::io::stderr(),
        "{} finished in {:.2}s",
        report.command,
        started.elapsed().as_secs_f64()
    );

    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

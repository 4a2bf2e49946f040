//! Batch front end: run scenario configs or full catalogue suites and emit
//! machine-readable reports (JSON summaries plus CSV tables).
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 input error.

mod scenario;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use scenario::{parse_scenario, resolve_model, run_scenario_on, run_suite, RunOptions};

#[derive(Parser)]
#[command(
    name = "substatic",
    version,
    about = "Checks for substatic warped-product models: curvature scans, Heintze-Karcher reports, conformal flows, torsion problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory for summaries and tables.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for scenario-level parallelism (0 keeps the default).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Seed recorded in reports (reserved for randomized sweeps).
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Multiplier applied to pass/fail tolerances.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a single scenario config (JSON).
    Run { config: PathBuf },
    /// Run the full check matrix over a model catalogue (JSON).
    Suite { catalogue: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    if !(cli.tol_scale > 0.0 && cli.tol_scale.is_finite()) {
        bail!("--tol-scale: must be positive and finite");
    }
    configure_workers(cli.workers);
    let opts = RunOptions {
        seed: cli.seed,
        tol_scale: cli.tol_scale,
    };
    match cli.command {
        Command::Run { config } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("reading config {}", config.display()))?;
            let scenario = parse_scenario(&text)?;
            let model = resolve_model(&scenario.model)?;
            let outcome = run_scenario_on(&scenario, &model, &cli.out, opts)
                .map_err(|e| anyhow!("scenario '{}': {e}", scenario.name))?;
            println!(
                "{}: {} ({})",
                outcome.name,
                if outcome.pass { "PASS" } else { "FAIL" },
                outcome.detail
            );
            Ok(outcome.pass)
        }
        Command::Suite { catalogue } => {
            let text = fs::read_to_string(&catalogue)
                .with_context(|| format!("reading catalogue {}", catalogue.display()))?;
            let models =
                substatic::load_catalogue(&text).map_err(|e| anyhow!("catalogue: {e}"))?;
            if models.is_empty() {
                bail!("catalogue: no models listed");
            }
            let rows = run_suite(&models, &cli.out, opts)?;
            let width = rows.iter().map(|r| r.model.len()).max().unwrap_or(8).max(5);
            println!("{:width$}  {:16}  {:7}  detail", "model", "task", "status");
            let mut all_pass = true;
            for row in &rows {
                println!(
                    "{:width$}  {:16}  {:7}  {}",
                    row.model,
                    row.task.label(),
                    row.status,
                    row.detail
                );
                if row.status == "fail" {
                    all_pass = false;
                }
            }
            Ok(all_pass)
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_workers(workers: usize) {
    if workers > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
        {
            eprintln!("warning: worker pool not reconfigured: {e}");
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_workers(workers: usize) {
    if workers > 0 {
        eprintln!("warning: built without the parallel feature; --workers ignored");
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use kv_harness::report::read_directory;
use kv_harness::{oracle_specs, parse_config, run_experiment, sweep, ExperimentReport, ExperimentSpec};

#[derive(Parser)]
#[command(name = "kvsim", about = "Kelvin-Voigt spectral solver verification suite")]
struct Cli {
    /// Root directory for experiment outputs.
    #[arg(long, global = true, env = "KV_OUTPUT_ROOT", default_value = "kv_output")]
    output: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment of a config file in order.
    Run { config: PathBuf },
    /// Run the experiments of a config file in parallel.
    Sweep {
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run the exact-solution oracles with their default parameters.
    VerifyOracles,
    /// Summarize the experiment directories below a directory.
    Report { dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Ok(all passed).
fn dispatch(cli: &Cli) -> anyhow::Result<bool> {
    match &cli.command {
        Command::Run { config } => run_sequentially(&load(config)?, &cli.output),
        Command::VerifyOracles => run_sequentially(&oracle_specs(), &cli.output),
        Command::Sweep { config, jobs } => {
            let report = sweep(&load(config)?, *jobs, &cli.output)?;
            for e in &report.entries {
                match &e.result {
                    Ok(r) => print_summary(r),
                    Err(msg) => println!("ERROR {} ({}): {msg}", e.name, e.id),
                }
            }
            println!("{} experiments, {} failed", report.entries.len(), report.failures().count());
            Ok(report.pass())
        }
        Command::Report { dir } => {
            let entries = read_directory(dir)?;
            for e in &entries {
                let failed = e.checks.iter().filter(|c| !c.pass()).count();
                let verdict = if e.pass() { "PASS" } else { "FAIL" };
                println!("{verdict} {} ({}, {}) {}/{} checks", e.name, e.id, e.config_hash, e.checks.len() - failed, e.checks.len());
            }
            anyhow::ensure!(!entries.is_empty(), "no experiment directories under {}", dir.display());
            Ok(entries.iter().all(|e| e.pass()))
        }
    }
}

fn load(path: &Path) -> anyhow::Result<Vec<ExperimentSpec>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

fn run_sequentially(specs: &[ExperimentSpec], root: &Path) -> anyhow::Result<bool> {
    let mut all = true;
    for spec in specs {
        match run_experiment(spec, root) {
            Ok(report) => {
                for c in &report.checks {
                    println!("  {} {} = {:.3e} {} {:.3e}", c.verdict(), c.id, c.value, c.relation.symbol(), c.limit);
                }
                print_summary(&report);
                all &= report.pass();
            }
            Err(e) => {
                println!("ERROR {}: {e:#}", spec.name);
                all = false;
            }
        }
    }
    Ok(all)
}

fn print_summary(r: &ExperimentReport) {
    let verdict = if r.pass() { "PASS" } else { "FAIL" };
    println!("{verdict} {} ({}, {}) -> {}", r.name, r.id, r.config_hash, r.dir.display());
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use incpath_core::cyclestats::Precision;
use incpath_core::kgreedy::TerminationMode;
use incpath_core::LabelModel;
use incpath_harness::{run_with_threads, thread_count, Command, ExperimentConfig, HarnessError, THREADS_ENV};

/// Experiments on increasing paths in randomly edge-ordered complete graphs.
#[derive(Debug, Parser)]
#[command(name = "incpath", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = incpath_harness::config::DEFAULT_SEED)]
    seed: u64,
    /// perm or real
    #[arg(long, default_value = "real")]
    model: LabelModel,
    /// strict or exhaust
    #[arg(long, default_value = "exhaust")]
    mode: TerminationMode,
    /// rational or float (default: rational when k <= 200)
    #[arg(long)]
    precision: Option<Precision>,
    /// Upper summation limit for constant-c.
    #[arg(long)]
    c_max: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the tabular export (alpha-table, census) here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the trial-0 extension trace (kgreedy-sim) here.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Worker threads; overrides the INCPATH_THREADS environment variable.
    #[arg(long)]
    threads: Option<usize>,
    /// Include per-trial values in the report.
    #[arg(long)]
    emit_raw: bool,
}

fn write(path: &PathBuf, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })
}

fn main_inner(cli: Cli) -> Result<(), HarnessError> {
    let env = std::env::var(THREADS_ENV).ok();
    let threads = thread_count(cli.threads, env.as_deref())?;
    let config = ExperimentConfig {
        command: cli.command,
        n: cli.n,
        k: cli.k,
        trials: cli.trials,
        seed: cli.seed,
        model: cli.model,
        mode: cli.mode,
        precision: cli.precision,
        c_max: cli.c_max,
        emit_raw: cli.emit_raw,
    };
    let report = run_with_threads(config, threads)?;
    let json = report.to_json();
    match &cli.out {
        Some(path) => write(path, &json)?,
        None => println!("{json}"),
    }
    if let Some(path) = &cli.csv {
        let csv = report
            .csv
            .as_deref()
            .ok_or_else(|| HarnessError::Usage(format!("{} has no tabular export", cli.command.name())))?;
        write(path, csv)?;
    }
    if let Some(path) = &cli.trace_out {
        let trace = report
            .trace_csv
            .as_deref()
            .ok_or_else(|| HarnessError::Usage(format!("{} has no extension trace", cli.command.name())))?;
        write(path, trace)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("incpath: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

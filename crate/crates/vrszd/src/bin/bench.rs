//! Benchmark CLI: run declared experiments, sweep parameter grids, and
//! check library invariants.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vrszd::bench::{grid_search, load_spec, run_experiment};
use vrszd::verify;

#[derive(Parser)]
#[command(
    name = "bench",
    about = "Zeroth-order proximal optimization benchmarks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every cell of an experiment file and write CSV reports.
    Run {
        /// Experiment TOML file.
        spec: PathBuf,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; defaults to one per core.
        #[arg(long)]
        workers: Option<usize>,
        /// Override the experiment seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run an experiment and additionally report the best cell per
    /// (algorithm, m) into grid_best.csv.
    Grid {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the library's invariant self-checks.
    Verify {
        /// Include the slower statistical and end-to-end checks.
        #[arg(long)]
        full: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> vrszd::Result<()> {
    match cli.command {
        Command::Run { spec, out, workers, seed } => {
            let mut spec = load_spec(&spec)?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            let report = run_experiment(&spec, &out, workers)?;
            println!(
                "wrote {} cells to {} (initial gap {:.6e})",
                report.cells.len(),
                report.out_dir.display(),
                report.initial_gap
            );
            for line in report.summary_lines() {
                println!("  {line}");
            }
            Ok(())
        }
        Command::Grid { spec, out, workers, seed } => {
            let mut spec = load_spec(&spec)?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            let report = grid_search(&spec, &out, workers)?;
            println!(
                "wrote {} cells to {}",
                report.experiment.cells.len(),
                report.experiment.out_dir.display()
            );
            for row in &report.best {
                let cell = &report.experiment.cells[row.cell].cell;
                println!(
                    "  {} m={}: best gamma={} l={} b={} (clipped mean {:.3e})",
                    row.algorithm,
                    row.inner_steps,
                    cell.gamma,
                    cell.directions,
                    cell.batch_size,
                    row.clipped_mean
                );
            }
            Ok(())
        }
        Command::Verify { full } => {
            let checks = if full { verify::run_full() } else { verify::run_quick() };
            let mut failures = 0;
            for c in &checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                println!("{status} {} - {}", c.name, c.detail);
                if !c.passed {
                    failures += 1;
                }
            }
            if failures > 0 {
                return Err(vrszd::Error::Degenerate(format!(
                    "{failures} of {} checks failed",
                    checks.len()
                )));
            }
            println!("all {} checks passed", checks.len());
            Ok(())
        }
    }
}

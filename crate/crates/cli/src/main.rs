use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spectra_core::report::{self, fmt_float, RunOptions};

#[derive(Parser)]
#[command(
    name = "spectra",
    version,
    about = "Dirichlet eigenvalues and universal inequality checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write all report files.
    Run {
        config: PathBuf,
        /// Solve the mesh resolutions concurrently.
        #[arg(long)]
        parallel: bool,
    },
    /// List charts, field builtins and check names.
    List,
    /// Run a scenario and report only whether every inequality holds.
    Verify {
        config: PathBuf,
        #[arg(long)]
        parallel: bool,
    },
    /// Solve every resolution and print the convergence table.
    Convergence {
        config: PathBuf,
        #[arg(long)]
        parallel: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> spectra_core::Result<u8> {
    match command {
        Command::List => {
            print!("{}", report::list_catalog());
            Ok(0)
        }
        Command::Run { config, parallel } => {
            let scenario = report::load(&config)?;
            let summary = report::run(&scenario, &RunOptions::from_env(parallel))?;
            println!(
                "{}: {} checks evaluated, {} not applicable or skipped, {} violated",
                summary.name,
                summary.evaluated,
                summary.not_evaluated,
                summary.violations.len()
            );
            for v in &summary.violations {
                println!("  {v}");
            }
            println!("outputs in {}", summary.out_dir.display());
            Ok(summary.exit_code() as u8)
        }
        Command::Verify { config, parallel } => {
            let scenario = report::load(&config)?;
            let summary = report::run(&scenario, &RunOptions::from_env(parallel))?;
            for v in &summary.violations {
                println!("{v}");
            }
            let verdict = if summary.violations.is_empty() { "PASS" } else { "FAIL" };
            println!(
                "{verdict} {} ({} violated of {})",
                summary.name,
                summary.violations.len(),
                summary.evaluated
            );
            Ok(summary.exit_code() as u8)
        }
        Command::Convergence { config, parallel } => {
            let scenario = report::load(&config)?;
            let (dir, rows) = report::run_convergence(&scenario, &RunOptions::from_env(parallel))?;
            println!("index resolution value extrapolated order target");
            for r in rows.iter().filter(|r| r.index <= 5) {
                println!(
                    "{} {} {} {} {} {}",
                    r.index,
                    r.resolution,
                    fmt_float(r.value),
                    fmt_float(r.extrapolated),
                    fmt_float(r.order),
                    r.target.map(fmt_float).unwrap_or_else(|| "-".into())
                );
            }
            println!("outputs in {}", dir.display());
            Ok(0)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use parrondo_cli::commands::{region, run, RegionArgs, RegionModel, RunArgs};
use parrondo_cli::verify::{run_suite, Suite};
use parrondo_cli::{init_thread_pool, Failure};

/// Parrondo game laboratory.
#[derive(Parser)]
#[command(name = "parrondo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a game spec file and print P_A at round n as CSV.
    Run {
        spec: PathBuf,
        /// Round index (overrides "n" in the file; default 1).
        #[arg(long)]
        n: Option<u64>,
        /// Also report the n → ∞ limit.
        #[arg(long)]
        limit: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan min/max of the combined limit over a K×K grid of (P_A, P'_A).
    Region {
        #[arg(value_enum)]
        model: RegionModel,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 10)]
        grid: usize,
        /// Optimizer restarts per extreme (quantum model).
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Monte Carlo draws per cell (hidden model).
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a property suite; exits 1 if any property fails.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        samples: Option<usize>,
    },
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    init_thread_pool()?;
    match cli.command {
        Command::Run { spec, n, limit, out } => {
            run(&RunArgs { spec: &spec, n, limit })?.emit(out.as_deref())?;
        }
        Command::Region { model, p, grid, restarts, seed, samples, out } => {
            eprintln!("seed {seed}");
            region(&RegionArgs { model, p, grid, restarts, seed, samples })?.emit(out.as_deref())?;
        }
        Command::Verify { suite, seed, samples } => {
            let report = run_suite(suite, seed, samples);
            print!("{}", report.render());
            if !report.passed() {
                return Err(Failure::Property(format!("suite {} failed", suite.name())));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // clap reports --help and --version through the error path too.
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}

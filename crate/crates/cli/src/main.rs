//! Command-line front end: conditional logical channels, parameter sweeps,
//! round accumulation and bound fuzzing, with JSON/CSV output.

mod commands;
mod input;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "logicalnoise",
    version,
    about = "Exact effective logical noise of stabilizer codes under local Markovian noise"
)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-syndrome and averaged logical channels for one code and noise model.
    Logical(commands::logical::LogicalArgs),
    /// Noise-parameter sweep across codes with fitted scaling exponents (CSV).
    Sweep(commands::sweep::SweepArgs),
    /// Error accumulation over rounds of correction (CSV).
    Rounds(commands::rounds::RoundsArgs),
    /// Random-channel fuzz of the error-matrix infidelity bounds.
    FuzzBounds(commands::fuzz::FuzzArgs),
}

fn configure_threads(jobs: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(jobs) = jobs {
        // Ignore the error if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    if let Some(jobs) = jobs {
        if jobs > 1 {
            eprintln!("note: built without the parallel feature; --jobs {jobs} ignored");
        }
    }
}

fn main() {
    let cli = Cli::parse();
    configure_threads(cli.jobs);
    let result = match cli.command {
        Command::Logical(args) => commands::logical::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
        Command::Rounds(args) => commands::rounds::run(args),
        Command::FuzzBounds(args) => commands::fuzz::run(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

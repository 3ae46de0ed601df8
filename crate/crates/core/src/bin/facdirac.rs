use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use facdirac::cli::{execute, Command, RunOptions, DEFAULT_SEED};

#[derive(Parser)]
#[command(name = "facdirac", version, about = "Factorization hierarchies and 1D Dirac operators")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Analytic and grid spectra side by side
    Spectrum(Common),
    /// Run the verification checks and write a report
    Verify(Common),
    /// Eigenfunction and eigenspinor samples for plotting
    Plotdata(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario config (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Output path; overrides the config, defaults to stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the random test functions
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Record wall times in the report (makes it non-reproducible)
    #[arg(long)]
    timings: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, c) = match cli.command {
        Sub::Spectrum(c) => (Command::Spectrum, c),
        Sub::Verify(c) => (Command::Verify, c),
        Sub::Plotdata(c) => (Command::Plotdata, c),
    };
    let opts = RunOptions { config: c.config, out: c.out, seed: c.seed, timings: c.timings };
    ExitCode::from(execute(cmd, &opts) as u8)
}

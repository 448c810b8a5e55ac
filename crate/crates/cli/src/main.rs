//! Command-line front end for the lamebic library.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 computation error, 4 I/O error.

mod commands;
mod config;

use clap::{Args, Parser, Subcommand};
use config::{CommonArgs, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Compute(lamebic::Error),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "error[config]: {msg}"),
            CliError::Compute(e) => write!(f, "error[compute]: {e}"),
            CliError::Io(msg) => write!(f, "error[io]: {msg}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "lamebic",
    version,
    about = "Bound states at the band edges of the Lamé potential via isospectral deformation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DeformArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// How many deformation steps to apply (1 or 2)
    #[arg(long, default_value_t = 2)]
    steps: u32,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated deformation parameters; each is used for both steps
    #[arg(long, value_delimiter = ',', default_value = "1,3,10,30,100")]
    lambdas: Vec<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the band-edge energy table and export V and all edge states
    Bandedges(CommonArgs),
    /// Run the deformation and export potentials, states and running integrals
    Deform(DeformArgs),
    /// Build the two-step chain, verify residuals, integrability and the band
    /// structure, and write a machine-readable report
    Verify(CommonArgs),
    /// Deviation of the deformed quantities from the originals as lambda grows
    Sweep(SweepArgs),
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Bandedges(args) => commands::cmd_bandedges(&RunConfig::resolve(&args)?),
        Command::Deform(args) => {
            let cfg = RunConfig::resolve(&args.common)?;
            commands::cmd_deform(&cfg, args.steps)
        }
        Command::Verify(args) => commands::cmd_verify(&RunConfig::resolve(&args)?),
        Command::Sweep(args) => {
            let cfg = RunConfig::resolve(&args.common)?;
            commands::cmd_sweep(&cfg, &args.lambdas)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}

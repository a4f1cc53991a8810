// `!(x > 0.0)` style checks reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! `metadist` command-line front end.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 infeasible or degenerate
//! math, 4 I/O failure.

mod commands;
mod scenario;
mod table;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CompareArgs, MomentsArgs, PowerArgs, ReconstructArgs, SimulateArgs};
use scenario::ScenarioArgs;
use table::Format;

#[derive(Debug, Parser)]
#[command(
    name = "metadist",
    version,
    about = "SINR meta distribution of Poisson cellular networks"
)]
struct Cli {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Simulation disk radius in metres.
    #[arg(long, global = true, default_value_t = 500.0)]
    radius_m: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output path; stdout when omitted (required by `simulate`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Moments μ_n by quadrature and by the closed form, with the error bound.
    Moments(MomentsArgs),
    /// Fourier-Jacobi reconstruction of the meta distribution.
    Reconstruct(ReconstructArgs),
    /// Monte Carlo CCP samples.
    Simulate(SimulateArgs),
    /// Beta and Fourier-Jacobi reliability against simulated samples.
    Compare(CompareArgs),
    /// Minimum transmit power over a density sweep.
    Power(PowerArgs),
}

/// Bad input detected after argument parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<metadist::Error>() {
            return match e {
                metadist::Error::InvalidParams(_) | metadist::Error::Domain(_) => 2,
                _ => 3,
            };
        }
        if cause.is::<std::io::Error>()
            || cause.is::<csv::Error>()
            || cause.is::<serde_json::Error>()
        {
            return 4;
        }
    }
    1
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let params = cli.scenario.params()?;
    let out = cli.out.as_deref();
    let table = match &cli.command {
        Command::Moments(args) => commands::moments(&params, args)?,
        Command::Reconstruct(args) => commands::reconstruct_cmd(&params, args)?,
        Command::Compare(args) => commands::compare(&params, args)?,
        Command::Power(args) => commands::power(&params, args)?,
        Command::Simulate(args) => {
            let Some(out) = out else {
                anyhow::bail!(UsageError(
                    "simulate needs --out for the samples CSV".into()
                ));
            };
            let summary = commands::simulate(&params, cli.radius_m, cli.seed, out, args)?;
            eprintln!("wrote {} and {}", out.display(), summary.display());
            return Ok(());
        }
    };
    table.emit(cli.format, out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

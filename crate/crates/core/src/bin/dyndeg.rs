use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dyndeg::cli::{execute, Command, Invocation};

#[derive(Parser)]
#[command(name = "dyndeg", version, about = "Dynamical degrees and Gromov spectral radii on explicit models")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every analysis listed in the config
    Report(Opts),
    /// Parse the config and build the model without running analyses
    Validate(Opts),
    /// Compute the dynamical-degree table only
    Delta(Opts),
}

#[derive(Args)]
struct Opts {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "max-power")]
    max_power: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Record wall-clock time in the report (makes output non-reproducible)
    #[arg(long)]
    timing: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, opts) = match cli.command {
        Cmd::Report(o) => (Command::Report, o),
        Cmd::Validate(o) => (Command::Validate, o),
        Cmd::Delta(o) => (Command::Delta, o),
    };
    let outcome = execute(&Invocation {
        command,
        config: opts.config,
        out: opts.out,
        max_power: opts.max_power,
        tol: opts.tol,
        timing: opts.timing,
    });
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(outcome.code as u8)
}

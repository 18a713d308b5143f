use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use warpgeom::{cmd_audit, cmd_report, cmd_solve, cmd_verify, CliError, Options, RunConfig};

#[derive(Parser)]
#[command(name = "warpgeom", version, about = "Vertical graphs in warped-product spaces")]
struct Cli {
    /// Output directory; overrides output.dir from the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Omit the generation-time header from report files.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Resample the configured domain at this spacing on every axis.
    #[arg(long)]
    spacing_override: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the closed-form identities against the discrete oracle.
    Verify(RunArgs),
    /// Solve the prescribed mean curvature problem.
    Solve(RunArgs),
    /// Check theorem hypotheses and inequalities on the configured surface.
    Audit(RunArgs),
    /// Collect prior run directories into plot-ready tables.
    Report {
        /// Run directories written by verify, solve or audit.
        #[arg(required = true)]
        runs: Vec<PathBuf>,
    },
}

type Handler = fn(&RunConfig, &Options) -> Result<u8, CliError>;

fn run(cli: Cli) -> Result<u8, CliError> {
    let mut opts = Options { out: cli.out, timestamp: !cli.no_timestamp, spacing_override: None };
    let (handler, args): (Handler, RunArgs) = match cli.command {
        Command::Report { runs } => return cmd_report(&runs, &opts),
        Command::Verify(args) => (cmd_verify, args),
        Command::Solve(args) => (cmd_solve, args),
        Command::Audit(args) => (cmd_audit, args),
    };
    opts.spacing_override = args.spacing_override;
    let cfg = RunConfig::load(&args.config)?;
    handler(&cfg, &opts)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

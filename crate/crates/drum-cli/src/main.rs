//! Command-line front end for rotating-diamond dc magnetometry analysis:
//! fringe synthesis, sensitivity reports, Allan-deviation stability runs,
//! operating-point optimization and the built-in numeric oracle checks.

use clap::{Parser, Subcommand};
use drum_cli::commands;
use drum_cli::config::{OutFormat, RunConfig};
use drum_cli::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Environment variable naming the default configuration file.
const CONFIG_ENV: &str = "DRUM_CONFIG";

#[derive(Parser, Debug)]
#[command(
    name = "drum",
    about = "Rotating-diamond dc up-conversion magnetometry: signals, sensitivities, stability",
    version
)]
struct Cli {
    /// Configuration file (TOML); falls back to $DRUM_CONFIG, then to
    /// built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output path stem; overrides the config's `output`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format; overrides the config's `format`.
    #[arg(long, global = true, value_enum)]
    format: Option<OutFormat>,

    /// Seed override for stochastic commands.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Print output-file schemas and a default configuration, then exit.
    #[arg(long)]
    schema: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize fringe scans (noiseless and Monte Carlo, echo and Ramsey).
    Fringe(commands::fringe::FringeArgs),
    /// Analytic sensitivity report with optional Monte Carlo estimate.
    Sensitivity(commands::sensitivity::SensitivityArgs),
    /// Allan-deviation stability analysis of a contrast series.
    Adev(commands::adev::AdevArgs),
    /// Optimal sensing time and bias field across rotation speeds.
    Optimize(commands::optimize::OptimizeArgs),
    /// Run the built-in analytic-vs-numeric oracle checks.
    OracleCheck(commands::oracle_check::OracleCheckArgs),
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let mut config = match path {
        Some(p) => RunConfig::load(&p)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        config.output = Some(out.clone());
    }
    if let Some(format) = cli.format {
        config.format = format;
    }
    if let Some(seed) = cli.seed {
        config.rng_seed = seed;
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.schema {
        print!("{}", commands::schema_text());
        return Ok(());
    }
    let Some(command) = &cli.command else {
        return Err(CliError::Validation(
            "missing subcommand (try --help or --schema)".into(),
        ));
    };
    let config = load_config(&cli)?;
    match command {
        Command::Fringe(args) => commands::fringe::run(&config, args),
        Command::Sensitivity(args) => commands::sensitivity::run(&config, args),
        Command::Adev(args) => commands::adev::run(&config, args),
        Command::Optimize(args) => commands::optimize::run(&config, args),
        Command::OracleCheck(args) => commands::oracle_check::run(&config, args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Validation(_) => ExitCode::from(1),
                CliError::Runtime(_) => ExitCode::from(2),
            }
        }
    }
}

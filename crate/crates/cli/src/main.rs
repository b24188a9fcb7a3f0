use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rabisqueeze_cli::config::Experiment;
use rabisqueeze_cli::output::Format;

/// Squeezing in the dispersive quantum Rabi model: figure datasets.
#[derive(Debug, Parser)]
#[command(name = "rabisqueeze", version)]
struct Cli {
    experiment: Experiment,
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match rabisqueeze_cli::execute(cli.experiment, cli.config.as_deref(), &cli.set, &cli.out, cli.format) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rabisqueeze: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

mod args;
mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use args::{Cli, Command, VerifyCommand};
use commands::Run;
use config::{merge, ConfigFile};
use error::CliError;
use output::Output;

fn digest(command: &str, grid: Option<usize>, seed: u64, params: &impl Serialize) -> Result<String, CliError> {
    let canonical = json!({
        "command": command,
        "grid": grid,
        "seed": seed,
        "params": serde_json::to_value(params)?,
    });
    Ok(hex::encode(Sha256::digest(canonical.to_string().as_bytes())))
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let config = match &cli.global.config {
        Some(path) => ConfigFile::read(path)?,
        None => ConfigFile::default(),
    };
    let grid = cli.global.grid.or(config.grid);
    let seed = cli.global.seed.or(config.seed).unwrap_or(0);
    let out = cli
        .global
        .out
        .clone()
        .or(config.out.clone())
        .unwrap_or_else(|| PathBuf::from("ancient-flow-out"));
    let name = cli.command.name();
    let params = config.params.as_ref();

    macro_rules! dispatch {
        ($flags:expr, $body:expr) => {{
            let resolved = merge(&$flags, params)?;
            let digest = digest(name, grid, seed, &resolved)?;
            let mut run = Run::new(grid, seed, Output::new(out, cli.global.quiet)?, digest);
            run.out.write_json("inputs.json", &json!({"command": name, "grid": grid, "seed": seed, "params": resolved}))?;
            $body(resolved, &mut run)?;
            run.finish()
        }};
    }

    match cli.command {
        Command::Torus(a) => dispatch!(a, commands::torus::run),
        Command::Spectrum(a) => dispatch!(a, commands::spectrum::run),
        Command::Flow(a) => dispatch!(a, commands::flow::run_physical),
        Command::Rescaled(a) => dispatch!(a, commands::flow::run_rescaled_flow),
        Command::Caloric(a) => dispatch!(a, commands::flow::run_caloric),
        Command::Codim(a) => dispatch!(a, commands::codim::run),
        Command::Entropy(a) => dispatch!(a, commands::entropy::run),
        Command::Verify(v) => match v {
            VerifyCommand::Poincare(a) => {
                dispatch!(a, |a, run: &mut Run| commands::verify::run(VerifyCommand::Poincare(a), run))
            }
            VerifyCommand::Rayleigh(a) => {
                dispatch!(a, |a, run: &mut Run| commands::verify::run(VerifyCommand::Rayleigh(a), run))
            }
            VerifyCommand::Carleman(a) => {
                dispatch!(a, |a, run: &mut Run| commands::verify::run(VerifyCommand::Carleman(a), run))
            }
            VerifyCommand::Drift(a) => {
                dispatch!(a, |a, run: &mut Run| commands::verify::run(VerifyCommand::Drift(a), run))
            }
            VerifyCommand::Growth(a) => {
                dispatch!(a, |a, run: &mut Run| commands::verify::run(VerifyCommand::Growth(a), run))
            }
            VerifyCommand::Rigidity(a) => {
                dispatch!(a, |a, run: &mut Run| commands::verify::run(VerifyCommand::Rigidity(a), run))
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error [{}]: {e}", e.tag());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}


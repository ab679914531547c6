mod commands;
mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Command;
use config::{parse_checkpoints, read_value, Experiment, Overrides};
use report::{CliError, EXIT_CONFIG, EXIT_PASS, EXIT_PROPERTY};

/// Bounded remainder set experiments on p-adic solenoids.
#[derive(Parser, Debug)]
#[command(name = "brs", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Experiment config (flat JSON object).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Comma-separated checkpoints, overriding the config.
    #[arg(long, global = true)]
    checkpoints: Option<String>,
    /// Seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write an SVG chart of the discrepancy series.
    #[arg(long, global = true)]
    svg: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// List realizable volumes up to a bound.
    Volumes,
    /// Build a bounded remainder set and write its boxes.
    Construct,
    /// Discrepancy series at the checkpoints, with the plateau check.
    Verify,
    /// Compare cut-and-project multiplicities with the indicator along the orbit.
    Cutproject,
    /// Weyl sums against the geometric-series bound.
    Weyl,
    /// Run the config's "experiments" list concurrently.
    Batch,
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let path = cli.config.as_deref().ok_or_else(|| CliError::config("--config is required"))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let ov = Overrides {
        checkpoints: cli.checkpoints.as_deref().map(parse_checkpoints).transpose()?,
        seed: cli.seed,
    };
    let value = read_value(path)?;
    let cmd = match cli.command {
        Cmd::Volumes => Command::Volumes,
        Cmd::Construct => Command::Construct,
        Cmd::Verify => Command::Verify,
        Cmd::Cutproject => Command::Cutproject,
        Cmd::Weyl => Command::Weyl,
        Cmd::Batch => {
            let results = commands::batch(&value, base, &ov, &cli.out, cli.svg)?;
            for r in &results {
                println!("{} ({}): exit {} {}", r.name, r.command, r.code, r.message);
            }
            return Ok(results.iter().map(|r| r.code).max().unwrap_or(EXIT_PASS));
        }
    };
    let exp = Experiment::from_value(value, base, &ov)?;
    let pass = commands::run(cmd, &exp, &cli.out, cli.svg)?;
    println!("{}: {} ({})", cmd.name(), if pass { "pass" } else { "FAIL" }, cli.out.join("verdict.json").display());
    Ok(if pass { EXIT_PASS } else { EXIT_PROPERTY })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}

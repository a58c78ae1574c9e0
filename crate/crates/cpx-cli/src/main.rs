//! `cpx` binary: argument parsing, environment setup, dispatch and exit
//! codes (0 data written, 1 validation suite failed, 2 config or runtime
//! error, 3 non-converged solves under `--strict`).

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

mod commands;
mod config;

use commands::CommandContext;
use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "cpx",
    version,
    about = "Polynomial families, node sets and extremal-function estimates \
             for triangle exponent bodies"
)]
struct Cli {
    /// Path to the JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config `output` entry. Default is the
    /// current directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exit with code 3 when any solve fails to converge (the default still
    /// writes the data, flagged converged=false).
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ordered multi-index basis table for the configured body and degree.
    Basis,
    /// Greedy determinant-maximising node selection on the configured set.
    Fekete,
    /// Sequential one-node-at-a-time (Leja) selection on the configured set.
    Leja,
    /// Monic Chebyshev solve for every basis position.
    Cheb,
    /// Directional Chebyshev constants over midpoint directions.
    Tau,
    /// Transfinite-diameter estimates, determinant and directional routes.
    Delta,
    /// Family envelope for the extremal function on the evaluation grid.
    Extremal,
    /// Boundary top-line envelope and the direct scaling ladder.
    Robin,
    /// Run the acceptance battery and report pass/fail per suite.
    Validate {
        /// Substring filter on suite id or name (case-insensitive).
        #[arg(long)]
        suite: Option<String>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(threads) = std::env::var("CPX_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!(
                    "{}",
                    serde_json::json!({
                        "error": format!("CPX_THREADS must be a positive integer, got {threads:?}")
                    })
                );
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("{}", serde_json::json!({ "error": format!("{err:#}") }));
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    if let Command::Validate { suite } = &cli.command {
        return commands::cmd_validate(cli.config.as_deref(), cli.out.as_deref(), suite.as_deref());
    }
    let config_path = cli
        .config
        .as_deref()
        .context("--config is required for this command")?;
    let (config, config_dir) = RunConfig::load(config_path)?;
    let out_dir = match (&cli.out, &config.output) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => {
            let p = PathBuf::from(o);
            if p.is_absolute() {
                p
            } else {
                config_dir.join(p)
            }
        }
        (None, None) => PathBuf::from("."),
    };
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
    let ctx = CommandContext {
        config,
        config_dir,
        out_dir,
        strict: cli.strict,
    };
    match cli.command {
        Command::Basis => commands::cmd_basis(&ctx),
        Command::Fekete => commands::cmd_fekete(&ctx),
        Command::Leja => commands::cmd_leja(&ctx),
        Command::Cheb => commands::cmd_cheb(&ctx),
        Command::Tau => commands::cmd_tau(&ctx),
        Command::Delta => commands::cmd_delta(&ctx),
        Command::Extremal => commands::cmd_extremal(&ctx),
        Command::Robin => commands::cmd_robin(&ctx),
        Command::Validate { .. } => unreachable!("handled above"),
    }
}

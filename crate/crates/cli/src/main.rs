//! `mdlab`: batch front end for multiplier norm brackets.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 resource cap,
//! 4 solver non-convergence or a failed certificate check.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Ctx, ExtensionArgs, FejerArgs};
use config::Config;
use error::Result;
use output::Sink;

#[derive(Debug, Parser)]
#[command(name = "mdlab", version, about = "Certified brackets for Herz-Schur multiplier norms")]
struct Cli {
    /// Group specification (JSON).
    #[arg(long, global = true, env = "MDLAB_GROUP")]
    group: Option<PathBuf>,
    /// Output directory; reports go to stdout when absent.
    #[arg(long, global = true, env = "MDLAB_OUT")]
    out: Option<PathBuf>,
    #[arg(long, global = true, env = "MDLAB_TOL")]
    tol: Option<f64>,
    #[arg(long, global = true, env = "MDLAB_SEED")]
    seed: Option<u64>,
    /// JSON file overriding the built-in defaults.
    #[arg(long, global = true, env = "MDLAB_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dump the word-length ball `index,canonical_string,length`.
    Ball {
        #[arg(short = 'R', long, allow_negative_numbers = true)]
        radius: i64,
    },
    /// Schur multiplier norm of a matrix (CSV or SCHR1 binary).
    Schur {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, env = "MDLAB_MAX_ITER")]
        max_iter: Option<usize>,
    },
    /// Two-sided bracket for the M_d norm of a multiplier literal.
    Bracket {
        #[arg(long)]
        multiplier: PathBuf,
        #[arg(short, long, default_value_t = 2)]
        d: usize,
        #[arg(short = 'R', long, allow_negative_numbers = true)]
        radius: i64,
    },
    /// Convergence table for Fejér-averaged radial multipliers.
    Fejer {
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<f64>,
        #[arg(long = "n", value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Zip the r and N lists instead of sweeping N for each r.
        #[arg(long)]
        pairs: bool,
        #[arg(short, long, default_value_t = 2)]
        d: usize,
        /// Radius of the window for the pointwise residual.
        #[arg(long)]
        window: Option<usize>,
        /// Uniform bound every upper end must respect.
        #[arg(short = 'C', long = "bound", default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 0.25)]
        target_ratio: f64,
        /// Radius of the Gram truncation behind the lower bounds.
        #[arg(long)]
        lower_radius: Option<usize>,
    },
    /// Lifted multiplier approximants on SL(2,Z)⋉Z² (the default group).
    Extension {
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 8, 16])]
        k: Vec<usize>,
        #[arg(short = 'R', long, default_value_t = 3, allow_negative_numbers = true)]
        radius: i64,
        #[arg(short = 'C', long = "bound")]
        c: Option<f64>,
        #[arg(long, default_value_t = 0.25)]
        target_ratio: f64,
    },
    /// Contract checks for the analytic family of tree representations.
    Report {
        /// Parameters such as `0.5`, `0.3+0.3i`; defaults to a 9-point grid.
        #[arg(long, value_delimiter = ',')]
        z: Vec<String>,
        #[arg(short = 'R', long, default_value_t = 6)]
        radius: usize,
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(t) = cli.tol {
        cfg.tol = t;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Command::Schur { max_iter: Some(m), .. } = &cli.command {
        cfg.max_iter = *m;
    }
    cfg.validate()?;
    let ctx = Ctx { cfg, group_path: cli.group, sink: Sink::new(cli.out)? };
    match cli.command {
        Command::Ball { radius } => commands::ball(&ctx, radius),
        Command::Schur { matrix, .. } => commands::schur(&ctx, &matrix),
        Command::Bracket { multiplier, d, radius } => commands::bracket(&ctx, &multiplier, d, radius),
        Command::Fejer { r, n, pairs, d, window, c, target_ratio, lower_radius } => {
            commands::fejer(&ctx, &FejerArgs { r, n, pairs, d, window, c, target_ratio, lower_radius })
        }
        Command::Extension { k, radius, c, target_ratio } => {
            commands::extension(&ctx, &ExtensionArgs { k, radius, c, target_ratio })
        }
        Command::Report { z, radius, rank } => commands::report(&ctx, &z, radius, rank),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mdlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! `auvsim` — scenario runner for the multi-AUV boundary-control simulator.
//!
//! Exit codes: 0 success, 1 domain error (bad config, IO, divergence),
//! 2 usage error.

mod campaign;
mod commands;
mod table;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "auvsim", version, about = "Multi-AUV boundary-control simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario config and write a run directory.
    Run {
        /// Scenario TOML file.
        config: PathBuf,
        /// Run directory to write (default: <out-root>/<config-stem>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the number of agents.
        #[arg(long)]
        agents: Option<usize>,
        /// Override the simulated duration, s.
        #[arg(long)]
        duration: Option<f64>,
    },
    /// Recompute and print metrics for one or more run directories.
    Metrics {
        /// Run directories produced by `run` or `campaign`.
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
        /// Render comparison rows (one per run) instead of prose.
        #[arg(long)]
        table: bool,
        /// Compute from delivered range samples instead of true positions.
        #[arg(long)]
        measured: bool,
        /// Emit the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run a predefined simulation campaign and print its summary table.
    Campaign {
        /// One of: fencing_heb, fencing_rvb, milling_heb, milling_rvb.
        name: String,
        /// Output root (default: <out-root>/<campaign-name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Base seed for every run in the campaign.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the duration of every run, s.
        #[arg(long)]
        duration: Option<f64>,
    },
    /// Re-execute a run directory and verify it reproduces exactly.
    Replay {
        dir: PathBuf,
    },
}

/// Default output root: $AUVSIM_OUT or ./runs.
fn out_root() -> PathBuf {
    std::env::var_os("AUVSIM_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run {
            config,
            out,
            seed,
            agents,
            duration,
        } => commands::cmd_run(&config, out, seed, agents, duration),
        Cmd::Metrics {
            dirs,
            table,
            measured,
            json,
        } => commands::cmd_metrics(&dirs, table, measured, json),
        Cmd::Campaign {
            name,
            out,
            seed,
            duration,
        } => {
            if !campaign::CAMPAIGN_NAMES.contains(&name.as_str()) {
                eprintln!(
                    "unknown campaign `{name}`; valid campaigns: {}",
                    campaign::CAMPAIGN_NAMES.join(", ")
                );
                return ExitCode::from(2);
            }
            campaign::cmd_campaign(&name, out, seed, duration)
        }
        Cmd::Replay { dir } => commands::cmd_replay(&dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

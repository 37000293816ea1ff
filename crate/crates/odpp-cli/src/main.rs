use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use odpp::trainer::AblationMode;
use odpp_cli::commands::{cmd_ablate, cmd_eval, cmd_plot, cmd_spectral, cmd_train};
use odpp_cli::config::RunConfig;

#[derive(Parser)]
#[command(
    name = "odpp",
    about = "Option discovery on discrete mazes with DPP diversity/coverage objectives"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the maze's transition graph and Laplacian spectrum fixtures.
    Spectral {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train options and write a checkpoint plus learning-curve CSV.
    Train {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// One of: ib, ib+l1, full.
        #[arg(long)]
        ablation: Option<String>,
    },
    /// Evaluate a checkpoint with fresh rollouts; write metrics and
    /// trajectories.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Trajectories per option (default from the run config).
        #[arg(long)]
        rollouts: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Render exported trajectories over a maze layout as an SVG.
    Plot {
        #[arg(long)]
        trajectories: PathBuf,
        #[arg(long)]
        maze: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run all three ablation ladders and emit a comparison table.
    Ablate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load_config(path: &Option<PathBuf>, seed: Option<u64>) -> Result<RunConfig> {
    let mut cfg = match path {
        Some(p) => RunConfig::from_toml(
            &fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        )?,
        None => RunConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
        cfg.eval_seed = s.wrapping_add(1);
    }
    Ok(cfg)
}

fn parse_ablation(raw: &Option<String>) -> Result<Option<AblationMode>> {
    match raw {
        None => Ok(None),
        Some(name) => AblationMode::from_name(name)
            .map(Some)
            .with_context(|| format!("unknown ablation {name:?} (expected ib, ib+l1 or full)")),
    }
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Spectral { config, out, seed } => {
            let cfg = load_config(&config, seed)?;
            cmd_spectral(&cfg, &out)
        }
        Command::Train { config, out, seed, ablation } => {
            let cfg = load_config(&config, seed)?;
            let mode = parse_ablation(&ablation)?;
            cmd_train(&cfg, mode, &out)
        }
        Command::Eval { checkpoint, out, rollouts, seed } => {
            cmd_eval(&checkpoint, &out, rollouts, seed)
        }
        Command::Plot { trajectories, maze, out } => cmd_plot(&trajectories, &maze, &out),
        Command::Ablate { config, out, seed } => {
            let cfg = load_config(&config, seed)?;
            cmd_ablate(&cfg, &out)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            let flat = format!("{error:#}").replace('\n', "; ");
            eprintln!("error: {flat}");
            ExitCode::FAILURE
        }
    }
}

//! Subcommand implementations. Each writes plain files into an output
//! directory and is byte-deterministic for a fixed config and seed.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use odpp::gridworld::{parse_maze, trajectory_to_json_line, TrajectoryJson};
use odpp::spectral::{build_graph, laplacian, spectrum, StateFeatureMap};
use odpp::trainer::{
    exact_maze_spectrum, fnv1a_hex, train, AblationMode, Checkpoint, ObjectiveReport,
};

use crate::config::RunConfig;
use crate::metrics::evaluate_options;
use crate::svg::render_svg;

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Builds the exhaustive transition graph and writes the graph and spectrum
/// fixtures (plus the maze layout). Idempotent: re-runs are byte-identical.
pub fn cmd_spectral(cfg: &RunConfig, out_dir: &Path) -> Result<()> {
    let maze = cfg.maze_spec()?;
    let graph = build_graph(maze.num_states(), maze.exhaustive_transitions())
        .context("transition graph")?;
    let l = laplacian(&graph, false).context("laplacian")?;
    let spec = spectrum(&l, cfg.feature_dim.min(maze.num_states()), false).context("spectrum")?;
    write_file(&out_dir.join("maze.txt"), &maze.to_text())?;
    write_file(&out_dir.join("graph.txt"), &graph.to_fixture())?;
    write_file(&out_dir.join("spectrum.txt"), &spec.to_fixture())?;
    Ok(())
}

/// Runs training and writes `checkpoint.json`, `reports.csv`, `maze.txt`
/// and the resolved `config.toml`.
pub fn cmd_train(cfg: &RunConfig, ablation: Option<AblationMode>, out_dir: &Path) -> Result<()> {
    let maze = cfg.maze_spec()?;
    let mut option_cfg = cfg.option_config();
    if let Some(mode) = ablation {
        option_cfg = option_cfg.with_ablation(mode);
    }
    let output = train(&maze, &option_cfg).context("training")?;

    let mut csv = String::from(ObjectiveReport::CSV_HEADER);
    csv.push('\n');
    for report in &output.reports {
        csv.push_str(&report.csv_row());
        csv.push('\n');
    }

    let checkpoint = Checkpoint::new(option_cfg, output.spectrum_hash, output.policies);
    write_file(&out_dir.join("checkpoint.json"), &checkpoint.to_json())?;
    write_file(&out_dir.join("reports.csv"), &csv)?;
    write_file(&out_dir.join("maze.txt"), &maze.to_text())?;
    write_file(&out_dir.join("config.toml"), &cfg.to_toml())?;
    Ok(())
}

/// Loads a checkpoint (with its sibling `config.toml`), replays fresh
/// evaluation rollouts and writes `metrics.json` and `trajectories.jsonl`.
pub fn cmd_eval(
    checkpoint_path: &Path,
    out_dir: &Path,
    rollouts_override: Option<usize>,
    seed_override: Option<u64>,
) -> Result<()> {
    let checkpoint_file = if checkpoint_path.is_dir() {
        checkpoint_path.join("checkpoint.json")
    } else {
        checkpoint_path.to_path_buf()
    };
    let text = fs::read_to_string(&checkpoint_file)
        .with_context(|| format!("reading {}", checkpoint_file.display()))?;
    let checkpoint = Checkpoint::from_json(&text).context("checkpoint")?;
    let config_path = checkpoint_file
        .parent()
        .map(|p| p.join("config.toml"))
        .filter(|p| p.exists())
        .with_context(|| "config.toml not found next to the checkpoint")?;
    let run_cfg = RunConfig::from_toml(
        &fs::read_to_string(&config_path)
            .with_context(|| format!("reading {}", config_path.display()))?,
    )?;

    let maze = run_cfg.maze_spec()?;
    if maze.num_states() != checkpoint.policies.num_states() {
        bail!(
            "incompatible maze/checkpoint: maze has {} states, checkpoint {}",
            maze.num_states(),
            checkpoint.policies.num_states()
        );
    }
    let spec = exact_maze_spectrum(&maze, checkpoint.config.feature_dim).context("spectrum")?;
    if checkpoint.config.spectrum_period == 0 {
        let hash = fnv1a_hex(&spec.to_fixture());
        if hash != checkpoint.spectrum_hash {
            bail!(
                "incompatible maze/checkpoint: spectrum hash {} vs {}",
                hash,
                checkpoint.spectrum_hash
            );
        }
    }
    let features = StateFeatureMap::from_spectrum(&spec);

    let rollouts = rollouts_override.unwrap_or(run_cfg.eval_rollouts);
    let seed = seed_override.unwrap_or(run_cfg.eval_seed);
    let outcome = evaluate_options(
        &maze,
        &checkpoint.policies,
        &features,
        checkpoint.config.landmark_cap,
        checkpoint.config.horizon,
        rollouts,
        seed,
        &run_cfg.hash(),
    )?;

    let metrics_json =
        serde_json::to_string_pretty(&outcome.report).context("metrics serialization")?;
    write_file(&out_dir.join("metrics.json"), &format!("{metrics_json}\n"))?;

    let mut lines = String::new();
    for record in &outcome.trajectories {
        lines.push_str(&trajectory_to_json_line(record, &maze).context("trajectory export")?);
        lines.push('\n');
    }
    write_file(&out_dir.join("trajectories.jsonl"), &lines)?;
    Ok(())
}

/// Renders trajectories over a maze layout into an SVG file.
pub fn cmd_plot(trajectories_path: &Path, maze_path: &Path, out_file: &Path) -> Result<()> {
    let maze_text = fs::read_to_string(maze_path)
        .with_context(|| format!("reading {}", maze_path.display()))?;
    let maze = parse_maze(&maze_text).context("maze layout")?;
    let text = fs::read_to_string(trajectories_path)
        .with_context(|| format!("reading {}", trajectories_path.display()))?;
    let mut trajectories: Vec<TrajectoryJson> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        trajectories.push(
            serde_json::from_str(line)
                .with_context(|| format!("trajectory line {}", idx + 1))?,
        );
    }
    let svg = render_svg(&maze, &trajectories).map_err(|e| anyhow::anyhow!(e))?;
    write_file(out_file, &svg)?;
    Ok(())
}

/// Runs the ablation ladder (ib, ib+l1, full), evaluates each run and emits
/// a combined comparison table.
pub fn cmd_ablate(cfg: &RunConfig, out_dir: &Path) -> Result<()> {
    let modes = [AblationMode::Ib, AblationMode::IbL1, AblationMode::Full];
    let mut table = String::from(
        "ablation,mean_final_distance,std_final_x,std_final_y,coverage_score,diversity_score\n",
    );
    for mode in modes {
        let subdir = out_dir.join(mode.name().replace('+', "_"));
        cmd_train(cfg, Some(mode), &subdir)?;
        cmd_eval(&subdir, &subdir, None, None)?;
        let metrics_text = fs::read_to_string(subdir.join("metrics.json"))?;
        let report: crate::metrics::MetricsReport = serde_json::from_str(&metrics_text)?;
        table.push_str(&format!(
            "{},{:?},{:?},{:?},{:?},{:?}\n",
            mode.name(),
            report.mean_final_distance,
            report.std_final_x,
            report.std_final_y,
            report.coverage_score,
            report.diversity_score
        ));
    }
    write_file(&out_dir.join("comparison.csv"), &table)?;
    Ok(())
}

//! End-to-end smoke tests for the command-line interface.

use std::process::Command;

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_odpp")
}

const SMALL_CONFIG: &str = "maze = \"four_room\"\nsize = 9\nnum_options = 2\nhorizon = 10\n\
    rollouts_per_pair = 2\nstarts_per_iter = 1\nlandmark_cap = 4\nfeature_dim = 6\n\
    iterations = 3\nseed = 5\neval_rollouts = 2\n";

#[test]
fn spectral_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.toml");
    std::fs::write(&config, SMALL_CONFIG).unwrap();
    let out_dir = dir.path().join("out");
    for _ in 0..2 {
        let out = Command::new(binary())
            .args([
                "spectral",
                "--config",
                config.to_str().unwrap(),
                "--out",
                out_dir.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let spectrum = std::fs::read_to_string(out_dir.join("spectrum.txt")).unwrap();
    assert!(spectrum.starts_with("40 6 0\n"));
}

#[test]
fn train_eval_plot_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.toml");
    std::fs::write(&config, SMALL_CONFIG).unwrap();
    let run_dir = dir.path().join("run");
    let train = Command::new(binary())
        .args([
            "train",
            "--config",
            config.to_str().unwrap(),
            "--out",
            run_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(train.status.success(), "{}", String::from_utf8_lossy(&train.stderr));
    let reports = std::fs::read_to_string(run_dir.join("reports.csv")).unwrap();
    assert_eq!(reports.lines().count(), 4, "header plus three iterations");
    assert!(reports.starts_with("iteration,l_ib,l_dpp1,l_dpp2,l_dpp3,total,entropy,kl\n"));

    let eval = Command::new(binary())
        .args([
            "eval",
            "--checkpoint",
            run_dir.to_str().unwrap(),
            "--out",
            run_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(eval.status.success(), "{}", String::from_utf8_lossy(&eval.stderr));
    let metrics = std::fs::read_to_string(run_dir.join("metrics.json")).unwrap();
    assert!(metrics.contains("mean_final_distance"));
    assert!(metrics.contains("config_hash"));

    let traj = run_dir.join("trajectories.jsonl");
    let maze = run_dir.join("maze.txt");
    let svg = run_dir.join("plot.svg");
    let plot = Command::new(binary())
        .args([
            "plot",
            "--trajectories",
            traj.to_str().unwrap(),
            "--maze",
            maze.to_str().unwrap(),
            "--out",
            svg.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(plot.status.success(), "{}", String::from_utf8_lossy(&plot.stderr));
    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<svg"));
    // 2 options x 2 eval rollouts.
    assert_eq!(svg_text.matches("<polyline").count(), 4);
}

#[test]
fn ablate_emits_comparison_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.toml");
    std::fs::write(&config, SMALL_CONFIG).unwrap();
    let out_dir = dir.path().join("ablate");
    let out = Command::new(binary())
        .args([
            "ablate",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(out_dir.join("comparison.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("ib,"));
    assert!(lines[2].starts_with("ib+l1,"));
    assert!(lines[3].starts_with("full,"));
    for mode_dir in ["ib", "ib_l1", "full"] {
        assert!(out_dir.join(mode_dir).join("checkpoint.json").exists());
    }
}

#[test]
fn errors_are_one_line_and_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    // Unknown ablation flag value.
    let config = dir.path().join("config.toml");
    std::fs::write(&config, SMALL_CONFIG).unwrap();
    let out = Command::new(binary())
        .args([
            "train",
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().join("x").to_str().unwrap(),
            "--ablation",
            "everything",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.lines().count(), 1, "stderr: {stderr}");
    assert!(stderr.starts_with("error: "));

    // Missing config file.
    let out = Command::new(binary())
        .args([
            "train",
            "--config",
            dir.path().join("nope.toml").to_str().unwrap(),
            "--out",
            dir.path().join("y").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.lines().count(), 1);
    assert!(stderr.starts_with("error: "));

    // Malformed trajectory JSON.
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{not json}\n").unwrap();
    let maze = dir.path().join("maze.txt");
    std::fs::write(&maze, "...\n...\n").unwrap();
    let out = Command::new(binary())
        .args([
            "plot",
            "--trajectories",
            bad.to_str().unwrap(),
            "--maze",
            maze.to_str().unwrap(),
            "--out",
            dir.path().join("p.svg").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
}

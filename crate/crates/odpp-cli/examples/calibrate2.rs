//! Calibration for the four-room comparison and the D=2 Fiedler-span check.

use odpp::gridworld::{build_maze, rollout, MazeKind, UniformPolicy};
use odpp::spectral::{fiedler, StateFeatureMap};
use odpp::trainer::{exact_maze_spectrum, train, AblationMode, OptionConfig};
use odpp_cli::metrics::evaluate_options;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "fourroom".into());
    let iters: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(150);
    let seeds: u64 = std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(5);

    let base = OptionConfig {
        iterations: iters,
        starts_per_iter: 1,
        alpha1: 0.1,
        alpha2: std::env::var("A2").ok().and_then(|s| s.parse().ok()).unwrap_or(0.02),
        alpha3: std::env::var("A3").ok().and_then(|s| s.parse().ok()).unwrap_or(0.2),
        beta: 1e-3,
        lr_policy: 8.0,
        lr_prior: 0.1,
        ..OptionConfig::default()
    };

    match which.as_str() {
        "fourroom" => {
            let maze = build_maze(MazeKind::FourRoom { size: 11 }).unwrap();
            let spec = exact_maze_spectrum(&maze, base.feature_dim).unwrap();
            let features = StateFeatureMap::from_spectrum(&spec);
            let mut ok = 0;
            for seed in 0..seeds {
                let mut scores = Vec::new();
                for mode in [AblationMode::Ib, AblationMode::Full] {
                    let cfg = OptionConfig { seed, ..base.clone() }.with_ablation(mode);
                    let out = train(&maze, &cfg).unwrap();
                    let eval = evaluate_options(
                        &maze, &out.policies, &features, cfg.landmark_cap, cfg.horizon,
                        10, seed + 1000, "cal",
                    )
                    .unwrap();
                    scores.push((eval.report.coverage_score, eval.report.diversity_score));
                }
                let pass = scores[1].0 > scores[0].0 && scores[1].1 > scores[0].1;
                if pass {
                    ok += 1;
                }
                println!(
                    "seed {seed}: ib(cov={:.3} div={:.3}) full(cov={:.3} div={:.3}) pass={pass}",
                    scores[0].0, scores[0].1, scores[1].0, scores[1].1
                );
            }
            println!("four-room full>ib both measures: {ok}/{seeds}");
        }
        "fiedler" => {
            let maze = build_maze(MazeKind::Corridor { arm_length: 12, chamber: 5 }).unwrap();
            let spec = exact_maze_spectrum(&maze, 2).unwrap();
            let fv = fiedler(&spec).unwrap();
            let mut ok = 0;
            for seed in 0..seeds {
                let cfg = OptionConfig {
                    seed,
                    feature_dim: 2,
                    alpha2: 0.0,
                    alpha3: 0.0,
                    ..base.clone()
                };
                let out = train(&maze, &cfg).unwrap();
                let span = |records: &[odpp::gridworld::TrajectoryRecord]| -> f64 {
                    records
                        .iter()
                        .map(|r| {
                            let vals: Vec<f64> = r.states.iter().map(|&s| fv[s]).collect();
                            let max = vals.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
                            let min = vals.iter().fold(f64::INFINITY, |a, &b| a.min(b));
                            max - min
                        })
                        .sum::<f64>()
                        / records.len() as f64
                };
                let mut rng = ChaCha8Rng::seed_from_u64(seed + 500);
                let s0 = maze.start_states()[0];
                let mut trained_rollouts = Vec::new();
                let mut random_rollouts = Vec::new();
                for c in 0..cfg.num_options {
                    for _ in 0..10 {
                        trained_rollouts.push(
                            rollout(&maze, s0, &out.policies, c, cfg.horizon, &mut rng).unwrap(),
                        );
                        random_rollouts.push(
                            rollout(&maze, s0, &UniformPolicy, c, cfg.horizon, &mut rng).unwrap(),
                        );
                    }
                }
                let trained_span = span(&trained_rollouts);
                let random_span = span(&random_rollouts);
                let pass = trained_span >= random_span;
                if pass {
                    ok += 1;
                }
                println!(
                    "seed {seed}: trained span {trained_span:.4} random span {random_span:.4} pass={pass}"
                );
            }
            println!("fiedler span: {ok}/{seeds}");
        }
        other => panic!("unknown mode {other}"),
    }
}

//! Calibration for the downstream selector warm-start comparison.

use odpp::gridworld::{build_maze, MazeKind};
use odpp::trainer::{train, train_selector, OptionConfig, SelectorConfig};

fn main() {
    let goal_x: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8);
    let goal_y: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(8);
    let opt_iters: usize = std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(150);
    let threshold: f64 = std::env::args().nth(4).and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let seeds: u64 = std::env::args().nth(5).and_then(|s| s.parse().ok()).unwrap_or(5);

    let mut maze = build_maze(MazeKind::FourRoom { size: 11 }).unwrap();
    maze.set_goals(&[(goal_x, goal_y)]).unwrap();

    let mut ok = 0;
    for seed in 0..seeds {
        let cfg = OptionConfig {
            iterations: opt_iters,
            starts_per_iter: 1,
            alpha1: 0.1,
            alpha2: 0.01,
            alpha3: 0.35,
            beta: 1e-3,
            lr_policy: 8.0,
            lr_prior: 0.1,
            seed,
            ..OptionConfig::default()
        };
        let t0 = std::time::Instant::now();
        let out = train(&maze, &cfg).unwrap();
        let mut iters = Vec::new();
        for init_from_prior in [true, false] {
            let sel_cfg = SelectorConfig {
                decisions_per_episode: 2,
                option_horizon: 50,
                episodes_per_iter: 24,
                iterations: 40,
                lr: 2.0,
                goal_reward: 1.0,
                step_penalty: 0.002,
                init_from_prior,
                seed: seed + 77,
            };
            let sel = train_selector(&out.policies, &maze, &sel_cfg).unwrap();
            let reached = sel.iterations_to_threshold(threshold);
            let best = sel.mean_returns.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let first = sel.mean_returns.first().copied().unwrap_or(0.0);
            println!("  init_prior={} first={:.3} best={:.3} last={:.3}", init_from_prior, first, best, sel.mean_returns.last().unwrap());
            iters.push(reached);
        }
        let prior = iters[0].map(|v| v as i64).unwrap_or(i64::MAX);
        let uniform = iters[1].map(|v| v as i64).unwrap_or(i64::MAX);
        let pass = prior <= uniform;
        if pass {
            ok += 1;
        }
        println!(
            "seed {seed}: prior_init={:?} uniform_init={:?} pass={pass} ({:.0?})",
            iters[0], iters[1], t0.elapsed()
        );
    }
    println!("selector warm start: {ok}/{seeds}");
}

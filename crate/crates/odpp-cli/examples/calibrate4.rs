//! Correlation probe: prior mass vs goal-hit rate per option.

use odpp::gridworld::{build_maze, rollout, MazeKind};
use odpp::trainer::{train, OptionConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let goals = [(8usize, 8usize), (8, 5), (5, 8), (8, 2)];
    let cfg = OptionConfig {
        iterations: std::env::var("ITERS").ok().and_then(|s| s.parse().ok()).unwrap_or(150),
        starts_per_iter: 1,
        alpha1: 0.1,
        alpha2: 0.01,
        alpha3: 0.35,
        beta: 1e-3,
        lr_policy: 8.0,
        lr_prior: std::env::var("LRP").ok().and_then(|s| s.parse().ok()).unwrap_or(0.1),
        seed: 0,
        ..OptionConfig::default()
    };
    let maze = build_maze(MazeKind::FourRoom { size: 11 }).unwrap();
    let out = train(&maze, &cfg).unwrap();
    let s0 = maze.start_states()[0];
    let prior = out.policies.prior_probs(s0);
    println!("prior at s0: {:?}", prior.iter().map(|p| (p * 1000.0).round() / 1000.0).collect::<Vec<_>>());
    for (gx, gy) in goals {
        let goal_state = maze.state_at(gx, gy).unwrap();
        let mut hit_rates = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for c in 0..cfg.num_options {
            let mut hits = 0;
            for _ in 0..200 {
                let rec = rollout(&maze, s0, &out.policies, c, 50, &mut rng).unwrap();
                if rec.states.contains(&goal_state) {
                    hits += 1;
                }
            }
            hit_rates.push(hits as f64 / 200.0);
        }
        // Correlation between prior mass and hit rate.
        let mean_p = prior.iter().sum::<f64>() / 10.0;
        let mean_h = hit_rates.iter().sum::<f64>() / 10.0;
        let cov: f64 = prior.iter().zip(&hit_rates).map(|(p, h)| (p - mean_p) * (h - mean_h)).sum();
        let sp: f64 = prior.iter().map(|p| (p - mean_p) * (p - mean_p)).sum::<f64>().sqrt();
        let sh: f64 = hit_rates.iter().map(|h| (h - mean_h) * (h - mean_h)).sum::<f64>().sqrt();
        let corr = if sp > 0.0 && sh > 0.0 { cov / (sp * sh) } else { 0.0 };
        println!(
            "goal ({gx},{gy}): hits={:?} corr={corr:.3}",
            hit_rates.iter().map(|h| (h * 100.0).round() / 100.0).collect::<Vec<_>>()
        );
    }
}

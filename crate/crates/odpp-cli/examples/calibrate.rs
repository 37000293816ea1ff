//! Calibration harness: runs the ablation ladder over seeds and prints the
//! metric orderings the acceptance gates depend on.
//!
//! Usage: calibrate <alpha1> <alpha2> <alpha3> <lr_policy> <iterations> <seeds> [arm]

use odpp::gridworld::{build_maze, MazeKind};
use odpp::spectral::StateFeatureMap;
use odpp::trainer::{exact_maze_spectrum, train, AblationMode, OptionConfig};
use odpp_cli::metrics::evaluate_options;

fn main() {
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse().unwrap()).collect();
    let (alpha1, alpha2, alpha3, lr_policy) = (args[0], args[1], args[2], args[3]);
    let iterations = args[4] as usize;
    let seeds = args[5] as u64;
    let arm = args.get(6).map(|&v| v as usize).unwrap_or(12);

    let maze = build_maze(MazeKind::Corridor { arm_length: arm, chamber: 5 }).unwrap();
    let base = OptionConfig {
        iterations,
        starts_per_iter: 1,
        alpha1,
        alpha2,
        alpha3,
        beta: 1e-3,
        lr_policy,
        lr_prior: 0.1,
        ..OptionConfig::default()
    };
    println!(
        "corridor arm={arm} states={} a1={alpha1} a2={alpha2} a3={alpha3} lr={lr_policy} iters={iterations}",
        maze.num_states()
    );

    let spec = exact_maze_spectrum(&maze, base.feature_dim).unwrap();
    let features = StateFeatureMap::from_spectrum(&spec);

    let mut ok_both = 0;
    for seed in 0..seeds {
        let mut row = format!("seed {seed}:");
        let mut dists = Vec::new();
        let mut divs = Vec::new();
        for mode in [AblationMode::Ib, AblationMode::IbL1, AblationMode::Full] {
            let cfg = OptionConfig { seed, ..base.clone() }.with_ablation(mode);
            let t0 = std::time::Instant::now();
            let out = train(&maze, &cfg).unwrap();
            let elapsed = t0.elapsed();
            let eval = evaluate_options(
                &maze, &out.policies, &features, cfg.landmark_cap, cfg.horizon, 10,
                seed + 1000, "cal",
            )
            .unwrap();
            dists.push(eval.report.mean_final_distance);
            divs.push(eval.report.diversity_score);
            row.push_str(&format!(
                " {}[d={:.2} cov={:.2} div={:.2} {:.0?}]",
                mode.name(),
                eval.report.mean_final_distance,
                eval.report.coverage_score,
                eval.report.diversity_score,
                elapsed
            ));
        }
        let order = dists[0] < dists[1] && dists[1] < dists[2];
        let div_ok = divs[2] >= divs[0];
        if order && div_ok {
            ok_both += 1;
        }
        println!("{row} order={order} div_ok={div_ok}");
    }
    println!("seeds passing both: {ok_both}/{seeds}");
}

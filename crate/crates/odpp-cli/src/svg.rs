//! Static SVG aerial views: the maze grid with one colored polyline per
//! trajectory.

use odpp::gridworld::{MazeSpec, TrajectoryJson};

const CELL: usize = 20;

/// Categorical palette indexed by option id (cycled).
pub const PALETTE: [&str; 10] = [
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#46b5b5", "#f032e6", "#9a6324",
    "#808000", "#000075",
];

pub fn option_color(option: usize) -> &'static str {
    PALETTE[option % PALETTE.len()]
}

fn cell_center(x: usize, y: usize) -> (f64, f64) {
    ((x * CELL + CELL / 2) as f64, (y * CELL + CELL / 2) as f64)
}

/// Renders the maze plus trajectories. Trajectories reference cells by
/// `(x, y)`; out-of-range cells are rejected.
pub fn render_svg(maze: &MazeSpec, trajectories: &[TrajectoryJson]) -> Result<String, String> {
    let width = maze.width() * CELL;
    let height = maze.height() * CELL;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    ));
    out.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"#f5f2ea\"/>\n"
    ));
    for y in 0..maze.height() {
        for x in 0..maze.width() {
            if maze.is_wall(x, y) {
                out.push_str(&format!(
                    "  <rect x=\"{}\" y=\"{}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"#3a3a3a\"/>\n",
                    x * CELL,
                    y * CELL
                ));
            }
        }
    }
    for &s in maze.start_states() {
        let (x, y) = maze.coords(s).map_err(|e| e.to_string())?;
        out.push_str(&format!(
            "  <rect x=\"{}\" y=\"{}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"#cfe8cf\"/>\n",
            x * CELL,
            y * CELL
        ));
    }
    for &s in maze.goal_states() {
        let (x, y) = maze.coords(s).map_err(|e| e.to_string())?;
        out.push_str(&format!(
            "  <rect x=\"{}\" y=\"{}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"#f3cdcd\"/>\n",
            x * CELL,
            y * CELL
        ));
    }

    for traj in trajectories {
        let mut points = Vec::with_capacity(traj.states.len());
        for &(x, y) in &traj.states {
            if x >= maze.width() || y >= maze.height() || maze.is_wall(x, y) {
                return Err(format!("trajectory cell ({x}, {y}) is not a free cell"));
            }
            // Small deterministic per-option offset keeps overlapping
            // trajectories distinguishable.
            let (cx, cy) = cell_center(x, y);
            let off = (traj.option % 5) as f64 - 2.0;
            points.push(format!("{:.1},{:.1}", cx + off, cy + off));
        }
        out.push_str(&format!(
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2.5\" \
             stroke-opacity=\"0.85\" stroke-linejoin=\"round\"/>\n",
            points.join(" "),
            option_color(traj.option)
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

//! Room/corridor maze layouts with deterministic grid dynamics.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("degenerate maze size: {0}")]
    DegenerateSize(String),

    #[error("cell ({x}, {y}) is a wall but was declared {role}")]
    WallCell { x: usize, y: usize, role: &'static str },

    #[error("cell ({x}, {y}) outside the {width}x{height} grid")]
    CellOutOfRange { x: usize, y: usize, width: usize, height: usize },

    #[error("state {index} out of range for {num_states} free cells")]
    StateOutOfRange { index: usize, num_states: usize },

    #[error("free cells are not connected")]
    Disconnected,

    #[error("rollout horizon must be at least 1")]
    ZeroHorizon,

    #[error("policy produced a non-finite probability for state {state}")]
    NonFinitePolicy { state: usize },

    #[error("bad maze text: {0}")]
    BadLayout(String),
}

/// The four grid actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Up,
    Down,
    Left,
    Right,
}

pub const ALL_ACTIONS: [Action; 4] = [Action::Up, Action::Down, Action::Left, Action::Right];

impl Action {
    pub fn index(self) -> usize {
        match self {
            Action::Up => 0,
            Action::Down => 1,
            Action::Left => 2,
            Action::Right => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Action> {
        ALL_ACTIONS.get(i).copied()
    }

    /// Displacement in (dx, dy); y grows downward.
    fn delta(self) -> (isize, isize) {
        match self {
            Action::Up => (0, -1),
            Action::Down => (0, 1),
            Action::Left => (-1, 0),
            Action::Right => (1, 0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::Up => "up",
            Action::Down => "down",
            Action::Left => "left",
            Action::Right => "right",
        }
    }

    pub fn from_name(name: &str) -> Option<Action> {
        ALL_ACTIONS.iter().copied().find(|a| a.name() == name)
    }
}

/// Discrete maze: walls over a rectangular grid, with the free cells indexed
/// row-major as the state space.
#[derive(Debug, Clone)]
pub struct MazeSpec {
    width: usize,
    height: usize,
    walls: Vec<bool>,
    start_states: Vec<usize>,
    goal_states: Vec<usize>,
    bottleneck_states: Vec<usize>,
    state_of_cell: Vec<Option<usize>>,
    cell_of_state: Vec<(usize, usize)>,
}

/// Built-in maze topologies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MazeKind {
    /// `size × size` grid cut into four rooms joined by one-cell doorways.
    FourRoom { size: usize },
    /// Four corridor arms radiating from a center cell, each ending in a
    /// `chamber × chamber` room reachable only through its arm.
    Corridor { arm_length: usize, chamber: usize },
}

impl MazeSpec {
    /// Assembles a maze from an explicit wall grid and annotations.
    pub fn from_grid(
        width: usize,
        height: usize,
        walls: Vec<bool>,
        starts: &[(usize, usize)],
        goals: &[(usize, usize)],
        bottlenecks: &[(usize, usize)],
    ) -> Result<Self, GridError> {
        if width == 0 || height == 0 || walls.len() != width * height {
            return Err(GridError::DegenerateSize(format!(
                "{width}x{height} grid with {} wall flags",
                walls.len()
            )));
        }
        let mut state_of_cell = vec![None; width * height];
        let mut cell_of_state = Vec::new();
        for y in 0..height {
            for x in 0..width {
                if !walls[y * width + x] {
                    state_of_cell[y * width + x] = Some(cell_of_state.len());
                    cell_of_state.push((x, y));
                }
            }
        }
        if cell_of_state.is_empty() {
            return Err(GridError::DegenerateSize("no free cells".into()));
        }
        let resolve = |cells: &[(usize, usize)], role: &'static str| -> Result<Vec<usize>, GridError> {
            let mut out = Vec::with_capacity(cells.len());
            for &(x, y) in cells {
                if x >= width || y >= height {
                    return Err(GridError::CellOutOfRange { x, y, width, height });
                }
                match state_of_cell[y * width + x] {
                    Some(s) => out.push(s),
                    None => return Err(GridError::WallCell { x, y, role }),
                }
            }
            Ok(out)
        };
        Ok(Self {
            start_states: resolve(starts, "start")?,
            goal_states: resolve(goals, "goal")?,
            bottleneck_states: resolve(bottlenecks, "bottleneck")?,
            width,
            height,
            walls,
            state_of_cell,
            cell_of_state,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn num_states(&self) -> usize {
        self.cell_of_state.len()
    }

    pub fn is_wall(&self, x: usize, y: usize) -> bool {
        x >= self.width || y >= self.height || self.walls[y * self.width + x]
    }

    pub fn state_at(&self, x: usize, y: usize) -> Option<usize> {
        if x >= self.width || y >= self.height {
            return None;
        }
        self.state_of_cell[y * self.width + x]
    }

    /// Grid coordinates of a state.
    pub fn coords(&self, state: usize) -> Result<(usize, usize), GridError> {
        self.cell_of_state
            .get(state)
            .copied()
            .ok_or(GridError::StateOutOfRange { index: state, num_states: self.num_states() })
    }

    pub fn start_states(&self) -> &[usize] {
        &self.start_states
    }

    pub fn goal_states(&self) -> &[usize] {
        &self.goal_states
    }

    pub fn bottleneck_states(&self) -> &[usize] {
        &self.bottleneck_states
    }

    pub fn set_goals(&mut self, goals: &[(usize, usize)]) -> Result<(), GridError> {
        let mut out = Vec::with_capacity(goals.len());
        for &(x, y) in goals {
            if x >= self.width || y >= self.height {
                return Err(GridError::CellOutOfRange { x, y, width: self.width, height: self.height });
            }
            match self.state_of_cell[y * self.width + x] {
                Some(s) => out.push(s),
                None => return Err(GridError::WallCell { x, y, role: "goal" }),
            }
        }
        self.goal_states = out;
        Ok(())
    }

    pub fn set_starts(&mut self, starts: &[(usize, usize)]) -> Result<(), GridError> {
        let mut out = Vec::with_capacity(starts.len());
        for &(x, y) in starts {
            if x >= self.width || y >= self.height {
                return Err(GridError::CellOutOfRange { x, y, width: self.width, height: self.height });
            }
            match self.state_of_cell[y * self.width + x] {
                Some(s) => out.push(s),
                None => return Err(GridError::WallCell { x, y, role: "start" }),
            }
        }
        self.start_states = out;
        Ok(())
    }

    /// Deterministic dynamics: move to the neighboring free cell, or stay
    /// put when the move hits a wall or the boundary.
    pub fn step(&self, state: usize, action: Action) -> Result<usize, GridError> {
        let (x, y) = self.coords(state)?;
        let (dx, dy) = action.delta();
        let nx = x as isize + dx;
        let ny = y as isize + dy;
        if nx < 0 || ny < 0 {
            return Ok(state);
        }
        match self.state_at(nx as usize, ny as usize) {
            Some(next) => Ok(next),
            None => Ok(state),
        }
    }

    /// Every `(state, next_state)` pair reachable in one step, including the
    /// stay-in-place results of blocked moves. The sweep covers each state
    /// with all four actions, so endpoint counts are uniform across states.
    pub fn exhaustive_transitions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(4 * self.num_states());
        for s in 0..self.num_states() {
            for a in ALL_ACTIONS {
                out.push((s, self.step(s, a).expect("state in range")));
            }
        }
        out
    }

    fn free_cells_connected(&self) -> bool {
        let n = self.num_states();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut visited = 1;
        while let Some(s) = stack.pop() {
            for a in ALL_ACTIONS {
                let t = self.step(s, a).expect("state in range");
                if !seen[t] {
                    seen[t] = true;
                    visited += 1;
                    stack.push(t);
                }
            }
        }
        visited == n
    }

    /// Plain-text layout: `#` wall, `.` free, `S` start, `G` goal.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                let ch = if self.is_wall(x, y) {
                    '#'
                } else {
                    let s = self.state_at(x, y).unwrap();
                    if self.goal_states.contains(&s) {
                        'G'
                    } else if self.start_states.contains(&s) {
                        'S'
                    } else {
                        '.'
                    }
                };
                out.push(ch);
            }
            out.push('\n');
        }
        out
    }
}

/// Parses the plain-text grid format (`#` wall, `.` free, `S` start, `G` goal).
pub fn parse_maze(text: &str) -> Result<MazeSpec, GridError> {
    let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if rows.is_empty() {
        return Err(GridError::BadLayout("empty layout".into()));
    }
    let width = rows[0].chars().count();
    let height = rows.len();
    let mut walls = Vec::with_capacity(width * height);
    let mut starts = Vec::new();
    let mut goals = Vec::new();
    for (y, row) in rows.iter().enumerate() {
        let mut count = 0;
        for (x, ch) in row.chars().enumerate() {
            match ch {
                '#' => walls.push(true),
                '.' => walls.push(false),
                'S' => {
                    walls.push(false);
                    starts.push((x, y));
                }
                'G' => {
                    walls.push(false);
                    goals.push((x, y));
                }
                other => {
                    return Err(GridError::BadLayout(format!(
                        "unexpected character {other:?} at ({x}, {y})"
                    )))
                }
            }
            count += 1;
        }
        if count != width {
            return Err(GridError::BadLayout(format!(
                "row {y} has width {count}, expected {width}"
            )));
        }
    }
    MazeSpec::from_grid(width, height, walls, &starts, &goals, &[])
}

fn build_four_room(size: usize) -> Result<MazeSpec, GridError> {
    if size < 7 {
        return Err(GridError::DegenerateSize(format!(
            "four-room maze needs size >= 7, got {size}"
        )));
    }
    let mid = size / 2;
    let door_low = mid / 2;
    let door_high = mid + (size - mid) / 2;
    let mut walls = vec![false; size * size];
    for y in 0..size {
        for x in 0..size {
            let border = x == 0 || y == 0 || x == size - 1 || y == size - 1;
            let vertical = x == mid && y != door_low && y != door_high;
            let horizontal = y == mid && x != door_low && x != door_high;
            if border || vertical || horizontal {
                walls[y * size + x] = true;
            }
        }
    }
    let start = (door_low, door_low);
    let bottlenecks = [
        (mid, door_low),
        (mid, door_high),
        (door_low, mid),
        (door_high, mid),
    ];
    let maze = MazeSpec::from_grid(size, size, walls, &[start], &[], &bottlenecks)?;
    if !maze.free_cells_connected() {
        return Err(GridError::Disconnected);
    }
    Ok(maze)
}

fn build_corridor(arm_length: usize, chamber: usize) -> Result<MazeSpec, GridError> {
    if arm_length < 2 {
        return Err(GridError::DegenerateSize(format!(
            "corridor arms need length >= 2, got {arm_length}"
        )));
    }
    if chamber == 0 || chamber % 2 == 0 {
        return Err(GridError::DegenerateSize(format!(
            "chamber size must be odd and positive, got {chamber}"
        )));
    }
    let half = arm_length + chamber;
    let size = 2 * half + 3;
    let c = (half + 1) as isize;
    let reach = chamber as isize / 2;
    let mut walls = vec![true; size * size];
    let mut carve = |x: isize, y: isize| {
        walls[y as usize * size + x as usize] = false;
    };
    carve(c, c);
    for d in 1..=arm_length as isize {
        carve(c + d, c);
        carve(c - d, c);
        carve(c, c + d);
        carve(c, c - d);
    }
    for d in (arm_length as isize + 1)..=(arm_length as isize + chamber as isize) {
        for off in -reach..=reach {
            carve(c + d, c + off);
            carve(c - d, c + off);
            carve(c + off, c + d);
            carve(c + off, c - d);
        }
    }
    let start = (c as usize, c as usize);
    let far = arm_length as isize;
    let bottlenecks = [
        ((c + far) as usize, c as usize),
        ((c - far) as usize, c as usize),
        (c as usize, (c + far) as usize),
        (c as usize, (c - far) as usize),
    ];
    let maze = MazeSpec::from_grid(size, size, walls, &[start], &[], &bottlenecks)?;
    if !maze.free_cells_connected() {
        return Err(GridError::Disconnected);
    }
    Ok(maze)
}

/// Constructs one of the built-in maze topologies.
pub fn build_maze(kind: MazeKind) -> Result<MazeSpec, GridError> {
    match kind {
        MazeKind::FourRoom { size } => build_four_room(size),
        MazeKind::Corridor { arm_length, chamber } => build_corridor(arm_length, chamber),
    }
}

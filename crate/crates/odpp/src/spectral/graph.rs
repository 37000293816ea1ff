//! State-transition graphs and their Laplacians.

use ndarray::Array2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("state index {index} out of range for {num_states} states")]
    StateOutOfRange { index: usize, num_states: usize },

    #[error("vertex {0} is isolated; the normalized Laplacian is undefined")]
    IsolatedVertex(usize),

    #[error("requested dimension {requested} exceeds matrix size {size}")]
    DimensionTooLarge { requested: usize, size: usize },

    #[error("graph is disconnected (second eigenvalue {0:e} is numerically zero)")]
    Disconnected(f64),

    #[error("state {0} has a zero raw feature vector")]
    ZeroFeature(usize),

    #[error("empty transition sample")]
    EmptySample,

    #[error("loss became non-finite at step {0}")]
    NonFiniteLoss(usize),

    #[error(transparent)]
    Eigen(#[from] crate::eigen::EigenError),

    #[error("bad fixture: {0}")]
    BadFixture(String),
}

/// Undirected state-adjacency graph over `num_vertices` state indices.
///
/// Edges are stored as sorted, deduplicated `(low, high)` pairs; self loops
/// are never present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionGraph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl TransitionGraph {
    pub fn new(
        num_vertices: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, SpectralError> {
        let mut normalized: Vec<(usize, usize)> = Vec::new();
        for (u, v) in edges {
            for &index in &[u, v] {
                if index >= num_vertices {
                    return Err(SpectralError::StateOutOfRange { index, num_states: num_vertices });
                }
            }
            if u == v {
                continue;
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        normalized.dedup();
        Ok(Self { num_vertices, edges: normalized })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.num_vertices];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn adjacency(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.num_vertices, self.num_vertices));
        for &(u, v) in &self.edges {
            a[[u, v]] = 1.0;
            a[[v, u]] = 1.0;
        }
        a
    }

    /// Connected components as sorted vertex lists, ordered by smallest
    /// member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_vertices];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; self.num_vertices];
        let mut out = Vec::new();
        for start in 0..self.num_vertices {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            let mut comp = Vec::new();
            seen[start] = true;
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.num_vertices <= 1 || self.components().len() == 1
    }

    /// Text fixture: `num_vertices` on the first line, one `u v` edge per line.
    pub fn to_fixture(&self) -> String {
        let mut out = format!("{}\n", self.num_vertices);
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn from_fixture(text: &str) -> Result<Self, SpectralError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| SpectralError::BadFixture("empty fixture".into()))?
            .trim()
            .parse()
            .map_err(|e| SpectralError::BadFixture(format!("bad vertex count: {e}")))?;
        let mut edges = Vec::new();
        for line in lines {
            let mut it = line.split_whitespace();
            let u: usize = it
                .next()
                .ok_or_else(|| SpectralError::BadFixture("missing edge endpoint".into()))?
                .parse()
                .map_err(|e| SpectralError::BadFixture(format!("bad endpoint: {e}")))?;
            let v: usize = it
                .next()
                .ok_or_else(|| SpectralError::BadFixture("missing edge endpoint".into()))?
                .parse()
                .map_err(|e| SpectralError::BadFixture(format!("bad endpoint: {e}")))?;
            edges.push((u, v));
        }
        Self::new(n, edges)
    }
}

/// Builds the adjacency graph from observed `(state, next_state)` pairs.
///
/// Two states are adjacent when some action transitions between them in
/// either direction; self transitions contribute no edge.
pub fn build_graph(
    num_states: usize,
    transitions: impl IntoIterator<Item = (usize, usize)>,
) -> Result<TransitionGraph, SpectralError> {
    TransitionGraph::new(num_states, transitions)
}

/// Graph Laplacian `L = D − A`, or its normalized form
/// `D^{-1/2} L D^{-1/2}` when `normalized` is set.
///
/// Degrees are accumulated in integer arithmetic, so rows of the
/// unnormalized Laplacian sum to exactly zero.
pub fn laplacian(graph: &TransitionGraph, normalized: bool) -> Result<Array2<f64>, SpectralError> {
    let n = graph.num_vertices();
    let deg = graph.degrees();
    if normalized {
        if let Some(v) = deg.iter().position(|&d| d == 0) {
            return Err(SpectralError::IsolatedVertex(v));
        }
    }
    let mut l = Array2::zeros((n, n));
    for i in 0..n {
        l[[i, i]] = deg[i] as f64;
    }
    for &(u, v) in graph.edges() {
        l[[u, v]] = -1.0;
        l[[v, u]] = -1.0;
    }
    if normalized {
        let inv_sqrt: Vec<f64> = deg.iter().map(|&d| 1.0 / (d as f64).sqrt()).collect();
        for i in 0..n {
            for j in 0..n {
                l[[i, j]] *= inv_sqrt[i] * inv_sqrt[j];
            }
        }
    }
    Ok(l)
}

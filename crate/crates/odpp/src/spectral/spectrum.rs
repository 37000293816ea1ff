//! Bottom-D Laplacian eigenpairs and the normalized state features built
//! from them.

use ndarray::{Array1, Array2};

use super::graph::SpectralError;
use crate::eigen::symmetric_eigensystem;

/// Threshold below which an eigenvalue counts as zero for connectivity.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-8;

/// The `D` smallest eigenvalue/eigenvector pairs of a Laplacian.
///
/// Eigenvectors are columns of an `|S| × D` matrix under the deterministic
/// sign convention of the eigensolver.
#[derive(Debug, Clone)]
pub struct LaplacianSpectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: Array2<f64>,
    normalized: bool,
}

impl LaplacianSpectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn num_states(&self) -> usize {
        self.eigenvectors.nrows()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Array2<f64> {
        &self.eigenvectors
    }

    pub fn is_normalized_laplacian(&self) -> bool {
        self.normalized
    }

    /// Text fixture: header `num_states dim normalized`, then one eigenpair
    /// per row (`eigenvalue c_0 ... c_{n-1}`).
    pub fn to_fixture(&self) -> String {
        let mut out = format!(
            "{} {} {}\n",
            self.num_states(),
            self.dim(),
            if self.normalized { 1 } else { 0 }
        );
        for k in 0..self.dim() {
            let mut row = format!("{:?}", self.eigenvalues[k]);
            for s in 0..self.num_states() {
                row.push_str(&format!(" {:?}", self.eigenvectors[[s, k]]));
            }
            out.push_str(&row);
            out.push('\n');
        }
        out
    }

    pub fn from_fixture(text: &str) -> Result<Self, SpectralError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| SpectralError::BadFixture("empty fixture".into()))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 {
            return Err(SpectralError::BadFixture("header must be `n d normalized`".into()));
        }
        let n: usize = head[0]
            .parse()
            .map_err(|e| SpectralError::BadFixture(format!("bad state count: {e}")))?;
        let d: usize = head[1]
            .parse()
            .map_err(|e| SpectralError::BadFixture(format!("bad dim: {e}")))?;
        let normalized = head[2] == "1";
        let mut eigenvalues = Vec::with_capacity(d);
        let mut eigenvectors = Array2::zeros((n, d));
        for k in 0..d {
            let line = lines
                .next()
                .ok_or_else(|| SpectralError::BadFixture(format!("missing eigenpair {k}")))?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != n + 1 {
                return Err(SpectralError::BadFixture(format!(
                    "eigenpair {k} has {} fields, expected {}",
                    toks.len(),
                    n + 1
                )));
            }
            eigenvalues.push(
                toks[0]
                    .parse()
                    .map_err(|e| SpectralError::BadFixture(format!("bad eigenvalue: {e}")))?,
            );
            for s in 0..n {
                eigenvectors[[s, k]] = toks[s + 1]
                    .parse()
                    .map_err(|e| SpectralError::BadFixture(format!("bad component: {e}")))?;
            }
        }
        Ok(Self { eigenvalues, eigenvectors, normalized })
    }
}

/// Partition `{0..n}` into blocks connected through nonzero off-diagonal
/// entries of `m`.
fn matrix_components(m: &Array2<f64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        let mut comp = Vec::new();
        while let Some(v) = stack.pop() {
            comp.push(v);
            for w in 0..n {
                if w != v && !seen[w] && m[[v, w]] != 0.0 {
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

/// Eigenpairs of the `d` smallest eigenvalues of a symmetric Laplacian.
///
/// Disconnected matrices are decomposed per connected block, which pins the
/// zero-eigenvalue eigenvectors to (normalized) component indicators instead
/// of an arbitrary rotation of that eigenspace. Eigenvalues are merged
/// ascending with ties broken by block order.
pub fn spectrum(
    l: &Array2<f64>,
    d: usize,
    normalized: bool,
) -> Result<LaplacianSpectrum, SpectralError> {
    let n = l.nrows();
    if d > n {
        return Err(SpectralError::DimensionTooLarge { requested: d, size: n });
    }

    // (value, block index, position in block, global vector)
    let mut pairs: Vec<(f64, usize, usize, Array1<f64>)> = Vec::new();
    for (block_idx, block) in matrix_components(l).into_iter().enumerate() {
        let k = block.len();
        let mut sub = Array2::zeros((k, k));
        for (a, &i) in block.iter().enumerate() {
            for (b, &j) in block.iter().enumerate() {
                sub[[a, b]] = l[[i, j]];
            }
        }
        let eig = symmetric_eigensystem(&sub)?;
        for pos in 0..k {
            let mut global = Array1::zeros(n);
            for (a, &i) in block.iter().enumerate() {
                global[i] = eig.vectors[[a, pos]];
            }
            pairs.push((eig.values[pos], block_idx, pos, global));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut eigenvalues = Vec::with_capacity(d);
    let mut eigenvectors = Array2::zeros((n, d));
    for (k, (value, _, _, vector)) in pairs.into_iter().take(d).enumerate() {
        eigenvalues.push(value);
        for s in 0..n {
            eigenvectors[[s, k]] = vector[s];
        }
    }
    Ok(LaplacianSpectrum { eigenvalues, eigenvectors, normalized })
}

/// Normalized state feature `b(s) = [v_1(s),…,v_D(s)] / ‖·‖`.
pub fn state_feature(spec: &LaplacianSpectrum, s: usize) -> Result<Array1<f64>, SpectralError> {
    if s >= spec.num_states() {
        return Err(SpectralError::StateOutOfRange { index: s, num_states: spec.num_states() });
    }
    let raw = spec.eigenvectors.row(s).to_owned();
    let norm = raw.dot(&raw).sqrt();
    if norm <= 1e-12 {
        return Err(SpectralError::ZeroFeature(s));
    }
    Ok(raw / norm)
}

/// Unit feature vectors for every state, rows of an `|S| × D` matrix.
///
/// States whose raw feature is zero (possible on disconnected spectra) are
/// kept invalid and reported when queried.
#[derive(Debug, Clone)]
pub struct StateFeatureMap {
    features: Array2<f64>,
    valid: Vec<bool>,
}

impl StateFeatureMap {
    pub fn from_spectrum(spec: &LaplacianSpectrum) -> Self {
        let n = spec.num_states();
        let d = spec.dim();
        let mut features = Array2::zeros((n, d));
        let mut valid = vec![false; n];
        for s in 0..n {
            if let Ok(f) = state_feature(spec, s) {
                for k in 0..d {
                    features[[s, k]] = f[k];
                }
                valid[s] = true;
            }
        }
        Self { features, valid }
    }

    /// Wraps pre-normalized rows; rows with zero norm are marked invalid.
    pub fn from_rows(rows: Array2<f64>) -> Self {
        let n = rows.nrows();
        let mut features = rows;
        let mut valid = vec![false; n];
        for s in 0..n {
            let row = features.row(s).to_owned();
            let norm = row.dot(&row).sqrt();
            if norm > 1e-12 {
                for k in 0..features.ncols() {
                    features[[s, k]] /= norm;
                }
                valid[s] = true;
            }
        }
        Self { features, valid }
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn num_states(&self) -> usize {
        self.features.nrows()
    }

    pub fn get(&self, s: usize) -> Result<ndarray::ArrayView1<'_, f64>, SpectralError> {
        if s >= self.num_states() {
            return Err(SpectralError::StateOutOfRange { index: s, num_states: self.num_states() });
        }
        if !self.valid[s] {
            return Err(SpectralError::ZeroFeature(s));
        }
        Ok(self.features.row(s))
    }
}

/// Fiedler vector: the eigenvector of the second-smallest eigenvalue.
///
/// Requires a connected graph; a numerically zero `λ_2` means the zero
/// eigenvalue has multiplicity and the Fiedler vector is undefined.
pub fn fiedler(spec: &LaplacianSpectrum) -> Result<Array1<f64>, SpectralError> {
    if spec.dim() < 2 {
        return Err(SpectralError::DimensionTooLarge { requested: 2, size: spec.dim() });
    }
    let lambda2 = spec.eigenvalues[1];
    if lambda2 <= ZERO_EIGENVALUE_TOL {
        return Err(SpectralError::Disconnected(lambda2));
    }
    Ok(spec.eigenvectors.column(1).to_owned())
}

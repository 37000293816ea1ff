//! DPP kernel matrices and the two closed-form quantities the objectives
//! need: subset log-likelihood and expected sample cardinality.
//!
//! A kernel is built as the Gram matrix `L = Diag(q)·BᵀB·Diag(q)` from a
//! per-item quality vector `q` and a feature matrix `B` whose columns are
//! the item features. A subset `W` then has probability
//! `det(L_W) / det(L + I)`, and the expected cardinality of a random subset
//! is `Σ λ_i / (λ_i + 1)` over the eigenvalues of `L`.

use ndarray::Array2;
use thiserror::Error;

use crate::eigen::{symmetric_eigenvalues, EigenError, SYMMETRY_TOL};

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("quality vector has a negative entry at {index}: {value}")]
    NegativeQuality { index: usize, value: f64 },

    #[error("quality length {quality} does not match feature column count {columns}")]
    DimensionMismatch { quality: usize, columns: usize },

    #[error("feature column {index} has norm {norm} but the normalized flag requires 1")]
    UnnormalizedColumn { index: usize, norm: f64 },

    #[error("kernel is not symmetric: max asymmetry {0:e}")]
    Asymmetric(f64),

    #[error("kernel is not positive semidefinite: smallest eigenvalue {0:e}")]
    NotPsd(f64),

    #[error("subset index {index} out of range for kernel of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("subset indices must be strictly increasing (saw {prev} then {next})")]
    NotStrictlyIncreasing { prev: usize, next: usize },

    #[error(transparent)]
    Eigen(#[from] EigenError),

    #[error("bad kernel fixture: {0}")]
    BadFixture(String),
}

/// Column norm tolerance for [`FeatureMatrix`] under the normalized flag.
pub const NORM_TOL: f64 = 1e-9;

/// Nonnegative per-item quality measure.
#[derive(Debug, Clone)]
pub struct QualityVector {
    values: Vec<f64>,
}

impl QualityVector {
    pub fn new(values: Vec<f64>) -> Result<Self, KernelError> {
        for (index, &value) in values.iter().enumerate() {
            if !(value >= 0.0) {
                return Err(KernelError::NegativeQuality { index, value });
            }
        }
        Ok(Self { values })
    }

    /// All-ones quality of length `n`.
    pub fn uniform(n: usize) -> Self {
        Self { values: vec![1.0; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Stacked item features: `D × N`, one column per item.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    columns: Array2<f64>,
    normalized: bool,
}

impl FeatureMatrix {
    /// Wraps a `D × N` matrix. With `normalized` set, every column must have
    /// unit Euclidean norm within [`NORM_TOL`]; zero columns are rejected.
    pub fn new(columns: Array2<f64>, normalized: bool) -> Result<Self, KernelError> {
        if normalized {
            for (index, col) in columns.columns().into_iter().enumerate() {
                let norm = col.dot(&col).sqrt();
                if (norm - 1.0).abs() > NORM_TOL {
                    return Err(KernelError::UnnormalizedColumn { index, norm });
                }
            }
        }
        Ok(Self { columns, normalized })
    }

    pub fn num_items(&self) -> usize {
        self.columns.ncols()
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn columns(&self) -> &Array2<f64> {
        &self.columns
    }
}

/// Symmetric positive semidefinite DPP kernel.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    entries: Array2<f64>,
}

impl KernelMatrix {
    /// Validates symmetry and positive semidefiniteness before wrapping.
    ///
    /// The PSD check tolerates eigenvalues down to `−1e-8 · max(λ_max, 1)`;
    /// anything below that is a genuine violation, not roundoff.
    pub fn new(entries: Array2<f64>) -> Result<Self, KernelError> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(KernelError::Asymmetric(f64::INFINITY));
        }
        let mut asym = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                asym = asym.max((entries[[i, j]] - entries[[j, i]]).abs());
            }
        }
        let scale = entries.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        if asym > SYMMETRY_TOL * scale {
            return Err(KernelError::Asymmetric(asym));
        }
        if n > 0 {
            let values = symmetric_eigenvalues(&entries)?;
            let lambda_max = values.last().copied().unwrap_or(0.0).max(1.0);
            let lambda_min = values[0];
            if lambda_min < -1e-8 * lambda_max {
                return Err(KernelError::NotPsd(lambda_min));
            }
        }
        Ok(Self { entries })
    }

    /// Wraps a matrix that is symmetric PSD by construction (Gram products).
    pub(crate) fn from_gram(entries: Array2<f64>) -> Self {
        Self { entries }
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    /// Eigenvalues ascending, with negative roundoff clamped to zero.
    pub fn clamped_eigenvalues(&self) -> Result<Vec<f64>, KernelError> {
        let mut values = symmetric_eigenvalues(&self.entries)?;
        for v in values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(values)
    }

    /// Row-major text fixture: first line is N, then one row per line.
    pub fn to_fixture(&self) -> String {
        let n = self.size();
        let mut out = String::new();
        out.push_str(&format!("{n}\n"));
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| format!("{:?}", self.entries[[i, j]])).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_fixture(text: &str) -> Result<Self, KernelError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| KernelError::BadFixture("empty fixture".into()))?
            .trim()
            .parse()
            .map_err(|e| KernelError::BadFixture(format!("bad size line: {e}")))?;
        let mut entries = Array2::zeros((n, n));
        for i in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| KernelError::BadFixture(format!("missing row {i}")))?;
            let mut count = 0;
            for (j, tok) in line.split_whitespace().enumerate() {
                if j >= n {
                    return Err(KernelError::BadFixture(format!("row {i} too long")));
                }
                entries[[i, j]] = tok
                    .parse()
                    .map_err(|e| KernelError::BadFixture(format!("row {i} col {j}: {e}")))?;
                count += 1;
            }
            if count != n {
                return Err(KernelError::BadFixture(format!(
                    "row {i} has {count} entries, expected {n}"
                )));
            }
        }
        Self::new(entries)
    }
}

/// Strictly increasing item indices into a kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemSubset {
    indices: Vec<usize>,
}

impl ItemSubset {
    pub fn new(indices: Vec<usize>) -> Result<Self, KernelError> {
        for pair in indices.windows(2) {
            if pair[1] <= pair[0] {
                return Err(KernelError::NotStrictlyIncreasing { prev: pair[0], next: pair[1] });
            }
        }
        Ok(Self { indices })
    }

    pub fn empty() -> Self {
        Self { indices: Vec::new() }
    }

    /// Sorts and deduplicates an arbitrary index collection.
    pub fn from_unordered(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self { indices }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    fn check_against(&self, kernel: &KernelMatrix) -> Result<(), KernelError> {
        let size = kernel.size();
        for &index in &self.indices {
            if index >= size {
                return Err(KernelError::IndexOutOfRange { index, size });
            }
        }
        Ok(())
    }
}

/// Gram kernel `L = Diag(q)·BᵀB·Diag(q)`, so `L_ij = q_i q_j ⟨b_i, b_j⟩`.
pub fn build_kernel(q: &QualityVector, b: &FeatureMatrix) -> Result<KernelMatrix, KernelError> {
    let n = b.num_items();
    if q.len() != n {
        return Err(KernelError::DimensionMismatch { quality: q.len(), columns: n });
    }
    if !b.is_normalized() {
        // Re-run the column check so unnormalized inputs fail loudly here.
        FeatureMatrix::new(b.columns().clone(), true)?;
    }
    let cols = b.columns();
    let qs = q.values();
    let mut entries = Array2::zeros((n, n));
    for i in 0..n {
        let bi = cols.column(i);
        for j in i..n {
            let dot = bi.dot(&cols.column(j));
            let value = qs[i] * qs[j] * dot;
            entries[[i, j]] = value;
            entries[[j, i]] = value;
        }
    }
    Ok(KernelMatrix::from_gram(entries))
}

/// Log-determinant of a symmetric PSD matrix via Cholesky.
///
/// Returns `f64::NEG_INFINITY` when the matrix is singular to machine
/// precision (a pivot at or below zero).
pub(crate) fn psd_log_det(m: &Array2<f64>) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut chol = Array2::<f64>::zeros((n, n));
    let scale = m.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let floor = 1e-13 * scale;
    let mut log_det = 0.0;
    for i in 0..n {
        for j in 0..=i {
            let mut sum = m[[i, j]];
            for k in 0..j {
                sum -= chol[[i, k]] * chol[[j, k]];
            }
            if i == j {
                if sum <= floor {
                    return f64::NEG_INFINITY;
                }
                chol[[i, i]] = sum.sqrt();
                log_det += sum.ln();
            } else {
                chol[[i, j]] = sum / chol[[j, j]];
            }
        }
    }
    log_det
}

fn submatrix(m: &Array2<f64>, idx: &[usize]) -> Array2<f64> {
    let k = idx.len();
    let mut out = Array2::zeros((k, k));
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            out[[a, b]] = m[[i, j]];
        }
    }
    out
}

/// `log det(L_W) − log det(L + I)`, the DPP log-probability of subset `W`.
///
/// The empty submatrix has determinant 1 by convention, so the empty subset
/// gets `−log det(L + I)`. A subset whose submatrix is singular to machine
/// precision yields negative infinity rather than an error.
pub fn dpp_log_likelihood(kernel: &KernelMatrix, subset: &ItemSubset) -> Result<f64, KernelError> {
    subset.check_against(kernel)?;
    let n = kernel.size();
    let mut l_plus_i = kernel.entries().clone();
    for i in 0..n {
        l_plus_i[[i, i]] += 1.0;
    }
    let log_norm = psd_log_det(&l_plus_i);
    let log_sub = if subset.is_empty() {
        0.0
    } else {
        psd_log_det(&submatrix(kernel.entries(), subset.indices()))
    };
    Ok(log_sub - log_norm)
}

/// Expected cardinality `Σ λ_i / (λ_i + 1)` of a DPP sample.
pub fn expected_cardinality(kernel: &KernelMatrix) -> Result<f64, KernelError> {
    let values = kernel.clamped_eigenvalues()?;
    Ok(values.iter().map(|&l| l / (l + 1.0)).sum())
}

//! Gaussian fits of embedding sets and the Fréchet distance between them.
//! Embeddings come from files; no encoder network is involved.

mod embeddings;

use std::path::Path;

use thiserror::Error;

use crate::linalg::{sqrt_psd, symmetric_eigen, LinalgError, Matrix};
use crate::scalar::Real;

pub use embeddings::{read_embeddings, read_embeddings_from, write_embeddings};
pub(crate) use embeddings::{open_text, read_rows};

#[derive(Debug, Error)]
pub enum FrechetError {
    #[error("need at least 2 samples to estimate a covariance, got {0}")]
    TooFewSamples(usize),
    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteInput { row: usize, col: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("covariance is not symmetric within tolerance")]
    NotSymmetric,
    #[error("covariance has negative eigenvalue {0}")]
    NotPositiveSemidefinite(f64),
    #[error("{path}: line {line}: {message}")]
    Format {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl FrechetError {
    pub fn is_numeric_failure(&self) -> bool {
        matches!(
            self,
            FrechetError::Linalg(LinalgError::EigenFailure { .. } | LinalgError::NonFinite)
        )
    }
}

/// N×D activations, one row per molecule.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet<T> {
    vectors: Matrix<T>,
    pub source_label: String,
}

impl<T: Real> EmbeddingSet<T> {
    pub fn new(vectors: Matrix<T>, source_label: impl Into<String>) -> Result<Self, FrechetError> {
        if vectors.rows() < 2 {
            return Err(FrechetError::TooFewSamples(vectors.rows()));
        }
        for row in 0..vectors.rows() {
            if let Some(col) = vectors.row(row).iter().position(|x| !x.is_finite()) {
                return Err(FrechetError::NonFiniteInput { row, col });
            }
        }
        Ok(EmbeddingSet {
            vectors,
            source_label: source_label.into(),
        })
    }

    pub fn vectors(&self) -> &Matrix<T> {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStats<T> {
    pub mean: Vec<T>,
    pub covariance: Matrix<T>,
}

impl<T: Real> GaussianStats<T> {
    /// Checks symmetry (1e-12 relative) and numerical PSD: every eigenvalue is
    /// at least `-1e-10·max(1, |λ|max)`.
    pub fn new(mean: Vec<T>, covariance: Matrix<T>) -> Result<Self, FrechetError> {
        let d = mean.len();
        if covariance.rows() != d || covariance.cols() != d {
            return Err(FrechetError::DimensionMismatch {
                left: d,
                right: covariance.rows(),
            });
        }
        let asym = covariance.sub(&covariance.transpose()).frobenius_norm();
        let norm = covariance.frobenius_norm();
        let tol = if T::epsilon() > T::lit(1e-10) { T::lit(1e-5) } else { T::lit(1e-12) };
        if asym > tol * norm.max(T::one()) {
            return Err(FrechetError::NotSymmetric);
        }
        let eig = symmetric_eigen(&covariance)?;
        let largest = eig.values.iter().fold(T::one(), |m, v| m.max(v.abs()));
        if let Some(&min) = eig.values.first() {
            if min < -T::lit(1e-10) * largest {
                return Err(FrechetError::NotPositiveSemidefinite(min.to_f64().unwrap_or(f64::NAN)));
            }
        }
        Ok(GaussianStats { mean, covariance })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Column means and unbiased (N−1) covariance, symmetrized.
pub fn gaussian_fit<T: Real>(set: &EmbeddingSet<T>) -> GaussianStats<T> {
    let x = set.vectors();
    let (n, d) = (x.rows(), x.cols());
    let nt = T::from_usize(n).unwrap();
    let mean: Vec<T> = (0..d)
        .map(|j| (0..n).map(|i| x[(i, j)]).sum::<T>() / nt)
        .collect();
    let mut cov = Matrix::zeros(d, d);
    for i in 0..n {
        let row = x.row(i);
        for a in 0..d {
            let da = row[a] - mean[a];
            for b in a..d {
                cov[(a, b)] = cov[(a, b)] + da * (row[b] - mean[b]);
            }
        }
    }
    let denom = T::from_usize(n - 1).unwrap();
    for a in 0..d {
        for b in a..d {
            let v = cov[(a, b)] / denom;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    GaussianStats {
        mean,
        covariance: cov.symmetrized(),
    }
}

/// ‖μa−μb‖² + Tr Σa + Tr Σb − 2·Tr((Σa^½ Σb Σa^½)^½), clamped at zero.
pub fn frechet_distance<T: Real>(a: &GaussianStats<T>, b: &GaussianStats<T>) -> Result<T, FrechetError> {
    if a.dim() != b.dim() {
        return Err(FrechetError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let mean_term: T = a
        .mean
        .iter()
        .zip(&b.mean)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum();
    let root_a = sqrt_psd(&a.covariance)?;
    let inner = root_a.matmul(&b.covariance)?.matmul(&root_a)?.symmetrized();
    let trace_root: T = symmetric_eigen(&inner)?
        .values
        .iter()
        .map(|&v| v.max(T::zero()).sqrt())
        .sum();
    let d = mean_term + a.covariance.trace() + b.covariance.trace() - T::lit(2.0) * trace_root;
    Ok(d.max(T::zero()))
}

/// Fréchet distance between the Gaussian fits of two embedding files.
pub fn fcd_from_files<T: Real>(path_a: &Path, path_b: &Path) -> Result<T, FrechetError> {
    let a: EmbeddingSet<T> = read_embeddings(path_a)?;
    let b: EmbeddingSet<T> = read_embeddings(path_b)?;
    if a.dim() != b.dim() {
        return Err(FrechetError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    frechet_distance(&gaussian_fit(&a), &gaussian_fit(&b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(rows: &[Vec<f64>]) -> EmbeddingSet<f64> {
        EmbeddingSet::new(Matrix::from_rows(rows), "test").unwrap()
    }

    #[test]
    fn one_dimensional_fit() {
        let stats = gaussian_fit(&set(&[vec![0.0], vec![2.0]]));
        assert_eq!(stats.mean, [1.0]);
        assert_eq!(stats.covariance[(0, 0)], 2.0);
    }

    #[test]
    fn constant_rows_have_zero_covariance() {
        let stats = gaussian_fit(&set(&vec![vec![1.5, -2.0, 3.0]; 5]));
        assert_eq!(stats.covariance.frobenius_norm(), 0.0);
    }

    #[test]
    fn three_points_in_the_plane() {
        let stats = gaussian_fit(&set(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]));
        let third = 1.0 / 3.0;
        assert!((stats.mean[0] - third).abs() < 1e-15 && (stats.mean[1] - third).abs() < 1e-15);
        let expected = [[third, -1.0 / 6.0], [-1.0 / 6.0, third]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((stats.covariance[(i, j)] - expected[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn too_few_or_non_finite() {
        assert!(matches!(
            EmbeddingSet::new(Matrix::from_rows(&[vec![1.0]]), "x"),
            Err(FrechetError::TooFewSamples(1))
        ));
        assert!(matches!(
            EmbeddingSet::new(Matrix::from_rows(&[vec![1.0, 2.0], vec![f64::NAN, 0.0]]), "x"),
            Err(FrechetError::NonFiniteInput { row: 1, col: 0 })
        ));
    }

    #[test]
    fn one_dimensional_closed_form() {
        let a = GaussianStats::new(vec![0.0f64], Matrix::from_rows(&[vec![1.0]])).unwrap();
        let b = GaussianStats::new(vec![1.0], Matrix::from_rows(&[vec![1.0]])).unwrap();
        assert!((frechet_distance(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        let c = GaussianStats::new(vec![3.0], Matrix::from_rows(&[vec![4.0]])).unwrap();
        // (0-3)^2 + (1-2)^2
        assert!((frechet_distance(&a, &c).unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn identical_stats_are_zero_distance() {
        let s = gaussian_fit(&set(&[vec![0.0, 1.0], vec![2.0, 0.5], vec![1.0, 3.0], vec![-1.0, 0.0]]));
        assert!(frechet_distance(&s, &s).unwrap() < 1e-8);
    }

    #[test]
    fn diagonal_closed_form() {
        // commuting covariances: sum of per-axis (σa−σb)²
        let a = GaussianStats::new(vec![0.0, 0.0], Matrix::from_diagonal(&[1.0, 4.0])).unwrap();
        let b = GaussianStats::new(vec![1.0, 2.0], Matrix::from_diagonal(&[9.0, 16.0])).unwrap();
        let expected = 1.0 + 4.0 + (1.0f64 - 3.0).powi(2) + (2.0f64 - 4.0).powi(2);
        assert!((frechet_distance(&a, &b).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn stats_validation() {
        assert!(matches!(
            GaussianStats::new(vec![0.0, 0.0], Matrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]])),
            Err(FrechetError::NotSymmetric)
        ));
        assert!(matches!(
            GaussianStats::new(vec![0.0, 0.0], Matrix::from_diagonal(&[1.0, -0.5])),
            Err(FrechetError::NotPositiveSemidefinite(_))
        ));
        let a = GaussianStats::new(vec![0.0], Matrix::from_rows(&[vec![1.0]])).unwrap();
        let b = GaussianStats::new(vec![0.0, 0.0], Matrix::identity(2)).unwrap();
        assert!(matches!(
            frechet_distance(&a, &b),
            Err(FrechetError::DimensionMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn single_precision_distance() {
        let a = GaussianStats::new(vec![0.0f32], Matrix::from_rows(&[vec![1.0f32]])).unwrap();
        let b = GaussianStats::new(vec![1.0f32], Matrix::from_rows(&[vec![1.0f32]])).unwrap();
        assert!((frechet_distance(&a, &b).unwrap() - 1.0).abs() < 1e-6);
    }
}

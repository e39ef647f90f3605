//! Evaluation toolkit for drug ↔ indication translation models.
//!
//! The crate covers the whole pipeline: a SMILES parser and validity checker,
//! a grammar tokenizer, hashed molecular fingerprints, corpus text metrics,
//! the Fréchet distance between Gaussian fits of embedding sets, dataset
//! ingestion and splitting, and the harness that turns prediction files into
//! metric reports.
//!
//! Dense numeric code (`linalg`, `frechet`) is generic over [`scalar::Real`];
//! the aliases below fix the scalar type for the common cases.

pub mod dataset;
pub mod fingerprints;
pub mod frechet;
pub mod harness;
pub mod linalg;
pub mod scalar;
pub mod smiles;
pub mod textmetrics;
pub mod tokenizer;

use thiserror::Error;

pub type Matrix = linalg::Matrix<f64>;
pub type MatrixF32 = linalg::Matrix<f32>;
pub type EmbeddingSet = frechet::EmbeddingSet<f64>;
pub type EmbeddingSetF32 = frechet::EmbeddingSet<f32>;
pub type GaussianStats = frechet::GaussianStats<f64>;
pub type GaussianStatsF32 = frechet::GaussianStats<f32>;

/// Any failure the toolkit can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Smiles(#[from] smiles::SmilesError),
    #[error(transparent)]
    Tokenize(#[from] tokenizer::TokenizeError),
    #[error(transparent)]
    Vocab(#[from] tokenizer::VocabError),
    #[error(transparent)]
    Fingerprint(#[from] fingerprints::FingerprintError),
    #[error(transparent)]
    KeySet(#[from] fingerprints::KeySetError),
    #[error(transparent)]
    Metric(#[from] textmetrics::MetricError),
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
    #[error(transparent)]
    Frechet(#[from] frechet::FrechetError),
    #[error(transparent)]
    Dataset(#[from] dataset::DatasetError),
    #[error(transparent)]
    Harness(#[from] harness::HarnessError),
}

impl Error {
    /// True for failures of the numeric core (eigensolver divergence,
    /// indefinite covariance) as opposed to bad input.
    pub fn is_numeric_failure(&self) -> bool {
        match self {
            Error::Linalg(e) => matches!(e, linalg::LinalgError::EigenFailure { .. } | linalg::LinalgError::NonFinite),
            Error::Frechet(e) => e.is_numeric_failure(),
            Error::Harness(e) => e.is_numeric_failure(),
            _ => false,
        }
    }
}

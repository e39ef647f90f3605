//! Evaluation of prediction files for both translation directions and
//! rendering of the resulting metric reports.

mod eval;
mod predictions;
mod render;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fingerprints::FingerprintError;
use crate::frechet::FrechetError;
use crate::textmetrics::MetricError;

pub use eval::{
    eval_d2i, eval_i2d, read_paired_embeddings, text2mol_score, D2IOptions, I2DOptions,
};
pub use predictions::{PredictionFile, PredictionRow, Task};
pub use render::{render_report, OutputFormat, D2I_COLUMNS, I2D_COLUMNS};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("prediction file is for {found}, expected {expected}")]
    TaskMismatch { expected: Task, found: Task },
    #[error("prediction file has no rows")]
    EmptyPredictions,
    #[error("duplicate prediction id {0:?}")]
    DuplicateId(String),
    #[error("prediction {id:?} has an empty reference")]
    EmptyReference { id: String },
    #[error("{path}: line {line}: {message}")]
    Malformed {
        path: String,
        line: usize,
        message: String,
    },
    #[error("embedding file has {found} rows, expected {expected}")]
    EmbeddingRowMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Fingerprint(#[from] FingerprintError),
    #[error(transparent)]
    Frechet(#[from] FrechetError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn is_numeric_failure(&self) -> bool {
        matches!(self, HarnessError::Frechet(e) if e.is_numeric_failure())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct D2IMetadata {
    pub rows: usize,
    pub tokenization: String,
    pub bleu_smoothing_epsilon: f64,
    pub rouge_score: String,
    pub meteor_matching: String,
    pub text2mol_embeddings: Option<PathBuf>,
}

/// Drug-to-indication scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct D2IReport {
    pub label: String,
    pub bleu2: f64,
    pub bleu4: f64,
    pub rouge1: f64,
    pub rouge2: f64,
    #[serde(rename = "rougeL")]
    pub rouge_l: f64,
    pub meteor: f64,
    pub text2mol: Option<f64>,
    pub metadata: D2IMetadata,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AllZeroCounts {
    pub maccs: usize,
    pub rdk: usize,
    pub morgan: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct I2DMetadata {
    pub total_pairs: usize,
    pub used_pairs: usize,
    pub smiles_bleu_tokenization: String,
    pub smiles_bleu_order: usize,
    pub bleu_smoothing_epsilon: f64,
    pub validity_mode: String,
    pub maccs_params: String,
    pub rdk_params: String,
    pub morgan_params: String,
    /// Pairs where both fingerprints were empty and Tanimoto was taken as 1.
    pub all_zero_fingerprint_pairs: AllZeroCounts,
    pub covariance_estimator: String,
    pub fcd_status: String,
    pub fcd_embeddings: Option<(PathBuf, PathBuf)>,
    pub text2mol_embeddings: Option<PathBuf>,
}

/// Indication-to-drug scores. Fingerprint similarities are averaged over
/// pairs whose reference and hypothesis both parse; `fcd` is `None` when no
/// embeddings were supplied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct I2DReport {
    pub label: String,
    pub bleu: f64,
    pub exact: f64,
    pub levenshtein: f64,
    pub maccs_fts: Option<f64>,
    pub rdk_fts: Option<f64>,
    pub morgan_fts: Option<f64>,
    pub fcd: Option<f64>,
    pub text2mol: Option<f64>,
    pub validity: f64,
    pub skipped_invalid: usize,
    pub metadata: I2DMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum Report {
    DrugToIndication(D2IReport),
    IndicationToDrug(I2DReport),
}

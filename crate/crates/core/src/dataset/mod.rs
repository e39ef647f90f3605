//! Drug–indication pair corpora: ingestion from flat-file exports, length
//! statistics and deterministic train/test splitting.

mod ingest;
mod split;

use std::collections::HashSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ingest::{ingest, ingest_reader, IngestReport, Ingested, Layout};
pub use split::{split, split_indices, test_size, SplitSpec};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: schema mismatch: {message}")]
    SchemaMismatch { path: String, message: String },
    #[error("{path}: line {line}: {message}")]
    Malformed {
        path: String,
        line: usize,
        message: String,
    },
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
    #[error("pair set is empty")]
    EmptySet,
    #[error("split would leave an empty partition (N={n}, test size {test})")]
    DegenerateSplit { n: usize, test: usize },
    #[error("test fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Drugbank,
    Chembl,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrugRecord {
    pub id: String,
    pub smiles: String,
    pub indication: String,
    pub source: Source,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the ingested file, hex encoded.
    pub digest: String,
    /// Seconds since the Unix epoch.
    pub ingested_at: u64,
}

/// Ordered records with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSet {
    records: Vec<DrugRecord>,
    pub provenance: Provenance,
}

impl PairSet {
    pub fn new(records: Vec<DrugRecord>, provenance: Provenance) -> Result<Self, DatasetError> {
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            if !seen.insert(r.id.as_str()) {
                return Err(DatasetError::DuplicateId(r.id.clone()));
            }
        }
        Ok(PairSet { records, provenance })
    }

    pub fn records(&self) -> &[DrugRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// One JSON object per line: `{"id","smiles","indication","source"}`.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(reader: R, label: &str) -> Result<Self, DatasetError> {
        Ok(ingest_reader(reader, Layout::GenericJsonl, label)?.set)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthStats {
    pub min: usize,
    pub avg: f64,
    pub max: usize,
}

impl LengthStats {
    fn of(lengths: impl Iterator<Item = usize>) -> Option<LengthStats> {
        let (mut min, mut max, mut sum, mut n) = (usize::MAX, 0, 0usize, 0usize);
        for len in lengths {
            min = min.min(len);
            max = max.max(len);
            sum += len;
            n += 1;
        }
        (n > 0).then(|| LengthStats {
            min,
            avg: sum as f64 / n as f64,
            max,
        })
    }

    /// Average rounded to the nearest integer, as shown in rendered tables.
    pub fn avg_rounded(&self) -> u64 {
        self.avg.round() as u64
    }
}

/// Character-length statistics of a pair set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub pair_count: usize,
    pub indication: LengthStats,
    pub smiles: LengthStats,
}

impl DatasetStats {
    /// Rows in the layout of a dataset-details table.
    pub fn table_rows(&self) -> Vec<(&'static str, String)> {
        vec![
            ("Number of Drug-Indication Pairs", self.pair_count.to_string()),
            ("Minimum Indication Length (Characters)", self.indication.min.to_string()),
            ("Minimum SMILES Length (Characters)", self.smiles.min.to_string()),
            ("Average Indication Length (Characters)", self.indication.avg_rounded().to_string()),
            ("Average SMILES Length (Characters)", self.smiles.avg_rounded().to_string()),
            ("Maximum Indication Length (Characters)", self.indication.max.to_string()),
            ("Maximum SMILES Length (Characters)", self.smiles.max.to_string()),
        ]
    }
}

pub fn stats(set: &PairSet) -> Result<DatasetStats, DatasetError> {
    let indication = LengthStats::of(set.records.iter().map(|r| r.indication.chars().count()))
        .ok_or(DatasetError::EmptySet)?;
    let smiles = LengthStats::of(set.records.iter().map(|r| r.smiles.chars().count()))
        .ok_or(DatasetError::EmptySet)?;
    Ok(DatasetStats {
        pair_count: set.len(),
        indication,
        smiles,
    })
}

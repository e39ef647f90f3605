use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    DrugToIndication,
    IndicationToDrug,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::DrugToIndication => "drug_to_indication",
            Task::IndicationToDrug => "indication_to_drug",
        })
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "drug_to_indication" | "d2i" => Ok(Task::DrugToIndication),
            "indication_to_drug" | "i2d" => Ok(Task::IndicationToDrug),
            other => Err(format!(
                "unknown task {other:?}; expected drug_to_indication or indication_to_drug"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionRow {
    pub id: String,
    pub reference: String,
    /// May be empty: models can emit nothing.
    pub hypothesis: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionFile {
    pub task: Task,
    rows: Vec<PredictionRow>,
}

impl PredictionFile {
    pub fn new(task: Task, rows: Vec<PredictionRow>) -> Result<Self, HarnessError> {
        if rows.is_empty() {
            return Err(HarnessError::EmptyPredictions);
        }
        let mut ids = HashSet::with_capacity(rows.len());
        for row in &rows {
            if !ids.insert(row.id.as_str()) {
                return Err(HarnessError::DuplicateId(row.id.clone()));
            }
            if row.reference.trim().is_empty() {
                return Err(HarnessError::EmptyReference { id: row.id.clone() });
            }
        }
        Ok(PredictionFile { task, rows })
    }

    pub fn rows(&self) -> &[PredictionRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// JSONL with one `{"id","reference","hypothesis"}` object per line.
    pub fn read_jsonl(path: &Path, task: Task) -> Result<Self, HarnessError> {
        let label = path.display().to_string();
        let file = std::fs::File::open(path).map_err(|source| HarnessError::Io {
            path: label.clone(),
            source,
        })?;
        Self::from_reader(std::io::BufReader::new(file), task, &label)
    }

    pub fn from_reader<R: BufRead>(reader: R, task: Task, label: &str) -> Result<Self, HarnessError> {
        let mut rows = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| HarnessError::Io {
                path: label.to_string(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let row: PredictionRow = serde_json::from_str(&line).map_err(|e| HarnessError::Malformed {
                path: label.to_string(),
                line: i + 1,
                message: e.to_string(),
            })?;
            rows.push(row);
        }
        PredictionFile::new(task, rows)
    }
}

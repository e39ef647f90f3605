use std::collections::{HashMap, HashSet};
use std::io::Read;
use std::path::Path;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use super::{DatasetError, DrugRecord, PairSet, Provenance, Source};

/// Supported flat-file layouts.
///
/// * `drugbank_csv`: comma-separated, header `id,name,smiles,indication`.
/// * `chembl_tsv`: tab-separated, header `chembl_id,canonical_smiles,mesh_heading`;
///   rows sharing an id merge into one record whose indication joins the
///   distinct headings with `"; "`.
/// * `generic_jsonl`: one `{"id","smiles","indication","source"}` object per line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    DrugbankCsv,
    ChemblTsv,
    GenericJsonl,
}

impl FromStr for Layout {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "drugbank_csv" => Ok(Layout::DrugbankCsv),
            "chembl_tsv" => Ok(Layout::ChemblTsv),
            "generic_jsonl" => Ok(Layout::GenericJsonl),
            other => Err(format!(
                "unknown layout {other:?}; expected drugbank_csv, chembl_tsv or generic_jsonl"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IngestReport {
    pub rows_read: usize,
    /// Rows with an empty SMILES or indication.
    pub dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ingested {
    pub set: PairSet,
    pub report: IngestReport,
}

pub fn ingest(path: &Path, layout: Layout) -> Result<Ingested, DatasetError> {
    let label = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|source| DatasetError::Io {
        path: label.clone(),
        source,
    })?;
    ingest_reader(std::io::BufReader::new(file), layout, &label)
}

pub fn ingest_reader<R: Read>(mut reader: R, layout: Layout, label: &str) -> Result<Ingested, DatasetError> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes).map_err(|source| DatasetError::Io {
        path: label.to_string(),
        source,
    })?;
    let provenance = Provenance {
        digest: format!("{:x}", Sha256::digest(&bytes)),
        ingested_at: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
    };
    let (records, report) = match layout {
        Layout::DrugbankCsv => read_drugbank(&bytes, label)?,
        Layout::ChemblTsv => read_chembl(&bytes, label)?,
        Layout::GenericJsonl => read_jsonl(&bytes, label)?,
    };
    Ok(Ingested {
        set: PairSet::new(records, provenance)?,
        report,
    })
}

fn header_index(headers: &csv::StringRecord, required: &[&str], label: &str) -> Result<Vec<usize>, DatasetError> {
    required
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h.trim() == *name)
                .ok_or_else(|| DatasetError::SchemaMismatch {
                    path: label.to_string(),
                    message: format!("missing required column {name:?}"),
                })
        })
        .collect()
}

fn csv_error(label: &str, e: csv::Error) -> DatasetError {
    let line = e.position().map_or(0, |p| p.line() as usize);
    DatasetError::Malformed {
        path: label.to_string(),
        line,
        message: e.to_string(),
    }
}

fn read_drugbank(bytes: &[u8], label: &str) -> Result<(Vec<DrugRecord>, IngestReport), DatasetError> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(bytes);
    let headers = rdr.headers().map_err(|e| csv_error(label, e))?.clone();
    let idx = header_index(&headers, &["id", "name", "smiles", "indication"], label)?;
    let mut report = IngestReport::default();
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| csv_error(label, e))?;
        report.rows_read += 1;
        let field = |i: usize| row.get(idx[i]).unwrap_or("").trim();
        let (id, smiles, indication) = (field(0), field(2), field(3));
        if smiles.is_empty() || indication.is_empty() {
            report.dropped += 1;
            continue;
        }
        records.push(DrugRecord {
            id: id.to_string(),
            smiles: smiles.to_string(),
            indication: indication.to_string(),
            source: Source::Drugbank,
        });
    }
    Ok((records, report))
}

fn read_chembl(bytes: &[u8], label: &str) -> Result<(Vec<DrugRecord>, IngestReport), DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .from_reader(bytes);
    let headers = rdr.headers().map_err(|e| csv_error(label, e))?.clone();
    let idx = header_index(&headers, &["chembl_id", "canonical_smiles", "mesh_heading"], label)?;
    let mut report = IngestReport::default();
    let mut order: Vec<String> = Vec::new();
    let mut merged: HashMap<String, (String, Vec<String>)> = HashMap::new();
    for row in rdr.records() {
        let row = row.map_err(|e| csv_error(label, e))?;
        report.rows_read += 1;
        let field = |i: usize| row.get(idx[i]).unwrap_or("").trim();
        let (id, smiles, heading) = (field(0), field(1), field(2));
        if smiles.is_empty() || heading.is_empty() {
            report.dropped += 1;
            continue;
        }
        let entry = merged.entry(id.to_string()).or_insert_with(|| {
            order.push(id.to_string());
            (smiles.to_string(), Vec::new())
        });
        if !entry.1.iter().any(|h| h == heading) {
            entry.1.push(heading.to_string());
        }
    }
    let records = order
        .into_iter()
        .map(|id| {
            let (smiles, headings) = merged.remove(&id).unwrap();
            DrugRecord {
                id,
                smiles,
                indication: headings.join("; "),
                source: Source::Chembl,
            }
        })
        .collect();
    Ok((records, report))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonRow {
    id: String,
    smiles: String,
    indication: String,
    source: Source,
}

fn read_jsonl(bytes: &[u8], label: &str) -> Result<(Vec<DrugRecord>, IngestReport), DatasetError> {
    let text = std::str::from_utf8(bytes).map_err(|e| DatasetError::Malformed {
        path: label.to_string(),
        line: 0,
        message: e.to_string(),
    })?;
    let mut report = IngestReport::default();
    let mut records = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        report.rows_read += 1;
        let row: JsonRow = serde_json::from_str(line).map_err(|e| {
            if e.is_data() {
                DatasetError::SchemaMismatch {
                    path: label.to_string(),
                    message: format!("line {}: {e}", i + 1),
                }
            } else {
                DatasetError::Malformed {
                    path: label.to_string(),
                    line: i + 1,
                    message: e.to_string(),
                }
            }
        })?;
        if row.smiles.trim().is_empty() || row.indication.trim().is_empty() {
            report.dropped += 1;
            continue;
        }
        if !ids.insert(row.id.clone()) {
            return Err(DatasetError::DuplicateId(row.id));
        }
        records.push(DrugRecord {
            id: row.id,
            smiles: row.smiles.trim().to_string(),
            indication: row.indication.trim().to_string(),
            source: row.source,
        });
    }
    Ok((records, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drugbank_drops_empty_indications() {
        let csv = "id,name,smiles,indication\n\
                   DB1,Ethanol,CCO,Antiseptic for skin\n\
                   DB2,Water,O,\n\
                   DB3,\"Acid, acetic\",CC(=O)O,\"Otitis externa, acute\"\n";
        let got = ingest_reader(csv.as_bytes(), Layout::DrugbankCsv, "mem").unwrap();
        assert_eq!(got.set.len(), 2);
        assert_eq!(got.report, IngestReport { rows_read: 3, dropped: 1 });
        assert_eq!(got.set.records()[1].indication, "Otitis externa, acute");
        assert_eq!(got.set.records()[1].source, Source::Drugbank);
        assert_eq!(got.set.provenance.digest.len(), 64);
    }

    #[test]
    fn wrong_header_is_schema_mismatch() {
        let csv = "identifier,name,smiles,text\nDB1,x,C,y\n";
        assert!(matches!(
            ingest_reader(csv.as_bytes(), Layout::DrugbankCsv, "mem"),
            Err(DatasetError::SchemaMismatch { .. })
        ));
        let tsv = "chembl_id\tsmiles\tmesh_heading\n";
        assert!(matches!(
            ingest_reader(tsv.as_bytes(), Layout::ChemblTsv, "mem"),
            Err(DatasetError::SchemaMismatch { .. })
        ));
    }

    #[test]
    fn drugbank_duplicate_ids() {
        let csv = "id,name,smiles,indication\nDB1,a,C,x\nDB1,b,N,y\n";
        assert!(matches!(
            ingest_reader(csv.as_bytes(), Layout::DrugbankCsv, "mem"),
            Err(DatasetError::DuplicateId(_))
        ));
    }

    #[test]
    fn chembl_merges_rows_per_id() {
        let tsv = "chembl_id\tcanonical_smiles\tmesh_heading\n\
                   CHEMBL25\tCC(=O)Oc1ccccc1C(=O)O\tPain\n\
                   CHEMBL1\tCCO\tInfection\n\
                   CHEMBL25\tCC(=O)Oc1ccccc1C(=O)O\tFever\n\
                   CHEMBL25\tCC(=O)Oc1ccccc1C(=O)O\tPain\n\
                   CHEMBL9\t\tHeadache\n";
        let got = ingest_reader(tsv.as_bytes(), Layout::ChemblTsv, "mem").unwrap();
        assert_eq!(got.report, IngestReport { rows_read: 5, dropped: 1 });
        let recs = got.set.records();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].id, "CHEMBL25");
        assert_eq!(recs[0].indication, "Pain; Fever");
        assert_eq!(recs[1].indication, "Infection");
        assert_eq!(recs[1].source, Source::Chembl);
    }

    #[test]
    fn jsonl_preserves_order() {
        let lines: String = (0..5)
            .map(|i| format!("{{\"id\":\"r{i}\",\"smiles\":\"C\",\"indication\":\"use {i}\",\"source\":\"other\"}}\n"))
            .collect();
        let got = ingest_reader(lines.as_bytes(), Layout::GenericJsonl, "mem").unwrap();
        let ids: Vec<_> = got.set.records().iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["r0", "r1", "r2", "r3", "r4"]);
    }

    #[test]
    fn jsonl_errors() {
        let missing = "{\"id\":\"a\",\"smiles\":\"C\",\"source\":\"other\"}\n";
        assert!(matches!(
            ingest_reader(missing.as_bytes(), Layout::GenericJsonl, "mem"),
            Err(DatasetError::SchemaMismatch { .. })
        ));
        let broken = "{\"id\":\"a\",\n";
        assert!(matches!(
            ingest_reader(broken.as_bytes(), Layout::GenericJsonl, "mem"),
            Err(DatasetError::Malformed { line: 1, .. })
        ));
    }

    #[test]
    fn jsonl_roundtrip() {
        let text = "{\"id\":\"a\",\"smiles\":\"CCO\",\"indication\":\"x\",\"source\":\"drugbank\"}\n\
                    {\"id\":\"b\",\"smiles\":\"N\",\"indication\":\"y\",\"source\":\"chembl\"}\n";
        let set = ingest_reader(text.as_bytes(), Layout::GenericJsonl, "mem").unwrap().set;
        let mut out = Vec::new();
        set.write_jsonl(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }
}

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::fingerprints::{
    key_fingerprint, morgan_fingerprint, path_fingerprint, tanimoto, KeySet, DEFAULT_MAX_PATH_BONDS,
    DEFAULT_RADIUS, DEFAULT_WIDTH,
};
use crate::frechet::{fcd_from_files, open_text, read_rows};
use crate::smiles::{parse_smiles, validate};
use crate::textmetrics::{
    bleu, exact_match, levenshtein, meteor, rouge, CorpusPair, RougeVariant, TextTokenization, BLEU_EPSILON,
};

use super::{
    AllZeroCounts, D2IMetadata, D2IReport, HarnessError, I2DMetadata, I2DReport, PredictionFile, Task,
};

#[derive(Debug, Clone, Default)]
pub struct D2IOptions {
    pub label: String,
    pub text2mol_embeddings: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct I2DOptions {
    pub label: String,
    pub strict_validity: bool,
    pub bleu_tokenization: TextTokenization,
    pub bleu_order: usize,
    pub morgan_radius: u32,
    pub width: usize,
    pub max_path_bonds: u32,
    pub keyset: KeySet,
    /// Reference and hypothesis embedding files for the Fréchet distance.
    pub fcd_embeddings: Option<(PathBuf, PathBuf)>,
    pub text2mol_embeddings: Option<PathBuf>,
}

impl Default for I2DOptions {
    fn default() -> Self {
        I2DOptions {
            label: String::new(),
            strict_validity: false,
            bleu_tokenization: TextTokenization::Char,
            bleu_order: 4,
            morgan_radius: DEFAULT_RADIUS,
            width: DEFAULT_WIDTH,
            max_path_bonds: DEFAULT_MAX_PATH_BONDS,
            keyset: KeySet::default(),
            fcd_embeddings: None,
            text2mol_embeddings: None,
        }
    }
}

fn expect_task(file: &PredictionFile, task: Task) -> Result<(), HarnessError> {
    if file.task != task {
        return Err(HarnessError::TaskMismatch {
            expected: task,
            found: file.task,
        });
    }
    Ok(())
}

pub fn eval_d2i(file: &PredictionFile, opts: &D2IOptions) -> Result<D2IReport, HarnessError> {
    expect_task(file, Task::DrugToIndication)?;
    let refs: Vec<&str> = file.rows().iter().map(|r| r.reference.as_str()).collect();
    let hyps: Vec<&str> = file.rows().iter().map(|r| r.hypothesis.as_str()).collect();
    let corpus = CorpusPair::from_texts(&refs, &hyps, TextTokenization::Word)?;
    let text2mol = opts
        .text2mol_embeddings
        .as_deref()
        .map(|p| text2mol_from_file(p, file.len()))
        .transpose()?;
    Ok(D2IReport {
        label: opts.label.clone(),
        bleu2: bleu(&corpus, 2)?,
        bleu4: bleu(&corpus, 4)?,
        rouge1: rouge(&corpus, RougeVariant::One)?,
        rouge2: rouge(&corpus, RougeVariant::Two)?,
        rouge_l: rouge(&corpus, RougeVariant::L)?,
        meteor: meteor(&corpus)?,
        text2mol,
        metadata: D2IMetadata {
            rows: file.len(),
            tokenization: TextTokenization::Word.name().into(),
            bleu_smoothing_epsilon: BLEU_EPSILON,
            rouge_score: "f1".into(),
            meteor_matching: "exact unigram".into(),
            text2mol_embeddings: opts.text2mol_embeddings.clone(),
        },
    })
}

struct RowOutcome {
    distance: usize,
    valid: bool,
    /// (keys, path, morgan) similarities and their all-zero flags, present
    /// when both sides parse.
    similarity: Option<([f64; 3], [bool; 3])>,
}

/// SMILES strings are compared after trimming surrounding whitespace.
pub fn eval_i2d(file: &PredictionFile, opts: &I2DOptions) -> Result<I2DReport, HarnessError> {
    expect_task(file, Task::IndicationToDrug)?;
    let refs: Vec<&str> = file.rows().iter().map(|r| r.reference.trim()).collect();
    let hyps: Vec<&str> = file.rows().iter().map(|r| r.hypothesis.trim()).collect();
    let corpus = CorpusPair::from_texts(&refs, &hyps, opts.bleu_tokenization)?;
    let bleu_score = bleu(&corpus, opts.bleu_order)?;
    let exact = exact_match(&refs, &hyps)?;

    let outcomes = refs
        .par_iter()
        .zip(hyps.par_iter())
        .map(|(r, h)| score_row(r, h, opts))
        .collect::<Result<Vec<_>, HarnessError>>()?;

    let total = outcomes.len();
    let distance_sum: usize = outcomes.iter().map(|o| o.distance).sum();
    let valid = outcomes.iter().filter(|o| o.valid).count();
    let mut sums = [0.0f64; 3];
    let mut zeros = [0usize; 3];
    let mut used = 0usize;
    for (sims, flags) in outcomes.iter().filter_map(|o| o.similarity) {
        used += 1;
        for k in 0..3 {
            sums[k] += sims[k];
            zeros[k] += usize::from(flags[k]);
        }
    }
    let mean = |k: usize| (used > 0).then(|| sums[k] / used as f64);

    let fcd = opts
        .fcd_embeddings
        .as_ref()
        .map(|(a, b)| fcd_from_files::<f64>(a, b))
        .transpose()?;
    let text2mol = opts
        .text2mol_embeddings
        .as_deref()
        .map(|p| text2mol_from_file(p, total))
        .transpose()?;

    Ok(I2DReport {
        label: opts.label.clone(),
        bleu: bleu_score,
        exact,
        levenshtein: distance_sum as f64 / total as f64,
        maccs_fts: mean(0),
        rdk_fts: mean(1),
        morgan_fts: mean(2),
        fcd,
        text2mol,
        validity: valid as f64 / total as f64,
        skipped_invalid: total - used,
        metadata: I2DMetadata {
            total_pairs: total,
            used_pairs: used,
            smiles_bleu_tokenization: opts.bleu_tokenization.name().into(),
            smiles_bleu_order: opts.bleu_order,
            bleu_smoothing_epsilon: BLEU_EPSILON,
            validity_mode: if opts.strict_validity { "strict" } else { "lenient" }.into(),
            maccs_params: format!("keys({}, bits={})", opts.keyset.id, opts.keyset.len()),
            rdk_params: format!("path(max_bonds={}, bits={})", opts.max_path_bonds, opts.width),
            morgan_params: format!("morgan(radius={}, bits={})", opts.morgan_radius, opts.width),
            all_zero_fingerprint_pairs: AllZeroCounts {
                maccs: zeros[0],
                rdk: zeros[1],
                morgan: zeros[2],
            },
            covariance_estimator: "unbiased (N-1)".into(),
            fcd_status: if fcd.is_some() { "computed" } else { "not computed" }.into(),
            fcd_embeddings: opts.fcd_embeddings.clone(),
            text2mol_embeddings: opts.text2mol_embeddings.clone(),
        },
    })
}

fn score_row(reference: &str, hypothesis: &str, opts: &I2DOptions) -> Result<RowOutcome, HarnessError> {
    let distance = levenshtein(reference, hypothesis);
    let valid = validate(hypothesis, opts.strict_validity).verdict;
    let similarity = match (parse_smiles(reference), parse_smiles(hypothesis)) {
        (Ok(r), Ok(h)) => {
            let pairs = [
                (key_fingerprint(&r, &opts.keyset), key_fingerprint(&h, &opts.keyset)),
                (
                    path_fingerprint(&r, opts.max_path_bonds, opts.width)?,
                    path_fingerprint(&h, opts.max_path_bonds, opts.width)?,
                ),
                (
                    morgan_fingerprint(&r, opts.morgan_radius, opts.width)?,
                    morgan_fingerprint(&h, opts.morgan_radius, opts.width)?,
                ),
            ];
            let mut sims = [0.0; 3];
            let mut flags = [false; 3];
            for (k, (a, b)) in pairs.iter().enumerate() {
                sims[k] = tanimoto(a, b)?;
                flags[k] = a.count_ones() == 0 && b.count_ones() == 0;
            }
            Some((sims, flags))
        }
        _ => None,
    };
    Ok(RowOutcome {
        distance,
        valid,
        similarity,
    })
}

/// Reads a paired embedding file: a `D=<dim>` header, then one row per
/// prediction holding the molecule vector followed by the text vector.
pub fn read_paired_embeddings(path: &Path) -> Result<Vec<(Vec<f64>, Vec<f64>)>, HarnessError> {
    let label = path.display().to_string();
    let rows = read_rows::<f64, _>(open_text(path)?, &label, 2)?;
    Ok(rows
        .into_iter()
        .map(|(_, mut v)| {
            let text = v.split_off(v.len() / 2);
            (v, text)
        })
        .collect())
}

/// Mean cosine similarity over the pairs; a zero vector scores 0.
pub fn text2mol_score(pairs: &[(Vec<f64>, Vec<f64>)]) -> Option<f64> {
    if pairs.is_empty() {
        return None;
    }
    let total: f64 = pairs
        .iter()
        .map(|(a, b)| {
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            if na == 0.0 || nb == 0.0 {
                0.0
            } else {
                dot / (na * nb)
            }
        })
        .sum();
    Some(total / pairs.len() as f64)
}

fn text2mol_from_file(path: &Path, expected_rows: usize) -> Result<f64, HarnessError> {
    let pairs = read_paired_embeddings(path)?;
    if pairs.len() != expected_rows {
        return Err(HarnessError::EmbeddingRowMismatch {
            expected: expected_rows,
            found: pairs.len(),
        });
    }
    text2mol_score(&pairs).ok_or(HarnessError::EmptyPredictions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::PredictionRow;

    fn file(task: Task, pairs: &[(&str, &str)]) -> PredictionFile {
        let rows = pairs
            .iter()
            .enumerate()
            .map(|(i, (r, h))| PredictionRow {
                id: i.to_string(),
                reference: r.to_string(),
                hypothesis: h.to_string(),
            })
            .collect();
        PredictionFile::new(task, rows).unwrap()
    }

    #[test]
    fn i2d_identity() {
        let f = file(
            Task::IndicationToDrug,
            &[("CCO", "CCO"), ("c1ccccc1", "c1ccccc1"), ("CC(=O)O", "CC(=O)O")],
        );
        let r = eval_i2d(&f, &I2DOptions::default()).unwrap();
        assert_eq!(r.exact, 1.0);
        assert_eq!(r.levenshtein, 0.0);
        assert_eq!(r.validity, 1.0);
        assert_eq!(r.morgan_fts, Some(1.0));
        assert_eq!(r.rdk_fts, Some(1.0));
        assert_eq!(r.maccs_fts, Some(1.0));
        assert!((r.bleu - 1.0).abs() < 1e-12);
        assert_eq!(r.fcd, None);
        assert_eq!(r.metadata.fcd_status, "not computed");
    }

    #[test]
    fn i2d_invalid_rows_are_skipped() {
        let f = file(Task::IndicationToDrug, &[("CCO", "CCO"), ("CCO", "C1CC"), ("CCN", "")]);
        let r = eval_i2d(&f, &I2DOptions::default()).unwrap();
        assert_eq!(r.skipped_invalid, 2);
        assert_eq!(r.metadata.used_pairs, 1);
        assert!((r.validity - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.morgan_fts, Some(1.0));
        assert_eq!(r.levenshtein, (0.0 + 2.0 + 3.0) / 3.0);
    }

    #[test]
    fn i2d_nothing_usable() {
        let f = file(Task::IndicationToDrug, &[("CCO", "((")]);
        let r = eval_i2d(&f, &I2DOptions::default()).unwrap();
        assert_eq!(r.morgan_fts, None);
        assert_eq!(r.validity, 0.0);
    }

    #[test]
    fn strict_mode_changes_validity() {
        let f = file(Task::IndicationToDrug, &[("CC", "CC(C)(C)(C)C")]);
        let lenient = eval_i2d(&f, &I2DOptions::default()).unwrap();
        let strict = eval_i2d(
            &f,
            &I2DOptions {
                strict_validity: true,
                ..I2DOptions::default()
            },
        )
        .unwrap();
        assert_eq!(lenient.validity, 1.0);
        assert_eq!(strict.validity, 0.0);
    }

    #[test]
    fn d2i_identity() {
        let f = file(
            Task::DrugToIndication,
            &[
                ("used to treat hypertension and heart failure", "used to treat hypertension and heart failure"),
                ("for the relief of mild pain", "for the relief of mild pain"),
            ],
        );
        let r = eval_d2i(&f, &D2IOptions::default()).unwrap();
        for v in [r.bleu2, r.bleu4, r.rouge1, r.rouge2, r.rouge_l] {
            assert!((v - 1.0).abs() < 1e-12, "{v}");
        }
        // one chunk per pair still pays the fragmentation penalty
        let expected = ((1.0 - 0.5 / 7f64.powi(3)) + (1.0 - 0.5 / 6f64.powi(3))) / 2.0;
        assert!((r.meteor - expected).abs() < 1e-15);
        assert_eq!(r.text2mol, None);
    }

    #[test]
    fn wrong_task() {
        let f = file(Task::DrugToIndication, &[("a", "a")]);
        assert!(matches!(
            eval_i2d(&f, &I2DOptions::default()),
            Err(HarnessError::TaskMismatch { .. })
        ));
    }

    #[test]
    fn cosine() {
        let pairs = vec![
            (vec![1.0, 0.0], vec![2.0, 0.0]),
            (vec![1.0, 0.0], vec![0.0, 1.0]),
            (vec![0.0, 0.0], vec![1.0, 1.0]),
        ];
        assert!((text2mol_score(&pairs).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(text2mol_score(&[]), None);
    }

    #[test]
    fn paired_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t2m.txt");
        std::fs::write(&path, "D=2\n1 0 1 0\n0 1 1 0\n").unwrap();
        let pairs = read_paired_embeddings(&path).unwrap();
        assert_eq!(pairs[1], (vec![0.0, 1.0], vec![1.0, 0.0]));
        assert!((text2mol_from_file(&path, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            text2mol_from_file(&path, 3),
            Err(HarnessError::EmbeddingRowMismatch { .. })
        ));
    }
}

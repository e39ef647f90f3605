use serde::{Deserialize, Serialize};

use super::{ngram_counts, CorpusPair, MetricError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RougeVariant {
    One,
    Two,
    L,
}

fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Sentence-level ROUGE F1. When neither side has an n-gram of the requested
/// order the score is 1 for identical token sequences and 0 otherwise.
pub fn rouge_pair(reference: &[String], hypothesis: &[String], variant: RougeVariant) -> f64 {
    match variant {
        RougeVariant::One | RougeVariant::Two => {
            let n = if variant == RougeVariant::One { 1 } else { 2 };
            let ref_total = reference.len().saturating_sub(n - 1);
            let hyp_total = hypothesis.len().saturating_sub(n - 1);
            if ref_total == 0 && hyp_total == 0 {
                return if reference == hypothesis { 1.0 } else { 0.0 };
            }
            if ref_total == 0 || hyp_total == 0 {
                return 0.0;
            }
            let ref_counts = ngram_counts(reference, n);
            let overlap: usize = ngram_counts(hypothesis, n)
                .iter()
                .map(|(g, &c)| c.min(ref_counts.get(g).copied().unwrap_or(0)))
                .sum();
            f1(overlap as f64 / hyp_total as f64, overlap as f64 / ref_total as f64)
        }
        RougeVariant::L => {
            if reference.is_empty() || hypothesis.is_empty() {
                return if reference == hypothesis { 1.0 } else { 0.0 };
            }
            let lcs = lcs_len(reference, hypothesis) as f64;
            f1(lcs / hypothesis.len() as f64, lcs / reference.len() as f64)
        }
    }
}

/// Mean per-pair F1 over the corpus, summed in index order.
pub fn rouge(corpus: &CorpusPair, variant: RougeVariant) -> Result<f64, MetricError> {
    if corpus.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let total: f64 = corpus.pairs().map(|(r, h)| rouge_pair(r, h, variant)).sum();
    Ok(total / corpus.len() as f64)
}

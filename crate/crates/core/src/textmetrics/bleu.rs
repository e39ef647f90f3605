use super::{ngram_counts, CorpusPair, MetricError};

/// Numerator added to a modified precision whose clipped count is zero.
pub const BLEU_EPSILON: f64 = 1e-9;

/// Corpus BLEU with uniform weights over orders `1..=max_n`.
///
/// Clipped n-gram counts and totals are pooled across the corpus before the
/// precisions are formed. An order with no n-grams on either side (every
/// sentence shorter than `n`) is left out of the geometric mean.
pub fn bleu(corpus: &CorpusPair, max_n: usize) -> Result<f64, MetricError> {
    if max_n != 2 && max_n != 4 {
        return Err(MetricError::UnsupportedOrder(max_n));
    }
    if corpus.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let mut clipped = vec![0usize; max_n];
    let mut totals = vec![0usize; max_n];
    let mut ref_totals = vec![0usize; max_n];
    let (mut ref_len, mut hyp_len) = (0usize, 0usize);
    for (reference, hypothesis) in corpus.pairs() {
        ref_len += reference.len();
        hyp_len += hypothesis.len();
        for n in 1..=max_n {
            let ref_counts = ngram_counts(reference, n);
            let hyp_counts = ngram_counts(hypothesis, n);
            clipped[n - 1] += hyp_counts
                .iter()
                .map(|(g, &c)| c.min(ref_counts.get(g).copied().unwrap_or(0)))
                .sum::<usize>();
            totals[n - 1] += hypothesis.len().saturating_sub(n - 1);
            ref_totals[n - 1] += reference.len().saturating_sub(n - 1);
        }
    }
    if hyp_len == 0 {
        return Ok(0.0);
    }
    let weight = 1.0 / max_n as f64;
    let mut log_sum = 0.0;
    for n in 0..max_n {
        let p = if totals[n] == 0 && ref_totals[n] == 0 {
            1.0
        } else if clipped[n] == 0 {
            BLEU_EPSILON / totals[n].max(1) as f64
        } else {
            clipped[n] as f64 / totals[n] as f64
        };
        log_sum += weight * p.ln();
    }
    let brevity = if hyp_len < ref_len {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    } else {
        1.0
    };
    Ok(brevity * log_sum.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textmetrics::TextTokenization;

    fn corpus(refs: &[&str], hyps: &[&str]) -> CorpusPair {
        CorpusPair::from_texts(refs, hyps, TextTokenization::Word).unwrap()
    }

    #[test]
    fn brevity_penalty_only() {
        let score = bleu(&corpus(&["the cat sat"], &["the cat"]), 2).unwrap();
        assert!((score - (-0.5f64).exp()).abs() < 1e-12);
        assert!((score - 0.6065).abs() < 1e-4);
    }

    #[test]
    fn identical_corpus_scores_one() {
        let c = corpus(&["a b c d e", "x y"], &["a b c d e", "x y"]);
        assert_eq!(bleu(&c, 2).unwrap(), 1.0);
        assert_eq!(bleu(&c, 4).unwrap(), 1.0);
        let short = corpus(&["a b"], &["a b"]);
        assert_eq!(bleu(&short, 4).unwrap(), 1.0);
    }

    #[test]
    fn disjoint_is_epsilon_dominated() {
        let score = bleu(&corpus(&["a b c"], &["x y z"]), 2).unwrap();
        assert!(score > 0.0 && score < 1e-8);
    }

    #[test]
    fn hand_computed_partial_overlap() {
        // p1 = 4/4, p2 = 1/3 (only "a b"), c = r = 4
        let score = bleu(&corpus(&["a b c d"], &["a b d c"]), 2).unwrap();
        let expected = (1.0f64 / 3.0).sqrt();
        assert!((score - expected).abs() < 1e-12);
    }

    #[test]
    fn clipping() {
        // "the the the" vs "the cat": clipped unigram count 1 of 3
        let score = bleu(&corpus(&["the cat"], &["the the the"]), 2).unwrap();
        let expected = (0.5 * (1.0f64 / 3.0).ln() + 0.5 * (BLEU_EPSILON / 2.0).ln()).exp();
        assert!((score - expected).abs() < 1e-15);
    }

    #[test]
    fn empty_hypotheses_score_zero() {
        assert_eq!(bleu(&corpus(&["a b"], &[""]), 2).unwrap(), 0.0);
    }

    #[test]
    fn unsupported_order() {
        assert_eq!(
            bleu(&corpus(&["a"], &["a"]), 3),
            Err(MetricError::UnsupportedOrder(3))
        );
    }
}

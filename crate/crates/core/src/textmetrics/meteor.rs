use super::{CorpusPair, MetricError};

/// Exact-match unigram alignment between one hypothesis and its reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeteorAlignment {
    /// `(hypothesis position, reference position)`, sorted by hypothesis position.
    pub links: Vec<(usize, usize)>,
    pub chunks: usize,
}

impl MeteorAlignment {
    pub fn matches(&self) -> usize {
        self.links.len()
    }
}

/// Aligns by repeatedly taking the longest run of consecutive unaligned
/// tokens equal on both sides (earliest hypothesis, then reference, position
/// on ties). This always reaches the maximum match count, since any token left
/// unaligned on both sides would form a run of length one, and long runs keep
/// the chunk count low.
pub fn align(reference: &[String], hypothesis: &[String]) -> MeteorAlignment {
    let (h, r) = (hypothesis.len(), reference.len());
    let mut hyp_used = vec![false; h];
    let mut ref_used = vec![false; r];
    let mut links = Vec::new();
    let mut run = vec![0usize; (h + 1) * (r + 1)];
    loop {
        let mut best = (0usize, 0usize, 0usize);
        for i in (0..h).rev() {
            for j in (0..r).rev() {
                let v = if !hyp_used[i] && !ref_used[j] && hypothesis[i] == reference[j] {
                    1 + run[(i + 1) * (r + 1) + j + 1]
                } else {
                    0
                };
                run[i * (r + 1) + j] = v;
                // reverse scan: >= keeps the earliest (i, j) among equal lengths
                if v > 0 && v >= best.2 {
                    best = (i, j, v);
                }
            }
        }
        let (i, j, len) = best;
        if len == 0 {
            break;
        }
        for k in 0..len {
            hyp_used[i + k] = true;
            ref_used[j + k] = true;
            links.push((i + k, j + k));
        }
    }
    links.sort_unstable();
    let chunks = links
        .iter()
        .enumerate()
        .filter(|&(k, &(hi, rj))| k == 0 || links[k - 1] != (hi.wrapping_sub(1), rj.wrapping_sub(1)))
        .count();
    MeteorAlignment { links, chunks }
}

/// METEOR without stemming or synonymy: F_mean = 10PR/(R+9P), fragmentation
/// penalty 0.5·(chunks/matches)³.
pub fn meteor_pair(reference: &[String], hypothesis: &[String]) -> f64 {
    let alignment = align(reference, hypothesis);
    let m = alignment.matches();
    if m == 0 {
        return 0.0;
    }
    let precision = m as f64 / hypothesis.len() as f64;
    let recall = m as f64 / reference.len() as f64;
    let f_mean = 10.0 * precision * recall / (recall + 9.0 * precision);
    let penalty = 0.5 * (alignment.chunks as f64 / m as f64).powi(3);
    f_mean * (1.0 - penalty)
}

/// Mean per-pair METEOR in index order.
pub fn meteor(corpus: &CorpusPair) -> Result<f64, MetricError> {
    if corpus.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let total: f64 = corpus.pairs().map(|(r, h)| meteor_pair(r, h)).sum();
    Ok(total / corpus.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textmetrics::TextTokenization;

    fn toks(s: &str) -> Vec<String> {
        TextTokenization::Word.tokens(s)
    }

    #[test]
    fn identical_sentence() {
        let s = meteor_pair(&toks("the cat sat"), &toks("the cat sat"));
        assert!((s - (1.0 - 0.5 / 27.0)).abs() < 1e-12);
        assert!((s - 0.9815).abs() < 1e-4);
    }

    #[test]
    fn swapped_pair() {
        let a = align(&toks("a b"), &toks("b a"));
        assert_eq!(a.matches(), 2);
        assert_eq!(a.chunks, 2);
        assert!((meteor_pair(&toks("a b"), &toks("b a")) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn disjoint() {
        assert_eq!(meteor_pair(&toks("a b"), &toks("c d")), 0.0);
        assert_eq!(meteor_pair(&toks("a b"), &[]), 0.0);
    }

    #[test]
    fn repeated_tokens_prefer_long_runs() {
        // greedy by first occurrence would link "the" 0->0 and break the run
        let a = align(&toks("the big the cat sat"), &toks("the cat sat"));
        assert_eq!(a.matches(), 3);
        assert_eq!(a.chunks, 1);
        assert_eq!(a.links, [(0, 2), (1, 3), (2, 4)]);
    }

    #[test]
    fn hand_computed_fragmented() {
        // ref "a b c d", hyp "c d a b": m=4, chunks=2, P=R=1
        let s = meteor_pair(&toks("a b c d"), &toks("c d a b"));
        assert!((s - (1.0 - 0.5 * (0.5f64).powi(3))).abs() < 1e-12);
        // ref "a b c", hyp "a x": m=1, P=1/2, R=1/3, chunks=1
        let (p, r) = (0.5, 1.0 / 3.0);
        let f = 10.0 * p * r / (r + 9.0 * p);
        let s = meteor_pair(&toks("a b c"), &toks("a x"));
        assert!((s - f * 0.5).abs() < 1e-12);
    }
}

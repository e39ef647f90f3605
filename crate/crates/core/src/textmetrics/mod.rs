//! Corpus text-generation metrics (BLEU, ROUGE, METEOR) and string metrics
//! (Levenshtein distance, exact match).

mod bleu;
mod levenshtein;
mod meteor;
mod rouge;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tokenizer::tokenize;

pub use bleu::{bleu, BLEU_EPSILON};
pub use levenshtein::levenshtein;
pub use meteor::{align, meteor, meteor_pair, MeteorAlignment};
pub use rouge::{rouge, rouge_pair, RougeVariant};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("length mismatch: {references} references vs {hypotheses} hypotheses")]
    LengthMismatch { references: usize, hypotheses: usize },
    #[error("reference {index} is empty")]
    EmptyReference { index: usize },
    #[error("unsupported BLEU order {0}; expected 2 or 4")]
    UnsupportedOrder(usize),
}

/// How raw strings become token streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextTokenization {
    /// Lowercase, split punctuation into its own tokens, split on whitespace.
    Word,
    /// One token per Unicode scalar value.
    Char,
    /// SMILES grammar tokens; strings the tokenizer rejects fall back to
    /// character tokens so malformed generations still score.
    SmilesGrammar,
}

impl TextTokenization {
    pub fn tokens(self, text: &str) -> Vec<String> {
        match self {
            TextTokenization::Word => {
                let mut out = Vec::new();
                let mut current = String::new();
                for ch in text.chars().flat_map(char::to_lowercase) {
                    if ch.is_whitespace() {
                        if !current.is_empty() {
                            out.push(std::mem::take(&mut current));
                        }
                    } else if ch.is_alphanumeric() {
                        current.push(ch);
                    } else {
                        if !current.is_empty() {
                            out.push(std::mem::take(&mut current));
                        }
                        out.push(ch.to_string());
                    }
                }
                if !current.is_empty() {
                    out.push(current);
                }
                out
            }
            TextTokenization::Char => text.chars().map(String::from).collect(),
            TextTokenization::SmilesGrammar => match tokenize(text) {
                Ok(seq) => seq.tokens.into_iter().map(|t| t.text).collect(),
                Err(_) => TextTokenization::Char.tokens(text),
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TextTokenization::Word => "word",
            TextTokenization::Char => "char",
            TextTokenization::SmilesGrammar => "smiles_grammar",
        }
    }
}

/// Index-aligned reference/hypothesis token sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusPair {
    references: Vec<Vec<String>>,
    hypotheses: Vec<Vec<String>>,
}

impl CorpusPair {
    pub fn new(references: Vec<Vec<String>>, hypotheses: Vec<Vec<String>>) -> Result<Self, MetricError> {
        if references.len() != hypotheses.len() {
            return Err(MetricError::LengthMismatch {
                references: references.len(),
                hypotheses: hypotheses.len(),
            });
        }
        if references.is_empty() {
            return Err(MetricError::EmptyCorpus);
        }
        if let Some(index) = references.iter().position(Vec::is_empty) {
            return Err(MetricError::EmptyReference { index });
        }
        Ok(CorpusPair {
            references,
            hypotheses,
        })
    }

    pub fn from_texts<R, H>(
        references: &[R],
        hypotheses: &[H],
        mode: TextTokenization,
    ) -> Result<Self, MetricError>
    where
        R: AsRef<str>,
        H: AsRef<str>,
    {
        CorpusPair::new(
            references.iter().map(|r| mode.tokens(r.as_ref())).collect(),
            hypotheses.iter().map(|h| mode.tokens(h.as_ref())).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.references.len()
    }

    pub fn is_empty(&self) -> bool {
        self.references.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&[String], &[String])> {
        self.references
            .iter()
            .zip(&self.hypotheses)
            .map(|(r, h)| (r.as_slice(), h.as_slice()))
    }
}

/// Fraction of positions where the trimmed strings are byte-identical.
pub fn exact_match<R, H>(references: &[R], hypotheses: &[H]) -> Result<f64, MetricError>
where
    R: AsRef<str>,
    H: AsRef<str>,
{
    if references.len() != hypotheses.len() {
        return Err(MetricError::LengthMismatch {
            references: references.len(),
            hypotheses: hypotheses.len(),
        });
    }
    if references.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let hits = references
        .iter()
        .zip(hypotheses)
        .filter(|(r, h)| r.as_ref().trim() == h.as_ref().trim())
        .count();
    Ok(hits as f64 / references.len() as f64)
}

pub(crate) fn ngram_counts(tokens: &[String], n: usize) -> std::collections::HashMap<&[String], usize> {
    let mut counts = std::collections::HashMap::new();
    if n > 0 && tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

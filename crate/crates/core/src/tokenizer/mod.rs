//! Grammar-aware SMILES tokenization, vocabularies and id encoding.

mod vocab;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use vocab::{build_vocab, Vocabulary, VocabError, DEFAULT_SPECIALS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    BracketAtom,
    TwoCharElement,
    SingleCharAtom,
    AromaticAtom,
    Bond,
    RingDigit,
    PercentRing,
    BranchOpen,
    BranchClose,
    Dot,
    Special,
}

impl TokenKind {
    /// Whether the token denotes exactly one atom of the parsed graph.
    pub fn is_atom(self) -> bool {
        matches!(
            self,
            TokenKind::BracketAtom
                | TokenKind::TwoCharElement
                | TokenKind::SingleCharAtom
                | TokenKind::AromaticAtom
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub text: String,
    pub kind: TokenKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    pub tokens: Vec<Token>,
    pub source: String,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.text.as_str())
    }

    pub fn atom_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.kind.is_atom()).count()
    }
}

impl fmt::Display for TokenSequence {
    /// Space-joined token texts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(&t.text)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TokenizeError {
    #[error("unterminated bracket atom starting at offset {offset}")]
    UnterminatedBracket { offset: usize },
    #[error("illegal character {ch:?} at offset {offset}")]
    IllegalCharacter { ch: char, offset: usize },
}

/// Splits a SMILES string into grammar tokens by maximal munch: bracket atoms,
/// then `%nn` ring closures, then `Cl`/`Br`, then single characters.
pub fn tokenize(text: &str) -> Result<TokenSequence, TokenizeError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let (len, kind) = match bytes[i] {
            b'[' => {
                let close = bytes[i + 1..]
                    .iter()
                    .position(|&c| c == b']' || c == b'[')
                    .filter(|&p| bytes[i + 1 + p] == b']')
                    .ok_or(TokenizeError::UnterminatedBracket { offset: i })?;
                (close + 2, TokenKind::BracketAtom)
            }
            b'%' => match bytes.get(i + 1..i + 3) {
                Some([a, b]) if a.is_ascii_digit() && b.is_ascii_digit() => {
                    (3, TokenKind::PercentRing)
                }
                _ => return Err(TokenizeError::IllegalCharacter { ch: '%', offset: i }),
            },
            b'C' if bytes.get(i + 1) == Some(&b'l') => (2, TokenKind::TwoCharElement),
            b'B' if bytes.get(i + 1) == Some(&b'r') => (2, TokenKind::TwoCharElement),
            b'B' | b'C' | b'N' | b'O' | b'P' | b'S' | b'F' | b'I' => (1, TokenKind::SingleCharAtom),
            b'b' | b'c' | b'n' | b'o' | b'p' | b's' => (1, TokenKind::AromaticAtom),
            b'-' | b'=' | b'#' | b'$' | b':' | b'/' | b'\\' => (1, TokenKind::Bond),
            b'0'..=b'9' => (1, TokenKind::RingDigit),
            b'(' => (1, TokenKind::BranchOpen),
            b')' => (1, TokenKind::BranchClose),
            b'.' => (1, TokenKind::Dot),
            _ => {
                let ch = text[i..].chars().next().unwrap_or('\u{fffd}');
                return Err(TokenizeError::IllegalCharacter { ch, offset: i });
            }
        };
        tokens.push(Token {
            text: text[i..i + len].to_string(),
            kind,
        });
        i += len;
    }
    Ok(TokenSequence {
        tokens,
        source: text.to_string(),
    })
}

pub fn detokenize(seq: &TokenSequence) -> String {
    seq.tokens.iter().map(|t| t.text.as_str()).collect()
}

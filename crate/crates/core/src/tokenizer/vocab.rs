use std::collections::HashMap;
use std::io::{BufRead, Write};

use thiserror::Error;

use super::{tokenize, Token, TokenKind, TokenSequence, TokenizeError};

pub const DEFAULT_SPECIALS: [&str; 5] = ["<pad>", "<unk>", "<s>", "</s>", "<mask>"];

const UNKNOWN: &str = "<unk>";

#[derive(Debug, Error)]
pub enum VocabError {
    #[error("corpus contains no SMILES strings")]
    EmptyCorpus,
    #[error("line {line}: {source}")]
    Tokenize {
        line: usize,
        #[source]
        source: TokenizeError,
    },
    #[error("duplicate token {0:?}")]
    DuplicateToken(String),
    #[error("vocabulary is not frozen")]
    NotFrozen,
    #[error("vocabulary is frozen")]
    Frozen,
    #[error("token id {0} out of range")]
    IdOutOfRange(u32),
    #[error("token {0:?} is not in the vocabulary and no <unk> special is defined")]
    UnknownToken(String),
    #[error("vocabulary line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Dense token-to-id map. Specials occupy ids `0..specials.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<Token>,
    id_of: HashMap<String, u32>,
    n_specials: usize,
    unknown: Option<u32>,
    frozen: bool,
}

impl Vocabulary {
    pub fn new<S: AsRef<str>>(specials: &[S]) -> Result<Vocabulary, VocabError> {
        let mut vocab = Vocabulary {
            tokens: Vec::new(),
            id_of: HashMap::new(),
            n_specials: 0,
            unknown: None,
            frozen: false,
        };
        for s in specials {
            let s = s.as_ref();
            vocab.insert(Token {
                text: s.to_string(),
                kind: TokenKind::Special,
            })?;
            if s == UNKNOWN {
                vocab.unknown = Some(vocab.id_of[s]);
            }
        }
        vocab.n_specials = vocab.tokens.len();
        Ok(vocab)
    }

    fn insert(&mut self, token: Token) -> Result<u32, VocabError> {
        if self.id_of.contains_key(&token.text) {
            return Err(VocabError::DuplicateToken(token.text));
        }
        let id = self.tokens.len() as u32;
        self.id_of.insert(token.text.clone(), id);
        self.tokens.push(token);
        Ok(id)
    }

    /// Adds a token if unseen and returns its id.
    pub fn add(&mut self, token: &Token) -> Result<u32, VocabError> {
        if self.frozen {
            return Err(VocabError::Frozen);
        }
        match self.id_of.get(&token.text) {
            Some(&id) => Ok(id),
            None => self.insert(token.clone()),
        }
    }

    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn specials(&self) -> impl Iterator<Item = &str> {
        self.tokens[..self.n_specials].iter().map(|t| t.text.as_str())
    }

    pub fn id(&self, text: &str) -> Option<u32> {
        self.id_of.get(text).copied()
    }

    pub fn token(&self, id: u32) -> Option<&Token> {
        self.tokens.get(id as usize)
    }

    pub fn unknown_id(&self) -> Option<u32> {
        self.unknown
    }

    pub fn encode(&self, seq: &TokenSequence) -> Result<Vec<u32>, VocabError> {
        if !self.frozen {
            return Err(VocabError::NotFrozen);
        }
        seq.tokens
            .iter()
            .map(|t| match (self.id_of.get(&t.text), self.unknown) {
                (Some(&id), _) => Ok(id),
                (None, Some(unk)) => Ok(unk),
                (None, None) => Err(VocabError::UnknownToken(t.text.clone())),
            })
            .collect()
    }

    pub fn decode(&self, ids: &[u32]) -> Result<TokenSequence, VocabError> {
        if !self.frozen {
            return Err(VocabError::NotFrozen);
        }
        let tokens = ids
            .iter()
            .map(|&id| self.token(id).cloned().ok_or(VocabError::IdOutOfRange(id)))
            .collect::<Result<Vec<_>, _>>()?;
        let source = tokens.iter().map(|t| t.text.as_str()).collect();
        Ok(TokenSequence { tokens, source })
    }

    /// One token per line; the line index is the id.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for t in &self.tokens {
            writeln!(w, "{}", t.text)?;
        }
        Ok(())
    }

    /// Reads the line format written by [`Vocabulary::write_to`]. Leading lines
    /// of the form `<...>` are taken as specials; every other line must
    /// tokenize to exactly one SMILES token. The result is frozen.
    pub fn read_from<R: BufRead>(r: R) -> Result<Vocabulary, VocabError> {
        let mut specials = Vec::new();
        let mut rest = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let line_no = i + 1;
            if line.is_empty() {
                return Err(VocabError::Format {
                    line: line_no,
                    message: "empty token".into(),
                });
            }
            let is_special = line.starts_with('<') && line.ends_with('>') && line.len() > 2;
            if is_special && rest.is_empty() {
                specials.push(line);
            } else {
                rest.push((line_no, line));
            }
        }
        let mut vocab = Vocabulary::new(&specials)?;
        for (line_no, text) in rest {
            let seq = tokenize(&text).map_err(|source| VocabError::Tokenize {
                line: line_no,
                source,
            })?;
            if seq.len() != 1 {
                return Err(VocabError::Format {
                    line: line_no,
                    message: format!("{text:?} is not a single token"),
                });
            }
            vocab.insert(seq.tokens.into_iter().next().unwrap())?;
        }
        vocab.freeze();
        Ok(vocab)
    }
}

/// Builds a frozen vocabulary from a corpus with one SMILES per item. Tokens
/// receive ids in first-occurrence order after the specials. Blank lines are
/// skipped but still counted for error line numbers.
pub fn build_vocab<I, S, T>(corpus: I, specials: &[T]) -> Result<Vocabulary, VocabError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
    T: AsRef<str>,
{
    let mut vocab = Vocabulary::new(specials)?;
    let mut seen_any = false;
    for (i, line) in corpus.into_iter().enumerate() {
        let line = line.as_ref().trim();
        if line.is_empty() {
            continue;
        }
        seen_any = true;
        let seq = tokenize(line).map_err(|source| VocabError::Tokenize {
            line: i + 1,
            source,
        })?;
        for t in &seq.tokens {
            vocab.add(t)?;
        }
    }
    if !seen_any {
        return Err(VocabError::EmptyCorpus);
    }
    vocab.freeze();
    Ok(vocab)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_follow_first_occurrence() {
        let v = build_vocab(["CCO"], &["<pad>", "<unk>"]).unwrap();
        assert!(v.is_frozen());
        assert_eq!(v.len(), 4);
        assert_eq!(v.id("<pad>"), Some(0));
        assert_eq!(v.id("<unk>"), Some(1));
        assert_eq!(v.id("C"), Some(2));
        assert_eq!(v.id("O"), Some(3));
    }

    #[test]
    fn two_char_elements_stay_whole() {
        let v = build_vocab(["CCl", "CC"], &DEFAULT_SPECIALS).unwrap();
        let texts: Vec<_> = (0..v.len() as u32).map(|i| v.token(i).unwrap().text.as_str()).collect();
        assert_eq!(texts, ["<pad>", "<unk>", "<s>", "</s>", "<mask>", "C", "Cl"]);
    }

    #[test]
    fn empty_corpus() {
        assert!(matches!(
            build_vocab(Vec::<String>::new(), &DEFAULT_SPECIALS),
            Err(VocabError::EmptyCorpus)
        ));
        assert!(matches!(
            build_vocab(["", "  "], &DEFAULT_SPECIALS),
            Err(VocabError::EmptyCorpus)
        ));
    }

    #[test]
    fn tokenize_error_reports_line() {
        let err = build_vocab(["CC", "", "C[N"], &DEFAULT_SPECIALS).unwrap_err();
        assert!(matches!(err, VocabError::Tokenize { line: 3, .. }));
    }

    #[test]
    fn encode_decode() {
        let v = build_vocab(["CCO"], &["<pad>", "<unk>"]).unwrap();
        let ids = v.encode(&tokenize("CCO").unwrap()).unwrap();
        assert_eq!(ids, [2, 2, 3]);
        let seq = v.decode(&[2, 3]).unwrap();
        assert_eq!(seq.source, "CO");
        assert_eq!(seq.tokens[1].kind, TokenKind::SingleCharAtom);
        assert_eq!(v.encode(&tokenize("CN").unwrap()).unwrap(), [2, 1]);
        assert!(matches!(v.decode(&[4]), Err(VocabError::IdOutOfRange(4))));
    }

    #[test]
    fn no_unknown_special() {
        let v = build_vocab(["CC"], &["<pad>"]).unwrap();
        assert!(matches!(
            v.encode(&tokenize("N").unwrap()),
            Err(VocabError::UnknownToken(_))
        ));
    }

    #[test]
    fn unfrozen_vocab_refuses_encoding() {
        let v = Vocabulary::new(&DEFAULT_SPECIALS).unwrap();
        assert!(matches!(v.encode(&tokenize("C").unwrap()), Err(VocabError::NotFrozen)));
        assert!(matches!(
            Vocabulary::new(&["<pad>", "<pad>"]),
            Err(VocabError::DuplicateToken(_))
        ));
    }

    #[test]
    fn file_roundtrip() {
        let v = build_vocab(["c1ccccc1Cl", "[NH4+]", "C%10CC%10"], &DEFAULT_SPECIALS).unwrap();
        let mut buf = Vec::new();
        v.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("<pad>\n<unk>\n<s>\n</s>\n<mask>\nc\n1\nCl\n"));
        let back = Vocabulary::read_from(buf.as_slice()).unwrap();
        assert_eq!(back, v);
    }
}

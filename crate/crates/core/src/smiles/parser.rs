use std::collections::BTreeMap;

use thiserror::Error;

use super::element::Element;
use super::molecule::{Atom, Bond, BondOrder, Chirality, Molecule};

/// Parse failure, with the byte offset into the input where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmilesError {
    #[error("empty SMILES string")]
    Empty,
    #[error("unknown symbol {symbol:?} at offset {offset}")]
    UnknownSymbol { symbol: char, offset: usize },
    #[error("ring closure {ring} opened at offset {offset} is never closed")]
    UnmatchedRingClosure { ring: u16, offset: usize },
    #[error("ring closure at offset {offset} has no preceding atom")]
    MisplacedRingClosure { offset: usize },
    #[error("ring closure {ring} at offset {offset} specifies conflicting bond orders")]
    ConflictingRingBond { ring: u16, offset: usize },
    #[error("ring closure {ring} at offset {offset} bonds an atom to itself")]
    SelfBond { ring: u16, offset: usize },
    #[error("duplicate bond created at offset {offset}")]
    DuplicateBond { offset: usize },
    #[error("unbalanced parenthesis at offset {offset}")]
    UnbalancedParenthesis { offset: usize },
    #[error("empty branch at offset {offset}")]
    EmptyBranch { offset: usize },
    #[error("branch at offset {offset} has no atom to attach to")]
    MisplacedBranch { offset: usize },
    #[error("bond at offset {offset} has no preceding atom")]
    LeadingBond { offset: usize },
    #[error("bond at offset {offset} is not followed by an atom or ring closure")]
    DanglingBond { offset: usize },
    #[error("misplaced '.' at offset {offset}")]
    MisplacedDot { offset: usize },
    #[error("invalid bracket atom at offset {offset}: {reason}")]
    InvalidBracketAtom { offset: usize, reason: &'static str },
}

impl SmilesError {
    pub fn offset(&self) -> usize {
        match *self {
            SmilesError::Empty => 0,
            SmilesError::UnknownSymbol { offset, .. }
            | SmilesError::UnmatchedRingClosure { offset, .. }
            | SmilesError::MisplacedRingClosure { offset }
            | SmilesError::ConflictingRingBond { offset, .. }
            | SmilesError::SelfBond { offset, .. }
            | SmilesError::DuplicateBond { offset }
            | SmilesError::UnbalancedParenthesis { offset }
            | SmilesError::EmptyBranch { offset }
            | SmilesError::MisplacedBranch { offset }
            | SmilesError::LeadingBond { offset }
            | SmilesError::DanglingBond { offset }
            | SmilesError::MisplacedDot { offset }
            | SmilesError::InvalidBracketAtom { offset, .. } => offset,
        }
    }

    pub fn is_ring_error(&self) -> bool {
        matches!(
            self,
            SmilesError::UnmatchedRingClosure { .. }
                | SmilesError::MisplacedRingClosure { .. }
                | SmilesError::ConflictingRingBond { .. }
                | SmilesError::SelfBond { .. }
        )
    }

    pub fn is_parenthesis_error(&self) -> bool {
        matches!(
            self,
            SmilesError::UnbalancedParenthesis { .. }
                | SmilesError::EmptyBranch { .. }
                | SmilesError::MisplacedBranch { .. }
        )
    }
}

struct RingOpening {
    atom: usize,
    bond: Option<BondOrder>,
    offset: usize,
}

struct Branch {
    anchor: usize,
    offset: usize,
    has_atom: bool,
}

/// Parses a SMILES string into a molecular graph.
///
/// Directional bonds (`/`, `\`) become single bonds and chirality marks are
/// recorded on the atom without being checked. Dot-separated fragments yield a
/// disconnected graph.
pub fn parse_smiles(text: &str) -> Result<Molecule, SmilesError> {
    Parser::new(text).run()
}

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    prev: Option<usize>,
    pending: Option<(BondOrder, usize)>,
    branches: Vec<Branch>,
    rings: BTreeMap<u16, RingOpening>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text,
            bytes: text.as_bytes(),
            pos: 0,
            atoms: Vec::new(),
            bonds: Vec::new(),
            prev: None,
            pending: None,
            branches: Vec::new(),
            rings: BTreeMap::new(),
        }
    }

    fn run(mut self) -> Result<Molecule, SmilesError> {
        if self.bytes.is_empty() {
            return Err(SmilesError::Empty);
        }
        while self.pos < self.bytes.len() {
            let offset = self.pos;
            match self.bytes[offset] {
                b'[' => {
                    let atom = self.bracket_atom()?;
                    self.add_atom(atom, offset)?;
                }
                b'-' | b'=' | b'#' | b'$' | b':' | b'/' | b'\\' => {
                    if self.prev.is_none() {
                        return Err(SmilesError::LeadingBond { offset });
                    }
                    if let Some((_, first)) = self.pending {
                        return Err(SmilesError::DanglingBond { offset: first });
                    }
                    let order = match self.bytes[offset] {
                        b'=' => BondOrder::Double,
                        b'#' => BondOrder::Triple,
                        b'$' => BondOrder::Quadruple,
                        b':' => BondOrder::Aromatic,
                        _ => BondOrder::Single,
                    };
                    self.pending = Some((order, offset));
                    self.pos += 1;
                }
                b'0'..=b'9' => {
                    let ring = (self.bytes[offset] - b'0') as u16;
                    self.pos += 1;
                    self.ring_closure(ring, offset)?;
                }
                b'%' => {
                    let digits = self.bytes.get(offset + 1..offset + 3);
                    match digits {
                        Some([a, b]) if a.is_ascii_digit() && b.is_ascii_digit() => {
                            let ring = ((a - b'0') * 10 + (b - b'0')) as u16;
                            self.pos += 3;
                            self.ring_closure(ring, offset)?;
                        }
                        _ => {
                            return Err(SmilesError::UnknownSymbol {
                                symbol: '%',
                                offset,
                            })
                        }
                    }
                }
                b'(' => {
                    let Some(anchor) = self.prev else {
                        return Err(SmilesError::MisplacedBranch { offset });
                    };
                    if let Some((_, at)) = self.pending {
                        return Err(SmilesError::DanglingBond { offset: at });
                    }
                    self.branches.push(Branch {
                        anchor,
                        offset,
                        has_atom: false,
                    });
                    self.pos += 1;
                }
                b')' => {
                    if let Some((_, at)) = self.pending {
                        return Err(SmilesError::DanglingBond { offset: at });
                    }
                    let Some(branch) = self.branches.pop() else {
                        return Err(SmilesError::UnbalancedParenthesis { offset });
                    };
                    if !branch.has_atom {
                        return Err(SmilesError::EmptyBranch {
                            offset: branch.offset,
                        });
                    }
                    self.prev = Some(branch.anchor);
                    self.pos += 1;
                }
                b'.' => {
                    if let Some((_, at)) = self.pending {
                        return Err(SmilesError::DanglingBond { offset: at });
                    }
                    if self.prev.is_none() {
                        return Err(SmilesError::MisplacedDot { offset });
                    }
                    self.prev = None;
                    self.pos += 1;
                }
                _ => {
                    let atom = self.organic_atom()?;
                    self.add_atom(atom, offset)?;
                }
            }
        }
        if let Some((_, offset)) = self.pending {
            return Err(SmilesError::DanglingBond { offset });
        }
        if let Some(branch) = self.branches.first() {
            return Err(SmilesError::UnbalancedParenthesis {
                offset: branch.offset,
            });
        }
        if let Some((&ring, opening)) = self.rings.iter().min_by_key(|(_, o)| o.offset) {
            return Err(SmilesError::UnmatchedRingClosure {
                ring,
                offset: opening.offset,
            });
        }
        if self.prev.is_none() {
            // trailing '.'
            return Err(SmilesError::MisplacedDot {
                offset: self.bytes.len() - 1,
            });
        }
        Ok(Molecule::from_parts(
            self.atoms,
            self.bonds,
            self.text.to_string(),
        ))
    }

    fn unknown_at(&self, offset: usize) -> SmilesError {
        let symbol = self.text[offset..].chars().next().unwrap_or('\u{fffd}');
        SmilesError::UnknownSymbol { symbol, offset }
    }

    fn organic_atom(&mut self) -> Result<Atom, SmilesError> {
        let offset = self.pos;
        let b = self.bytes[offset];
        let next = self.bytes.get(offset + 1).copied();
        let (element, aromatic, len) = match (b, next) {
            (b'C', Some(b'l')) => (Element::CL, false, 2),
            (b'B', Some(b'r')) => (Element::BR, false, 2),
            (b'B', _) => (Element::B, false, 1),
            (b'C', _) => (Element::C, false, 1),
            (b'N', _) => (Element::N, false, 1),
            (b'O', _) => (Element::O, false, 1),
            (b'P', _) => (Element::P, false, 1),
            (b'S', _) => (Element::S, false, 1),
            (b'F', _) => (Element::F, false, 1),
            (b'I', _) => (Element::I, false, 1),
            (b'b', _) => (Element::B, true, 1),
            (b'c', _) => (Element::C, true, 1),
            (b'n', _) => (Element::N, true, 1),
            (b'o', _) => (Element::O, true, 1),
            (b'p', _) => (Element::P, true, 1),
            (b's', _) => (Element::S, true, 1),
            _ => return Err(self.unknown_at(offset)),
        };
        self.pos += len;
        Ok(Atom::organic(element, aromatic))
    }

    fn bracket_atom(&mut self) -> Result<Atom, SmilesError> {
        let start = self.pos;
        let invalid = |reason| SmilesError::InvalidBracketAtom {
            offset: start,
            reason,
        };
        let Some(close) = self.bytes[start + 1..].iter().position(|&c| c == b']') else {
            return Err(invalid("missing ']'"));
        };
        let body = &self.bytes[start + 1..start + 1 + close];
        let mut i = 0;

        let isotope_len = body.iter().take_while(|c| c.is_ascii_digit()).count();
        let isotope = if isotope_len > 0 {
            let v: u32 = std::str::from_utf8(&body[..isotope_len])
                .ok()
                .and_then(|s| s.parse().ok())
                .ok_or(invalid("isotope out of range"))?;
            if v == 0 || v > u16::MAX as u32 {
                return Err(invalid("isotope out of range"));
            }
            i = isotope_len;
            Some(v as u16)
        } else {
            None
        };

        let (element, aromatic) = bracket_symbol(body, &mut i).ok_or(invalid("unknown element"))?;

        let chirality = if body.get(i) == Some(&b'@') {
            if body.get(i + 1) == Some(&b'@') {
                i += 2;
                Some(Chirality::Clockwise)
            } else {
                i += 1;
                Some(Chirality::CounterClockwise)
            }
        } else {
            None
        };

        let explicit_h = if body.get(i) == Some(&b'H') {
            i += 1;
            match body.get(i) {
                Some(d) if d.is_ascii_digit() => {
                    i += 1;
                    Some(d - b'0')
                }
                _ => Some(1),
            }
        } else {
            Some(0)
        };

        let mut formal_charge: i32 = 0;
        if let Some(&sign @ (b'+' | b'-')) = body.get(i) {
            let unit = if sign == b'+' { 1 } else { -1 };
            i += 1;
            let digits = body[i..].iter().take_while(|c| c.is_ascii_digit()).count();
            if digits > 0 {
                let mag: i32 = std::str::from_utf8(&body[i..i + digits])
                    .ok()
                    .and_then(|s| s.parse().ok())
                    .ok_or(invalid("charge out of range"))?;
                formal_charge = unit * mag;
                i += digits;
            } else {
                formal_charge = unit;
                while body.get(i) == Some(&sign) {
                    formal_charge += unit;
                    i += 1;
                }
            }
            if !(-15..=15).contains(&formal_charge) {
                return Err(invalid("charge out of range"));
            }
        }

        if body.get(i) == Some(&b':') {
            i += 1;
            let digits = body[i..].iter().take_while(|c| c.is_ascii_digit()).count();
            if digits == 0 {
                return Err(invalid("atom class requires digits"));
            }
            i += digits;
        }

        if i != body.len() {
            return Err(invalid("unexpected characters"));
        }
        self.pos = start + close + 2;
        Ok(Atom {
            element,
            aromatic,
            formal_charge: formal_charge as i8,
            explicit_h,
            isotope,
            chirality,
            in_bracket: true,
        })
    }

    fn implicit_order(&self, a: usize, b: usize) -> BondOrder {
        if self.atoms[a].aromatic && self.atoms[b].aromatic {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        }
    }

    fn connect(&mut self, a: usize, b: usize, order: BondOrder, offset: usize) -> Result<(), SmilesError> {
        if self
            .bonds
            .iter()
            .any(|x| (x.from == a && x.to == b) || (x.from == b && x.to == a))
        {
            return Err(SmilesError::DuplicateBond { offset });
        }
        self.bonds.push(Bond {
            from: a,
            to: b,
            order,
        });
        Ok(())
    }

    fn add_atom(&mut self, atom: Atom, offset: usize) -> Result<(), SmilesError> {
        let idx = self.atoms.len();
        self.atoms.push(atom);
        if let Some(prev) = self.prev {
            let order = match self.pending.take() {
                Some((order, _)) => order,
                None => self.implicit_order(prev, idx),
            };
            self.connect(prev, idx, order, offset)?;
        }
        if let Some(branch) = self.branches.last_mut() {
            branch.has_atom = true;
        }
        self.prev = Some(idx);
        Ok(())
    }

    fn ring_closure(&mut self, ring: u16, offset: usize) -> Result<(), SmilesError> {
        let Some(current) = self.prev else {
            return Err(SmilesError::MisplacedRingClosure { offset });
        };
        let bond = self.pending.take().map(|(order, _)| order);
        match self.rings.remove(&ring) {
            None => {
                self.rings.insert(
                    ring,
                    RingOpening {
                        atom: current,
                        bond,
                        offset,
                    },
                );
                Ok(())
            }
            Some(open) => {
                if open.atom == current {
                    return Err(SmilesError::SelfBond { ring, offset });
                }
                let order = match (open.bond, bond) {
                    (Some(a), Some(b)) if a != b => {
                        return Err(SmilesError::ConflictingRingBond { ring, offset })
                    }
                    (Some(a), _) | (None, Some(a)) => a,
                    (None, None) => self.implicit_order(open.atom, current),
                };
                self.connect(open.atom, current, order, offset)
            }
        }
    }
}

fn bracket_symbol(body: &[u8], i: &mut usize) -> Option<(Element, bool)> {
    let rest = &body[*i..];
    let first = *rest.first()?;
    if first.is_ascii_uppercase() {
        if let Some(&second) = rest.get(1) {
            if second.is_ascii_lowercase() {
                let sym = std::str::from_utf8(&rest[..2]).ok()?;
                if let Some(e) = Element::from_symbol(sym) {
                    *i += 2;
                    return Some((e, false));
                }
            }
        }
        let e = Element::from_symbol(std::str::from_utf8(&rest[..1]).ok()?)?;
        *i += 1;
        return Some((e, false));
    }
    if rest.starts_with(b"se") {
        *i += 2;
        return Some((Element::SE, true));
    }
    if rest.starts_with(b"as") {
        *i += 2;
        return Some((Element::AS, true));
    }
    let e = match first {
        b'b' => Element::B,
        b'c' => Element::C,
        b'n' => Element::N,
        b'o' => Element::O,
        b'p' => Element::P,
        b's' => Element::S,
        _ => return None,
    };
    *i += 1;
    Some((e, true))
}

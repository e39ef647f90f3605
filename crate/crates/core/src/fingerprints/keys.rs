use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::smiles::{BondOrder, Element, Molecule};

use super::{fnv1a, BitVec, Fingerprint, FingerprintParams};

pub const DEFAULT_KEYSET_ID: &str = "default-40";

/// The shipped MACCS-style key set. Same line format as key set config files.
const DEFAULT_KEYSET: &str = "\
0\telement(N)
1\telement(O)
2\telement(S)
3\telement(P)
4\telement(F)
5\telement(Cl)
6\telement(Br)
7\telement(I)
8\telement(B)
9\tcount(C,6)
10\tcount(C,12)
11\tcount(N,2)
12\tcount(N,3)
13\tcount(O,2)
14\tcount(O,3)
15\tcount(O,4)
16\tcount(S,2)
17\tcount(F,3)
18\tring
19\tring_size(3)
20\tring_size(4)
21\tring_size(5)
22\tring_size(6)
23\tring_size(7)
24\tbond(double)
25\tbond(triple)
26\tbond(aromatic)
27\tpath(C,O)
28\tpath(C,N)
29\tpath(C,S)
30\tpath(N,O)
31\tpath(O,C,O)
32\tpath(N,C,O)
33\tpath(N,C,N)
34\tpath(C,N,C)
35\tpath(O,C,C,O)
36\tpath(N,C,C,N)
37\tpath(C,S,C)
38\tpath(N,C,C,O)
39\tpath(C,C,C,C,C,C)
";

/// A structural yes/no predicate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum KeyDescriptor {
    ElementPresent(Element),
    ElementCount(Element, u32),
    RingPresent,
    RingSize(usize),
    BondOrderPresent(BondOrder),
    /// Simple path (no repeated atom) whose element sequence matches, read in
    /// either direction; bond orders and aromaticity are ignored.
    PathPattern(Vec<Element>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KeySetError {
    #[error("key set line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("key set is empty")]
    Empty,
}

impl FromStr for KeyDescriptor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "ring" {
            return Ok(KeyDescriptor::RingPresent);
        }
        let (name, args) = s
            .strip_suffix(')')
            .and_then(|x| x.split_once('('))
            .ok_or_else(|| format!("malformed descriptor {s:?}"))?;
        let args: Vec<&str> = args.split(',').map(str::trim).collect();
        let element = |sym: &str| Element::from_symbol(sym).ok_or_else(|| format!("unknown element {sym:?}"));
        let number = |n: &str| n.parse::<u32>().map_err(|_| format!("bad number {n:?}"));
        match (name, args.as_slice()) {
            ("element", [e]) => Ok(KeyDescriptor::ElementPresent(element(e)?)),
            ("count", [e, k]) => Ok(KeyDescriptor::ElementCount(element(e)?, number(k)?)),
            ("ring_size", [n]) => match number(n)? {
                n @ 3.. => Ok(KeyDescriptor::RingSize(n as usize)),
                n => Err(format!("ring size {n} is below 3")),
            },
            ("bond", [order]) => {
                let order = match *order {
                    "single" => BondOrder::Single,
                    "double" => BondOrder::Double,
                    "triple" => BondOrder::Triple,
                    "quadruple" => BondOrder::Quadruple,
                    "aromatic" => BondOrder::Aromatic,
                    other => return Err(format!("unknown bond order {other:?}")),
                };
                Ok(KeyDescriptor::BondOrderPresent(order))
            }
            ("path", elements) if !elements.is_empty() => Ok(KeyDescriptor::PathPattern(
                elements.iter().map(|e| element(e)).collect::<Result<_, _>>()?,
            )),
            _ => Err(format!("unknown descriptor {s:?}")),
        }
    }
}

impl fmt::Display for KeyDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KeyDescriptor::ElementPresent(e) => write!(f, "element({e})"),
            KeyDescriptor::ElementCount(e, k) => write!(f, "count({e},{k})"),
            KeyDescriptor::RingPresent => f.write_str("ring"),
            KeyDescriptor::RingSize(n) => write!(f, "ring_size({n})"),
            KeyDescriptor::BondOrderPresent(o) => {
                let name = match o {
                    BondOrder::Single => "single",
                    BondOrder::Double => "double",
                    BondOrder::Triple => "triple",
                    BondOrder::Quadruple => "quadruple",
                    BondOrder::Aromatic => "aromatic",
                };
                write!(f, "bond({name})")
            }
            KeyDescriptor::PathPattern(p) => {
                f.write_str("path(")?;
                for (i, e) in p.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeySet {
    pub id: String,
    pub keys: Vec<KeyDescriptor>,
}

impl Default for KeySet {
    fn default() -> Self {
        KeySet::parse(DEFAULT_KEYSET).expect("built-in key set parses")
    }
}

impl KeySet {
    /// Parses `id<TAB>descriptor` lines. Ids must run densely from 0 in file
    /// order; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<KeySet, KeySetError> {
        let mut keys = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| KeySetError::Parse { line: i + 1, message };
            let (id, desc) = line
                .split_once('\t')
                .ok_or_else(|| err("expected id<TAB>descriptor".into()))?;
            let id: usize = id.trim().parse().map_err(|_| err(format!("bad key id {id:?}")))?;
            if id != keys.len() {
                return Err(err(format!("expected key id {}, found {id}", keys.len())));
            }
            keys.push(desc.parse::<KeyDescriptor>().map_err(err)?);
        }
        if keys.is_empty() {
            return Err(KeySetError::Empty);
        }
        let canonical = render(&keys);
        let id = if canonical == DEFAULT_KEYSET {
            DEFAULT_KEYSET_ID.to_string()
        } else {
            format!("custom-{:016x}", fnv1a(canonical.as_bytes()))
        };
        Ok(KeySet { id, keys })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn to_config(&self) -> String {
        render(&self.keys)
    }
}

fn render(keys: &[KeyDescriptor]) -> String {
    keys.iter()
        .enumerate()
        .map(|(i, k)| format!("{i}\t{k}\n"))
        .collect()
}

pub fn key_fingerprint(mol: &Molecule, keyset: &KeySet) -> Fingerprint {
    let rings = mol.ring_info();
    let bits = keyset
        .keys
        .iter()
        .enumerate()
        .filter(|(_, key)| match key {
            KeyDescriptor::ElementPresent(e) => mol.atoms().iter().any(|a| a.element == *e),
            KeyDescriptor::ElementCount(e, k) => {
                mol.atoms().iter().filter(|a| a.element == *e).count() >= *k as usize
            }
            KeyDescriptor::RingPresent => rings.has_ring(),
            KeyDescriptor::RingSize(n) => rings.has_ring_of_size(*n),
            KeyDescriptor::BondOrderPresent(o) => mol.bonds().iter().any(|b| b.order == *o),
            KeyDescriptor::PathPattern(p) => has_path(mol, p),
        })
        .map(|(i, _)| i);
    Fingerprint {
        bits: BitVec::from_indices(keyset.len(), bits),
        params: FingerprintParams::Keys {
            keyset: keyset.id.clone(),
            width: keyset.len(),
        },
    }
}

fn has_path(mol: &Molecule, pattern: &[Element]) -> bool {
    fn walk(mol: &Molecule, pattern: &[Element], atom: usize, visited: &mut Vec<usize>) -> bool {
        if pattern.is_empty() {
            return true;
        }
        mol.neighbors(atom).iter().any(|&(n, _)| {
            if visited.contains(&n) || mol.atoms()[n].element != pattern[0] {
                return false;
            }
            visited.push(n);
            let found = walk(mol, &pattern[1..], n, visited);
            visited.pop();
            found
        })
    }
    (0..mol.atom_count()).any(|start| {
        mol.atoms()[start].element == pattern[0] && walk(mol, &pattern[1..], start, &mut vec![start])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smiles::parse_smiles;

    fn key_index(ks: &KeySet, desc: &str) -> usize {
        let d: KeyDescriptor = desc.parse().unwrap();
        ks.keys.iter().position(|k| *k == d).unwrap()
    }

    fn bits(s: &str) -> Fingerprint {
        key_fingerprint(&parse_smiles(s).unwrap(), &KeySet::default())
    }

    #[test]
    fn default_keyset_has_forty_keys() {
        let ks = KeySet::default();
        assert_eq!(ks.len(), 40);
        assert_eq!(ks.id, DEFAULT_KEYSET_ID);
        assert_eq!(ks.to_config(), DEFAULT_KEYSET);
    }

    #[test]
    fn benzene() {
        let ks = KeySet::default();
        let fp = bits("c1ccccc1");
        assert_eq!(fp.width(), 40);
        assert!(fp.bits.get(key_index(&ks, "ring")));
        assert!(!fp.bits.get(key_index(&ks, "element(N)")));
        assert!(fp.bits.get(key_index(&ks, "ring_size(6)")));
        assert!(fp.bits.get(key_index(&ks, "bond(aromatic)")));
        assert!(fp.bits.get(key_index(&ks, "count(C,6)")));
        assert!(fp.bits.get(key_index(&ks, "path(C,C,C,C,C,C)")));
    }

    #[test]
    fn water() {
        let ks = KeySet::default();
        let fp = bits("O");
        assert!(fp.bits.get(key_index(&ks, "element(O)")));
        assert!(!fp.bits.get(key_index(&ks, "ring")));
        assert_eq!(fp.count_ones(), 1);
    }

    #[test]
    fn cyclopropane_ring_size() {
        let ks = KeySet::default();
        let fp = bits("C1CC1");
        assert!(fp.bits.get(key_index(&ks, "ring_size(3)")));
        assert!(!fp.bits.get(key_index(&ks, "ring_size(6)")));
    }

    #[test]
    fn fused_rings_report_smallest_cycles() {
        let ks = KeySet::default();
        let fp = bits("c1ccc2ccccc2c1");
        assert!(fp.bits.get(key_index(&ks, "ring_size(6)")));
        assert!(!fp.bits.get(key_index(&ks, "ring_size(7)")));
    }

    #[test]
    fn path_patterns_need_simple_paths() {
        let ks = KeySet::default();
        // acetic acid has O-C-O but not N-C-O
        let fp = bits("CC(=O)O");
        assert!(fp.bits.get(key_index(&ks, "path(O,C,O)")));
        assert!(!fp.bits.get(key_index(&ks, "path(N,C,O)")));
        // methanol: O-C-O would need to revisit the oxygen
        assert!(!bits("CO").bits.get(key_index(&ks, "path(O,C,O)")));
        assert!(bits("NCC(=O)O").bits.get(key_index(&ks, "path(N,C,C,O)")));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(KeySet::parse(""), Err(KeySetError::Empty)));
        assert!(matches!(
            KeySet::parse("0\tring\n2\tring_size(5)\n"),
            Err(KeySetError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            KeySet::parse("0 ring\n"),
            Err(KeySetError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            KeySet::parse("# header\n0\telement(Xx)\n"),
            Err(KeySetError::Parse { line: 2, .. })
        ));
        assert!("ring_size(2)".parse::<KeyDescriptor>().is_err());
        assert!("bond(quintuple)".parse::<KeyDescriptor>().is_err());
    }

    #[test]
    fn custom_keyset_gets_content_id() {
        let a = KeySet::parse("0\tring\n1\telement(N)\n").unwrap();
        let b = KeySet::parse("# same keys\n0\tring\n1\t element(N) \n").unwrap();
        assert!(a.id.starts_with("custom-"));
        assert_eq!(a, b);
        assert_eq!(key_fingerprint(&parse_smiles("C1CN1").unwrap(), &a).count_ones(), 2);
    }
}

use serde::{Deserialize, Serialize};

use super::molecule::{BondOrder, Molecule};
use super::parser::parse_smiles;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub parseable: bool,
    pub ring_closures_ok: bool,
    pub parentheses_ok: bool,
    /// Populated only in strict mode.
    pub valence_ok: Option<bool>,
    pub verdict: bool,
    pub failure_detail: Option<String>,
}

/// Checks a SMILES string. Lenient mode accepts anything that parses; strict
/// mode additionally checks organic-subset valences.
pub fn validate(text: &str, strict: bool) -> ValidityReport {
    let (scan_rings_ok, scan_parens_ok) = scan_structure(text);
    let parsed = parse_smiles(text);
    let (parseable, mut rings_ok, mut parens_ok, mut detail) = match &parsed {
        Ok(_) => (true, scan_rings_ok, scan_parens_ok, None),
        Err(e) => (
            false,
            scan_rings_ok && !e.is_ring_error(),
            scan_parens_ok && !e.is_parenthesis_error(),
            Some(format!("{e}")),
        ),
    };
    if text.is_empty() {
        rings_ok = true;
        parens_ok = true;
        detail = Some("empty SMILES string at offset 0".into());
    }
    let valence_ok = strict.then(|| match &parsed {
        Ok(mol) => match first_valence_violation(mol) {
            None => true,
            Some(atom) => {
                detail = Some(format!(
                    "valence exceeded on atom {atom} ({})",
                    mol.atoms()[atom].element
                ));
                false
            }
        },
        Err(_) => false,
    });
    let verdict = parseable && rings_ok && parens_ok && valence_ok.unwrap_or(true);
    ValidityReport {
        parseable,
        ring_closures_ok: rings_ok,
        parentheses_ok: parens_ok,
        valence_ok,
        verdict,
        failure_detail: detail,
    }
}

/// Returns the first bare organic-subset atom whose bonds exceed every allowed
/// valence. Aromatic bonds count 1.5 (rounded up) on non-aromatic atoms; on
/// aromatic atoms they count 1, the Kekulé lower bound.
pub fn first_valence_violation(mol: &Molecule) -> Option<usize> {
    (0..mol.atom_count()).find(|&i| {
        let atom = &mol.atoms()[i];
        if atom.in_bracket {
            return false;
        }
        let Some(&max) = atom.element.default_valences().last() else {
            return false;
        };
        let used = if atom.aromatic {
            mol.neighbors(i)
                .iter()
                .map(|&(_, b)| match mol.bonds()[b].order {
                    BondOrder::Aromatic => 1,
                    other => other.half_valence() / 2,
                })
                .sum()
        } else {
            mol.half_valence_sum(i).div_ceil(2)
        };
        used > max as u32
    })
}

/// Parenthesis balance and ring-label pairing, checked lexically so each flag
/// can be reported independently of where parsing stopped.
fn scan_structure(text: &str) -> (bool, bool) {
    let bytes = text.as_bytes();
    let mut depth: i32 = 0;
    let mut parens_ok = true;
    let mut ring_counts = [0u32; 100];
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'[' => match bytes[i..].iter().position(|&c| c == b']') {
                Some(close) => i += close,
                None => break,
            },
            b'(' => {
                if bytes.get(i + 1) == Some(&b')') {
                    parens_ok = false;
                }
                depth += 1;
            }
            b')' => {
                depth -= 1;
                if depth < 0 {
                    parens_ok = false;
                    depth = 0;
                }
            }
            b'%' => {
                if let Some([a, b]) = bytes.get(i + 1..i + 3) {
                    if a.is_ascii_digit() && b.is_ascii_digit() {
                        ring_counts[((a - b'0') * 10 + (b - b'0')) as usize] += 1;
                        i += 2;
                    }
                }
            }
            d @ b'0'..=b'9' => ring_counts[(d - b'0') as usize] += 1,
            _ => {}
        }
        i += 1;
    }
    let rings_ok = ring_counts.iter().all(|c| c % 2 == 0);
    (rings_ok, parens_ok && depth == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lenient_accepts_ethanol() {
        let r = validate("CCO", false);
        assert!(r.verdict && r.parseable && r.ring_closures_ok && r.parentheses_ok);
        assert_eq!(r.valence_ok, None);
        assert_eq!(r.failure_detail, None);
    }

    #[test]
    fn open_parenthesis() {
        let r = validate("C(", false);
        assert!(!r.verdict);
        assert!(!r.parentheses_ok);
        assert!(!r.parseable);
        assert!(r.ring_closures_ok);
        assert!(r.failure_detail.unwrap().contains("offset 1"));
    }

    #[test]
    fn pentavalent_carbon_fails_strict_only() {
        let lenient = validate("CC(C)(C)(C)C", false);
        assert!(lenient.verdict);
        let strict = validate("CC(C)(C)(C)C", true);
        assert!(!strict.verdict);
        assert_eq!(strict.valence_ok, Some(false));
        assert!(strict.parseable);
    }

    #[test]
    fn unmatched_ring_flag() {
        let r = validate("C1CC", false);
        assert!(!r.ring_closures_ok && !r.verdict);
        assert!(r.parentheses_ok);
        let self_bond = validate("C11", false);
        assert!(!self_bond.ring_closures_ok);
    }

    #[test]
    fn empty_string() {
        let r = validate("", true);
        assert!(!r.parseable && !r.verdict);
        assert_eq!(r.valence_ok, Some(false));
    }

    #[test]
    fn strict_valence_cases() {
        for ok in [
            "c1ccccc1",
            "c1ccc2ccccc2c1",
            "c1ccoc1",
            "c1ccsc1",
            "Cc1ccccc1",
            "CS(=O)(=O)C",
            "O=P(O)(O)O",
            "C[N+](C)(C)C",
            "CN(=O)=O",
            "C#N",
        ] {
            assert!(validate(ok, true).verdict, "{ok}");
        }
        for bad in ["FC(F)(F)(F)F", "O(C)(C)C", "ClCl(C)", "C=C=C=C(=C)C", "N(=C)(=C)=C"] {
            assert_eq!(validate(bad, true).valence_ok, Some(false), "{bad}");
        }
    }

    #[test]
    fn bracket_atoms_are_exempt() {
        assert!(validate("[CH5]", true).verdict);
    }
}

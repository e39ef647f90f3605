use std::collections::BTreeMap;
use std::fmt::Write;

use super::element::Element;
use super::molecule::Molecule;

/// Hill-ordered molecular formula with a trailing net charge (`+`, `-`, `+2`, ...).
pub fn molecular_formula(mol: &Molecule) -> String {
    let mut counts: BTreeMap<&'static str, u32> = BTreeMap::new();
    let mut charge: i32 = 0;
    for (i, atom) in mol.atoms().iter().enumerate() {
        *counts.entry(atom.element.symbol()).or_default() += 1;
        let h = mol.total_hydrogens(i) as u32;
        if h > 0 {
            *counts.entry(Element::H.symbol()).or_default() += h;
        }
        charge += atom.formal_charge as i32;
    }

    let mut out = String::new();
    let mut emit = |sym: &str, n: u32| {
        out.push_str(sym);
        if n > 1 {
            write!(out, "{n}").unwrap();
        }
    };
    if let Some(c) = counts.remove("C") {
        emit("C", c);
        if let Some(h) = counts.remove("H") {
            emit("H", h);
        }
    }
    for (sym, n) in counts {
        emit(sym, n);
    }
    match charge {
        0 => {}
        1 => out.push('+'),
        -1 => out.push('-'),
        c if c > 0 => write!(out, "+{c}").unwrap(),
        c => write!(out, "{c}").unwrap(),
    }
    out
}

use std::collections::BTreeSet;

use crate::smiles::Molecule;

use super::{check_width, fnv1a, BitVec, Fingerprint, FingerprintError, FingerprintParams};

/// Canonical descriptors of every bond trail (walk without a repeated bond)
/// of `1..=max_bonds` bonds.
///
/// A descriptor is the byte sequence `atom (bond atom)*` where an atom is
/// `[atomic number, aromatic]` and a bond is its order code; of the forward
/// and reverse readings the lexicographically smaller one is kept.
pub fn path_descriptors(mol: &Molecule, max_bonds: u32) -> BTreeSet<Vec<u8>> {
    let mut out = BTreeSet::new();
    let mut used = vec![false; mol.bonds().len()];
    let mut atoms = Vec::new();
    let mut bonds = Vec::new();
    for start in 0..mol.atom_count() {
        atoms.push(start);
        extend(mol, max_bonds as usize, &mut atoms, &mut bonds, &mut used, &mut out);
        atoms.pop();
    }
    out
}

fn extend(
    mol: &Molecule,
    max_bonds: usize,
    atoms: &mut Vec<usize>,
    bonds: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut BTreeSet<Vec<u8>>,
) {
    if !bonds.is_empty() {
        out.insert(canonical(mol, atoms, bonds));
    }
    if bonds.len() == max_bonds {
        return;
    }
    let tail = *atoms.last().unwrap();
    for &(next, b) in mol.neighbors(tail) {
        if used[b] {
            continue;
        }
        used[b] = true;
        atoms.push(next);
        bonds.push(b);
        extend(mol, max_bonds, atoms, bonds, used, out);
        bonds.pop();
        atoms.pop();
        used[b] = false;
    }
}

fn canonical(mol: &Molecule, atoms: &[usize], bonds: &[usize]) -> Vec<u8> {
    let forward = encode(mol, atoms.iter().copied(), bonds.iter().copied());
    let reverse = encode(mol, atoms.iter().rev().copied(), bonds.iter().rev().copied());
    forward.min(reverse)
}

fn encode(
    mol: &Molecule,
    mut atoms: impl Iterator<Item = usize>,
    bonds: impl Iterator<Item = usize>,
) -> Vec<u8> {
    let push_atom = |v: &mut Vec<u8>, i: usize| {
        let a = &mol.atoms()[i];
        v.push(a.element.atomic_number());
        v.push(a.aromatic as u8);
    };
    let mut v = Vec::new();
    push_atom(&mut v, atoms.next().unwrap());
    for (b, a) in bonds.zip(atoms) {
        v.push(mol.bonds()[b].order.code());
        push_atom(&mut v, a);
    }
    v
}

/// Path fingerprint: each descriptor, prefixed by its bond count as one byte,
/// is hashed and sets bit `hash mod width`.
pub fn path_fingerprint(
    mol: &Molecule,
    max_path_bonds: u32,
    width: usize,
) -> Result<Fingerprint, FingerprintError> {
    check_width(width)?;
    if max_path_bonds == 0 {
        return Err(FingerprintError::InvalidPathLength);
    }
    let bits = path_descriptors(mol, max_path_bonds)
        .into_iter()
        .map(|d| (descriptor_hash(&d) % width as u64) as usize);
    Ok(Fingerprint {
        bits: BitVec::from_indices(width, bits),
        params: FingerprintParams::Path {
            max_path_bonds,
            width,
        },
    })
}

pub(crate) fn descriptor_hash(descriptor: &[u8]) -> u64 {
    let mut bytes = Vec::with_capacity(descriptor.len() + 1);
    bytes.push(((descriptor.len() - 2) / 3) as u8);
    bytes.extend_from_slice(descriptor);
    fnv1a(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smiles::parse_smiles;

    #[test]
    fn ethanol_paths() {
        let mol = parse_smiles("CCO").unwrap();
        let d = path_descriptors(&mol, 7);
        assert_eq!(
            d,
            BTreeSet::from([
                vec![6, 0, 1, 6, 0],
                vec![6, 0, 1, 8, 0],
                vec![6, 0, 1, 6, 0, 1, 8, 0],
            ])
        );
        assert_eq!(path_fingerprint(&mol, 7, 2048).unwrap().count_ones(), 3);
    }

    #[test]
    fn single_atom_has_no_paths() {
        let mol = parse_smiles("C").unwrap();
        assert_eq!(path_fingerprint(&mol, 7, 2048).unwrap().count_ones(), 0);
    }

    #[test]
    fn cyclopropane_dedups() {
        let mol = parse_smiles("C1CC1").unwrap();
        assert_eq!(path_descriptors(&mol, 2).len(), 2);
        assert_eq!(path_fingerprint(&mol, 2, 2048).unwrap().count_ones(), 2);
        // the closed three-bond trail around the ring
        assert_eq!(path_descriptors(&mol, 3).len(), 3);
    }

    #[test]
    fn zero_length_rejected() {
        let mol = parse_smiles("CC").unwrap();
        assert_eq!(
            path_fingerprint(&mol, 0, 2048),
            Err(FingerprintError::InvalidPathLength)
        );
    }
}

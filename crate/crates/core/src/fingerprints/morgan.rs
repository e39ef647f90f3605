use std::collections::BTreeSet;

use crate::smiles::Molecule;

use super::{check_width, fnv1a, BitVec, Fingerprint, FingerprintError, FingerprintParams};

/// Per-radius atom invariants: `result[r][atom]`.
///
/// Radius 0 hashes the bytes `[atomic number, degree, formal charge, total H,
/// aromatic, in ring]`. Each later radius hashes the previous invariant
/// (8 bytes LE), the radius (4 bytes LE), then the neighbor pairs
/// `(bond order code, neighbor invariant LE)` sorted ascending.
pub fn morgan_invariants(mol: &Molecule, radius: u32) -> Vec<Vec<u64>> {
    let rings = mol.ring_info();
    let initial: Vec<u64> = mol
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, atom)| {
            fnv1a(&[
                atom.element.atomic_number(),
                mol.degree(i).min(255) as u8,
                atom.formal_charge as u8,
                mol.total_hydrogens(i),
                atom.aromatic as u8,
                rings.atom_in_ring[i] as u8,
            ])
        })
        .collect();

    let mut layers = vec![initial];
    for r in 1..=radius {
        let prev = layers.last().unwrap();
        let next = (0..mol.atom_count())
            .map(|i| {
                let mut env: Vec<(u8, u64)> = mol
                    .neighbors(i)
                    .iter()
                    .map(|&(n, b)| (mol.bonds()[b].order.code(), prev[n]))
                    .collect();
                env.sort_unstable();
                let mut bytes = Vec::with_capacity(12 + env.len() * 9);
                bytes.extend_from_slice(&prev[i].to_le_bytes());
                bytes.extend_from_slice(&r.to_le_bytes());
                for (code, inv) in env {
                    bytes.push(code);
                    bytes.extend_from_slice(&inv.to_le_bytes());
                }
                fnv1a(&bytes)
            })
            .collect();
        layers.push(next);
    }
    layers
}

/// Circular fingerprint: every invariant at every radius sets bit
/// `invariant mod width`.
pub fn morgan_fingerprint(
    mol: &Molecule,
    radius: u32,
    width: usize,
) -> Result<Fingerprint, FingerprintError> {
    check_width(width)?;
    let distinct: BTreeSet<u64> = morgan_invariants(mol, radius).into_iter().flatten().collect();
    Ok(Fingerprint {
        bits: BitVec::from_indices(width, distinct.iter().map(|&inv| (inv % width as u64) as usize)),
        params: FingerprintParams::Morgan { radius, width },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smiles::parse_smiles;

    fn fp(s: &str, radius: u32) -> Fingerprint {
        morgan_fingerprint(&parse_smiles(s).unwrap(), radius, 2048).unwrap()
    }

    #[test]
    fn single_atom() {
        assert_eq!(fp("C", 0).count_ones(), 1);
        assert_eq!(fp("C", 2).count_ones(), 3);
    }

    #[test]
    fn ethanol_invariants_are_distinct() {
        let mol = parse_smiles("CCO").unwrap();
        let inv = morgan_invariants(&mol, 1);
        let r0: BTreeSet<_> = inv[0].iter().collect();
        assert_eq!(r0.len(), 3);
        let all: BTreeSet<_> = inv.iter().flatten().collect();
        assert_eq!(all.len(), 6);
        assert_eq!(fp("CCO", 0).count_ones(), 3);
        assert_eq!(fp("CCO", 1).count_ones(), 6);
    }

    #[test]
    fn symmetric_atoms_share_invariants() {
        let mol = parse_smiles("c1ccccc1").unwrap();
        let inv = morgan_invariants(&mol, 2);
        for layer in inv {
            assert!(layer.iter().all(|&x| x == layer[0]));
        }
        assert_eq!(fp("c1ccccc1", 2).count_ones(), 3);
    }

    #[test]
    fn radius_monotone() {
        for s in ["CC(=O)Oc1ccccc1C(=O)O", "CN1CCC[C@H]1c1cccnc1"] {
            for r in 0..4 {
                assert!(fp(s, r).bits.is_subset_of(&fp(s, r + 1).bits));
            }
        }
    }

    #[test]
    fn width_must_be_power_of_two() {
        let mol = parse_smiles("C").unwrap();
        assert_eq!(
            morgan_fingerprint(&mol, 2, 1000),
            Err(FingerprintError::InvalidWidth(1000))
        );
    }
}

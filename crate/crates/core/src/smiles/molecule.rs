use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::element::Element;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chirality {
    Clockwise,
    CounterClockwise,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub element: Element,
    pub aromatic: bool,
    pub formal_charge: i8,
    /// Hydrogen count written inside brackets. Always `None` for bare atoms.
    pub explicit_h: Option<u8>,
    pub isotope: Option<u16>,
    pub chirality: Option<Chirality>,
    pub in_bracket: bool,
}

impl Atom {
    pub(crate) fn organic(element: Element, aromatic: bool) -> Atom {
        Atom {
            element,
            aromatic,
            formal_charge: 0,
            explicit_h: None,
            isotope: None,
            chirality: None,
            in_bracket: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Quadruple,
    Aromatic,
}

impl BondOrder {
    /// Bond valence in half units, so that aromatic bonds count 1.5.
    pub fn half_valence(self) -> u32 {
        match self {
            BondOrder::Single => 2,
            BondOrder::Double => 4,
            BondOrder::Triple => 6,
            BondOrder::Quadruple => 8,
            BondOrder::Aromatic => 3,
        }
    }

    /// Byte code used in hashed fingerprint encodings.
    pub fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Quadruple => 4,
            BondOrder::Aromatic => 5,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            BondOrder::Single => '-',
            BondOrder::Double => '=',
            BondOrder::Triple => '#',
            BondOrder::Quadruple => '$',
            BondOrder::Aromatic => ':',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bond {
    pub from: usize,
    pub to: usize,
    pub order: BondOrder,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if self.from == atom {
            self.to
        } else {
            self.from
        }
    }
}

/// Atom/bond graph of a parsed SMILES string. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Molecule {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    /// Per atom: (neighbor atom, bond index), in bond creation order.
    adjacency: Vec<Vec<(usize, usize)>>,
    source: String,
}

impl Molecule {
    /// Callers guarantee endpoints are in range, distinct, and not duplicated.
    pub(crate) fn from_parts(atoms: Vec<Atom>, bonds: Vec<Bond>, source: String) -> Molecule {
        let mut adjacency = vec![Vec::new(); atoms.len()];
        for (i, b) in bonds.iter().enumerate() {
            adjacency[b.from].push((b.to, i));
            adjacency[b.to].push((b.from, i));
        }
        Molecule {
            atoms,
            bonds,
            adjacency,
            source,
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn neighbors(&self, atom: usize) -> &[(usize, usize)] {
        &self.adjacency[atom]
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<&Bond> {
        self.adjacency[a]
            .iter()
            .find(|(n, _)| *n == b)
            .map(|&(_, i)| &self.bonds[i])
    }

    /// Sum of bond valences at `atom`, in half units.
    pub fn half_valence_sum(&self, atom: usize) -> u32 {
        self.adjacency[atom]
            .iter()
            .map(|&(_, i)| self.bonds[i].order.half_valence())
            .sum()
    }

    /// Hydrogens implied by the default valence model for bare organic-subset
    /// atoms. Bracket atoms never carry implicit hydrogens.
    pub fn implicit_hydrogens(&self, atom: usize) -> u8 {
        let a = &self.atoms[atom];
        if a.in_bracket {
            return 0;
        }
        let valences = a.element.default_valences();
        let Some(&lowest) = valences.first() else {
            return 0;
        };
        if a.aromatic {
            // aromatic bonds count 1, plus one for the delocalized ring bond
            let used: u32 = self.adjacency[atom]
                .iter()
                .map(|&(_, i)| match self.bonds[i].order {
                    BondOrder::Aromatic => 1,
                    other => other.half_valence() / 2,
                })
                .sum::<u32>()
                + 1;
            return (lowest as u32).saturating_sub(used) as u8;
        }
        let used = self.half_valence_sum(atom).div_ceil(2);
        valences
            .iter()
            .find(|&&v| v as u32 >= used)
            .map_or(0, |&v| (v as u32 - used) as u8)
    }

    /// Explicit bracket hydrogens plus implicit hydrogens.
    pub fn total_hydrogens(&self, atom: usize) -> u8 {
        self.atoms[atom].explicit_h.unwrap_or(0) + self.implicit_hydrogens(atom)
    }

    /// Ring perception based on bond cycle membership.
    pub fn ring_info(&self) -> RingInfo {
        let mut bond_ring_size = vec![None; self.bonds.len()];
        for (i, b) in self.bonds.iter().enumerate() {
            if let Some(d) = self.shortest_path_avoiding(b.from, b.to, i) {
                bond_ring_size[i] = Some(d + 1);
            }
        }
        let mut atom_in_ring = vec![false; self.atoms.len()];
        for (b, size) in self.bonds.iter().zip(&bond_ring_size) {
            if size.is_some() {
                atom_in_ring[b.from] = true;
                atom_in_ring[b.to] = true;
            }
        }
        RingInfo {
            bond_ring_size,
            atom_in_ring,
        }
    }

    fn shortest_path_avoiding(&self, start: usize, goal: usize, skip_bond: usize) -> Option<usize> {
        let mut dist = vec![usize::MAX; self.atoms.len()];
        let mut queue = VecDeque::from([start]);
        dist[start] = 0;
        while let Some(u) = queue.pop_front() {
            for &(v, bi) in &self.adjacency[u] {
                if bi == skip_bond || dist[v] != usize::MAX {
                    continue;
                }
                dist[v] = dist[u] + 1;
                if v == goal {
                    return Some(dist[v]);
                }
                queue.push_back(v);
            }
        }
        None
    }

    /// Number of connected components.
    pub fn fragment_count(&self) -> usize {
        let mut seen = vec![false; self.atoms.len()];
        let mut count = 0;
        for s in 0..self.atoms.len() {
            if seen[s] {
                continue;
            }
            count += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        count
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingInfo {
    /// Size of the smallest cycle through each bond, `None` for chain bonds.
    pub bond_ring_size: Vec<Option<usize>>,
    pub atom_in_ring: Vec<bool>,
}

impl RingInfo {
    pub fn has_ring(&self) -> bool {
        self.bond_ring_size.iter().any(Option::is_some)
    }

    pub fn has_ring_of_size(&self, n: usize) -> bool {
        self.bond_ring_size.contains(&Some(n))
    }
}

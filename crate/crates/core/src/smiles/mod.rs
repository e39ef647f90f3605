//! SMILES lexing and parsing into an atom/bond graph, validity checks and
//! elementary properties.

mod element;
mod formula;
mod molecule;
mod parser;
mod validate;

pub use element::Element;
pub use formula::molecular_formula;
pub use molecule::{Atom, Bond, BondOrder, Chirality, Molecule, RingInfo};
pub use parser::{parse_smiles, SmilesError};
pub use validate::{first_valence_violation, validate, ValidityReport};

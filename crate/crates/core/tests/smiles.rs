use std::path::PathBuf;

use evalkit::smiles::{molecular_formula, parse_smiles, validate, SmilesError};
use evalkit::tokenizer::tokenize;
use evalkit_testkit::{random_molecule_smiles, write_smiles};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn corpus() -> Vec<String> {
    ["drugs.smi", "small_molecules.smi"]
        .iter()
        .flat_map(|f| {
            std::fs::read_to_string(fixture(f))
                .unwrap()
                .lines()
                .map(str::to_string)
                .collect::<Vec<_>>()
        })
        .collect()
}

#[test]
fn every_fixture_parses_and_passes_strict_validation() {
    for s in corpus() {
        parse_smiles(&s).unwrap_or_else(|e| panic!("{s}: {e}"));
        let report = validate(&s, true);
        assert!(report.verdict, "{s}: {:?}", report.failure_detail);
    }
}

// Formulas from standard drug references, independent of this parser.
#[test]
fn drug_formulas() {
    let cases = [
        ("CC(C)Cc1ccc(cc1)C(C)C(=O)O", "C13H18O2"),
        ("CN(C)C(=N)NC(=N)N", "C4H11N5"),
        ("CN1CCCC1c1cccnc1", "C10H14N2"),
        ("CN1CCC23c4c5ccc(O)c4OC2C(O)C=CC3C1C5", "C17H19NO3"),
        ("CN1C(=O)CN=C(c2ccccc2)c2cc(Cl)ccc21", "C16H13ClN2O"),
        ("CC1(C)SC2C(NC(=O)Cc3ccccc3)C(=O)N2C1C(=O)O", "C16H18N2O4S"),
        ("CC12CCC3C(CCC4=CC(=O)CCC34C)C1CCC2O", "C19H28O2"),
        ("Cc1ccc(NC(=O)c2ccc(CN3CCN(C)CC3)cc2)cc1Nc1nccc(n1)c1cccnc1", "C29H31N7O"),
        ("O=c1[nH]cc(F)c(=O)[nH]1", "C4H3FN2O2"),
        ("Cc1ncc([N+](=O)[O-])n1CCO", "C6H9N3O3"),
        ("NC(Cc1cc(I)c(Oc2cc(I)c(O)c(I)c2)c(I)c1)C(=O)O", "C15H11I4NO4"),
        ("Cc1cn(C2CC(N=[N+]=[N-])C(CO)O2)c(=O)[nH]c1=O", "C10H13N5O4"),
        ("Cc1ncc(C[n+]2csc(CCO)c2C)c(N)n1", "C12H17N4OS+"),
        ("CCCCc1oc2ccccc2c1C(=O)c1cc(I)c(OCCN(CC)CC)c(I)c1", "C25H29I2NO3"),
    ];
    for (smiles, formula) in cases {
        assert_eq!(molecular_formula(&parse_smiles(smiles).unwrap()), formula, "{smiles}");
    }
}

#[test]
fn error_classes() {
    assert!(matches!(parse_smiles("C1CC"), Err(SmilesError::UnmatchedRingClosure { .. })));
    assert!(matches!(parse_smiles("C%12CC"), Err(SmilesError::UnmatchedRingClosure { .. })));
    assert!(matches!(parse_smiles("CC(C"), Err(SmilesError::UnbalancedParenthesis { .. })));
    assert!(matches!(parse_smiles("CC)C"), Err(SmilesError::UnbalancedParenthesis { .. })));
    assert!(matches!(parse_smiles("C()C"), Err(SmilesError::EmptyBranch { .. })));
    assert!(matches!(parse_smiles("=CC"), Err(SmilesError::LeadingBond { .. })));
    assert!(matches!(parse_smiles("CXC"), Err(SmilesError::UnknownSymbol { offset: 1, .. })));

    let ring = validate("C1CC", false);
    assert!(!ring.verdict && !ring.ring_closures_ok && ring.parentheses_ok);
    let paren = validate("CC(C", false);
    assert!(!paren.verdict && !paren.parentheses_ok && paren.ring_closures_ok);
    let valence = validate("CC(C)(C)(C)C", true);
    assert_eq!(valence.valence_ok, Some(false));
    assert!(!valence.verdict);
    assert!(validate("CC(C)(C)(C)C", false).verdict);
    assert!(validate("CC(C)(C)(C)C", false).valence_ok.is_none());
}

#[test]
fn parser_and_tokenizer_agree_on_atom_counts() {
    for s in corpus() {
        let mol = parse_smiles(&s).unwrap();
        assert_eq!(tokenize(&s).unwrap().atom_count(), mol.atom_count(), "{s}");
    }
}

#[test]
fn rewritten_smiles_denote_the_same_molecule() {
    let mut rng = StdRng::seed_from_u64(11);
    for s in corpus() {
        let mol = parse_smiles(&s).unwrap();
        let root = rng.random_range(0..mol.atom_count());
        let written = write_smiles(&mol, root, &mut rng);
        let again = parse_smiles(&written).unwrap_or_else(|e| panic!("{s} -> {written}: {e}"));
        assert_eq!(again.atom_count(), mol.atom_count());
        assert_eq!(again.bonds().len(), mol.bonds().len());
        assert_eq!(molecular_formula(&again), molecular_formula(&mol), "{s} -> {written}");
        assert_eq!(again.fragment_count(), mol.fragment_count());
    }
}

proptest! {
    #[test]
    fn generated_molecules_parse_deterministically(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let s = random_molecule_smiles(&mut rng, 20);
        let a = parse_smiles(&s).unwrap();
        let b = parse_smiles(&s).unwrap();
        prop_assert_eq!(a.atoms(), b.atoms());
        prop_assert_eq!(a.bonds(), b.bonds());
        prop_assert_eq!(tokenize(&s).unwrap().atom_count(), a.atom_count());
    }

    // Each ring closure pair adds one bond beyond the spanning tree.
    #[test]
    fn bond_count_identity(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let s = random_molecule_smiles(&mut rng, 20);
        let mol = parse_smiles(&s).unwrap();
        let closures = s.matches('1').count() / 2;
        prop_assert_eq!(mol.bonds().len(), mol.atom_count() - mol.fragment_count() + closures);
    }

    #[test]
    fn validity_verdict_is_conjunction(s in "[CNO()=1c%0-9\\[\\]H+]{0,16}", strict in any::<bool>()) {
        let r = validate(&s, strict);
        prop_assert_eq!(
            r.verdict,
            r.parseable && r.ring_closures_ok && r.parentheses_ok && r.valence_ok.unwrap_or(true)
        );
        prop_assert_eq!(r.valence_ok.is_some(), strict);
        prop_assert_eq!(r.parseable, parse_smiles(&s).is_ok());
    }
}

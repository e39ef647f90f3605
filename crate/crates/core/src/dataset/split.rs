use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use super::{DatasetError, PairSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            test_fraction: 0.2,
            seed: 42,
        }
    }
}

/// `round(fraction · n)`, ties away from zero.
pub fn test_size(n: usize, fraction: f64) -> usize {
    (fraction * n as f64).round() as usize
}

/// Uniform integer in `0..bound` by rejection: draws below `2^64 mod bound`
/// are discarded so the remaining range is a multiple of `bound`.
fn uniform_below(rng: &mut Xoshiro256StarStar, bound: u64) -> u64 {
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let x = rng.next_u64();
        if x >= threshold {
            return x % bound;
        }
    }
}

/// Shuffled `(train, test)` index lists.
///
/// The generator is xoshiro256** seeded through SplitMix64 from `spec.seed`;
/// the permutation is a Fisher–Yates shuffle running `i = n-1 … 1` with
/// `j = uniform_below(i + 1)`. The first `test_size` shuffled indices form
/// the test partition.
pub fn split_indices(n: usize, spec: SplitSpec) -> Result<(Vec<usize>, Vec<usize>), DatasetError> {
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(DatasetError::InvalidFraction(spec.test_fraction));
    }
    let test = test_size(n, spec.test_fraction);
    if test == 0 || test >= n {
        return Err(DatasetError::DegenerateSplit { n, test });
    }
    let mut rng = Xoshiro256StarStar::seed_from_u64(spec.seed);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = uniform_below(&mut rng, i as u64 + 1) as usize;
        order.swap(i, j);
    }
    let train = order.split_off(test);
    Ok((train, order))
}

pub fn split(set: &PairSet, spec: SplitSpec) -> Result<(PairSet, PairSet), DatasetError> {
    let (train_idx, test_idx) = split_indices(set.len(), spec)?;
    let pick = |idx: &[usize]| {
        PairSet::new(
            idx.iter().map(|&i| set.records()[i].clone()).collect(),
            set.provenance.clone(),
        )
    };
    Ok((pick(&train_idx)?, pick(&test_idx)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::tests::record;
    use crate::dataset::Provenance;

    #[test]
    fn benchmark_split_sizes() {
        assert_eq!(test_size(3004, 0.2), 601);
        assert_eq!(test_size(6127, 0.2), 1225);
        let (train, test) = split_indices(3004, SplitSpec::default()).unwrap();
        assert_eq!((train.len(), test.len()), (2403, 601));
        let (train, test) = split_indices(6127, SplitSpec::default()).unwrap();
        assert_eq!((train.len(), test.len()), (4902, 1225));
        let (train, test) = split_indices(10, SplitSpec::default()).unwrap();
        assert_eq!((train.len(), test.len()), (8, 2));
    }

    #[test]
    fn partition_is_exhaustive_and_disjoint() {
        let (mut train, test) = split_indices(97, SplitSpec { test_fraction: 0.3, seed: 7 }).unwrap();
        train.extend(&test);
        train.sort_unstable();
        assert_eq!(train, (0..97).collect::<Vec<_>>());
    }

    #[test]
    fn seed_controls_membership() {
        let a = split_indices(50, SplitSpec { test_fraction: 0.2, seed: 1 }).unwrap();
        let b = split_indices(50, SplitSpec { test_fraction: 0.2, seed: 1 }).unwrap();
        let c = split_indices(50, SplitSpec { test_fraction: 0.2, seed: 2 }).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn degenerate_splits() {
        assert!(matches!(
            split_indices(2, SplitSpec { test_fraction: 0.1, seed: 0 }),
            Err(DatasetError::DegenerateSplit { n: 2, test: 0 })
        ));
        assert!(matches!(
            split_indices(1, SplitSpec { test_fraction: 0.5, seed: 0 }),
            Err(DatasetError::DegenerateSplit { .. })
        ));
        assert!(matches!(
            split_indices(10, SplitSpec { test_fraction: 1.0, seed: 0 }),
            Err(DatasetError::InvalidFraction(_))
        ));
        assert!(matches!(
            split_indices(10, SplitSpec { test_fraction: f64::NAN, seed: 0 }),
            Err(DatasetError::InvalidFraction(_))
        ));
    }

    #[test]
    fn split_carries_records() {
        let records = (0..10).map(|i| record(&format!("r{i}"), "C", "x")).collect();
        let set = PairSet::new(records, Provenance { digest: "d".into(), ingested_at: 1 }).unwrap();
        let (train, test) = split(&set, SplitSpec::default()).unwrap();
        assert_eq!((train.len(), test.len()), (8, 2));
        assert_eq!(train.provenance, set.provenance);
    }
}

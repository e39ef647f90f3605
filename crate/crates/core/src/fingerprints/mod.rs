//! Circular (Morgan), path and structural-key fingerprints, and Tanimoto
//! similarity between them.
//!
//! Hashed schemes use 64-bit FNV-1a over little-endian byte encodings, so bit
//! positions are identical on every platform.

mod keys;
mod morgan;
mod path;

use std::fmt::{self, Write};
use std::hash::Hasher;

use fnv::FnvHasher;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use keys::{key_fingerprint, KeyDescriptor, KeySet, KeySetError, DEFAULT_KEYSET_ID};
pub use morgan::{morgan_fingerprint, morgan_invariants};
pub use path::{path_descriptors, path_fingerprint};

pub const DEFAULT_WIDTH: usize = 2048;
pub const DEFAULT_RADIUS: u32 = 2;
pub const DEFAULT_MAX_PATH_BONDS: u32 = 7;

/// Fixed-width bit vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
    width: usize,
}

impl BitVec {
    pub fn zeros(width: usize) -> BitVec {
        BitVec {
            words: vec![0; width.div_ceil(64)],
            width,
        }
    }

    pub fn from_indices(width: usize, indices: impl IntoIterator<Item = usize>) -> BitVec {
        let mut bv = BitVec::zeros(width);
        for i in indices {
            bv.set(i);
        }
        bv
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn set(&mut self, i: usize) {
        assert!(i < self.width, "bit {i} out of range for width {}", self.width);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        i < self.width && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.width).filter(|&i| self.get(i))
    }

    pub fn intersection_count(&self, other: &BitVec) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn union_count(&self, other: &BitVec) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset_of(&self, other: &BitVec) -> bool {
        self.width == other.width && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Lowercase hex over bytes `0..ceil(width/8)`; bit `i` lives in byte
    /// `i / 8` at position `i % 8` (least significant first).
    pub fn to_hex(&self) -> String {
        let mut out = String::with_capacity(self.width.div_ceil(8) * 2);
        for byte_idx in 0..self.width.div_ceil(8) {
            let byte = (self.words[byte_idx / 8] >> ((byte_idx % 8) * 8)) as u8;
            write!(out, "{byte:02x}").unwrap();
        }
        out
    }

    pub fn from_hex(hex: &str, width: usize) -> Option<BitVec> {
        if hex.len() != width.div_ceil(8) * 2 {
            return None;
        }
        let mut bv = BitVec::zeros(width);
        for byte_idx in 0..width.div_ceil(8) {
            let byte = u8::from_str_radix(hex.get(byte_idx * 2..byte_idx * 2 + 2)?, 16).ok()?;
            for bit in 0..8 {
                if byte >> bit & 1 == 1 {
                    let i = byte_idx * 8 + bit;
                    if i >= width {
                        return None;
                    }
                    bv.set(i);
                }
            }
        }
        Some(bv)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum FingerprintParams {
    Morgan { radius: u32, width: usize },
    Path { max_path_bonds: u32, width: usize },
    Keys { keyset: String, width: usize },
}

impl FingerprintParams {
    pub fn width(&self) -> usize {
        match *self {
            FingerprintParams::Morgan { width, .. }
            | FingerprintParams::Path { width, .. }
            | FingerprintParams::Keys { width, .. } => width,
        }
    }
}

impl fmt::Display for FingerprintParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FingerprintParams::Morgan { radius, width } => write!(f, "morgan(radius={radius}, bits={width})"),
            FingerprintParams::Path { max_path_bonds, width } => {
                write!(f, "path(max_bonds={max_path_bonds}, bits={width})")
            }
            FingerprintParams::Keys { keyset, width } => write!(f, "keys({keyset}, bits={width})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint {
    pub bits: BitVec,
    pub params: FingerprintParams,
}

impl Fingerprint {
    pub fn width(&self) -> usize {
        self.bits.width()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.count_ones()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FingerprintError {
    #[error("cannot compare {0} with {1}")]
    SchemeMismatch(FingerprintParams, FingerprintParams),
    #[error("fingerprint width must be a positive power of two, got {0}")]
    InvalidWidth(usize),
    #[error("maximum path length must be at least one bond")]
    InvalidPathLength,
}

/// |a ∧ b| / |a ∨ b|, with two empty fingerprints scoring 1.0.
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64, FingerprintError> {
    if a.params != b.params || a.width() != b.width() {
        return Err(FingerprintError::SchemeMismatch(a.params.clone(), b.params.clone()));
    }
    Ok(tanimoto_bits(&a.bits, &b.bits))
}

pub(crate) fn tanimoto_bits(a: &BitVec, b: &BitVec) -> f64 {
    let union = a.union_count(b);
    if union == 0 {
        return 1.0;
    }
    a.intersection_count(b) as f64 / union as f64
}

pub(crate) fn check_width(width: usize) -> Result<(), FingerprintError> {
    if width == 0 || !width.is_power_of_two() {
        return Err(FingerprintError::InvalidWidth(width));
    }
    Ok(())
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FnvHasher::default();
    h.write(bytes);
    h.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(bits: &[usize]) -> Fingerprint {
        Fingerprint {
            bits: BitVec::from_indices(8, bits.iter().copied()),
            params: FingerprintParams::Morgan { radius: 2, width: 8 },
        }
    }

    #[test]
    fn fnv_reference_vectors() {
        assert_eq!(fnv1a(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn tanimoto_hand_values() {
        assert_eq!(tanimoto(&fp(&[1, 2, 3]), &fp(&[2, 3, 4])).unwrap(), 0.5);
        assert_eq!(tanimoto(&fp(&[0, 1]), &fp(&[2, 3])).unwrap(), 0.0);
        assert_eq!(tanimoto(&fp(&[5]), &fp(&[5])).unwrap(), 1.0);
        assert_eq!(tanimoto(&fp(&[]), &fp(&[])).unwrap(), 1.0);
    }

    #[test]
    fn tanimoto_rejects_mismatched_params() {
        let mut other = fp(&[1]);
        other.params = FingerprintParams::Path { max_path_bonds: 7, width: 8 };
        assert!(matches!(
            tanimoto(&fp(&[1]), &other),
            Err(FingerprintError::SchemeMismatch(..))
        ));
    }

    #[test]
    fn hex_layout() {
        let bv = BitVec::from_indices(16, [0, 9, 15]);
        assert_eq!(bv.to_hex(), "0182");
        assert_eq!(BitVec::from_hex("0182", 16), Some(bv));
        let odd = BitVec::from_indices(12, [11]);
        assert_eq!(odd.to_hex(), "0008");
        assert_eq!(BitVec::from_hex("0010", 12), None);
    }
}

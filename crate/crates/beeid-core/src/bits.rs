//! Packed bit-vectors and words over {0,1,?}.
//!
//! Codewords and channel outputs are stored as little-endian sequences of
//! 64-bit limbs so Hamming distances and erasure-compatibility checks reduce
//! to xor/popcount over whole words. Lengths are capped at [`MAX_LEN`]; the
//! codes here are desk-scale.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Hard cap on bit-vector length (2^16).
pub const MAX_LEN: usize = 1 << 16;

/// A fixed-length bit-vector packed into 64-bit limbs.
///
/// Bit `i` of the vector is bit `i % 64` of limb `i / 64`. Unused high bits
/// of the last limb are kept zero, so equality, ordering, and popcounts can
/// work on whole limbs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bits {
    len: usize,
    limbs: Vec<u64>,
}

impl Bits {
    /// All-zero vector of length `len`.
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_LEN, "bit-vector length {len} exceeds {MAX_LEN}");
        Bits {
            len,
            limbs: vec![0; len.div_ceil(64)],
        }
    }

    /// Builds a vector from a predicate on positions.
    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut b = Bits::zeros(len);
        for i in 0..len {
            if f(i) {
                b.set(i, true);
            }
        }
        b
    }

    /// Parses a string of `0`/`1` characters, leftmost character = position 0.
    pub fn parse(s: &str) -> Result<Self, BitParseError> {
        if s.len() > MAX_LEN {
            return Err(BitParseError::TooLong { len: s.len() });
        }
        let mut b = Bits::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => b.set(i, true),
                other => return Err(BitParseError::BadSymbol { position: i, found: other }),
            }
        }
        Ok(b)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.limbs[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.limbs[i / 64] |= mask;
        } else {
            self.limbs[i / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.limbs.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Hamming distance. Panics on length mismatch; use
    /// [`crate::codes::hamming_distance`] for the checked variant.
    pub fn distance(&self, other: &Bits) -> usize {
        assert_eq!(self.len, other.len, "hamming distance on unequal lengths");
        self.limbs
            .iter()
            .zip(&other.limbs)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn xor_assign(&mut self, other: &Bits) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a ^= *b;
        }
    }

    /// True iff `self` and `other` agree on every position where `mask` is 0.
    pub fn agrees_outside(&self, other: &Bits, mask: &Bits) -> bool {
        debug_assert_eq!(self.len, other.len);
        debug_assert_eq!(self.len, mask.len);
        self.limbs
            .iter()
            .zip(&other.limbs)
            .zip(&mask.limbs)
            .all(|((a, b), m)| (a ^ b) & !m == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Renders as a `0`/`1` string.
    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({})", self.to_bit_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitParseError {
    BadSymbol { position: usize, found: char },
    TooLong { len: usize },
}

impl fmt::Display for BitParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BitParseError::BadSymbol { position, found } => {
                write!(f, "invalid symbol {found:?} at position {position}")
            }
            BitParseError::TooLong { len } => {
                write!(f, "word length {len} exceeds the cap {MAX_LEN}")
            }
        }
    }
}

impl core::error::Error for BitParseError {}

/// A length-n word over {0,1,?}: a value vector plus an erasure mask.
///
/// Bits at erased positions are normalized to 0 in `values`, so two
/// `ErasedWord`s compare equal iff they denote the same partial word.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ErasedWord {
    values: Bits,
    erased: Bits,
}

impl ErasedWord {
    pub fn new(mut values: Bits, erased: Bits) -> Self {
        assert_eq!(values.len(), erased.len());
        for (v, e) in values.limbs.iter_mut().zip(&erased.limbs) {
            *v &= !*e;
        }
        ErasedWord { values, erased }
    }

    /// Fully-known word (empty erasure mask).
    pub fn from_plain(values: Bits) -> Self {
        let erased = Bits::zeros(values.len());
        ErasedWord { values, erased }
    }

    /// Parses a string over `0`/`1`/`?`.
    pub fn parse(s: &str) -> Result<Self, BitParseError> {
        if s.len() > MAX_LEN {
            return Err(BitParseError::TooLong { len: s.len() });
        }
        let mut values = Bits::zeros(s.len());
        let mut erased = Bits::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => values.set(i, true),
                '?' => erased.set(i, true),
                other => return Err(BitParseError::BadSymbol { position: i, found: other }),
            }
        }
        Ok(ErasedWord { values, erased })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &Bits {
        &self.values
    }

    pub fn erased(&self) -> &Bits {
        &self.erased
    }

    pub fn erased_count(&self) -> usize {
        self.erased.count_ones()
    }

    /// True iff `word` coincides with this output on all non-erased positions.
    pub fn matches(&self, word: &Bits) -> bool {
        self.values.agrees_outside(word, &self.erased)
    }

    pub fn to_symbol_string(&self) -> String {
        (0..self.len())
            .map(|i| {
                if self.erased.get(i) {
                    '?'
                } else if self.values.get(i) {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }
}

impl fmt::Debug for ErasedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ErasedWord({})", self.to_symbol_string())
    }
}

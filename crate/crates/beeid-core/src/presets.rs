//! Built-in reference codebooks used by regression tests and the CLI presets.

use alloc::vec::Vec;

use crate::bits::Bits;
use crate::codes::Codebook;

/// The length-7 simplex code (8 codewords, minimum distance 4), generated by
///
/// ```text
/// 1 0 0 0 1 1 1
/// 0 1 0 1 0 1 1
/// 0 0 1 1 1 0 1
/// ```
///
/// Codeword order is pinned: zero word, then the single rows, then row sums
/// by ascending row-pair, then the all-rows sum. Regression fixtures index
/// into this order, so it must never change. (It differs from
/// [`crate::codes::build_linear_code`]'s message order, which would swap
/// indices 3 and 4.)
pub fn simplex7() -> Codebook {
    let generator: Vec<Bits> = ["1000111", "0101011", "0011101"]
        .iter()
        .map(|s| Bits::parse(s).unwrap())
        .collect();
    let codewords: Vec<Bits> = [
        "0000000", "1000111", "0101011", "0011101", "1101100", "1011010", "0110110", "1110001",
    ]
    .iter()
    .map(|s| Bits::parse(s).unwrap())
    .collect();
    Codebook::from_codewords(codewords, Some(generator)).expect("preset is well formed")
}

/// The [5,2] linear code {00000, 11100, 00111, 11011} (minimum distance 3),
/// generated by
///
/// ```text
/// 1 1 1 0 0
/// 0 0 1 1 1
/// ```
pub fn linear52() -> Codebook {
    let generator: Vec<Bits> = ["11100", "00111"]
        .iter()
        .map(|s| Bits::parse(s).unwrap())
        .collect();
    crate::codes::build_linear_code(&generator).expect("preset is well formed")
}

/// The two-codeword repetition code {00, 11}; the smallest code whose
/// identification-failure probability has a closed form (p^4 on BEC(p)).
pub fn repetition2() -> Codebook {
    crate::codes::build_linear_code(&[Bits::parse("11").unwrap()]).expect("preset is well formed")
}

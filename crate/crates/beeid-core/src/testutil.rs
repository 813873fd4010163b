//! Shared helpers for the unit-test suites: seeded random codebooks and
//! brute-force oracles over all M! permutations.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::Bits;
use crate::codes::{build_linear_code, Codebook};

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random full-rank k x n generator, retried until one exists.
pub(crate) fn random_linear_code(rng: &mut ChaCha8Rng, k: usize, n: usize) -> Option<Codebook> {
    for _ in 0..50 {
        let rows: Vec<Bits> = (0..k).map(|_| Bits::from_fn(n, |_| rng.random())).collect();
        if let Ok(cb) = build_linear_code(&rows) {
            return Some(cb);
        }
    }
    None
}

pub(crate) use crate::estimation::permanent::for_each_permutation;

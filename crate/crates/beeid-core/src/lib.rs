//! Joint decoding for the bee-identification problem: match an unordered set
//! of noisy channel outputs back to a known codebook, and bound the
//! probability that the match is wrong.
//!
//! The crate is organised around the pipeline of that problem:
//!
//! - [`bits`]: packed bit-vectors and words with erasures,
//! - [`codes`]: codebook construction (linear, Reed-Muller) and the
//!   erasure-compatibility / bounded-radius queries decoders need,
//! - [`channels`]: reproducible BEC/BSC transmission of a whole codebook
//!   behind a hidden shuffle,
//! - [`matching`]: balanced bipartite matching (peeling, Hopcroft-Karp,
//!   Hungarian, and sparse successive-shortest-path assignment),
//! - [`identifiers`]: the joint decoders built from the above,
//! - [`estimation`]: permanents, the second-order-permanent trellis, and
//!   the resulting bounds on the probability of erroneous identification.
//!
//! The crate is `no_std` (with `alloc`) so decoders can run without an OS;
//! simulation drivers, file formats, and the CLI live in the companion
//! `beeid` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bits;
pub mod channels;
pub mod codes;
pub mod estimation;
pub mod identifiers;
pub mod matching;
pub mod presets;

#[cfg(test)]
pub(crate) mod testutil;

pub use bits::{Bits, ErasedWord};
pub use codes::Codebook;
pub use matching::{Assignment, BipartiteGraph};

//! Reproducible transmission of a whole codebook through BEC(p) or BSC(p),
//! with the outputs hidden behind a uniform shuffle.
//!
//! Every random draw comes from a counter-based stream keyed by
//! `(master_seed, trial_index, stream_tag)`, so trial `t` produces the same
//! record whether trials run serially, in parallel, or in any order. Noise,
//! shuffle, and absentee selection use separate tags, so e.g. dropping
//! outputs never perturbs the noise realizations of a trial.

use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{Bits, ErasedWord};
use crate::codes::Codebook;
use crate::matching::Assignment;

/// Channel family plus its parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChannelKind {
    /// Binary erasure channel with erasure probability p.
    Bec(f64),
    /// Binary symmetric channel with crossover probability p.
    Bsc(f64),
}

/// Purpose tag separating the random substreams of one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamTag {
    Noise = 0,
    Shuffle = 1,
    Absentee = 2,
}

/// Counter-based RNG for one (seed, trial, tag) substream.
pub fn substream(master_seed: u64, trial_index: u64, tag: StreamTag) -> ChaCha8Rng {
    // Expand the master seed into a 256-bit key; the (trial, tag) pair picks
    // the cipher stream, so substreams never overlap.
    let mut key = [0u8; 32];
    let mut x = master_seed;
    for chunk in key.chunks_exact_mut(8) {
        x = splitmix64(x);
        chunk.copy_from_slice(&x.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream((trial_index << 3) | tag as u64);
    rng
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One simulated transmission of all M codewords: the shuffled outputs plus
/// the hidden truth. `outputs[truth.apply(i)]` was produced from codeword
/// `i`.
#[derive(Clone, Debug)]
pub struct TransmissionRecord<W> {
    pub outputs: Vec<W>,
    pub truth: Assignment,
    pub channel: ChannelKind,
    pub seed: u64,
    pub trial_index: u64,
}

/// Sends every codeword through BEC(p): each of the M*n positions is erased
/// independently with probability p, then the outputs are permuted by a
/// uniform Fisher-Yates shuffle drawn from the trial's shuffle substream.
pub fn bec_transmit(
    cb: &Codebook,
    p: f64,
    seed: u64,
    trial_index: u64,
) -> TransmissionRecord<ErasedWord> {
    assert!((0.0..=1.0).contains(&p), "erasure probability out of range");
    let n = cb.block_len();
    let mut noise = substream(seed, trial_index, StreamTag::Noise);
    let sourced: Vec<ErasedWord> = cb
        .codewords()
        .iter()
        .map(|w| {
            let mask = Bits::from_fn(n, |_| noise.random::<f64>() < p);
            ErasedWord::new(w.clone(), mask)
        })
        .collect();
    let (outputs, truth) = shuffle_outputs(sourced, seed, trial_index);
    TransmissionRecord { outputs, truth, channel: ChannelKind::Bec(p), seed, trial_index }
}

/// Sends every codeword through BSC(p): each position flips independently
/// with probability p, then the outputs are shuffled as in [`bec_transmit`].
pub fn bsc_transmit(cb: &Codebook, p: f64, seed: u64, trial_index: u64) -> TransmissionRecord<Bits> {
    assert!((0.0..=0.5).contains(&p), "crossover probability out of range");
    let n = cb.block_len();
    let mut noise = substream(seed, trial_index, StreamTag::Noise);
    let sourced: Vec<Bits> = cb
        .codewords()
        .iter()
        .map(|w| {
            let mut out = w.clone();
            for i in 0..n {
                if noise.random::<f64>() < p {
                    out.set(i, !out.get(i));
                }
            }
            out
        })
        .collect();
    let (outputs, truth) = shuffle_outputs(sourced, seed, trial_index);
    TransmissionRecord { outputs, truth, channel: ChannelKind::Bsc(p), seed, trial_index }
}

/// Applies a uniform permutation to the in-source-order outputs; returns the
/// shuffled list and the truth assignment (source i -> output position).
fn shuffle_outputs<W: Clone>(sourced: Vec<W>, seed: u64, trial_index: u64) -> (Vec<W>, Assignment) {
    let m = sourced.len();
    let mut rng = substream(seed, trial_index, StreamTag::Shuffle);
    let mut position: Vec<usize> = (0..m).collect();
    fisher_yates(&mut position, &mut rng);
    let mut outputs: Vec<Option<W>> = alloc::vec![None; m];
    for (src, w) in sourced.into_iter().enumerate() {
        outputs[position[src]] = Some(w);
    }
    let outputs = outputs.into_iter().map(|w| w.expect("permutation covers all")).collect();
    let truth = Assignment::new(position).expect("shuffle yields a permutation");
    (outputs, truth)
}

fn fisher_yates(items: &mut [usize], rng: &mut impl RngCore) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}

/// A transmission record with `a` outputs removed. `truth[i]` is the output
/// position of codeword `i`, or None when its output was dropped.
#[derive(Clone, Debug)]
pub struct DroppedRecord<W> {
    pub outputs: Vec<W>,
    pub truth: Vec<Option<usize>>,
    pub channel: ChannelKind,
    pub seed: u64,
    pub trial_index: u64,
}

impl<W> DroppedRecord<W> {
    /// Source codeword indices that still have an output.
    pub fn survivors(&self) -> Vec<usize> {
        (0..self.truth.len()).filter(|&i| self.truth[i].is_some()).collect()
    }
}

/// Removes `a` uniformly chosen outputs from a record, restricting the truth
/// accordingly. The selection comes from the trial's absentee substream.
pub fn absentee_drop<W: Clone>(rec: &TransmissionRecord<W>, a: usize) -> DroppedRecord<W> {
    let m = rec.outputs.len();
    assert!(a <= m, "cannot drop more outputs than exist");
    let mut rng = substream(rec.seed, rec.trial_index, StreamTag::Absentee);
    // partial Fisher-Yates: the first a entries are the dropped positions
    let mut idx: Vec<usize> = (0..m).collect();
    for i in 0..a {
        let j = rng.random_range(i..m);
        idx.swap(i, j);
    }
    let mut dropped = alloc::vec![false; m];
    for &i in &idx[..a] {
        dropped[i] = true;
    }
    // new position of each surviving output
    let mut new_pos = alloc::vec![usize::MAX; m];
    let mut outputs = Vec::with_capacity(m - a);
    for (i, w) in rec.outputs.iter().enumerate() {
        if !dropped[i] {
            new_pos[i] = outputs.len();
            outputs.push(w.clone());
        }
    }
    let truth = (0..m)
        .map(|src| {
            let old = rec.truth.apply(src);
            (!dropped[old]).then(|| new_pos[old])
        })
        .collect();
    DroppedRecord { outputs, truth, channel: rec.channel, seed: rec.seed, trial_index: rec.trial_index }
}

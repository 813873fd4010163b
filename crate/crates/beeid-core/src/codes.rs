//! Codebook construction and the queries joint decoders are built from:
//! Hamming distances, distance enumerators, erasure-compatibility sets, and
//! bounded-radius (list-decoding) neighbor sets.
//!
//! A [`Codebook`] is immutable after construction, so every operation here is
//! a pure function of its inputs and safe to call concurrently.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bits::{Bits, ErasedWord, MAX_LEN};

/// Default cap on enumerated codeword/solution sets (2^20).
pub const DEFAULT_ENUM_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeError {
    /// Input length differs from the expected block length.
    LengthMismatch { expected: usize, actual: usize },
    /// Generator rows are linearly dependent (duplicate codewords would result).
    RankDeficient,
    /// Construction would enumerate more codewords than the configured cap.
    SizeGuard { requested: u64, cap: u64 },
    /// An erasure-solve coset exceeds the configured enumeration cap.
    EnumerationCap { size: u64, cap: u64 },
    LengthNotPowerOfTwo { len: usize },
    /// The requested strategy does not apply to this codebook.
    StrategyUnsupported,
    /// Codebooks must not contain repeated codewords.
    DuplicateCodeword { index: usize },
    /// A supplied codeword is not in the row space of the supplied generator.
    GeneratorMismatch { index: usize },
    /// Reed-Muller parameters must satisfy 1 <= r <= m.
    BadRmParams { r: usize, m: usize },
    EmptyCodebook,
}

impl fmt::Display for CodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeError::LengthMismatch { expected, actual } => {
                write!(f, "length mismatch: expected {expected}, got {actual}")
            }
            CodeError::RankDeficient => write!(f, "generator matrix is rank deficient"),
            CodeError::SizeGuard { requested, cap } => {
                write!(f, "codebook size {requested} exceeds enumeration cap {cap}")
            }
            CodeError::EnumerationCap { size, cap } => {
                write!(f, "solution coset of size {size} exceeds cap {cap}")
            }
            CodeError::LengthNotPowerOfTwo { len } => {
                write!(f, "length {len} is not a power of two")
            }
            CodeError::StrategyUnsupported => {
                write!(f, "strategy does not apply to this codebook")
            }
            CodeError::DuplicateCodeword { index } => {
                write!(f, "duplicate codeword at index {index}")
            }
            CodeError::GeneratorMismatch { index } => {
                write!(f, "codeword {index} is not generated by the generator matrix")
            }
            CodeError::BadRmParams { r, m } => {
                write!(f, "Reed-Muller parameters must satisfy 1 <= r <= m, got r={r}, m={m}")
            }
            CodeError::EmptyCodebook => write!(f, "codebook has no codewords"),
        }
    }
}

impl core::error::Error for CodeError {}

/// A codebook of `M` distinct binary codewords of common length `n`.
#[derive(Clone, Debug)]
pub struct Codebook {
    n: usize,
    codewords: Vec<Bits>,
    generator: Option<Vec<Bits>>,
    /// Set when constructed by [`build_reed_muller`]; enables the FHT paths.
    rm: Option<(usize, usize)>,
    min_distance: Option<usize>,
    index_of: BTreeMap<Bits, usize>,
}

impl Codebook {
    /// Builds a codebook from an explicit codeword list, optionally with the
    /// generator matrix that produced it (order of `codewords` is preserved
    /// and need not be message order).
    pub fn from_codewords(
        codewords: Vec<Bits>,
        generator: Option<Vec<Bits>>,
    ) -> Result<Self, CodeError> {
        let n = codewords.first().ok_or(CodeError::EmptyCodebook)?.len();
        for w in &codewords {
            if w.len() != n {
                return Err(CodeError::LengthMismatch { expected: n, actual: w.len() });
            }
        }
        if let Some(rows) = &generator {
            for row in rows {
                if row.len() != n {
                    return Err(CodeError::LengthMismatch { expected: n, actual: row.len() });
                }
            }
            let k = rows.len();
            if k >= 63 {
                return Err(CodeError::SizeGuard { requested: u64::MAX, cap: DEFAULT_ENUM_CAP });
            }
            if gf2_rank(rows) < k {
                return Err(CodeError::RankDeficient);
            }
            if codewords.len() != 1usize << k {
                return Err(CodeError::GeneratorMismatch { index: 0 });
            }
            let echelon = gf2_echelon(rows);
            for (i, w) in codewords.iter().enumerate() {
                if !in_row_space(&echelon, w) {
                    return Err(CodeError::GeneratorMismatch { index: i });
                }
            }
        }
        Self::assemble(codewords, generator, None)
    }

    fn assemble(
        codewords: Vec<Bits>,
        generator: Option<Vec<Bits>>,
        rm: Option<(usize, usize)>,
    ) -> Result<Self, CodeError> {
        let n = codewords[0].len();
        let mut index_of = BTreeMap::new();
        for (i, w) in codewords.iter().enumerate() {
            if index_of.insert(w.clone(), i).is_some() {
                return Err(CodeError::DuplicateCodeword { index: i });
            }
        }
        let min_distance = cached_min_distance(&codewords, generator.is_some());
        Ok(Codebook { n, codewords, generator, rm, min_distance, index_of })
    }

    /// Block length n.
    pub fn block_len(&self) -> usize {
        self.n
    }

    /// Code size M.
    pub fn size(&self) -> usize {
        self.codewords.len()
    }

    pub fn codeword(&self, i: usize) -> &Bits {
        &self.codewords[i]
    }

    pub fn codewords(&self) -> &[Bits] {
        &self.codewords
    }

    pub fn generator(&self) -> Option<&[Bits]> {
        self.generator.as_deref()
    }

    /// `(r, m)` for codebooks built by [`build_reed_muller`].
    pub fn rm_params(&self) -> Option<(usize, usize)> {
        self.rm
    }

    /// Minimum distance, cached at construction (None for M = 1 or when the
    /// pairwise scan would be too large for a nonlinear codebook).
    pub fn min_distance(&self) -> Option<usize> {
        self.min_distance
    }

    pub fn index_of(&self, word: &Bits) -> Option<usize> {
        self.index_of.get(word).copied()
    }
}

fn cached_min_distance(codewords: &[Bits], linear: bool) -> Option<usize> {
    let m = codewords.len();
    if m < 2 {
        return None;
    }
    if linear {
        // d equals the minimum nonzero weight for linear codes.
        return codewords
            .iter()
            .map(|w| w.count_ones())
            .filter(|&w| w > 0)
            .min();
    }
    if m > 4096 {
        return None;
    }
    let mut best = usize::MAX;
    for i in 0..m {
        for j in i + 1..m {
            best = best.min(codewords[i].distance(&codewords[j]));
        }
    }
    Some(best)
}

/// GF(2) rank of a set of rows.
fn gf2_rank(rows: &[Bits]) -> usize {
    gf2_echelon(rows).len()
}

/// Row-echelon basis (one row per pivot, pivots in increasing position).
fn gf2_echelon(rows: &[Bits]) -> Vec<(usize, Bits)> {
    let mut basis: Vec<(usize, Bits)> = Vec::new();
    for row in rows {
        let mut r = row.clone();
        for (pivot, b) in &basis {
            if r.get(*pivot) {
                r.xor_assign(b);
            }
        }
        if let Some(pivot) = (0..r.len()).find(|&i| r.get(i)) {
            basis.push((pivot, r));
            basis.sort_by_key(|(p, _)| *p);
        }
    }
    basis
}

fn in_row_space(echelon: &[(usize, Bits)], word: &Bits) -> bool {
    let mut r = word.clone();
    for (pivot, b) in echelon {
        if r.get(*pivot) {
            r.xor_assign(b);
        }
    }
    r.count_ones() == 0
}

/// Encodes message `msg` (bit j = coefficient of row j) against `rows`.
fn encode(rows: &[Bits], msg: u64) -> Bits {
    let mut w = Bits::zeros(rows[0].len());
    for (j, row) in rows.iter().enumerate() {
        if (msg >> j) & 1 == 1 {
            w.xor_assign(row);
        }
    }
    w
}

/// Builds the codebook of all `2^k` codewords of the linear code generated by
/// `rows` (a k x n GF(2) matrix), enumerated in message-index order: message
/// `m` runs 0..2^k with its bits, least significant first, as the row
/// coefficients.
pub fn build_linear_code(rows: &[Bits]) -> Result<Codebook, CodeError> {
    build_linear_code_capped(rows, DEFAULT_ENUM_CAP)
}

pub fn build_linear_code_capped(rows: &[Bits], cap: u64) -> Result<Codebook, CodeError> {
    let k = rows.len();
    if k == 0 {
        return Err(CodeError::EmptyCodebook);
    }
    let n = rows[0].len();
    for row in rows {
        if row.len() != n {
            return Err(CodeError::LengthMismatch { expected: n, actual: row.len() });
        }
    }
    if n > MAX_LEN {
        return Err(CodeError::LengthMismatch { expected: MAX_LEN, actual: n });
    }
    if k >= 63 || (1u64 << k) > cap {
        return Err(CodeError::SizeGuard { requested: 1u64.checked_shl(k as u32).unwrap_or(u64::MAX), cap });
    }
    if gf2_rank(rows) < k {
        return Err(CodeError::RankDeficient);
    }
    let size = 1usize << k;
    let codewords: Vec<Bits> = (0..size as u64).map(|msg| encode(rows, msg)).collect();
    Codebook::assemble(codewords, Some(rows.to_vec()), None)
}

/// Builds the Reed-Muller code RM(r, m): generator rows are the evaluation
/// vectors of all monomials of degree at most `r` in `m` Boolean variables,
/// ordered by degree then lexicographically; evaluation point `t` assigns
/// variable `v` the bit `(t >> v) & 1`.
///
/// Parameters: n = 2^m, log2 M = sum_{i<=r} C(m, i), d = 2^(m-r).
pub fn build_reed_muller(r: usize, m: usize) -> Result<Codebook, CodeError> {
    build_reed_muller_capped(r, m, DEFAULT_ENUM_CAP)
}

pub fn build_reed_muller_capped(r: usize, m: usize, cap: u64) -> Result<Codebook, CodeError> {
    if r < 1 || r > m {
        return Err(CodeError::BadRmParams { r, m });
    }
    let n = 1usize.checked_shl(m as u32).filter(|&n| n <= MAX_LEN).ok_or(
        CodeError::LengthMismatch { expected: MAX_LEN, actual: usize::MAX },
    )?;
    let mut rows = Vec::new();
    for degree in 0..=r {
        for combo in combinations(m, degree) {
            rows.push(Bits::from_fn(n, |t| {
                combo.iter().all(|&v| (t >> v) & 1 == 1)
            }));
        }
    }
    let mut cb = build_linear_code_capped(&rows, cap)?;
    cb.rm = Some((r, m));
    Ok(cb)
}

/// All size-`degree` subsets of `0..m` in lexicographic order.
fn combinations(m: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(m: usize, degree: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == degree {
            out.push(current.clone());
            return;
        }
        for v in start..m {
            current.push(v);
            rec(m, degree, v + 1, current, out);
            current.pop();
        }
    }
    rec(m, degree, 0, &mut current, &mut out);
    out
}

/// Number of positions where `x` and `y` differ.
pub fn hamming_distance(x: &Bits, y: &Bits) -> Result<usize, CodeError> {
    if x.len() != y.len() {
        return Err(CodeError::LengthMismatch { expected: x.len(), actual: y.len() });
    }
    Ok(x.distance(y))
}

/// Distance enumerator B(z) = sum_i B_i z^i, where B_i counts ordered pairs
/// of (not necessarily distinct) codewords at distance i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceEnumerator {
    coefficients: Vec<u64>,
}

impl DistanceEnumerator {
    /// B_0 ... B_n.
    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    /// Evaluates B(p) by Horner's rule.
    pub fn evaluate(&self, p: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &b| acc * p + b as f64)
    }
}

pub fn distance_enumerator(cb: &Codebook) -> DistanceEnumerator {
    let m = cb.size();
    let mut coefficients = vec![0u64; cb.block_len() + 1];
    if cb.generator().is_some() {
        // Linear code: ordered pairs at distance i = M * (codewords of weight i).
        for w in cb.codewords() {
            coefficients[w.count_ones()] += m as u64;
        }
    } else {
        for i in 0..m {
            for j in 0..m {
                coefficients[cb.codeword(i).distance(cb.codeword(j))] += 1;
            }
        }
    }
    DistanceEnumerator { coefficients }
}

/// How [`erasure_matches`] locates compatible codewords.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchStrategy {
    /// FHT for RM(1, m) codebooks, else linear solve when a generator is
    /// present, else a full scan.
    Auto,
    /// Compare the output against all M codewords.
    BruteScan,
    /// Solve the restricted system over GF(2) and enumerate the coset.
    LinearSolve,
    /// Walsh-Hadamard correlation; requires an RM(1, m) codebook.
    Fht,
}

/// Indices of all codewords agreeing with `y` on its non-erased positions,
/// sorted ascending. All strategies return identical sets.
pub fn erasure_matches(
    cb: &Codebook,
    y: &ErasedWord,
    strategy: MatchStrategy,
) -> Result<Vec<usize>, CodeError> {
    erasure_matches_capped(cb, y, strategy, DEFAULT_ENUM_CAP)
}

pub fn erasure_matches_capped(
    cb: &Codebook,
    y: &ErasedWord,
    strategy: MatchStrategy,
    cap: u64,
) -> Result<Vec<usize>, CodeError> {
    if y.len() != cb.block_len() {
        return Err(CodeError::LengthMismatch { expected: cb.block_len(), actual: y.len() });
    }
    match strategy {
        MatchStrategy::Auto => {
            if matches!(cb.rm_params(), Some((1, _))) {
                matches_fht(cb, y)
            } else if cb.generator().is_some() {
                // linear solve while the coset stays under the cap, else scan
                match matches_linear_solve(cb, y, cap) {
                    Err(CodeError::EnumerationCap { .. }) => Ok(matches_scan(cb, y)),
                    other => other,
                }
            } else {
                Ok(matches_scan(cb, y))
            }
        }
        MatchStrategy::BruteScan => Ok(matches_scan(cb, y)),
        MatchStrategy::LinearSolve => matches_linear_solve(cb, y, cap),
        MatchStrategy::Fht => matches_fht(cb, y),
    }
}

fn matches_scan(cb: &Codebook, y: &ErasedWord) -> Vec<usize> {
    cb.codewords()
        .iter()
        .enumerate()
        .filter(|(_, w)| y.matches(w))
        .map(|(i, _)| i)
        .collect()
}

/// Solves m . G restricted to the non-erased columns, then enumerates the
/// solution coset (particular solution plus nullspace span).
fn matches_linear_solve(cb: &Codebook, y: &ErasedWord, cap: u64) -> Result<Vec<usize>, CodeError> {
    let rows = cb.generator().ok_or(CodeError::StrategyUnsupported)?;
    let k = rows.len();
    debug_assert!(k < 63);
    // One equation per non-erased position t: sum_j m_j G[j][t] = y_t,
    // packed as k coefficient bits plus the rhs in bit k.
    let mut system: Vec<u64> = Vec::new();
    for t in 0..y.len() {
        if y.erased().get(t) {
            continue;
        }
        let mut eq = 0u64;
        for (j, row) in rows.iter().enumerate() {
            if row.get(t) {
                eq |= 1 << j;
            }
        }
        if y.values().get(t) {
            eq |= 1 << k;
        }
        system.push(eq);
    }
    // Gaussian elimination over the packed equations.
    let mut pivots: Vec<(usize, u64)> = Vec::new(); // (variable, reduced equation)
    for mut eq in system {
        for (var, p) in &pivots {
            if (eq >> var) & 1 == 1 {
                eq ^= p;
            }
        }
        if eq & ((1 << k) - 1) == 0 {
            if eq >> k == 1 {
                return Ok(Vec::new()); // inconsistent: nothing matches
            }
            continue;
        }
        let var = eq.trailing_zeros() as usize;
        pivots.push((var, eq));
    }
    let rank = pivots.len();
    let coset: u64 = 1 << (k - rank);
    if coset > cap {
        return Err(CodeError::EnumerationCap { size: coset, cap });
    }
    let pivot_mask: u64 = pivots.iter().fold(0, |acc, (var, _)| acc | 1 << var);
    // Back-substitute in reverse insertion order: each pivot equation only
    // involves its own variable, later pivots, and free variables.
    let solve = |free_bits: u64| -> u64 {
        let mut msg = free_bits;
        for (var, eq) in pivots.iter().rev() {
            let others = eq & ((1u64 << k) - 1) & !(1u64 << var);
            let rhs = (eq >> k) & 1;
            let parity = (others & msg).count_ones() as u64 & 1;
            if parity ^ rhs == 1 {
                msg |= 1 << var;
            } else {
                msg &= !(1 << var);
            }
        }
        msg
    };
    // Enumerate free-variable assignments spread over the non-pivot bits.
    let free_vars: Vec<usize> = (0..k).filter(|v| pivot_mask >> v & 1 == 0).collect();
    let mut out = Vec::with_capacity(coset as usize);
    for assign in 0..coset {
        let mut free_bits = 0u64;
        for (b, var) in free_vars.iter().enumerate() {
            if (assign >> b) & 1 == 1 {
                free_bits |= 1 << var;
            }
        }
        let msg = solve(free_bits);
        let word = encode(rows, msg);
        debug_assert!(y.matches(&word));
        let idx = cb
            .index_of(&word)
            .expect("solved codeword must be in the codebook");
        out.push(idx);
    }
    out.sort_unstable();
    Ok(out)
}

/// FHT matching for RM(1, m): transform the erasure-masked sign vector and
/// read matches off the coefficients that hit the full non-erased count.
///
/// With s[t] = +1/-1 on non-erased positions (0 where erased), the transform
/// W[a] = sum_t s[t] (-1)^(a.t) equals +cnt exactly when the codeword with
/// linear part `a` and constant 0 matches, and -cnt for constant 1. This
/// holds for every erasure pattern, including the all-erased word.
fn matches_fht(cb: &Codebook, y: &ErasedWord) -> Result<Vec<usize>, CodeError> {
    let (r, m) = cb.rm_params().ok_or(CodeError::StrategyUnsupported)?;
    if r != 1 {
        return Err(CodeError::StrategyUnsupported);
    }
    let n = cb.block_len();
    debug_assert_eq!(n, 1 << m);
    let mut s: Vec<i64> = (0..n)
        .map(|t| {
            if y.erased().get(t) {
                0
            } else if y.values().get(t) {
                -1
            } else {
                1
            }
        })
        .collect();
    fht(&mut s)?;
    let cnt = (n - y.erased_count()) as i64;
    let mut out = Vec::new();
    for (a, &w) in s.iter().enumerate() {
        if w == cnt {
            out.push(lookup_rm1(cb, m, false, a as u64));
        }
        if w == -cnt {
            out.push(lookup_rm1(cb, m, true, a as u64));
        }
    }
    out.sort_unstable();
    out.dedup(); // all-erased: +cnt and -cnt coincide at 0
    Ok(out)
}

/// Index of the RM(1, m) codeword t -> b0 + a.t.
fn lookup_rm1(cb: &Codebook, m: usize, b0: bool, a: u64) -> usize {
    let word = Bits::from_fn(1 << m, |t| {
        (b0 as u32 + (a & t as u64).count_ones()) & 1 == 1
    });
    cb.index_of(&word).expect("RM(1,m) coefficient maps to a codeword")
}

/// All codewords within Hamming radius `radius` of `y`, as `(index,
/// distance)` pairs sorted by distance then index. Uses the FHT to compute
/// all M distances at once for RM(1, m) codebooks, a full scan otherwise.
pub fn list_decode(cb: &Codebook, y: &Bits, radius: usize) -> Result<Vec<(usize, usize)>, CodeError> {
    if y.len() != cb.block_len() {
        return Err(CodeError::LengthMismatch { expected: cb.block_len(), actual: y.len() });
    }
    let mut out: Vec<(usize, usize)> = if let Some((1, m)) = cb.rm_params() {
        let n = cb.block_len();
        let mut s: Vec<i64> = (0..n).map(|t| if y.get(t) { -1 } else { 1 }).collect();
        fht(&mut s)?;
        let mut v = Vec::new();
        for (a, &w) in s.iter().enumerate() {
            // d(codeword(b0, a), y) = (n -+ W[a]) / 2
            let d0 = ((n as i64 - w) / 2) as usize;
            if d0 <= radius {
                v.push((lookup_rm1(cb, m, false, a as u64), d0));
            }
            let d1 = ((n as i64 + w) / 2) as usize;
            if d1 <= radius {
                v.push((lookup_rm1(cb, m, true, a as u64), d1));
            }
        }
        v
    } else {
        cb.codewords()
            .iter()
            .enumerate()
            .map(|(i, w)| (i, w.distance(y)))
            .filter(|&(_, d)| d <= radius)
            .collect()
    };
    out.sort_unstable_by_key(|&(i, d)| (d, i));
    Ok(out)
}

/// In-place unnormalized Walsh-Hadamard transform (butterfly), 2^m * m
/// additions/subtractions. Applying it twice multiplies by the length.
pub fn fht(v: &mut [i64]) -> Result<(), CodeError> {
    let n = v.len();
    if !n.is_power_of_two() {
        return Err(CodeError::LengthNotPowerOfTwo { len: n });
    }
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (x, y) = (v[i], v[i + h]);
                v[i] = x + y;
                v[i + h] = x - y;
            }
        }
        h *= 2;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::testutil::random_linear_code;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bits(s: &str) -> Bits {
        Bits::parse(s).unwrap()
    }

    fn erased(s: &str) -> ErasedWord {
        ErasedWord::parse(s).unwrap()
    }

    #[test]
    fn linear_code_message_order() {
        let rows = [bits("11100"), bits("00111")];
        let cb = build_linear_code(&rows).unwrap();
        assert_eq!(cb.block_len(), 5);
        assert_eq!(cb.size(), 4);
        let words: Vec<_> = cb.codewords().iter().map(|w| w.to_bit_string()).collect();
        assert_eq!(words, ["00000", "11100", "00111", "11011"]);
        assert_eq!(cb.min_distance(), Some(3));
    }

    #[test]
    fn linear_code_simplex_members() {
        let cb = presets::simplex7();
        assert_eq!(cb.size(), 8);
        for w in ["0000000", "1000111", "0101011", "1110001"] {
            assert!(cb.index_of(&bits(w)).is_some(), "{w} missing");
        }
        assert_eq!(cb.min_distance(), Some(4));
    }

    #[test]
    fn linear_code_single_bit() {
        let cb = build_linear_code(&[bits("1")]).unwrap();
        assert_eq!(cb.block_len(), 1);
        assert_eq!(cb.size(), 2);
        assert_eq!(cb.codeword(0).to_bit_string(), "0");
        assert_eq!(cb.codeword(1).to_bit_string(), "1");
    }

    #[test]
    fn linear_code_rejects_rank_deficiency() {
        let rows = [bits("1010"), bits("0101"), bits("1111")];
        assert!(matches!(build_linear_code(&rows), Err(CodeError::RankDeficient)));
    }

    #[test]
    fn reed_muller_parameters() {
        let cb = build_reed_muller(1, 3).unwrap();
        assert_eq!((cb.block_len(), cb.size()), (8, 16));
        assert_eq!(cb.min_distance(), Some(4));

        let cb = build_reed_muller(1, 4).unwrap();
        assert_eq!((cb.block_len(), cb.size()), (16, 32));
        assert_eq!(cb.min_distance(), Some(8));

        // RM(m, m) is the full space
        let cb = build_reed_muller(2, 2).unwrap();
        assert_eq!((cb.block_len(), cb.size()), (4, 16));
        assert_eq!(cb.min_distance(), Some(1));
    }

    #[test]
    fn reed_muller_min_distance_by_scan() {
        for (r, m) in [(1, 3), (1, 4), (2, 3), (2, 4), (3, 3), (1, 5)] {
            let cb = build_reed_muller(r, m).unwrap();
            assert!(cb.size() <= 1 << 12);
            let mut best = usize::MAX;
            for i in 0..cb.size() {
                for j in i + 1..cb.size() {
                    best = best.min(cb.codeword(i).distance(cb.codeword(j)));
                }
            }
            assert_eq!(best, 1 << (m - r), "RM({r},{m})");
            assert_eq!(cb.min_distance(), Some(best));
        }
    }

    #[test]
    fn reed_muller_guards() {
        assert!(matches!(build_reed_muller(0, 3), Err(CodeError::BadRmParams { .. })));
        assert!(matches!(build_reed_muller(4, 3), Err(CodeError::BadRmParams { .. })));
        assert!(matches!(
            build_reed_muller_capped(1, 5, 16),
            Err(CodeError::SizeGuard { requested: 64, cap: 16 })
        ));
    }

    #[test]
    fn hamming_distance_examples() {
        assert_eq!(hamming_distance(&bits("0000000"), &bits("1110001")).unwrap(), 4);
        let x = bits("0101011");
        assert_eq!(hamming_distance(&x, &x).unwrap(), 0);
        assert_eq!(hamming_distance(&bits("00000"), &bits("10000")).unwrap(), 1);
        assert!(hamming_distance(&bits("01"), &bits("011")).is_err());
    }

    #[test]
    fn enumerator_examples() {
        let cb = presets::linear52();
        let e = distance_enumerator(&cb);
        let mut want = vec![0u64; 6];
        want[0] = 4;
        want[3] = 8;
        want[4] = 4;
        assert_eq!(e.coefficients(), &want[..]);
        assert_eq!(e.evaluate(0.0), 4.0);
        assert_eq!(e.evaluate(1.0), 16.0);
        assert!((e.evaluate(0.5) - 5.25).abs() < 1e-12);

        let cb = presets::simplex7();
        let e = distance_enumerator(&cb);
        assert_eq!(e.coefficients()[0], 8);
        assert_eq!(e.coefficients()[4], 56);
        assert_eq!(e.coefficients().iter().sum::<u64>(), 64);

        let cb = build_linear_code(&[bits("1")]).unwrap();
        assert_eq!(distance_enumerator(&cb).coefficients(), &[2, 2]);
    }

    #[test]
    fn enumerator_invariants_on_random_codes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let k = rng.random_range(1..=6);
            let n = rng.random_range(k..=20);
            let Some(cb) = random_linear_code(&mut rng, k, n) else { continue };
            let e = distance_enumerator(&cb);
            let m = cb.size() as u64;
            assert_eq!(e.coefficients()[0], m);
            assert_eq!(e.coefficients().iter().sum::<u64>(), m * m);
            if let Some(d) = cb.min_distance() {
                for i in 1..d {
                    assert_eq!(e.coefficients()[i], 0);
                }
            }
            // linear path agrees with the ordered-pair scan
            let mut scan = vec![0u64; cb.block_len() + 1];
            for i in 0..cb.size() {
                for j in 0..cb.size() {
                    scan[cb.codeword(i).distance(cb.codeword(j))] += 1;
                }
            }
            assert_eq!(e.coefficients(), &scan[..]);
        }
    }

    #[test]
    fn erasure_matches_reference_graph_columns() {
        let cb = presets::simplex7();
        // outputs of the first worked example, in order
        let m = |s: &str| erasure_matches(&cb, &erased(s), MatchStrategy::BruteScan).unwrap();
        assert_eq!(m("00?????"), vec![0, 3]);
        assert_eq!(m("001????"), vec![3]);
        assert_eq!(m("??????0"), vec![0, 4, 5, 6]);
        assert_eq!(m("?0?0?1?"), vec![1]);
        assert_eq!(m("11????0"), vec![4]);
        assert_eq!(m("????001"), vec![7]);
        assert_eq!(m("0??????"), vec![0, 2, 3, 6]);
        assert_eq!(m("????110"), vec![6]);
        assert_eq!(m("???????"), (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn erasure_strategies_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 1000 {
            let k = rng.random_range(1..=7);
            let n = rng.random_range(k..=24);
            let Some(cb) = random_linear_code(&mut rng, k, n) else { continue };
            // half the patterns erase a transmitted codeword, half are arbitrary
            let base = if rng.random() {
                cb.codeword(rng.random_range(0..cb.size())).clone()
            } else {
                Bits::from_fn(n, |_| rng.random())
            };
            let p: f64 = rng.random();
            let mask = Bits::from_fn(n, |_| rng.random_bool(p));
            let y = ErasedWord::new(base, mask);
            let scan = erasure_matches(&cb, &y, MatchStrategy::BruteScan).unwrap();
            let solve = erasure_matches(&cb, &y, MatchStrategy::LinearSolve).unwrap();
            assert_eq!(scan, solve);
            let auto = erasure_matches(&cb, &y, MatchStrategy::Auto).unwrap();
            assert_eq!(scan, auto);
            checked += 1;
        }
    }

    #[test]
    fn erasure_fht_agrees_on_rm1() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for m in 2..=4 {
            let cb = build_reed_muller(1, m).unwrap();
            let n = cb.block_len();
            for _ in 0..200 {
                let base = if rng.random() {
                    cb.codeword(rng.random_range(0..cb.size())).clone()
                } else {
                    Bits::from_fn(n, |_| rng.random())
                };
                let p: f64 = rng.random();
                let mask = Bits::from_fn(n, |_| rng.random_bool(p));
                let y = ErasedWord::new(base, mask);
                let scan = erasure_matches(&cb, &y, MatchStrategy::BruteScan).unwrap();
                let fht_m = erasure_matches(&cb, &y, MatchStrategy::Fht).unwrap();
                assert_eq!(scan, fht_m);
            }
            // the all-erased word matches everything
            let all = ErasedWord::new(Bits::zeros(n), Bits::from_fn(n, |_| true));
            assert_eq!(
                erasure_matches(&cb, &all, MatchStrategy::Fht).unwrap(),
                (0..cb.size()).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn erasure_fht_requires_rm1() {
        let cb = presets::linear52();
        let y = erased("?????");
        assert_eq!(
            erasure_matches(&cb, &y, MatchStrategy::Fht),
            Err(CodeError::StrategyUnsupported)
        );
        let cb = build_reed_muller(2, 3).unwrap();
        let y = ErasedWord::new(Bits::zeros(8), Bits::zeros(8));
        assert_eq!(
            erasure_matches(&cb, &y, MatchStrategy::Fht),
            Err(CodeError::StrategyUnsupported)
        );
    }

    #[test]
    fn erasure_enumeration_cap() {
        let cb = build_reed_muller(2, 3).unwrap(); // k = 7
        let all = ErasedWord::new(Bits::zeros(8), Bits::from_fn(8, |_| true));
        match erasure_matches_capped(&cb, &all, MatchStrategy::LinearSolve, 16) {
            Err(CodeError::EnumerationCap { size: 128, cap: 16 }) => {}
            other => panic!("expected cap breach, got {other:?}"),
        }
        // auto-selection degrades to the scan instead of erroring
        let auto = erasure_matches_capped(&cb, &all, MatchStrategy::Auto, 16).unwrap();
        assert_eq!(auto, (0..cb.size()).collect::<Vec<_>>());
    }

    #[test]
    fn list_decode_examples() {
        let cb = presets::linear52();
        assert_eq!(list_decode(&cb, &bits("10000"), 2).unwrap(), vec![(0, 1), (1, 2)]);
        assert_eq!(list_decode(&cb, &bits("11101"), 2).unwrap(), vec![(1, 1), (3, 2)]);
        let all = list_decode(&cb, &bits("10101"), 5).unwrap();
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn list_decode_unique_radius() {
        // within radius (d-1)/2 at most one codeword, exhaustively over y
        for cb in [presets::linear52(), presets::simplex7(), build_reed_muller(1, 3).unwrap()] {
            let n = cb.block_len();
            let d = cb.min_distance().unwrap();
            let radius = (d - 1) / 2;
            for y in 0u64..1 << n {
                let word = Bits::from_fn(n, |i| (y >> i) & 1 == 1);
                let hits = list_decode(&cb, &word, radius).unwrap();
                assert!(hits.len() <= 1, "y={} hits={hits:?}", word.to_bit_string());
            }
        }
    }

    #[test]
    fn list_decode_fht_matches_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let cb = build_reed_muller(1, 4).unwrap();
        let n = cb.block_len();
        for _ in 0..200 {
            let y = Bits::from_fn(n, |_| rng.random());
            let r = rng.random_range(0..=n);
            let fast = list_decode(&cb, &y, r).unwrap();
            let slow: Vec<(usize, usize)> = {
                let mut v: Vec<_> = cb
                    .codewords()
                    .iter()
                    .enumerate()
                    .map(|(i, w)| (i, w.distance(&y)))
                    .filter(|&(_, d)| d <= r)
                    .collect();
                v.sort_unstable_by_key(|&(i, d)| (d, i));
                v
            };
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn fht_small_cases() {
        let mut v = vec![1, 1];
        fht(&mut v).unwrap();
        assert_eq!(v, [2, 0]);

        let mut v = vec![1, 0, 0, 0];
        fht(&mut v).unwrap();
        assert_eq!(v, [1, 1, 1, 1]);

        let mut v = vec![3i64, -1, 4, 1, -5, 9, 2, 6];
        let orig = v.clone();
        fht(&mut v).unwrap();
        fht(&mut v).unwrap();
        assert_eq!(v, orig.iter().map(|x| x * 8).collect::<Vec<_>>());

        assert!(fht(&mut [0i64; 3]).is_err());
    }

    #[test]
    fn fht_matches_naive_hadamard() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for m in 0..=8 {
            let n = 1usize << m;
            let v: Vec<i64> = (0..n).map(|_| rng.random_range(-100..100)).collect();
            let mut fast = v.clone();
            fht(&mut fast).unwrap();
            let naive: Vec<i64> = (0..n)
                .map(|a| {
                    (0..n)
                        .map(|t| {
                            let sign = if (a & t).count_ones() % 2 == 0 { 1 } else { -1 };
                            sign * v[t]
                        })
                        .sum()
                })
                .collect();
            assert_eq!(fast, naive, "m={m}");
        }
    }
}

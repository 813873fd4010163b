//! The second-order permanent and its canonical trellis.
//!
//! per2(T) sums, over ordered pairs of permutations (sigma, tau), the
//! products over columns j of phi(T[sigma(j)][j], T[tau(j)][j]), where phi
//! collapses to a single factor when sigma(j) = tau(j). Evaluated naively
//! that is (M!)^2 summands; the canonical trellis reduces it to one
//! root-to-toor sweep over layered vertices:
//!
//! - layer j holds every j-subset of the rows (type 1) and every unordered
//!   pair of distinct j-subsets (type 2),
//! - a type-1 vertex X branches to X+{i} with label T[i][j], and to the pair
//!   {X+{i}, X+{k}} (i < k) with label 2 T[i][j] T[k][j] - the factor 2
//!   accounts for the two orderings of (sigma, tau) that split there,
//! - a pair {X1, X2} extends X1 by i and X2 by k with label T[i][j] T[k][j]
//!   (a single T[i][j] when i = k), merging back to type 1 when the two
//!   subsets land on the same set.
//!
//! Only two consecutive layers are alive at a time, so memory follows the
//! widest layer instead of the whole vertex count.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::permanent::{for_each_permutation, SquareMatrix};
use super::scaled::ScaledReal;
use super::EstimationError;

/// Largest M accepted by [`second_order_permanent`] and [`trellis_stats`]
/// (the vertex count grows like 4^M / (2 sqrt(pi M))).
pub const PER2_GUARD: usize = 14;
/// Largest M accepted by [`second_order_permanent_bruteforce`].
pub const PER2_BRUTEFORCE_GUARD: usize = 6;

/// Trellis vertex: a row subset or an unordered pair of distinct row
/// subsets, canonicalized with the smaller bitmask first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Single(u32),
    Pair(u32, u32),
}

fn pair_key(a: u32, b: u32) -> Key {
    debug_assert_ne!(a, b);
    if a < b {
        Key::Pair(a, b)
    } else {
        Key::Pair(b, a)
    }
}

/// Edge label, with the column index implicit in the layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Label {
    /// T[i][j]
    Single(usize),
    /// T[i][j] * T[k][j]
    Product(usize, usize),
    /// 2 * T[i][j] * T[k][j]
    ProductDoubled(usize, usize),
}

/// Enumerates the out-edges of `key` in a deterministic order.
fn for_each_successor(key: Key, m: usize, mut f: impl FnMut(Key, Label)) {
    match key {
        Key::Single(x) => {
            for i in 0..m {
                if x >> i & 1 == 1 {
                    continue;
                }
                f(Key::Single(x | 1 << i), Label::Single(i));
                for k in i + 1..m {
                    if x >> k & 1 == 0 {
                        f(pair_key(x | 1 << i, x | 1 << k), Label::ProductDoubled(i, k));
                    }
                }
            }
        }
        Key::Pair(x1, x2) => {
            for i in 0..m {
                if x1 >> i & 1 == 1 {
                    continue;
                }
                for k in 0..m {
                    if x2 >> k & 1 == 1 {
                        continue;
                    }
                    if i == k {
                        // shared extension keeps the pair distinct
                        f(pair_key(x1 | 1 << i, x2 | 1 << i), Label::Single(i));
                        continue;
                    }
                    let (a, b) = (x1 | 1 << i, x2 | 1 << k);
                    if a == b {
                        f(Key::Single(a), Label::Product(i, k));
                    } else {
                        f(pair_key(a, b), Label::Product(i, k));
                    }
                }
            }
        }
    }
}

/// per2(T) evaluated by a Viterbi sweep of the canonical trellis, holding
/// only the current and next layer.
pub fn second_order_permanent(t: &SquareMatrix) -> Result<ScaledReal, EstimationError> {
    let m = t.order();
    if m > PER2_GUARD {
        return Err(EstimationError::SizeGuard { m, guard: PER2_GUARD });
    }
    let two = ScaledReal::from_f64(2.0);
    let mut layer: BTreeMap<Key, ScaledReal> = BTreeMap::new();
    layer.insert(Key::Single(0), ScaledReal::ONE);
    for col in 0..m {
        let mut next: BTreeMap<Key, ScaledReal> = BTreeMap::new();
        for (&key, value) in &layer {
            for_each_successor(key, m, |succ, label| {
                let weight = match label {
                    Label::Single(i) => t.get(i, col),
                    Label::Product(i, k) => t.get(i, col).mul(&t.get(k, col)),
                    Label::ProductDoubled(i, k) => two.mul(&t.get(i, col)).mul(&t.get(k, col)),
                };
                let contribution = value.mul(&weight);
                next.entry(succ)
                    .and_modify(|acc| *acc = acc.add(&contribution))
                    .or_insert(contribution);
            });
        }
        layer = next;
    }
    debug_assert_eq!(layer.len(), 1);
    let full = Key::Single((1u32 << m) - 1);
    Ok(*layer.get(&full).expect("toor vertex is reachable"))
}

/// Direct double sum over all pairs of permutations; the independent oracle
/// for [`second_order_permanent`].
pub fn second_order_permanent_bruteforce(t: &SquareMatrix) -> Result<ScaledReal, EstimationError> {
    let m = t.order();
    if m > PER2_BRUTEFORCE_GUARD {
        return Err(EstimationError::SizeGuard { m, guard: PER2_BRUTEFORCE_GUARD });
    }
    let mut sigmas: Vec<Vec<usize>> = Vec::new();
    for_each_permutation(m, |perm| sigmas.push(perm.to_vec()));
    let mut total = ScaledReal::ZERO;
    for sigma in &sigmas {
        for tau in &sigmas {
            let mut prod = ScaledReal::ONE;
            for j in 0..m {
                // phi(T[sigma(j)][j], T[tau(j)][j])
                let factor = if sigma[j] == tau[j] {
                    t.get(sigma[j], j)
                } else {
                    t.get(sigma[j], j).mul(&t.get(tau[j], j))
                };
                prod = prod.mul(&factor);
            }
            total = total.add(&prod);
        }
    }
    Ok(total)
}

/// Size and operation counters of the canonical trellis for order M.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrellisStats {
    /// Constructed vertex count; equals (1/2) C(2M, M) + 2^(M-1).
    pub vertices: u64,
    /// Closed-form upper bound on the edge count:
    /// (M^2/2) C(2M-2, M-1) + M(M+1) 2^(M-3).
    pub edge_bound: u64,
    /// Edge count of the constructed trellis.
    pub edges: u64,
    /// Viterbi multiplications: edges - deg(root).
    pub multiplications: u64,
    /// Viterbi additions: edges - vertices + 1.
    pub additions: u64,
}

/// Builds the trellis layer by layer (keys only) and counts it.
pub fn trellis_stats(m: usize) -> Result<TrellisStats, EstimationError> {
    if m < 1 || m > PER2_GUARD {
        return Err(EstimationError::SizeGuard { m, guard: PER2_GUARD });
    }
    use alloc::collections::BTreeSet;
    let mut layer: BTreeSet<Key> = BTreeSet::new();
    layer.insert(Key::Single(0));
    let mut vertices = 1u64;
    let mut edges = 0u64;
    let mut root_degree = 0u64;
    for col in 0..m {
        let mut next: BTreeSet<Key> = BTreeSet::new();
        for &key in &layer {
            for_each_successor(key, m, |succ, _| {
                edges += 1;
                if col == 0 {
                    root_degree += 1;
                }
                next.insert(succ);
            });
        }
        vertices += next.len() as u64;
        layer = next;
    }
    let formula = binomial(2 * m as u64, m as u64) / 2 + (1u64 << (m - 1));
    assert_eq!(vertices, formula, "constructed vertex count disagrees with the closed formula");
    let edge_bound = (4 * (m as u64) * (m as u64) * binomial(2 * m as u64 - 2, m as u64 - 1)
        + (m as u64) * (m as u64 + 1) * (1u64 << m))
        / 8;
    Ok(TrellisStats {
        vertices,
        edge_bound,
        edges,
        multiplications: edges - root_degree,
        additions: edges + 1 - vertices,
    })
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

//! The joint decoders: given a codebook and an unordered set of channel
//! outputs, recover which output came from which codeword.
//!
//! - [`jedi`] (erasure channel): connect each output to every codeword it is
//!   compatible with and peel for the unique perfect matching. Whenever it
//!   identifies, the answer is exact: the true matching always exists, so a
//!   unique matching must be it.
//! - [`jmdi`] (symmetric channel): minimum-total-Hamming-distance assignment
//!   over the complete bipartite graph.
//! - [`jldi`]: JMDI with the graph pruned to edges of weight at most R
//!   (list-decoding radius), solved by sparse successive shortest paths.
//! - [`ml_identify`]: the general-channel wrapper; edges exist where the
//!   supplied log-likelihood is finite and carry fixed-point costs.
//! - [`identify_with_absentees_bec`] / [`identify_with_absentees_bsc`]:
//!   variants that pad the output side with absentee sinks when fewer than M
//!   outputs arrived.

use alloc::vec::Vec;
use core::fmt;

use crate::bits::{Bits, ErasedWord};
use crate::codes::{erasure_matches, list_decode, CodeError, Codebook, MatchStrategy};
use crate::matching::{
    hungarian, pma, sparse_min_cost_matching, Assignment, BipartiteGraph, MatchingError,
    PmaOutcome, Side, SparseMatching,
};

/// Fixed-point scale for [`ml_identify`] costs: costs are
/// round(-loglik * 2^20), so assignments whose exact costs differ by more
/// than M * 2^-20 cannot be reordered by rounding.
pub const ML_COST_SCALE: f64 = (1u64 << 20) as f64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdentifyError {
    /// An output's length does not match the codebook block length.
    Malformed { index: usize, expected: usize, actual: usize },
    /// The number of outputs is wrong for the operation.
    WrongCount { expected: usize, actual: usize },
    /// Propagated from the codebook query layer.
    Code(CodeError),
}

impl fmt::Display for IdentifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdentifyError::Malformed { index, expected, actual } => {
                write!(f, "output {index} has length {actual}, expected {expected}")
            }
            IdentifyError::WrongCount { expected, actual } => {
                write!(f, "got {actual} outputs, expected {expected}")
            }
            IdentifyError::Code(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for IdentifyError {}

impl From<CodeError> for IdentifyError {
    fn from(e: CodeError) -> Self {
        IdentifyError::Code(e)
    }
}

/// Why identification failed (failure is data, not a process error).
#[derive(Debug, Clone)]
pub enum FailureReason {
    /// More than one perfect matching exists; the residual graph after
    /// peeling is attached (peeled nodes appear with degree zero).
    NotUnique { residual: BipartiteGraph },
    /// The compatibility graph has no perfect matching at all, which cannot
    /// happen for outputs genuinely produced from this codebook.
    NoPerfectMatching { side: Side, index: usize },
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Identified {
        assignment: Assignment,
        /// Peeling order (codeword, output) when the decoder was JEDI.
        edge_order: Option<Vec<(usize, usize)>>,
    },
    Failure(FailureReason),
    /// The pruned graph has no perfect matching (JLDI / ML with pruning).
    Infeasible { max_matching: usize },
}

impl Outcome {
    pub fn assignment(&self) -> Option<&Assignment> {
        match self {
            Outcome::Identified { assignment, .. } => Some(assignment),
            _ => None,
        }
    }

    pub fn is_identified(&self) -> bool {
        matches!(self, Outcome::Identified { .. })
    }
}

/// How the input-output graph was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphStats {
    pub edges: usize,
    pub strategy: &'static str,
}

#[derive(Debug, Clone)]
pub struct IdentificationResult {
    pub outcome: Outcome,
    pub stats: GraphStats,
    /// True when JLDI hit an infeasible pruned graph and re-ran as JMDI.
    pub used_fallback: bool,
}

fn check_outputs<T>(cb: &Codebook, outputs: &[T], len_of: impl Fn(&T) -> usize) -> Result<(), IdentifyError> {
    if outputs.len() != cb.size() {
        return Err(IdentifyError::WrongCount { expected: cb.size(), actual: outputs.len() });
    }
    check_lengths(cb, outputs, len_of)
}

fn check_lengths<T>(cb: &Codebook, outputs: &[T], len_of: impl Fn(&T) -> usize) -> Result<(), IdentifyError> {
    for (index, out) in outputs.iter().enumerate() {
        let actual = len_of(out);
        if actual != cb.block_len() {
            return Err(IdentifyError::Malformed { index, expected: cb.block_len(), actual });
        }
    }
    Ok(())
}

fn resolved_strategy(cb: &Codebook, strategy: MatchStrategy) -> &'static str {
    match strategy {
        MatchStrategy::BruteScan => "brute-scan",
        MatchStrategy::LinearSolve => "linear-solve",
        MatchStrategy::Fht => "fht",
        MatchStrategy::Auto => {
            if matches!(cb.rm_params(), Some((1, _))) {
                "fht"
            } else if cb.generator().is_some() {
                "linear-solve"
            } else {
                "brute-scan"
            }
        }
    }
}

/// Joint erasure decoding: build the compatibility graph and peel for the
/// unique perfect matching. `Identified` carries sigma with sigma(i) the
/// output index matched to codeword i, plus the peeling order.
pub fn jedi(
    cb: &Codebook,
    outputs: &[ErasedWord],
    strategy: MatchStrategy,
) -> Result<IdentificationResult, IdentifyError> {
    check_outputs(cb, outputs, ErasedWord::len)?;
    let m = cb.size();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (j, y) in outputs.iter().enumerate() {
        for i in erasure_matches(cb, y, strategy)? {
            edges.push((i, j));
        }
    }
    let graph = BipartiteGraph::from_edges(m, edges).expect("match sets give valid edges");
    let stats = GraphStats { edges: graph.edge_count(), strategy: resolved_strategy(cb, strategy) };
    let outcome = match pma(&graph) {
        Ok(res) => match res.outcome {
            PmaOutcome::Unique { assignment, edge_order } => {
                Outcome::Identified { assignment, edge_order: Some(edge_order) }
            }
            PmaOutcome::NotUnique { residual } => {
                Outcome::Failure(FailureReason::NotUnique { residual })
            }
        },
        Err(MatchingError::PreconditionBreach { side, index }) => {
            Outcome::Failure(FailureReason::NoPerfectMatching { side, index })
        }
        Err(MatchingError::NotAMatching { .. }) => unreachable!("pma takes no matching"),
    };
    Ok(IdentificationResult { outcome, stats, used_fallback: false })
}

/// The complete Hamming-cost matrix with entry (i, j) = d(codeword i,
/// output j).
pub fn jmdi_cost_matrix(cb: &Codebook, outputs: &[Bits]) -> Result<Vec<Vec<i64>>, IdentifyError> {
    check_outputs(cb, outputs, Bits::len)?;
    Ok(cb
        .codewords()
        .iter()
        .map(|x| outputs.iter().map(|y| x.distance(y) as i64).collect())
        .collect())
}

/// Joint minimum-distance decoding: Hungarian assignment on the complete
/// cost matrix. Always identifies (the complete graph is feasible); ties
/// are broken by the assignment algorithm's deterministic internal order.
pub fn jmdi(cb: &Codebook, outputs: &[Bits]) -> Result<IdentificationResult, IdentifyError> {
    let costs = jmdi_cost_matrix(cb, outputs)?;
    let assignment = hungarian(&costs).expect("cost matrix is square and non-negative");
    Ok(IdentificationResult {
        outcome: Outcome::Identified { assignment, edge_order: None },
        stats: GraphStats { edges: cb.size() * cb.size(), strategy: "complete" },
        used_fallback: false,
    })
}

/// The radius-pruned graph JLDI solves: edges (i, j) with
/// d(codeword i, output j) <= radius, costed by that distance.
pub fn jldi_graph(
    cb: &Codebook,
    outputs: &[Bits],
    radius: usize,
) -> Result<BipartiteGraph, IdentifyError> {
    check_outputs(cb, outputs, Bits::len)?;
    let mut edges: Vec<(usize, usize, i64)> = Vec::new();
    for (j, y) in outputs.iter().enumerate() {
        for (i, d) in list_decode(cb, y, radius)? {
            edges.push((i, j, d as i64));
        }
    }
    Ok(BipartiteGraph::from_costed_edges(cb.size(), edges).expect("list decode gives valid edges"))
}

/// Joint list-decoding identification: JMDI on the pruned graph. When the
/// pruning disconnects the graph the honest result is `Infeasible`; with
/// `fallback` set, the decoder re-runs as plain JMDI and flags the result.
pub fn jldi(
    cb: &Codebook,
    outputs: &[Bits],
    radius: usize,
    fallback: bool,
) -> Result<IdentificationResult, IdentifyError> {
    let graph = jldi_graph(cb, outputs, radius)?;
    let stats = GraphStats { edges: graph.edge_count(), strategy: "radius-pruned" };
    match sparse_min_cost_matching(&graph).expect("graph is costed") {
        SparseMatching::Perfect(assignment) => Ok(IdentificationResult {
            outcome: Outcome::Identified { assignment, edge_order: None },
            stats,
            used_fallback: false,
        }),
        SparseMatching::Infeasible { max_matching } => {
            if fallback {
                let mut res = jmdi(cb, outputs)?;
                res.used_fallback = true;
                Ok(res)
            } else {
                Ok(IdentificationResult {
                    outcome: Outcome::Infeasible { max_matching },
                    stats,
                    used_fallback: false,
                })
            }
        }
    }
}

/// Maximum-likelihood identification for an arbitrary memoryless channel.
///
/// `loglik(i, j)` is the log-probability of output j given codeword i, or
/// -infinity where the pair is impossible; maximizing the likelihood
/// product equals minimizing the sum of -log P costs. Costs are quantized
/// at [`ML_COST_SCALE`]; this rounding is the single approximation in the
/// ML path. Returns `Infeasible` when the impossible pairs disconnect the
/// graph.
pub fn ml_identify(m: usize, loglik: impl Fn(usize, usize) -> f64) -> IdentificationResult {
    let mut raw: Vec<(usize, usize, i64)> = Vec::new();
    let mut min_cost = 0i64;
    for i in 0..m {
        for j in 0..m {
            let ll = loglik(i, j);
            if ll == f64::NEG_INFINITY {
                continue;
            }
            assert!(ll.is_finite(), "loglik({i}, {j}) must be finite or -inf");
            let cost = libm::round(-ll * ML_COST_SCALE) as i64;
            min_cost = min_cost.min(cost);
            raw.push((i, j, cost));
        }
    }
    // a uniform shift leaves the argmin unchanged; it only guards against
    // callers handing in log-likelihoods above zero
    let edges = raw.into_iter().map(|(i, j, c)| (i, j, c - min_cost));
    let graph = BipartiteGraph::from_costed_edges(m, edges).expect("shifted costs are non-negative");
    let stats = GraphStats { edges: graph.edge_count(), strategy: "ml-loglik" };
    let outcome = match sparse_min_cost_matching(&graph).expect("graph is costed") {
        SparseMatching::Perfect(assignment) => {
            Outcome::Identified { assignment, edge_order: None }
        }
        SparseMatching::Infeasible { max_matching } => Outcome::Infeasible { max_matching },
    };
    IdentificationResult { outcome, stats, used_fallback: false }
}

/// Identification over M codewords with `absent` of them unmatched.
#[derive(Debug, Clone)]
pub struct AbsenteeResult {
    pub outcome: Outcome,
    /// Codeword indices assigned to absentee sinks (ascending); empty unless
    /// identified.
    pub absent: Vec<usize>,
    pub stats: GraphStats,
}

fn absentees_of(assignment: &Assignment, real: usize) -> Vec<usize> {
    (0..assignment.len()).filter(|&i| assignment.apply(i) >= real).collect()
}

/// JEDI with `M - outputs.len()` absentee sinks appended on the right, each
/// compatible with every codeword. Uniqueness is still decided by peeling;
/// with two or more sinks (or two codewords that could equally take a
/// sink), the matching cannot be unique and the decoder reports failure
/// rather than inventing a tie-break.
pub fn identify_with_absentees_bec(
    cb: &Codebook,
    outputs: &[ErasedWord],
    strategy: MatchStrategy,
) -> Result<AbsenteeResult, IdentifyError> {
    let m = cb.size();
    if outputs.len() > m {
        return Err(IdentifyError::WrongCount { expected: m, actual: outputs.len() });
    }
    check_lengths(cb, outputs, ErasedWord::len)?;
    let real = outputs.len();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (j, y) in outputs.iter().enumerate() {
        for i in erasure_matches(cb, y, strategy)? {
            edges.push((i, j));
        }
    }
    for i in 0..m {
        for sink in real..m {
            edges.push((i, sink));
        }
    }
    let graph = BipartiteGraph::from_edges(m, edges).expect("valid edges");
    let stats = GraphStats { edges: graph.edge_count(), strategy: resolved_strategy(cb, strategy) };
    let (outcome, absent) = match pma(&graph) {
        Ok(res) => match res.outcome {
            PmaOutcome::Unique { assignment, edge_order } => {
                let absent = absentees_of(&assignment, real);
                (Outcome::Identified { assignment, edge_order: Some(edge_order) }, absent)
            }
            PmaOutcome::NotUnique { residual } => {
                (Outcome::Failure(FailureReason::NotUnique { residual }), Vec::new())
            }
        },
        Err(MatchingError::PreconditionBreach { side, index }) => {
            (Outcome::Failure(FailureReason::NoPerfectMatching { side, index }), Vec::new())
        }
        Err(MatchingError::NotAMatching { .. }) => unreachable!("pma takes no matching"),
    };
    Ok(AbsenteeResult { outcome, absent, stats })
}

/// JMDI with `M - outputs.len()` zero-cost absentee sinks appended: the
/// Hungarian assignment on the padded matrix, with sink-assigned codewords
/// reported as absent.
pub fn identify_with_absentees_bsc(
    cb: &Codebook,
    outputs: &[Bits],
) -> Result<AbsenteeResult, IdentifyError> {
    let m = cb.size();
    if outputs.len() > m {
        return Err(IdentifyError::WrongCount { expected: m, actual: outputs.len() });
    }
    check_lengths(cb, outputs, Bits::len)?;
    let real = outputs.len();
    let costs: Vec<Vec<i64>> = cb
        .codewords()
        .iter()
        .map(|x| {
            (0..m)
                .map(|j| if j < real { x.distance(&outputs[j]) as i64 } else { 0 })
                .collect()
        })
        .collect();
    let assignment = hungarian(&costs).expect("padded matrix is square and non-negative");
    let absent = absentees_of(&assignment, real);
    Ok(AbsenteeResult {
        outcome: Outcome::Identified { assignment, edge_order: None },
        absent,
        stats: GraphStats { edges: m * m, strategy: "complete-padded" },
    })
}

//! Balanced bipartite matching algorithms.
//!
//! Everything here works on a [`BipartiteGraph`] of order M (M left and M
//! right nodes, 0-indexed) and produces an [`Assignment`]: the permutation
//! sigma with left node `i` matched to right node `sigma(i)`.
//!
//! Graphs are immutable after construction and all algorithms allocate
//! private working state, so concurrent runs on a shared graph are safe.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphError {
    ZeroOrder,
    IndexOutOfRange { side: Side, index: usize, order: usize },
    DuplicateEdge { left: usize, right: usize },
    NegativeCost { left: usize, right: usize, cost: i64 },
    /// The algorithm needs edge costs but the graph has none.
    MissingCosts,
    NonSquareMatrix,
    NotAPermutation,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::ZeroOrder => write!(f, "graph order must be at least 1"),
            GraphError::IndexOutOfRange { side, index, order } => {
                write!(f, "{side:?} index {index} out of range for order {order}")
            }
            GraphError::DuplicateEdge { left, right } => {
                write!(f, "duplicate edge ({left}, {right})")
            }
            GraphError::NegativeCost { left, right, cost } => {
                write!(f, "negative cost {cost} on edge ({left}, {right})")
            }
            GraphError::MissingCosts => write!(f, "graph has no edge costs"),
            GraphError::NonSquareMatrix => write!(f, "cost matrix must be square"),
            GraphError::NotAPermutation => write!(f, "sigma is not a permutation"),
        }
    }
}

impl core::error::Error for GraphError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchingError {
    /// Peeling stranded a degree-zero unmatched node: the input graph had no
    /// perfect matching.
    PreconditionBreach { side: Side, index: usize },
    /// The supplied assignment uses an edge absent from the graph.
    NotAMatching { left: usize, right: usize },
}

impl fmt::Display for MatchingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchingError::PreconditionBreach { side, index } => {
                write!(f, "no perfect matching: {side:?} node {index} stranded with degree zero")
            }
            MatchingError::NotAMatching { left, right } => {
                write!(f, "assignment edge ({left}, {right}) is not in the graph")
            }
        }
    }
}

impl core::error::Error for MatchingError {}

/// Balanced bipartite graph of order M with per-left-node sorted adjacency
/// lists and optional non-negative integer edge costs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    m: usize,
    adj: Vec<Vec<usize>>,
    costs: Option<Vec<Vec<i64>>>,
}

impl BipartiteGraph {
    pub fn from_edges(
        m: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        Self::build(m, edges.into_iter().map(|(l, r)| (l, r, 0)), false)
    }

    pub fn from_costed_edges(
        m: usize,
        edges: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Result<Self, GraphError> {
        Self::build(m, edges.into_iter(), true)
    }

    /// Complete graph of order M from an M x M cost matrix.
    pub fn complete_from_costs(matrix: &[Vec<i64>]) -> Result<Self, GraphError> {
        let m = matrix.len();
        for row in matrix {
            if row.len() != m {
                return Err(GraphError::NonSquareMatrix);
            }
        }
        Self::build(
            m,
            matrix
                .iter()
                .enumerate()
                .flat_map(|(l, row)| row.iter().enumerate().map(move |(r, &c)| (l, r, c))),
            true,
        )
    }

    fn build(
        m: usize,
        edges: impl Iterator<Item = (usize, usize, i64)>,
        costed: bool,
    ) -> Result<Self, GraphError> {
        if m == 0 {
            return Err(GraphError::ZeroOrder);
        }
        let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); m];
        for (l, r, c) in edges {
            if l >= m {
                return Err(GraphError::IndexOutOfRange { side: Side::Left, index: l, order: m });
            }
            if r >= m {
                return Err(GraphError::IndexOutOfRange { side: Side::Right, index: r, order: m });
            }
            if c < 0 {
                return Err(GraphError::NegativeCost { left: l, right: r, cost: c });
            }
            adj[l].push((r, c));
        }
        let mut plain = Vec::with_capacity(m);
        let mut costs = Vec::with_capacity(m);
        for (l, mut list) in adj.into_iter().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(GraphError::DuplicateEdge { left: l, right: w[0].0 });
            }
            plain.push(list.iter().map(|&(r, _)| r).collect());
            costs.push(list.iter().map(|&(_, c)| c).collect());
        }
        Ok(BipartiteGraph { m, adj: plain, costs: costed.then_some(costs) })
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, left: usize) -> &[usize] {
        &self.adj[left]
    }

    pub fn has_costs(&self) -> bool {
        self.costs.is_some()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, left: usize, right: usize) -> bool {
        self.adj[left].binary_search(&right).is_ok()
    }

    /// Cost of edge (left, right); None if the edge is absent or uncosted.
    pub fn cost(&self, left: usize, right: usize) -> Option<i64> {
        let costs = self.costs.as_ref()?;
        let pos = self.adj[left].binary_search(&right).ok()?;
        Some(costs[left][pos])
    }

    /// All edges as (left, right) pairs in (left, right) order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(l, list)| list.iter().map(move |&r| (l, r)))
    }

    fn costed_neighbors(&self, left: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        let costs = self.costs.as_ref().expect("costed graph");
        self.adj[left].iter().copied().zip(costs[left].iter().copied())
    }
}

/// A permutation of 0..M: left node `i` is matched to right node `sigma(i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    sigma: Vec<usize>,
    total_cost: Option<i64>,
}

impl Assignment {
    pub fn new(sigma: Vec<usize>) -> Result<Self, GraphError> {
        let m = sigma.len();
        let mut seen = vec![false; m];
        for &j in &sigma {
            if j >= m || seen[j] {
                return Err(GraphError::NotAPermutation);
            }
            seen[j] = true;
        }
        Ok(Assignment { sigma, total_cost: None })
    }

    pub fn with_cost(sigma: Vec<usize>, total_cost: i64) -> Result<Self, GraphError> {
        let mut a = Self::new(sigma)?;
        a.total_cost = Some(total_cost);
        Ok(a)
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// Right node matched to left node `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.sigma[i]
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn total_cost(&self) -> Option<i64> {
        self.total_cost
    }
}

/// Peeling result: either the unique perfect matching together with the
/// order edges were forced, or the residual graph left when every remaining
/// node has degree at least two (at least two perfect matchings exist).
#[derive(Debug, Clone)]
pub enum PmaOutcome {
    Unique {
        assignment: Assignment,
        /// Edges in the order the peel added them to the matching.
        edge_order: Vec<(usize, usize)>,
    },
    NotUnique {
        /// Same order as the input; peeled nodes have degree zero here.
        residual: BipartiteGraph,
    },
}

#[derive(Debug, Clone)]
pub struct Pma {
    pub outcome: PmaOutcome,
    /// Adjacency entries touched while peeling; bounded by 4E.
    pub edge_visits: usize,
}

/// Peeling Matching Algorithm: repeatedly match and remove degree-one nodes.
///
/// The input must contain at least one perfect matching; a stranded
/// degree-zero node surfaces as [`MatchingError::PreconditionBreach`].
///
/// The schedule is deterministic and pinned by regression fixtures: a FIFO
/// queue seeded with degree-one left nodes in index order, then degree-one
/// right nodes in index order; dequeued nodes already removed are skipped;
/// nodes whose degree drops to one are enqueued at removal time.
pub fn pma(g: &BipartiteGraph) -> Result<Pma, MatchingError> {
    let m = g.order();
    // node encoding: left i -> i, right j -> m + j
    let decode = |node: usize| {
        if node < m {
            (Side::Left, node)
        } else {
            (Side::Right, node - m)
        }
    };
    let mut radj: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (l, r) in g.edges() {
        radj[r].push(l);
    }
    let mut degree = vec![0usize; 2 * m];
    for l in 0..m {
        degree[l] = g.neighbors(l).len();
    }
    for r in 0..m {
        degree[m + r] = radj[r].len();
    }
    if let Some(node) = (0..2 * m).find(|&v| degree[v] == 0) {
        let (side, index) = decode(node);
        return Err(MatchingError::PreconditionBreach { side, index });
    }

    let mut alive = vec![true; 2 * m];
    let mut queue: VecDeque<usize> = (0..2 * m).filter(|&v| degree[v] == 1).collect();
    let mut edge_order: Vec<(usize, usize)> = Vec::new();
    let mut match_of_left = vec![usize::MAX; m];
    let mut visits = 0usize;

    while let Some(u) = queue.pop_front() {
        if !alive[u] {
            continue;
        }
        if degree[u] == 0 {
            let (side, index) = decode(u);
            return Err(MatchingError::PreconditionBreach { side, index });
        }
        debug_assert_eq!(degree[u], 1);
        let (u_side, u_idx) = decode(u);
        let u_list: &[usize] = match u_side {
            Side::Left => g.neighbors(u_idx),
            Side::Right => &radj[u_idx],
        };
        let partner_idx = {
            let mut found = usize::MAX;
            for &w in u_list {
                visits += 1;
                let w_node = match u_side {
                    Side::Left => m + w,
                    Side::Right => w,
                };
                if alive[w_node] {
                    found = w;
                    break;
                }
            }
            debug_assert_ne!(found, usize::MAX);
            found
        };
        let (left, right, v) = match u_side {
            Side::Left => (u_idx, partner_idx, m + partner_idx),
            Side::Right => (partner_idx, u_idx, partner_idx),
        };
        edge_order.push((left, right));
        match_of_left[left] = right;
        alive[u] = false;
        alive[v] = false;
        degree[u] = 0;
        degree[v] = 0;
        let v_list: &[usize] = if v < m { g.neighbors(v) } else { &radj[v - m] };
        for &w in v_list {
            visits += 1;
            let w_node = if v < m { m + w } else { w };
            if alive[w_node] {
                degree[w_node] -= 1;
                if degree[w_node] == 1 {
                    queue.push_back(w_node);
                }
            }
        }
    }

    let outcome = if edge_order.len() == m {
        let assignment = Assignment::new(match_of_left).expect("peel yields a permutation");
        PmaOutcome::Unique { assignment, edge_order }
    } else {
        let residual_edges: Vec<(usize, usize)> = g
            .edges()
            .filter(|&(l, r)| alive[l] && alive[m + r])
            .collect();
        debug_assert!(residual_edges
            .iter()
            .flat_map(|&(l, r)| [l, m + r])
            .all(|v| degree[v] >= 2));
        let residual =
            BipartiteGraph::from_edges(m, residual_edges).expect("residual edges are valid");
        PmaOutcome::NotUnique { residual }
    };
    Ok(Pma { outcome, edge_visits: visits })
}

/// Maximum-matching result: a perfect matching as an [`Assignment`], or the
/// maximum matching found when no perfect one exists.
#[derive(Debug, Clone)]
pub enum MaxMatching {
    Perfect(Assignment),
    Deficient { size: usize, pairs: Vec<(usize, usize)> },
}

/// Hopcroft-Karp maximum matching in O(E sqrt(M)).
pub fn hopcroft_karp(g: &BipartiteGraph) -> MaxMatching {
    let m = g.order();
    let mut match_l = vec![usize::MAX; m];
    let mut match_r = vec![usize::MAX; m];
    let mut size = 0usize;

    loop {
        // BFS layering from free left nodes.
        let mut dist = vec![usize::MAX; m];
        let mut q: VecDeque<usize> = VecDeque::new();
        for l in 0..m {
            if match_l[l] == usize::MAX {
                dist[l] = 0;
                q.push_back(l);
            }
        }
        let mut reachable_free_right = false;
        while let Some(l) = q.pop_front() {
            for &r in g.neighbors(l) {
                let l2 = match_r[r];
                if l2 == usize::MAX {
                    reachable_free_right = true;
                } else if dist[l2] == usize::MAX {
                    dist[l2] = dist[l] + 1;
                    q.push_back(l2);
                }
            }
        }
        if !reachable_free_right {
            break;
        }
        fn augment(
            g: &BipartiteGraph,
            l: usize,
            dist: &mut [usize],
            match_l: &mut [usize],
            match_r: &mut [usize],
        ) -> bool {
            let d = dist[l];
            dist[l] = usize::MAX; // visited
            for &r in g.neighbors(l) {
                let l2 = match_r[r];
                let ok = if l2 == usize::MAX {
                    true
                } else {
                    dist[l2] == d + 1 && augment(g, l2, dist, match_l, match_r)
                };
                if ok {
                    match_l[l] = r;
                    match_r[r] = l;
                    return true;
                }
            }
            false
        }
        for l in 0..m {
            if match_l[l] == usize::MAX
                && dist[l] == 0
                && augment(g, l, &mut dist, &mut match_l, &mut match_r)
            {
                size += 1;
            }
        }
    }

    if size == m {
        MaxMatching::Perfect(Assignment::new(match_l).expect("perfect matching is a permutation"))
    } else {
        let pairs = match_l
            .iter()
            .enumerate()
            .filter(|&(_, &r)| r != usize::MAX)
            .map(|(l, &r)| (l, r))
            .collect();
        MaxMatching::Deficient { size, pairs }
    }
}

/// True iff `matching` is the unique perfect matching of `g`.
///
/// Orient matched edges right-to-left and unmatched edges left-to-right; a
/// second perfect matching exists iff that digraph has a cycle (an
/// alternating cycle). Cycle detection is a Kahn peel in O(M + E).
pub fn is_unique_matching(g: &BipartiteGraph, matching: &Assignment) -> Result<bool, MatchingError> {
    let m = g.order();
    assert_eq!(matching.len(), m, "matching order mismatch");
    for l in 0..m {
        if !g.has_edge(l, matching.apply(l)) {
            return Err(MatchingError::NotAMatching { left: l, right: matching.apply(l) });
        }
    }
    let mut matched_left_of = vec![usize::MAX; m];
    for l in 0..m {
        matched_left_of[matching.apply(l)] = l;
    }
    // nodes: left l -> l, right r -> m + r
    let mut indegree = vec![0usize; 2 * m];
    for (l, r) in g.edges() {
        if matching.apply(l) == r {
            indegree[l] += 1; // m+r -> l
        } else {
            indegree[m + r] += 1; // l -> m+r
        }
    }
    let mut q: VecDeque<usize> = (0..2 * m).filter(|&v| indegree[v] == 0).collect();
    let mut peeled = 0usize;
    while let Some(v) = q.pop_front() {
        peeled += 1;
        if v < m {
            // left node: out-edges to unmatched neighbors
            for &r in g.neighbors(v) {
                if matching.apply(v) != r {
                    indegree[m + r] -= 1;
                    if indegree[m + r] == 0 {
                        q.push_back(m + r);
                    }
                }
            }
        } else {
            // right node: single out-edge along its matched edge
            let l = matched_left_of[v - m];
            indegree[l] -= 1;
            if indegree[l] == 0 {
                q.push_back(l);
            }
        }
    }
    Ok(peeled == 2 * m)
}

const INF: i64 = i64::MAX / 4;

/// Hungarian method: minimum-cost assignment for a full M x M cost matrix in
/// O(M^3), exact in integer arithmetic. Output is deterministic for a fixed
/// input; ties are broken by the internal augmenting order.
pub fn hungarian(costs: &[Vec<i64>]) -> Result<Assignment, GraphError> {
    let m = costs.len();
    if m == 0 {
        return Err(GraphError::ZeroOrder);
    }
    for (l, row) in costs.iter().enumerate() {
        if row.len() != m {
            return Err(GraphError::NonSquareMatrix);
        }
        for (r, &c) in row.iter().enumerate() {
            if c < 0 {
                return Err(GraphError::NegativeCost { left: l, right: r, cost: c });
            }
        }
    }
    // Shortest-augmenting-path formulation with row/column potentials;
    // arrays are 1-indexed with column 0 as the virtual start.
    let mut u = vec![0i64; m + 1];
    let mut v = vec![0i64; m + 1];
    let mut p = vec![0usize; m + 1]; // p[j] = row matched to column j
    let mut way = vec![0usize; m + 1];
    for i in 1..=m {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![INF; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = INF;
            let mut j1 = 0usize;
            for j in 1..=m {
                if !used[j] {
                    let cur = costs[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut sigma = vec![0usize; m];
    for j in 1..=m {
        sigma[p[j] - 1] = j - 1;
    }
    let total: i64 = sigma.iter().enumerate().map(|(i, &j)| costs[i][j]).sum();
    Assignment::with_cost(sigma, total)
}

/// Result of [`sparse_min_cost_matching`]. Infeasibility is a value, not an
/// error: radius-pruned graphs can legitimately disconnect an output.
#[derive(Debug, Clone)]
pub enum SparseMatching {
    Perfect(Assignment),
    Infeasible { max_matching: usize },
}

/// Minimum-cost perfect matching on a sparse costed graph via successive
/// shortest augmenting paths with node potentials (reduced costs stay
/// non-negative, so each phase is a Dijkstra).
pub fn sparse_min_cost_matching(g: &BipartiteGraph) -> Result<SparseMatching, GraphError> {
    if !g.has_costs() {
        return Err(GraphError::MissingCosts);
    }
    let m = g.order();
    let mut pot_l = vec![0i64; m];
    let mut pot_r = vec![0i64; m];
    let mut match_l = vec![usize::MAX; m];
    let mut match_r = vec![usize::MAX; m];
    let mut matched = 0usize;

    for s in 0..m {
        // Dijkstra over right nodes using reduced costs
        // rc(l, r) = cost(l, r) - pot_l[l] - pot_r[r] >= 0.
        let mut dist = vec![INF; m];
        let mut reached_from = vec![usize::MAX; m]; // left node that reached right r
        let mut done = vec![false; m];
        let mut heap: BinaryHeap<Reverse<(i64, usize)>> = BinaryHeap::new();
        for (r, c) in g.costed_neighbors(s) {
            let rc = c - pot_l[s] - pot_r[r];
            debug_assert!(rc >= 0);
            if rc < dist[r] {
                dist[r] = rc;
                reached_from[r] = s;
                heap.push(Reverse((rc, r)));
            }
        }
        let mut target = usize::MAX;
        while let Some(Reverse((d, r))) = heap.pop() {
            if done[r] || d > dist[r] {
                continue;
            }
            done[r] = true;
            if match_r[r] == usize::MAX {
                target = r;
                break;
            }
            let l = match_r[r]; // continue along the matched (tight) edge
            for (r2, c) in g.costed_neighbors(l) {
                if done[r2] {
                    continue;
                }
                let rc = c - pot_l[l] - pot_r[r2];
                debug_assert!(rc >= 0);
                let nd = d + rc;
                if nd < dist[r2] {
                    dist[r2] = nd;
                    reached_from[r2] = l;
                    heap.push(Reverse((nd, r2)));
                }
            }
        }
        if target == usize::MAX {
            continue; // s stays unmatched; some maximum matching omits it
        }
        // Update potentials so augmenting-path edges become tight.
        let reach = dist[target];
        for r in 0..m {
            if dist[r] < INF {
                let capped = dist[r].min(reach);
                pot_r[r] -= reach - capped;
                if match_r[r] != usize::MAX {
                    let l = match_r[r];
                    pot_l[l] += reach - capped;
                }
            }
        }
        pot_l[s] += reach;
        // Augment along the alternating path back to s.
        let mut r = target;
        loop {
            let l = reached_from[r];
            let prev = core::mem::replace(&mut match_l[l], r);
            match_r[r] = l;
            if l == s {
                break;
            }
            r = prev;
        }
        matched += 1;
    }

    if matched < m {
        return Ok(SparseMatching::Infeasible { max_matching: matched });
    }
    let total: i64 = match_l
        .iter()
        .enumerate()
        .map(|(l, &r)| g.cost(l, r).expect("matched edge exists"))
        .sum();
    Ok(SparseMatching::Perfect(
        Assignment::with_cost(match_l, total).expect("perfect matching is a permutation"),
    ))
}

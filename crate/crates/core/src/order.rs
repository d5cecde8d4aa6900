//! Minimum-order left-saturating matchings.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{is_l_saturating, matching_order, LeftOrdering, Matching, MatchingOrder, OrderedBipartiteGraph};
use crate::greedy::{run_interleaved_traced, run_p_greedy, run_pbt_greedy, InterleavingPolicy};

pub use crate::oracle::brute_force_min_order;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinOrderResult {
    pub order: MatchingOrder,
    /// A matching of that order; `None` when the order is infinite.
    pub matching: Option<Matching>,
    /// A left ordering whose greedy matching attains the order.
    pub witness_ordering: Option<LeftOrdering>,
}

impl MinOrderResult {
    pub(crate) fn infinite() -> Self {
        MinOrderResult {
            order: MatchingOrder::Infinite,
            matching: None,
            witness_ordering: None,
        }
    }
}

/// Maximum matching between all left vertices and a growing prefix of the
/// right preference list.
struct PrefixMatcher<'g> {
    g: &'g OrderedBipartiteGraph,
    active: usize,
    left_mate: Vec<Option<usize>>,
    right_mate: Vec<Option<usize>>,
    visited: Vec<bool>,
    size: usize,
}

impl<'g> PrefixMatcher<'g> {
    fn new(g: &'g OrderedBipartiteGraph, active: usize) -> Self {
        let mut pm = PrefixMatcher {
            g,
            active,
            left_mate: vec![None; g.left_len()],
            right_mate: vec![None; g.right_len()],
            visited: vec![false; g.right_len().max(g.left_len())],
            size: 0,
        };
        for x in 0..g.left_len() {
            pm.visited.fill(false);
            if pm.augment_from_left(x) {
                pm.size += 1;
            }
        }
        pm
    }

    // visited marks right vertices
    fn augment_from_left(&mut self, x: usize) -> bool {
        for &y in self.g.left_neighbors(x) {
            if y >= self.active {
                break;
            }
            if std::mem::replace(&mut self.visited[y], true) {
                continue;
            }
            let free = match self.right_mate[y] {
                None => true,
                Some(x2) => self.augment_from_left(x2),
            };
            if free {
                self.left_mate[x] = Some(y);
                self.right_mate[y] = Some(x);
                return true;
            }
        }
        false
    }

    // visited marks left vertices
    fn augment_from_right(&mut self, y: usize) -> bool {
        for &x in self.g.right_neighbors(y) {
            if std::mem::replace(&mut self.visited[x], true) {
                continue;
            }
            let free = match self.left_mate[x] {
                None => true,
                Some(y2) => self.augment_from_right(y2),
            };
            if free {
                self.left_mate[x] = Some(y);
                self.right_mate[y] = Some(x);
                return true;
            }
        }
        false
    }

    /// Activates the next right vertex. One search from it suffices: a
    /// single new vertex raises the maximum by at most one, and any
    /// augmenting path must end at it.
    fn push_right(&mut self) {
        let y = self.active;
        self.active += 1;
        self.visited.fill(false);
        if self.augment_from_right(y) {
            self.size += 1;
        }
    }

    fn matching(&self) -> Matching {
        Matching::from_pairs_unchecked(self.left_mate.iter().enumerate().filter_map(|(x, y)| y.map(|y| (x, y))))
    }
}

/// Smallest `k` such that the first `k` right vertices admit a
/// left-saturating matching, with a matching and a greedy witness ordering.
pub fn min_order_saturating(g: &OrderedBipartiteGraph) -> MinOrderResult {
    let n_left = g.left_len();
    if n_left > g.right_len() {
        return MinOrderResult::infinite();
    }
    // Fewer than |L| right vertices can never saturate L.
    let mut pm = PrefixMatcher::new(g, n_left);
    while pm.size < n_left && pm.active < g.right_len() {
        pm.push_right();
    }
    if pm.size < n_left {
        return MinOrderResult::infinite();
    }
    let matching = pm.matching();
    let witness = ordering_from_matching(g, &matching).expect("matching saturates L");
    MinOrderResult {
        order: MatchingOrder::Finite(pm.active),
        matching: Some(matching),
        witness_ordering: Some(witness),
    }
}

/// Orders left vertices by the preference rank of their partners in `m`.
pub fn ordering_from_matching(g: &OrderedBipartiteGraph, m: &Matching) -> Result<LeftOrdering> {
    if !is_l_saturating(g, m)? {
        return Err(Error::NotSaturating);
    }
    let mut by_right: Vec<(usize, usize)> = m.pairs().iter().map(|&(x, y)| (y, x)).collect();
    by_right.sort_unstable();
    Ok(LeftOrdering::new(by_right.into_iter().map(|(_, x)| x).collect()))
}

/// The greedy matching of `g` after replacing the left preferences by `ord`.
pub fn greedy_under_ordering(g: &OrderedBipartiteGraph, ord: &LeftOrdering) -> Result<Matching> {
    let reordered = g.reorder_left(ord)?;
    let m = run_p_greedy(&reordered);
    Ok(Matching::from_pairs_unchecked(
        m.pairs().iter().map(|&(x, y)| (ord.as_slice()[x], y)),
    ))
}

/// Like [`greedy_under_ordering`], also returning the inserted edges in the
/// order the left-driven procedure added them (original indices).
pub fn greedy_under_ordering_traced(
    g: &OrderedBipartiteGraph,
    ord: &LeftOrdering,
) -> Result<(Matching, Vec<(usize, usize)>)> {
    let reordered = g.reorder_left(ord)?;
    let (_, trace) = run_interleaved_traced(&reordered, InterleavingPolicy::FixedL);
    let steps: Vec<_> = trace.iter().map(|s| (ord.as_slice()[s.left], s.right)).collect();
    Ok((Matching::from_pairs_unchecked(steps.iter().copied()), steps))
}

/// Order of the PBT greedy matching under the given orders; infinite
/// exactly when no left-saturating matching with the PBT property exists.
pub fn min_order_pbt(g: &OrderedBipartiteGraph) -> MinOrderResult {
    let m = run_pbt_greedy(g);
    match matching_order(g, &m).expect("greedy output is a matching") {
        MatchingOrder::Infinite => MinOrderResult::infinite(),
        order => MinOrderResult {
            order,
            matching: Some(m),
            witness_ordering: Some(LeftOrdering::identity(g.left_len())),
        },
    }
}

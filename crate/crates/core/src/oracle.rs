//! Brute-force reference implementations.
//!
//! Everything here works straight from the definitions (pairwise adjacency
//! tests, exhaustive enumeration) and shares no code with the optimized
//! procedures it is used to check.

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::graph::{LeftOrdering, Matching, MatchingOrder, OrderedBipartiteGraph};
use crate::order::MinOrderResult;
use crate::teaching::{ConceptClass, Sample};

/// Edge-count ceiling for exhaustive matching enumeration.
pub const MAX_ORACLE_EDGES: usize = 24;

fn check_budget(g: &OrderedBipartiteGraph) -> Result<()> {
    if g.edge_count() > MAX_ORACLE_EDGES {
        return Err(Error::EdgeBudgetExceeded {
            edges: g.edge_count(),
            limit: MAX_ORACLE_EDGES,
        });
    }
    Ok(())
}

/// Every matching of `g` exactly once, by include/exclude recursion over
/// the edge list with matched-vertex masks.
pub fn all_matchings(g: &OrderedBipartiteGraph) -> Result<Vec<Matching>> {
    check_budget(g)?;
    let mut edges = Vec::new();
    for x in 0..g.left_len() {
        for y in 0..g.right_len() {
            if g.is_adjacent(x, y) {
                edges.push((x, y));
            }
        }
    }
    let mut out = Vec::new();
    let mut left_used = vec![false; g.left_len()];
    let mut right_used = vec![false; g.right_len()];
    enumerate(&edges, 0, &mut left_used, &mut right_used, &mut Vec::new(), &mut out);
    Ok(out)
}

fn enumerate(
    edges: &[(usize, usize)],
    i: usize,
    left_used: &mut [bool],
    right_used: &mut [bool],
    current: &mut Vec<(usize, usize)>,
    out: &mut Vec<Matching>,
) {
    let Some(&(x, y)) = edges.get(i) else {
        out.push(Matching::from_pairs_unchecked(current.iter().copied()));
        return;
    };
    enumerate(edges, i + 1, left_used, right_used, current, out);
    if !left_used[x] && !right_used[y] {
        left_used[x] = true;
        right_used[y] = true;
        current.push((x, y));
        enumerate(edges, i + 1, left_used, right_used, current, out);
        current.pop();
        left_used[x] = false;
        right_used[y] = false;
    }
}

fn saturates_left(g: &OrderedBipartiteGraph, m: &Matching) -> bool {
    (0..g.left_len()).all(|x| m.pairs().iter().any(|&(l, _)| l == x))
}

fn order_of(g: &OrderedBipartiteGraph, m: &Matching) -> MatchingOrder {
    if !saturates_left(g, m) {
        return MatchingOrder::Infinite;
    }
    // smallest k with every y_{k+1}.. unmatched
    let k = (0..=g.right_len())
        .find(|&k| m.pairs().iter().all(|&(_, y)| y < k))
        .expect("k = |R| always qualifies");
    MatchingOrder::Finite(k)
}

fn pbt_by_definition(g: &OrderedBipartiteGraph, m: &Matching) -> bool {
    if !saturates_left(g, m) {
        return false;
    }
    // For every (x, y) in m and every x' preferred over x: x' is not adjacent to y.
    m.pairs()
        .iter()
        .all(|&(x, y)| (0..x).all(|better| !g.is_adjacent(better, y)))
}

/// All left-saturating matchings with the PBT property.
pub fn all_pbt_matchings(g: &OrderedBipartiteGraph) -> Result<Vec<Matching>> {
    Ok(all_matchings(g)?
        .into_iter()
        .filter(|m| pbt_by_definition(g, m))
        .collect())
}

/// Minimum order over all enumerated matchings.
pub fn brute_force_min_order(g: &OrderedBipartiteGraph) -> Result<MinOrderResult> {
    let best = all_matchings(g)?
        .into_iter()
        .map(|m| (order_of(g, &m), m))
        .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    Ok(match best {
        Some((order @ MatchingOrder::Finite(_), m)) => {
            let mut by_right: Vec<_> = m.pairs().iter().map(|&(x, y)| (y, x)).collect();
            by_right.sort_unstable();
            MinOrderResult {
                order,
                witness_ordering: Some(LeftOrdering::new(by_right.into_iter().map(|(_, x)| x).collect())),
                matching: Some(m),
            }
        }
        _ => MinOrderResult::infinite(),
    })
}

/// Successors in the greedy rewriting system, recomputed from the two arc
/// conditions with plain set scans.
fn successors_by_definition(g: &OrderedBipartiteGraph, m: &Matching) -> Vec<Matching> {
    let left_free: Vec<bool> = (0..g.left_len())
        .map(|x| m.pairs().iter().all(|&(l, _)| l != x))
        .collect();
    let right_free: Vec<bool> = (0..g.right_len())
        .map(|y| m.pairs().iter().all(|&(_, r)| r != y))
        .collect();
    let l_m: Vec<usize> = (0..g.left_len())
        .filter(|&x| left_free[x] && (0..g.right_len()).any(|y| right_free[y] && g.is_adjacent(x, y)))
        .collect();
    let r_m: Vec<usize> = (0..g.right_len())
        .filter(|&y| right_free[y] && (0..g.left_len()).any(|x| left_free[x] && g.is_adjacent(x, y)))
        .collect();
    if l_m.is_empty() || r_m.is_empty() {
        return Vec::new();
    }
    let x1 = l_m[0];
    let y1 = *r_m
        .iter()
        .find(|&&y| g.is_adjacent(x1, y))
        .expect("x1 has a free neighbor");
    let y2 = r_m[0];
    let x2 = *l_m
        .iter()
        .find(|&&x| g.is_adjacent(x, y2))
        .expect("y2 has a free neighbor");
    let extend = |x: usize, y: usize| Matching::from_pairs_unchecked(m.pairs().iter().copied().chain([(x, y)]));
    let mut out = vec![extend(x1, y1)];
    if (x1, y1) != (x2, y2) {
        out.push(extend(x2, y2));
    }
    out
}

/// Terminal matchings of all maximal rewrite paths from the empty matching.
pub fn all_greedy_paths_sinks(g: &OrderedBipartiteGraph, max_states: usize) -> Result<BTreeSet<Matching>> {
    let mut sinks = BTreeSet::new();
    let mut seen = HashSet::new();
    let mut stack = vec![Matching::empty()];
    seen.insert(Matching::empty());
    while let Some(m) = stack.pop() {
        let next = successors_by_definition(g, &m);
        if next.is_empty() {
            sinks.insert(m);
            continue;
        }
        for n in next {
            if seen.insert(n.clone()) {
                if seen.len() > max_states {
                    return Err(Error::StateBudgetExceeded {
                        reached: seen.len(),
                        budget: max_states,
                    });
                }
                stack.push(n);
            }
        }
    }
    Ok(sinks)
}

/// Greedy cost of a concept ordering against a given sample sequence:
/// each concept in turn takes the first free sample it agrees with, testing
/// every example label directly. Returns the size of the last sample taken.
pub fn greedy_cost_by_definition(cc: &ConceptClass, concept_order: &LeftOrdering, samples: &[Sample]) -> Result<usize> {
    concept_order.check_len(cc.len())?;
    let examples: Vec<Vec<(usize, bool)>> = samples.iter().map(Sample::examples).collect();
    let mut used = vec![false; samples.len()];
    let mut last = None;
    for &ci in concept_order.as_slice() {
        let c = cc.concepts()[ci];
        let j = (0..samples.len())
            .find(|&j| !used[j] && examples[j].iter().all(|&(p, b)| (c >> p & 1 == 1) == b))
            .ok_or_else(|| Error::InvalidConceptClass("sample list lacks a concept's full sample".into()))?;
        used[j] = true;
        last = last.max(Some(j));
    }
    Ok(last.map_or(0, |j| examples[j].len()))
}

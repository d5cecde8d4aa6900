//! Greedy matching procedures.
//!
//! All runs share one state that maintains the two frontiers
//! incrementally: a vertex leaves its frontier when it is matched or when its
//! last free neighbor is matched, and it never comes back. The frontier tops
//! and the per-vertex neighbor cursors therefore only move forward, and a
//! full run touches every edge a constant number of times.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Matching, OrderedBipartiteGraph};

/// How a two-way choice between the arc rules is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "seed")]
pub enum InterleavingPolicy {
    FixedL,
    FixedR,
    Alternating,
    SeededRandom(u64),
}

/// Which rule produced an inserted edge. `Both` when the two rules agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArcRule {
    L,
    R,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyStep {
    pub rule: ArcRule,
    pub left: usize,
    pub right: usize,
}

struct GreedyState<'g> {
    g: &'g OrderedBipartiteGraph,
    left_mate: Vec<Option<usize>>,
    right_mate: Vec<Option<usize>>,
    left_free_nbrs: Vec<usize>,
    right_free_nbrs: Vec<usize>,
    left_top: usize,
    right_top: usize,
    left_cursor: Vec<usize>,
    right_cursor: Vec<usize>,
    pairs: Vec<(usize, usize)>,
}

impl<'g> GreedyState<'g> {
    fn new(g: &'g OrderedBipartiteGraph) -> Self {
        GreedyState {
            g,
            left_mate: vec![None; g.left_len()],
            right_mate: vec![None; g.right_len()],
            left_free_nbrs: (0..g.left_len()).map(|x| g.left_neighbors(x).len()).collect(),
            right_free_nbrs: (0..g.right_len()).map(|y| g.right_neighbors(y).len()).collect(),
            left_top: 0,
            right_top: 0,
            left_cursor: vec![0; g.left_len()],
            right_cursor: vec![0; g.right_len()],
            pairs: Vec::new(),
        }
    }

    fn top_left(&mut self) -> Option<usize> {
        while self.left_top < self.left_mate.len() {
            let x = self.left_top;
            if self.left_mate[x].is_none() && self.left_free_nbrs[x] > 0 {
                return Some(x);
            }
            self.left_top += 1;
        }
        None
    }

    fn top_right(&mut self) -> Option<usize> {
        while self.right_top < self.right_mate.len() {
            let y = self.right_top;
            if self.right_mate[y].is_none() && self.right_free_nbrs[y] > 0 {
                return Some(y);
            }
            self.right_top += 1;
        }
        None
    }

    fn best_free_right_of(&mut self, x: usize) -> Option<usize> {
        let adj = self.g.left_neighbors(x);
        let cursor = &mut self.left_cursor[x];
        while *cursor < adj.len() && self.right_mate[adj[*cursor]].is_some() {
            *cursor += 1;
        }
        adj.get(*cursor).copied()
    }

    fn best_free_left_of(&mut self, y: usize) -> Option<usize> {
        let adj = self.g.right_neighbors(y);
        let cursor = &mut self.right_cursor[y];
        while *cursor < adj.len() && self.left_mate[adj[*cursor]].is_some() {
            *cursor += 1;
        }
        adj.get(*cursor).copied()
    }

    /// Arcs available under the L- and R-condition, or `None` at a sink.
    fn arcs(&mut self) -> Option<((usize, usize), (usize, usize))> {
        let x = self.top_left()?;
        let y = self.top_right().expect("frontiers are empty together");
        let l_arc = (
            x,
            self.best_free_right_of(x).expect("frontier vertex has a free neighbor"),
        );
        let r_arc = (
            self.best_free_left_of(y).expect("frontier vertex has a free neighbor"),
            y,
        );
        Some((l_arc, r_arc))
    }

    fn insert(&mut self, x: usize, y: usize) {
        debug_assert!(self.left_mate[x].is_none() && self.right_mate[y].is_none());
        debug_assert!(self.g.is_adjacent(x, y));
        self.left_mate[x] = Some(y);
        self.right_mate[y] = Some(x);
        for &y2 in self.g.left_neighbors(x) {
            self.right_free_nbrs[y2] -= 1;
        }
        for &x2 in self.g.right_neighbors(y) {
            self.left_free_nbrs[x2] -= 1;
        }
        self.pairs.push((x, y));
    }

    fn finish(self) -> Matching {
        Matching::from_pairs_unchecked(self.pairs)
    }
}

/// Left-driven greedy procedure: repeatedly match the most preferred left
/// frontier vertex with its most preferred free neighbor.
pub fn run_p_greedy(g: &OrderedBipartiteGraph) -> Matching {
    run_interleaved(g, InterleavingPolicy::FixedL)
}

/// The right-driven counterpart of [`run_p_greedy`].
pub fn run_p_greedy_prime(g: &OrderedBipartiteGraph) -> Matching {
    run_interleaved(g, InterleavingPolicy::FixedR)
}

pub fn run_interleaved(g: &OrderedBipartiteGraph, policy: InterleavingPolicy) -> Matching {
    run_interleaved_traced(g, policy).0
}

/// Follows the greedy rewriting arcs from the empty matching, letting
/// `policy` pick whenever the two rules disagree. Returns the sink reached
/// and the sequence of inserted edges.
pub fn run_interleaved_traced(g: &OrderedBipartiteGraph, policy: InterleavingPolicy) -> (Matching, Vec<GreedyStep>) {
    let mut state = GreedyState::new(g);
    let mut trace = Vec::new();
    let mut rng = match policy {
        InterleavingPolicy::SeededRandom(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut prefer_l = true;
    while let Some((l_arc, r_arc)) = state.arcs() {
        let rule = if l_arc == r_arc {
            ArcRule::Both
        } else {
            let take_l = match policy {
                InterleavingPolicy::FixedL => true,
                InterleavingPolicy::FixedR => false,
                InterleavingPolicy::Alternating => {
                    let t = prefer_l;
                    prefer_l = !prefer_l;
                    t
                }
                InterleavingPolicy::SeededRandom(_) => rng.as_mut().expect("seeded").gen_bool(0.5),
            };
            if take_l {
                ArcRule::L
            } else {
                ArcRule::R
            }
        };
        let (x, y) = if rule == ArcRule::R { r_arc } else { l_arc };
        state.insert(x, y);
        trace.push(GreedyStep {
            rule,
            left: x,
            right: y,
        });
    }
    (state.finish(), trace)
}

/// Greedy procedure restricted to partners whose most preferred left
/// neighbor is the vertex being matched. Stops at the first left frontier
/// vertex without such a partner, so the result may leave left vertices
/// unmatched.
pub fn run_pbt_greedy(g: &OrderedBipartiteGraph) -> Matching {
    let mut state = GreedyState::new(g);
    while let Some(x) = state.top_left() {
        let candidate = g
            .left_neighbors(x)
            .iter()
            .copied()
            .find(|&y| state.right_mate[y].is_none() && g.right_neighbors(y).first() == Some(&x));
        match candidate {
            Some(y) => state.insert(x, y),
            None => break,
        }
    }
    state.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{has_pbt_property, is_l_saturating};

    fn g(l: usize, r: usize, edges: &[(usize, usize)]) -> OrderedBipartiteGraph {
        OrderedBipartiteGraph::from_edges(l, r, edges).unwrap()
    }

    #[test]
    fn edgeless_graph_gives_empty_matching() {
        let e = g(3, 2, &[]);
        assert!(run_p_greedy(&e).is_empty());
        assert!(run_p_greedy_prime(&e).is_empty());
        assert!(run_pbt_greedy(&e).is_empty());
    }

    #[test]
    fn p_greedy_examples() {
        let a = g(2, 3, &[(0, 1), (0, 2), (1, 1)]);
        assert_eq!(run_p_greedy(&a).pairs(), &[(0, 1)]);
        let b = g(2, 2, &[(0, 0), (1, 0), (1, 1)]);
        assert_eq!(run_p_greedy(&b).pairs(), &[(0, 0), (1, 1)]);
    }

    #[test]
    fn prime_on_crossing_graph() {
        let c = g(2, 2, &[(0, 1), (1, 0)]);
        let (m, trace) = run_interleaved_traced(&c, InterleavingPolicy::FixedR);
        assert_eq!(m.pairs(), &[(0, 1), (1, 0)]);
        assert_eq!(
            trace[0],
            GreedyStep {
                rule: ArcRule::R,
                left: 1,
                right: 0
            }
        );
        assert_eq!(m, run_p_greedy(&c));
    }

    #[test]
    fn policies_agree_on_crossing_graph() {
        let c = g(2, 2, &[(0, 1), (1, 0)]);
        let expected = run_p_greedy(&c);
        for policy in [
            InterleavingPolicy::Alternating,
            InterleavingPolicy::SeededRandom(1),
            InterleavingPolicy::SeededRandom(2),
        ] {
            assert_eq!(run_interleaved(&c, policy), expected);
        }
    }

    #[test]
    fn pbt_greedy_examples() {
        let a = g(2, 2, &[(0, 0), (1, 0), (1, 1)]);
        let m = run_pbt_greedy(&a);
        assert_eq!(m.pairs(), &[(0, 0), (1, 1)]);
        assert!(has_pbt_property(&a, &m).unwrap());

        let b = g(2, 3, &[(0, 1), (0, 2), (1, 1)]);
        let m = run_pbt_greedy(&b);
        assert_eq!(m.pairs(), &[(0, 1)]);
        assert!(!is_l_saturating(&b, &m).unwrap());
    }

    #[test]
    fn pbt_greedy_stops_at_blocked_vertex() {
        let h = g(3, 2, &[(0, 0), (1, 0), (1, 1), (2, 1)]);
        assert_eq!(run_pbt_greedy(&h).pairs(), &[(0, 0), (1, 1)]);
        let blocked = g(3, 2, &[(0, 0), (0, 1), (1, 1), (2, 1)]);
        // x1 takes y1; x2's only neighbor y2 prefers x1, so the run stops.
        assert_eq!(run_pbt_greedy(&blocked).pairs(), &[(0, 0)]);
    }
}

//! Finite abstract rewriting systems and the greedy rewriting system over
//! the matchings of a vertex-ordered bipartite graph.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Matching, OrderedBipartiteGraph};

pub const DEFAULT_MAX_STATES: usize = 1_000_000;

/// Largest edge count for which the rewriting system over *all* matchings
/// may be materialized.
pub const FULL_SYSTEM_MAX_EDGES: usize = 12;

/// A finite directed graph over states of type `S`.
#[derive(Debug, Clone)]
pub struct RewriteSystem<S> {
    states: Vec<S>,
    index: HashMap<S, usize>,
    succ: Vec<Vec<usize>>,
    arc_count: usize,
}

impl<S: Clone + Eq + Hash> Default for RewriteSystem<S> {
    fn default() -> Self {
        Self::new()
    }
}

/// Edge-list dump of a rewriting system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct EdgeListDump {
    pub states: Vec<String>,
    pub arcs: Vec<[String; 2]>,
}

impl<S: Clone + Eq + Hash> RewriteSystem<S> {
    pub fn new() -> Self {
        RewriteSystem {
            states: Vec::new(),
            index: HashMap::new(),
            succ: Vec::new(),
            arc_count: 0,
        }
    }

    /// Inserts `s` if new; returns its index either way.
    pub fn add_state(&mut self, s: S) -> usize {
        if let Some(&i) = self.index.get(&s) {
            return i;
        }
        let i = self.states.len();
        self.index.insert(s.clone(), i);
        self.states.push(s);
        self.succ.push(Vec::new());
        i
    }

    /// Adds the arc `a -> b` between existing state indices; repeated arcs are ignored.
    pub fn add_arc(&mut self, a: usize, b: usize) -> Result<()> {
        if a >= self.states.len() || b >= self.states.len() {
            return Err(Error::UnknownState);
        }
        if !self.succ[a].contains(&b) {
            self.succ[a].push(b);
            self.arc_count += 1;
        }
        Ok(())
    }

    pub fn add_arc_between(&mut self, a: S, b: S) {
        let a = self.add_state(a);
        let b = self.add_state(b);
        self.add_arc(a, b).expect("both states were just inserted");
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &S {
        &self.states[i]
    }

    pub fn index_of(&self, s: &S) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, bs)| bs.iter().map(move |&b| (a, b)))
    }

    pub fn is_sink(&self, i: usize) -> bool {
        self.succ[i].is_empty()
    }

    pub fn sinks(&self) -> Vec<usize> {
        (0..self.states.len()).filter(|&i| self.is_sink(i)).collect()
    }

    /// A topological order of the states, or `None` if there is a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.states.len();
        let mut indeg = vec![0usize; n];
        for (_, b) in self.arcs() {
            indeg[b] += 1;
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(a) = queue.pop_front() {
            order.push(a);
            for &b in &self.succ[a] {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    queue.push_back(b);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// States reachable from `start` by zero or more arcs.
    pub fn reachable_from(&self, start: usize) -> FixedBitSet {
        let mut seen = FixedBitSet::with_capacity(self.states.len());
        let mut stack = vec![start];
        seen.insert(start);
        while let Some(a) = stack.pop() {
            for &b in &self.succ[a] {
                if !seen.put(b) {
                    stack.push(b);
                }
            }
        }
        seen
    }

    /// Reflexive-transitive reachability sets for every state.
    pub fn reachability(&self) -> Vec<FixedBitSet> {
        let n = self.states.len();
        match self.topological_order() {
            Some(order) => {
                let mut reach = vec![FixedBitSet::with_capacity(n); n];
                for &a in order.iter().rev() {
                    let mut set = FixedBitSet::with_capacity(n);
                    set.insert(a);
                    for &b in &self.succ[a] {
                        set.union_with(&reach[b]);
                    }
                    reach[a] = set;
                }
                reach
            }
            None => (0..n).map(|a| self.reachable_from(a)).collect(),
        }
    }

    /// Sinks reachable from the state with index `start`, ascending by index.
    pub fn sinks_reachable_from(&self, start: usize) -> Result<Vec<usize>> {
        if start >= self.states.len() {
            return Err(Error::UnknownState);
        }
        Ok(self.reachable_from(start).ones().filter(|&i| self.is_sink(i)).collect())
    }

    pub fn sinks_reachable(&self, start: &S) -> Result<Vec<S>> {
        let i = self.index_of(start).ok_or(Error::UnknownState)?;
        Ok(self
            .sinks_reachable_from(i)?
            .into_iter()
            .map(|j| self.states[j].clone())
            .collect())
    }

    /// Every state reaches exactly one sink.
    pub fn satisfies_unique_sink(&self) -> bool {
        #[derive(Clone, Copy, PartialEq)]
        enum Sinks {
            One(usize),
            Many,
        }
        match self.topological_order() {
            Some(order) => {
                let mut sinks = vec![Sinks::Many; self.states.len()];
                for &a in order.iter().rev() {
                    sinks[a] = match self.succ[a].split_first() {
                        None => Sinks::One(a),
                        Some((&first, rest)) => {
                            let s = sinks[first];
                            if s != Sinks::Many && rest.iter().all(|&b| sinks[b] == s) {
                                s
                            } else {
                                Sinks::Many
                            }
                        }
                    };
                    if sinks[a] == Sinks::Many {
                        return false;
                    }
                }
                true
            }
            // A cyclic system may have states that reach no sink at all.
            None => {
                (0..self.states.len()).all(|a| self.reachable_from(a).ones().filter(|&i| self.is_sink(i)).count() == 1)
            }
        }
    }

    fn joinable(&self, b: usize, c: usize) -> bool {
        if b == c {
            return true;
        }
        let from_b = self.reachable_from(b);
        let mut seen = FixedBitSet::with_capacity(self.states.len());
        let mut stack = vec![c];
        seen.insert(c);
        while let Some(a) = stack.pop() {
            if from_b.contains(a) {
                return true;
            }
            for &d in &self.succ[a] {
                if !seen.put(d) {
                    stack.push(d);
                }
            }
        }
        false
    }

    /// Every pair of one-step successors of a common state has a common
    /// descendant.
    pub fn is_locally_confluent(&self) -> bool {
        self.local_confluence_violation().is_none()
    }

    /// A state `a` with successors `b`, `c` that cannot be joined.
    pub fn local_confluence_violation(&self) -> Option<(usize, usize, usize)> {
        for (a, bs) in self.succ.iter().enumerate() {
            for (i, &b) in bs.iter().enumerate() {
                for &c in &bs[i + 1..] {
                    if !self.joinable(b, c) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    /// Every pair of states reachable from a common state has a common
    /// descendant. Quadratic memory in the state count.
    pub fn is_confluent(&self) -> bool {
        let n = self.states.len();
        let reach = self.reachability();
        // coreach[d] = states that reach d
        let mut coreach = vec![FixedBitSet::with_capacity(n); n];
        for (a, set) in reach.iter().enumerate() {
            for d in set.ones() {
                coreach[d].insert(a);
            }
        }
        // joinable[b] = states sharing a descendant with b
        let joinable: Vec<FixedBitSet> = reach
            .iter()
            .map(|set| {
                let mut row = FixedBitSet::with_capacity(n);
                for d in set.ones() {
                    row.union_with(&coreach[d]);
                }
                row
            })
            .collect();
        reach.iter().all(|set| set.ones().all(|b| set.is_subset(&joinable[b])))
    }

    pub fn dump(&self, label: impl Fn(&S) -> String) -> EdgeListDump {
        let names: Vec<String> = self.states.iter().map(&label).collect();
        EdgeListDump {
            arcs: self.arcs().map(|(a, b)| [names[a].clone(), names[b].clone()]).collect(),
            states: names,
        }
    }
}

/// Unmatched vertices adjacent to at least one unmatched vertex on the other
/// side, ascending by index (most preferred first).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GreedyFrontier {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl GreedyFrontier {
    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }
}

pub fn frontier(g: &OrderedBipartiteGraph, m: &Matching) -> Result<GreedyFrontier> {
    m.check_in(g)?;
    let mut left_free = vec![true; g.left_len()];
    let mut right_free = vec![true; g.right_len()];
    for &(x, y) in m.pairs() {
        left_free[x] = false;
        right_free[y] = false;
    }
    let left = (0..g.left_len())
        .filter(|&x| left_free[x] && g.left_neighbors(x).iter().any(|&y| right_free[y]))
        .collect();
    let right = (0..g.right_len())
        .filter(|&y| right_free[y] && g.right_neighbors(y).iter().any(|&x| left_free[x]))
        .collect();
    Ok(GreedyFrontier { left, right })
}

/// The edge added by each of the two arc rules at a non-maximal matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GreedyArcs {
    /// Top of the left frontier with its most preferred free neighbor.
    pub l_condition: (usize, usize),
    /// Top of the right frontier with its most preferred free neighbor.
    pub r_condition: (usize, usize),
}

impl GreedyArcs {
    pub fn coincide(&self) -> bool {
        self.l_condition == self.r_condition
    }
}

/// `None` exactly when `m` is maximal.
pub fn greedy_arcs(g: &OrderedBipartiteGraph, m: &Matching) -> Result<Option<GreedyArcs>> {
    let f = frontier(g, m)?;
    let (Some(&x_top), Some(&y_top)) = (f.left.first(), f.right.first()) else {
        return Ok(None);
    };
    // A free neighbor of a free vertex is itself on the frontier.
    let y_for_x = g
        .left_neighbors(x_top)
        .iter()
        .copied()
        .find(|&y| m.partner_of_right(y).is_none())
        .expect("frontier vertex has a free neighbor");
    let x_for_y = g
        .right_neighbors(y_top)
        .iter()
        .copied()
        .find(|&x| m.partner_of_left(x).is_none())
        .expect("frontier vertex has a free neighbor");
    Ok(Some(GreedyArcs {
        l_condition: (x_top, y_for_x),
        r_condition: (x_for_y, y_top),
    }))
}

/// One-step successors of `m`: the L-condition successor first, then the
/// R-condition successor when it differs.
pub fn greedy_successors(g: &OrderedBipartiteGraph, m: &Matching) -> Result<Vec<Matching>> {
    Ok(match greedy_arcs(g, m)? {
        None => Vec::new(),
        Some(arcs) if arcs.coincide() => {
            let (x, y) = arcs.l_condition;
            vec![m.with_pair(x, y)]
        }
        Some(arcs) => {
            let (x1, y1) = arcs.l_condition;
            let (x2, y2) = arcs.r_condition;
            vec![m.with_pair(x1, y1), m.with_pair(x2, y2)]
        }
    })
}

/// Breadth-first expansion of the greedy rewriting system from the empty
/// matching. Fails rather than truncates when the budget is exceeded.
pub fn explore_greedy_system(g: &OrderedBipartiteGraph, max_states: usize) -> Result<RewriteSystem<Matching>> {
    if max_states == 0 {
        return Err(Error::OutOfRange("max_states must be at least 1".into()));
    }
    let mut sys = RewriteSystem::new();
    let root = sys.add_state(Matching::empty());
    let mut queue = VecDeque::from([root]);
    while let Some(a) = queue.pop_front() {
        let current = sys.state(a).clone();
        for next in greedy_successors(g, &current)? {
            let before = sys.state_count();
            let b = sys.add_state(next);
            if sys.state_count() > before {
                if sys.state_count() > max_states {
                    return Err(Error::StateBudgetExceeded {
                        reached: sys.state_count(),
                        budget: max_states,
                    });
                }
                queue.push_back(b);
            }
            sys.add_arc(a, b)?;
        }
    }
    Ok(sys)
}

/// The greedy rewriting system over every matching of `g`, reachable or
/// not. Only offered for graphs with at most [`FULL_SYSTEM_MAX_EDGES`] edges.
pub fn full_greedy_system(g: &OrderedBipartiteGraph) -> Result<RewriteSystem<Matching>> {
    if g.edge_count() > FULL_SYSTEM_MAX_EDGES {
        return Err(Error::EdgeBudgetExceeded {
            edges: g.edge_count(),
            limit: FULL_SYSTEM_MAX_EDGES,
        });
    }
    let edges: Vec<_> = g.edges().collect();
    let mut all = Vec::new();
    let mut current = Vec::new();
    let mut left_used = vec![false; g.left_len()];
    let mut right_used = vec![false; g.right_len()];
    collect_matchings(&edges, 0, &mut current, &mut left_used, &mut right_used, &mut all);

    let mut sys = RewriteSystem::new();
    for m in &all {
        sys.add_state(m.clone());
    }
    for m in &all {
        let a = sys.index_of(m).expect("inserted above");
        for next in greedy_successors(g, m)? {
            let b = sys.index_of(&next).expect("every matching is a state");
            sys.add_arc(a, b)?;
        }
    }
    Ok(sys)
}

fn collect_matchings(
    edges: &[(usize, usize)],
    i: usize,
    current: &mut Vec<(usize, usize)>,
    left_used: &mut [bool],
    right_used: &mut [bool],
    out: &mut Vec<Matching>,
) {
    let Some(&(x, y)) = edges.get(i) else {
        out.push(Matching::from_pairs_unchecked(current.iter().copied()));
        return;
    };
    collect_matchings(edges, i + 1, current, left_used, right_used, out);
    if !left_used[x] && !right_used[y] {
        left_used[x] = true;
        right_used[y] = true;
        current.push((x, y));
        collect_matchings(edges, i + 1, current, left_used, right_used, out);
        current.pop();
        left_used[x] = false;
        right_used[y] = false;
    }
}

/// Compact label such as `{x1-y2,x2-y1}`.
pub fn matching_label(g: &OrderedBipartiteGraph, m: &Matching) -> String {
    let inner: Vec<String> = m
        .pairs()
        .iter()
        .map(|&(x, y)| format!("{}-{}", g.left_name(x), g.right_name(y)))
        .collect();
    format!("{{{}}}", inner.join(","))
}

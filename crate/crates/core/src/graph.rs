//! Vertex-ordered bipartite graphs, matchings, and the order of a matching.
//!
//! Preference is positional on both sides: index 0 is the most preferred
//! vertex. Identifiers are opaque strings at the boundary and dense indices
//! everywhere else.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, GraphViolation, Result, Side};

/// Raw graph description as it appears in graph files.
///
/// Array order encodes preference, highest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

impl GraphSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedBipartiteGraph {
    left: Vec<String>,
    right: Vec<String>,
    /// Neighbors of each left vertex, ascending right index (most preferred first).
    left_adj: Vec<Vec<usize>>,
    /// Neighbors of each right vertex, ascending left index.
    right_adj: Vec<Vec<usize>>,
    edge_count: usize,
}

/// Validates a raw description, collecting every violation before failing.
pub fn validate_graph(raw: &GraphSpec) -> Result<OrderedBipartiteGraph> {
    let mut violations = Vec::new();
    let mut seen = HashSet::new();
    for (side, ids) in [(Side::Left, &raw.left), (Side::Right, &raw.right)] {
        for (position, id) in ids.iter().enumerate() {
            if id.is_empty() {
                violations.push(GraphViolation::EmptyIdentifier { side, position });
            } else if !seen.insert(id.as_str()) {
                violations.push(GraphViolation::DuplicateVertex(id.clone()));
            }
        }
    }

    let left_index: HashMap<&str, usize> = raw.left.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let right_index: HashMap<&str, usize> = raw.right.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();

    let mut edges = Vec::with_capacity(raw.edges.len());
    let mut seen_edges = HashSet::new();
    for [l, r] in &raw.edges {
        match (left_index.get(l.as_str()), right_index.get(r.as_str())) {
            (Some(&x), Some(&y)) => {
                if seen_edges.insert((x, y)) {
                    edges.push((x, y));
                } else {
                    violations.push(GraphViolation::DuplicateEdge {
                        left: l.clone(),
                        right: r.clone(),
                    });
                }
            }
            _ => violations.push(GraphViolation::DanglingEndpoint {
                left: l.clone(),
                right: r.clone(),
            }),
        }
    }

    if !violations.is_empty() {
        return Err(Error::InvalidGraph(violations));
    }
    Ok(OrderedBipartiteGraph::assemble(
        raw.left.clone(),
        raw.right.clone(),
        edges,
    ))
}

impl OrderedBipartiteGraph {
    /// Builds a graph from names and index pairs, validating every invariant.
    pub fn new(left: Vec<String>, right: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let mut violations = Vec::new();
        let mut seen = HashSet::new();
        for (side, ids) in [(Side::Left, &left), (Side::Right, &right)] {
            for (position, id) in ids.iter().enumerate() {
                if id.is_empty() {
                    violations.push(GraphViolation::EmptyIdentifier { side, position });
                } else if !seen.insert(id.as_str()) {
                    violations.push(GraphViolation::DuplicateVertex(id.clone()));
                }
            }
        }
        let name = |ids: &[String], i: usize| ids.get(i).cloned().unwrap_or_else(|| format!("#{i}"));
        let mut seen_edges = HashSet::new();
        for &(x, y) in edges {
            if x >= left.len() || y >= right.len() {
                violations.push(GraphViolation::DanglingEndpoint {
                    left: name(&left, x),
                    right: name(&right, y),
                });
            } else if !seen_edges.insert((x, y)) {
                violations.push(GraphViolation::DuplicateEdge {
                    left: name(&left, x),
                    right: name(&right, y),
                });
            }
        }
        if !violations.is_empty() {
            return Err(Error::InvalidGraph(violations));
        }
        Ok(Self::assemble(left, right, edges.to_vec()))
    }

    /// Graph with generated names `x1..` and `y1..`.
    pub fn from_edges(left_len: usize, right_len: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let left = (1..=left_len).map(|i| format!("x{i}")).collect();
        let right = (1..=right_len).map(|i| format!("y{i}")).collect();
        Self::new(left, right, edges)
    }

    fn assemble(left: Vec<String>, right: Vec<String>, edges: Vec<(usize, usize)>) -> Self {
        let mut left_adj = vec![Vec::new(); left.len()];
        let mut right_adj = vec![Vec::new(); right.len()];
        for &(x, y) in &edges {
            left_adj[x].push(y);
            right_adj[y].push(x);
        }
        left_adj.iter_mut().for_each(|a| a.sort_unstable());
        right_adj.iter_mut().for_each(|a| a.sort_unstable());
        OrderedBipartiteGraph {
            left,
            right,
            left_adj,
            right_adj,
            edge_count: edges.len(),
        }
    }

    pub fn left_len(&self) -> usize {
        self.left.len()
    }

    pub fn right_len(&self) -> usize {
        self.right.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn left_name(&self, x: usize) -> &str {
        &self.left[x]
    }

    pub fn right_name(&self, y: usize) -> &str {
        &self.right[y]
    }

    pub fn left_names(&self) -> &[String] {
        &self.left
    }

    pub fn right_names(&self) -> &[String] {
        &self.right
    }

    pub fn left_index(&self, name: &str) -> Option<usize> {
        self.left.iter().position(|s| s == name)
    }

    pub fn right_index(&self, name: &str) -> Option<usize> {
        self.right.iter().position(|s| s == name)
    }

    /// Right neighbors of `x`, most preferred first.
    pub fn left_neighbors(&self, x: usize) -> &[usize] {
        &self.left_adj[x]
    }

    /// Left neighbors of `y`, most preferred first.
    pub fn right_neighbors(&self, y: usize) -> &[usize] {
        &self.right_adj[y]
    }

    pub fn is_adjacent(&self, x: usize, y: usize) -> bool {
        self.left_adj.get(x).is_some_and(|adj| adj.binary_search(&y).is_ok())
    }

    /// All edges, sorted by (left, right).
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.left_adj
            .iter()
            .enumerate()
            .flat_map(|(x, adj)| adj.iter().map(move |&y| (x, y)))
    }

    /// The same graph with the left side re-ranked: `ordering[i]` becomes the
    /// new left vertex `i`. Right preferences are untouched.
    pub fn reorder_left(&self, ordering: &LeftOrdering) -> Result<Self> {
        ordering.check_for(self)?;
        let mut rank = vec![0; self.left_len()];
        for (new, &old) in ordering.as_slice().iter().enumerate() {
            rank[old] = new;
        }
        let left = ordering.as_slice().iter().map(|&old| self.left[old].clone()).collect();
        let edges = self.edges().map(|(x, y)| (rank[x], y)).collect();
        Ok(Self::assemble(left, self.right.clone(), edges))
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            left: self.left.clone(),
            right: self.right.clone(),
            edges: self
                .edges()
                .map(|(x, y)| [self.left[x].clone(), self.right[y].clone()])
                .collect(),
        }
    }
}

/// A set of pairwise-disjoint edges, stored as `(left, right)` index pairs
/// sorted by left index. Equal matchings have equal representations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Matching {
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates `pairs` as a matching of `g`.
    pub fn new(g: &OrderedBipartiteGraph, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let m = Self::from_pairs_unchecked(pairs);
        m.check_in(g)?;
        Ok(m)
    }

    /// Builds a matching from identifier pairs.
    pub fn from_names<'a>(
        g: &OrderedBipartiteGraph,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self> {
        let mut idx = Vec::new();
        for (l, r) in pairs {
            let x = g
                .left_index(l)
                .ok_or_else(|| Error::InvalidMatching(format!("unknown left vertex `{l}`")))?;
            let y = g
                .right_index(r)
                .ok_or_else(|| Error::InvalidMatching(format!("unknown right vertex `{r}`")))?;
            idx.push((x, y));
        }
        Self::new(g, idx)
    }

    pub(crate) fn from_pairs_unchecked(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        pairs.sort_unstable();
        Matching { pairs }
    }

    /// Checks that every pair is an edge of `g` and no vertex is used twice.
    pub fn check_in(&self, g: &OrderedBipartiteGraph) -> Result<()> {
        let mut left_used = vec![false; g.left_len()];
        let mut right_used = vec![false; g.right_len()];
        for &(x, y) in &self.pairs {
            if x >= g.left_len() || y >= g.right_len() || !g.is_adjacent(x, y) {
                return Err(Error::InvalidMatching(format!("({x}, {y}) is not an edge")));
            }
            if std::mem::replace(&mut left_used[x], true) {
                return Err(Error::InvalidMatching(format!(
                    "left vertex {} matched twice",
                    g.left_name(x)
                )));
            }
            if std::mem::replace(&mut right_used[y], true) {
                return Err(Error::InvalidMatching(format!(
                    "right vertex {} matched twice",
                    g.right_name(y)
                )));
            }
        }
        Ok(())
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.pairs.binary_search(&(x, y)).is_ok()
    }

    pub fn partner_of_left(&self, x: usize) -> Option<usize> {
        let i = self.pairs.partition_point(|&(l, _)| l < x);
        self.pairs.get(i).filter(|&&(l, _)| l == x).map(|&(_, y)| y)
    }

    pub fn partner_of_right(&self, y: usize) -> Option<usize> {
        self.pairs.iter().find(|&&(_, r)| r == y).map(|&(x, _)| x)
    }

    /// `self ∪ {(x, y)}`; the caller guarantees both endpoints are free.
    pub fn with_pair(&self, x: usize, y: usize) -> Self {
        let mut pairs = self.pairs.clone();
        let i = pairs.partition_point(|&p| p < (x, y));
        pairs.insert(i, (x, y));
        Matching { pairs }
    }

    pub fn named_pairs(&self, g: &OrderedBipartiteGraph) -> Vec<[String; 2]> {
        self.pairs
            .iter()
            .map(|&(x, y)| [g.left_name(x).to_owned(), g.right_name(y).to_owned()])
            .collect()
    }
}

/// Order of a matching: a natural number, or infinity for matchings that
/// leave some left vertex unmatched. Finite values sort before infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MatchingOrder {
    Finite(usize),
    Infinite,
}

impl MatchingOrder {
    pub fn is_finite(self) -> bool {
        matches!(self, MatchingOrder::Finite(_))
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            MatchingOrder::Finite(k) => Some(k),
            MatchingOrder::Infinite => None,
        }
    }
}

impl fmt::Display for MatchingOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchingOrder::Finite(k) => write!(f, "{k}"),
            MatchingOrder::Infinite => f.write_str("inf"),
        }
    }
}

// Serialized as a JSON number, or the string "inf".
impl Serialize for MatchingOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MatchingOrder::Finite(k) => s.serialize_u64(*k as u64),
            MatchingOrder::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for MatchingOrder {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(usize),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(k) => Ok(MatchingOrder::Finite(k)),
            Raw::Str(s) if s == "inf" => Ok(MatchingOrder::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("invalid order `{s}`"))),
        }
    }
}

/// A permutation of the left vertices, most preferred first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LeftOrdering(Vec<usize>);

impl LeftOrdering {
    pub fn new(sequence: Vec<usize>) -> Self {
        LeftOrdering(sequence)
    }

    pub fn identity(len: usize) -> Self {
        LeftOrdering((0..len).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    /// Checks that this is an exact permutation of `0..len`.
    pub fn check_len(&self, len: usize) -> Result<()> {
        if self.0.len() != len {
            return Err(Error::InvalidPermutation(format!(
                "expected {len} entries, got {}",
                self.0.len()
            )));
        }
        let mut seen = vec![false; len];
        for &v in &self.0 {
            if v >= len {
                return Err(Error::InvalidPermutation(format!("index {v} out of range")));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPermutation(format!("index {v} repeated")));
            }
        }
        Ok(())
    }

    pub fn check_for(&self, g: &OrderedBipartiteGraph) -> Result<()> {
        self.check_len(g.left_len())
    }
}

/// True iff every left vertex is matched.
pub fn is_l_saturating(g: &OrderedBipartiteGraph, m: &Matching) -> Result<bool> {
    m.check_in(g)?;
    Ok(m.len() == g.left_len())
}

/// The smallest `k` such that `m` saturates the left side and leaves every
/// right vertex past position `k` unmatched; infinity if `m` does not
/// saturate the left side.
pub fn matching_order(g: &OrderedBipartiteGraph, m: &Matching) -> Result<MatchingOrder> {
    if !is_l_saturating(g, m)? {
        return Ok(MatchingOrder::Infinite);
    }
    Ok(MatchingOrder::Finite(
        m.pairs().iter().map(|&(_, y)| y + 1).max().unwrap_or(0),
    ))
}

/// True iff `m` saturates the left side and each matched left vertex is the
/// most preferred left neighbor of its partner.
pub fn has_pbt_property(g: &OrderedBipartiteGraph, m: &Matching) -> Result<bool> {
    if !is_l_saturating(g, m)? {
        return Ok(false);
    }
    Ok(m.pairs().iter().all(|&(x, y)| g.right_neighbors(y).first() == Some(&x)))
}

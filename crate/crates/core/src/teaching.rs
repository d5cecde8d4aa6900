//! Consistency graphs of binary concept classes and the cost of their
//! greedy matchings.
//!
//! A concept over a domain of `n ≤ 32` points is stored as a bit mask (bit
//! `i` is the label of point `i`). A sample is a pair of masks: the points
//! it mentions and the labels it gives them. Samples are ordered by size,
//! ties broken lexicographically on their sorted `(point, label)` lists, or
//! shuffled within each size class under a seed. Either way smaller samples
//! come first.
//!
//! The counting helpers use exact big integers. Only `h`, `γ₀` and the
//! `(2en/d)^d` comparison use floating point, the latter in log space.

use std::collections::HashMap;
use std::f64::consts::{E, LN_2};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{LeftOrdering, Matching, OrderedBipartiteGraph};
use crate::greedy::run_p_greedy;

/// Largest domain for which realizable samples are enumerated (at most
/// `3^16` candidates).
pub const MAX_ENUM_DOMAIN: usize = 16;
const MAX_DOMAIN: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptClass {
    domain: Vec<String>,
    concepts: Vec<u32>,
}

/// Concept-class file contents: either explicit bitstrings, or the class of
/// all concepts over `domain_size` points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConceptClassSpec {
    Explicit { domain: Vec<String>, concepts: Vec<String> },
    All { domain_size: usize, all: bool },
}

impl ConceptClassSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<ConceptClass> {
        match self {
            ConceptClassSpec::Explicit { domain, concepts } => ConceptClass::from_bitstrings(domain.clone(), concepts),
            ConceptClassSpec::All { domain_size, all: true } => ConceptClass::all(*domain_size),
            ConceptClassSpec::All { all: false, .. } => Err(Error::InvalidConceptClass(
                "`all` must be true when only `domain_size` is given".into(),
            )),
        }
    }
}

fn default_domain(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("p{i}")).collect()
}

impl ConceptClass {
    pub fn new(domain: Vec<String>, concepts: Vec<u32>) -> Result<Self> {
        let n = domain.len();
        if n > MAX_DOMAIN {
            return Err(Error::DomainBudgetExceeded {
                size: n,
                limit: MAX_DOMAIN,
            });
        }
        let mut seen_points = std::collections::HashSet::new();
        for p in &domain {
            if p.is_empty() || !seen_points.insert(p) {
                return Err(Error::InvalidConceptClass(format!("bad or repeated point `{p}`")));
            }
        }
        if concepts.is_empty() {
            return Err(Error::InvalidConceptClass("class has no concepts".into()));
        }
        let full = full_mask(n);
        let mut seen = std::collections::HashSet::new();
        for &c in &concepts {
            if c & !full != 0 {
                return Err(Error::InvalidConceptClass(format!(
                    "concept {c:#b} labels points outside the domain"
                )));
            }
            if !seen.insert(c) {
                return Err(Error::InvalidConceptClass(format!("duplicate concept {c:#b}")));
            }
        }
        Ok(ConceptClass { domain, concepts })
    }

    /// Parses bitstrings indexed by domain order (`"0110"`: point 2 and 3 labeled 1).
    pub fn from_bitstrings(domain: Vec<String>, concepts: &[String]) -> Result<Self> {
        let n = domain.len();
        let parsed = concepts
            .iter()
            .map(|s| {
                if s.len() != n {
                    return Err(Error::InvalidConceptClass(format!(
                        "concept `{s}` has {} labels, domain has {n} points",
                        s.len()
                    )));
                }
                s.chars().enumerate().try_fold(0u32, |acc, (i, ch)| match ch {
                    '0' => Ok(acc),
                    '1' => Ok(acc | (1 << i)),
                    _ => Err(Error::InvalidConceptClass(format!("bad label `{ch}` in `{s}`"))),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(domain, parsed)
    }

    /// Every labeling of `n` points, listed in lexicographic bitstring order.
    pub fn all(n: usize) -> Result<Self> {
        if n > MAX_ENUM_DOMAIN {
            return Err(Error::DomainBudgetExceeded {
                size: n,
                limit: MAX_ENUM_DOMAIN,
            });
        }
        let mut concepts: Vec<u32> = (0..(1u32 << n)).collect();
        concepts.sort_by_key(|&c| lex_key(c, n));
        Self::new(default_domain(n), concepts)
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn domain_size(&self) -> usize {
        self.domain.len()
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn concepts(&self) -> &[u32] {
        &self.concepts
    }

    pub fn bitstring(&self, i: usize) -> String {
        bitstring(self.concepts[i], self.domain.len())
    }

    /// Concepts sorted lexicographically by label bitstring.
    pub fn lex_ordering(&self) -> LeftOrdering {
        let n = self.domain.len();
        let mut idx: Vec<usize> = (0..self.concepts.len()).collect();
        idx.sort_by_key(|&i| lex_key(self.concepts[i], n));
        LeftOrdering::new(idx)
    }

    pub fn random_ordering(&self, seed: u64) -> LeftOrdering {
        let mut idx: Vec<usize> = (0..self.concepts.len()).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        LeftOrdering::new(idx)
    }

    pub fn to_spec(&self) -> ConceptClassSpec {
        ConceptClassSpec::Explicit {
            domain: self.domain.clone(),
            concepts: (0..self.len()).map(|i| self.bitstring(i)).collect(),
        }
    }
}

fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Integer whose numeric order equals the lexicographic order of the bitstring.
fn lex_key(c: u32, n: usize) -> u32 {
    (0..n).fold(0, |acc, i| (acc << 1) | ((c >> i) & 1))
}

fn bitstring(c: u32, n: usize) -> String {
    (0..n).map(|i| if c >> i & 1 == 1 { '1' } else { '0' }).collect()
}

/// A set of labeled examples with distinct points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sample {
    points: u32,
    labels: u32,
}

impl Sample {
    pub fn new(examples: &[(usize, bool)], domain_size: usize) -> Result<Self> {
        let mut points = 0u32;
        let mut labels = 0u32;
        for &(p, b) in examples {
            if p >= domain_size || p >= MAX_DOMAIN {
                return Err(Error::OutOfRange(format!("point {p} outside the domain")));
            }
            if points >> p & 1 == 1 {
                return Err(Error::OutOfRange(format!("point {p} labeled twice")));
            }
            points |= 1 << p;
            if b {
                labels |= 1 << p;
            }
        }
        Ok(Sample { points, labels })
    }

    fn from_masks(points: u32, labels: u32) -> Self {
        Sample {
            points,
            labels: labels & points,
        }
    }

    pub fn size(&self) -> usize {
        self.points.count_ones() as usize
    }

    /// `(point, label)` pairs in ascending point order.
    pub fn examples(&self) -> Vec<(usize, bool)> {
        (0..MAX_DOMAIN)
            .filter(|&p| self.points >> p & 1 == 1)
            .map(|p| (p, self.labels >> p & 1 == 1))
            .collect()
    }

    pub fn is_consistent_with(&self, concept: u32) -> bool {
        concept & self.points == self.labels
    }

    pub fn is_proper_subsample_of(&self, other: &Sample) -> bool {
        self.points & !other.points == 0 && self.points != other.points && other.labels & self.points == self.labels
    }

    /// Proper subsamples, each once.
    pub fn proper_subsamples(&self) -> Vec<Sample> {
        let full = self.points;
        let mut out = Vec::new();
        if full == 0 {
            return out;
        }
        let mut sub = (full - 1) & full;
        loop {
            out.push(Sample::from_masks(sub, self.labels));
            if sub == 0 {
                return out;
            }
            sub = (sub - 1) & full;
        }
    }

    pub fn label(&self, domain: &[String]) -> String {
        let inner: Vec<String> = self
            .examples()
            .into_iter()
            .map(|(p, b)| format!("{}={}", domain[p], u8::from(b)))
            .collect();
        format!("{{{}}}", inner.join(","))
    }

    fn canonical_key(&self) -> (usize, Vec<(usize, bool)>) {
        (self.size(), self.examples())
    }
}

/// Linear extension of the cardinality order used for the sample side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "seed")]
pub enum SampleOrder {
    #[default]
    Canonical,
    /// Seeded shuffle inside each size class.
    Shuffled(u64),
}

fn check_enum_budget(cc: &ConceptClass) -> Result<()> {
    if cc.domain_size() > MAX_ENUM_DOMAIN {
        return Err(Error::DomainBudgetExceeded {
            size: cc.domain_size(),
            limit: MAX_ENUM_DOMAIN,
        });
    }
    Ok(())
}

/// All samples consistent with at least one concept, smallest first, ties
/// lexicographic on sorted `(point, label)` pairs.
pub fn enumerate_realizable_samples(cc: &ConceptClass) -> Result<Vec<Sample>> {
    enumerate_realizable_samples_with(cc, SampleOrder::Canonical)
}

pub fn enumerate_realizable_samples_with(cc: &ConceptClass, order: SampleOrder) -> Result<Vec<Sample>> {
    check_enum_budget(cc)?;
    let full = full_mask(cc.domain_size());
    let mut set = std::collections::HashSet::new();
    for &c in cc.concepts() {
        let mut sub = full;
        loop {
            set.insert(Sample::from_masks(sub, c));
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & full;
        }
    }
    let mut samples: Vec<Sample> = set.into_iter().collect();
    samples.sort_by_cached_key(Sample::canonical_key);
    if let SampleOrder::Shuffled(seed) = order {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut start = 0;
        while start < samples.len() {
            let size = samples[start].size();
            let end = start + samples[start..].iter().take_while(|s| s.size() == size).count();
            samples[start..end].shuffle(&mut rng);
            start = end;
        }
    }
    Ok(samples)
}

/// A consistency graph together with the data needed to interpret it.
#[derive(Debug, Clone)]
pub struct ConsistencyGraph {
    pub graph: OrderedBipartiteGraph,
    /// Right vertex `j` is `samples[j]`.
    pub samples: Vec<Sample>,
    /// Left vertex `i` is concept `concept_order[i]` of the class.
    pub concept_order: LeftOrdering,
    pub class_size: usize,
}

pub fn build_consistency_graph(cc: &ConceptClass, concept_order: &LeftOrdering) -> Result<ConsistencyGraph> {
    build_consistency_graph_with(cc, concept_order, SampleOrder::Canonical)
}

/// Left side: concepts in `concept_order`. Right side: realizable samples in
/// `sample_order`. Edges are generated per concept from the subsamples of
/// its full sample.
pub fn build_consistency_graph_with(
    cc: &ConceptClass,
    concept_order: &LeftOrdering,
    sample_order: SampleOrder,
) -> Result<ConsistencyGraph> {
    concept_order.check_len(cc.len())?;
    let samples = enumerate_realizable_samples_with(cc, sample_order)?;
    let index: HashMap<Sample, usize> = samples.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let full = full_mask(cc.domain_size());
    let mut edges = Vec::with_capacity(cc.len() << cc.domain_size());
    for (x, &ci) in concept_order.as_slice().iter().enumerate() {
        let c = cc.concepts()[ci];
        let mut sub = full;
        loop {
            edges.push((x, index[&Sample::from_masks(sub, c)]));
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & full;
        }
    }
    let n = cc.domain_size();
    let left = concept_order
        .as_slice()
        .iter()
        .map(|&ci| format!("c{}", bitstring(cc.concepts()[ci], n)))
        .collect();
    let right = samples.iter().map(|s| s.label(cc.domain())).collect();
    Ok(ConsistencyGraph {
        graph: OrderedBipartiteGraph::new(left, right, &edges)?,
        samples,
        concept_order: concept_order.clone(),
        class_size: cc.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreedyCost {
    /// Size of the largest sample used by the greedy matching.
    pub q: usize,
    /// Order (1-based index of the last matched sample).
    pub order: usize,
    pub matching: Matching,
}

pub fn greedy_cost(cc: &ConceptClass, concept_order: &LeftOrdering) -> Result<GreedyCost> {
    Ok(greedy_cost_in(&build_consistency_graph(cc, concept_order)?))
}

pub fn greedy_cost_in(cg: &ConsistencyGraph) -> GreedyCost {
    let matching = run_p_greedy(&cg.graph);
    // Every concept is the only one consistent with its full sample, so the
    // greedy matching saturates the concept side.
    debug_assert_eq!(matching.len(), cg.graph.left_len());
    let order = matching.pairs().iter().map(|&(_, y)| y + 1).max().unwrap_or(0);
    let q = if order == 0 { 0 } else { cg.samples[order - 1].size() };
    GreedyCost { q, order, matching }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubsampleCheck {
    pub q: usize,
    pub class_size: usize,
    /// `|C| ≥ 2^(q-1) + 1`; `None` when `q = 0`.
    pub bound_holds: Option<bool>,
    /// For every concept matched to a size-`q` sample, each proper subsample
    /// is matched to a strictly preferred concept.
    pub mechanism_holds: bool,
    /// Matched proper subsamples observed for the concept holding the last
    /// matched sample (`2^q - 1` when the mechanism holds).
    pub matched_proper_subsamples: usize,
}

impl SubsampleCheck {
    pub fn holds(&self) -> bool {
        self.bound_holds.unwrap_or(true) && self.mechanism_holds
    }
}

pub fn subsample_report(cg: &ConsistencyGraph, cost: &GreedyCost) -> SubsampleCheck {
    let q = cost.q;
    let index: HashMap<Sample, usize> = cg.samples.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut right_mate = vec![None; cg.samples.len()];
    for &(x, y) in cost.matching.pairs() {
        right_mate[y] = Some(x);
    }
    let mut mechanism_holds = true;
    let mut observed = 0;
    if q >= 1 {
        for &(x, y) in cost.matching.pairs() {
            let s = cg.samples[y];
            if s.size() != q {
                continue;
            }
            let preferred = s
                .proper_subsamples()
                .iter()
                .filter(|sub| matches!(right_mate[index[sub]], Some(x2) if x2 < x))
                .count();
            if preferred != (1usize << q) - 1 {
                mechanism_holds = false;
            }
            if y + 1 == cost.order {
                observed = preferred;
            }
        }
    }
    let bound_holds = (q >= 1).then(|| {
        // |C| ≥ 2^(q-1) + 1
        BigUint::from(cg.class_size) > BigUint::one() << (q - 1)
    });
    SubsampleCheck {
        q,
        class_size: cg.class_size,
        bound_holds,
        mechanism_holds,
        matched_proper_subsamples: observed,
    }
}

/// `|C| ≥ 2^(q-1)+1` for the greedy cost `q`, plus the subsample mechanism
/// behind it. Vacuously true when `q = 0`.
pub fn check_subsample_bound(cc: &ConceptClass, concept_order: &LeftOrdering) -> Result<bool> {
    let cg = build_consistency_graph(cc, concept_order)?;
    let cost = greedy_cost_in(&cg);
    Ok(subsample_report(&cg, &cost).holds())
}

fn check_d(n: usize, d: usize) -> Result<()> {
    if d > n {
        return Err(Error::OutOfRange(format!("d = {d} exceeds n = {n}")));
    }
    Ok(())
}

fn binomials(n: usize, d: usize) -> impl Iterator<Item = BigUint> {
    let mut c = BigUint::one();
    (0..=d).map(move |i| {
        let out = c.clone();
        c = &c * (n - i) / (i + 1);
        out
    })
}

/// `Σ_{i=0}^{d} C(n, i)`.
pub fn phi(n: usize, d: usize) -> Result<BigUint> {
    check_d(n, d)?;
    Ok(binomials(n, d).sum())
}

/// Number of labeled samples of size at most `d` over `n` points:
/// `Σ_{i=0}^{d} C(n, i) 2^i`.
pub fn samples_up_to(n: usize, d: usize) -> Result<BigUint> {
    check_d(n, d)?;
    Ok(binomials(n, d).enumerate().map(|(i, c)| c << i).sum())
}

/// `d · ln(2en/d) ≥ n · ln 2`, i.e. `(2en/d)^d ≥ 2^n`.
pub fn pigeonhole_holds(n: usize, d: usize) -> bool {
    let (n, d) = (n as f64, d as f64);
    d * ((2.0 * E * n).ln() - d.ln()) >= n * LN_2
}

/// Smallest `d ∈ 1..=n` with `(2en/d)^d ≥ 2^n`.
pub fn d_star(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::OutOfRange("d* needs n ≥ 1".into()));
    }
    Ok((1..=n)
        .find(|&d| pigeonhole_holds(n, d))
        .expect("d = n satisfies (2e)^n ≥ 2^n"))
}

/// Smallest `d` with `samples_up_to(n, d) ≥ class_size`: some concept of any
/// class of that size is matched to a sample of at least this size.
pub fn exact_cost_lower_bound(n: usize, class_size: &BigUint) -> Result<usize> {
    if class_size.is_zero() {
        return Err(Error::OutOfRange("class size must be at least 1".into()));
    }
    let mut total = BigUint::zero();
    for (d, c) in binomials(n, n).enumerate() {
        total += c << d;
        if &total >= class_size {
            return Ok(d);
        }
    }
    Err(Error::OutOfRange(format!(
        "class size {class_size} exceeds the 3^{n} samples over {n} points"
    )))
}

/// `⌈log₂ |C|⌉`, computed exactly.
pub fn log2_ceil(class_size: &BigUint) -> Result<usize> {
    if class_size.is_zero() {
        return Err(Error::OutOfRange("class size must be at least 1".into()));
    }
    let bits = class_size.bits() as usize;
    let is_power = (class_size & (class_size - BigUint::one())).is_zero();
    Ok(if is_power { bits - 1 } else { bits })
}

/// `h(γ) = (2e/γ)^γ`, evaluated as `exp(γ · ln(2e/γ))`.
pub fn h_gamma(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::OutOfRange(format!("γ = {gamma} is outside (0, 1]")));
    }
    Ok((gamma * (LN_2 + 1.0 - gamma.ln())).exp())
}

/// Root of `h(γ) = 2` on `(0, 1]` by bisection, to within `tolerance`.
pub fn solve_gamma0(tolerance: f64) -> Result<f64> {
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::OutOfRange(format!("tolerance {tolerance} must be positive")));
    }
    let (mut lo, mut hi) = (f64::MIN_POSITIVE, 1.0f64);
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if h_gamma(mid)? < 2.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if mid == lo && mid == hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub class_size: usize,
    pub log_c: f64,
    pub greedy_cost: usize,
    pub upper_bound: usize,
    pub exact_lower_bound: usize,
    /// `None` for an empty domain.
    pub d_star: Option<usize>,
    pub gamma0: f64,
}

pub fn bound_report(cc: &ConceptClass, concept_order: &LeftOrdering) -> Result<BoundReport> {
    let cost = greedy_cost(cc, concept_order)?;
    let size = BigUint::from(cc.len());
    let n = cc.domain_size();
    Ok(BoundReport {
        n,
        class_size: cc.len(),
        log_c: (cc.len() as f64).log2(),
        greedy_cost: cost.q,
        upper_bound: log2_ceil(&size)?,
        exact_lower_bound: exact_cost_lower_bound(n, &size)?,
        d_star: if n == 0 { None } else { Some(d_star(n)?) },
        gamma0: solve_gamma0(1e-9)?,
    })
}

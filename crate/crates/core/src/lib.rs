//! Greedy matchings in vertex-ordered bipartite graphs.
//!
//! Both vertex classes of an [`OrderedBipartiteGraph`] carry a strict
//! preference order. The greedy matching (grow the matching from empty,
//! always pairing a most preferred frontier vertex with its most preferred
//! free neighbor) is unique no matter which side drives each step; the
//! [`ars`] module checks that claim as a confluence property of a finite
//! rewriting system. On top of that the crate computes minimum-order
//! left-saturating matchings ([`order`]), PBT matchings ([`greedy`]), and the
//! teaching-cost bounds for consistency graphs of concept classes
//! ([`teaching`]). [`oracle`] holds brute-force references for all of it.

pub mod ars;
pub mod dag;
pub mod error;
pub mod graph;
pub mod greedy;
pub mod oracle;
pub mod order;
pub mod teaching;

pub use error::{Error, GraphViolation, Result, Side};
pub use graph::{
    has_pbt_property, is_l_saturating, matching_order, validate_graph, GraphSpec, LeftOrdering, Matching,
    MatchingOrder, OrderedBipartiteGraph,
};
pub use greedy::{run_interleaved, run_p_greedy, run_p_greedy_prime, run_pbt_greedy, InterleavingPolicy};
pub use order::{min_order_pbt, min_order_saturating, MinOrderResult};

use std::fmt;

use thiserror::Error;

/// A single broken invariant found while validating a raw graph description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphViolation {
    EmptyIdentifier { side: Side, position: usize },
    DuplicateVertex(String),
    DanglingEndpoint { left: String, right: String },
    DuplicateEdge { left: String, right: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => f.write_str("left"),
            Side::Right => f.write_str("right"),
        }
    }
}

impl fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphViolation::EmptyIdentifier { side, position } => {
                write!(f, "empty identifier at {side} position {position}")
            }
            GraphViolation::DuplicateVertex(id) => write!(f, "duplicate vertex `{id}`"),
            GraphViolation::DanglingEndpoint { left, right } => {
                write!(f, "edge ({left}, {right}) references an unknown vertex")
            }
            GraphViolation::DuplicateEdge { left, right } => {
                write!(f, "duplicate edge ({left}, {right})")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {}", join(.0))]
    InvalidGraph(Vec<GraphViolation>),
    #[error("not a matching in this graph: {0}")]
    InvalidMatching(String),
    #[error("matching does not saturate the left side")]
    NotSaturating,
    #[error("invalid ordering: {0}")]
    InvalidPermutation(String),
    #[error("state budget exceeded: reached {reached} states (budget {budget})")]
    StateBudgetExceeded { reached: usize, budget: usize },
    #[error("edge budget exceeded: {edges} edges (limit {limit})")]
    EdgeBudgetExceeded { edges: usize, limit: usize },
    #[error("domain too large: {size} points (limit {limit})")]
    DomainBudgetExceeded { size: usize, limit: usize },
    #[error("unknown state")]
    UnknownState,
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("invalid concept class: {0}")]
    InvalidConceptClass(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn join(violations: &[GraphViolation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

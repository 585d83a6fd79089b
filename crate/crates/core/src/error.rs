use thiserror::Error;

/// Errors produced by the solvers, builders and parsers in this crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("nesting depth exceeds {limit} at byte {offset}")]
    TooDeep { offset: usize, limit: usize },

    #[error("infeasible constraints: {0}")]
    Infeasible(String),

    #[error("{which} tree has a node with {found} children, but at most {allowed} are allowed")]
    DegreeViolation {
        which: &'static str,
        found: usize,
        allowed: usize,
    },

    #[error("input too large: {0}")]
    SizeCap(String),

    #[error("inconsistent decision tree: {0}")]
    InconsistentDecisionTree(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("randomized solver disagrees with the deterministic one: {0}")]
    Disagreement(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

use crate::params::MethodId;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The parameters lie outside the convergence region of the requested method.
    #[error("region error ({method}): {constraint}; valid alternatives: {}", list_methods(.alternatives))]
    Region {
        method: MethodId,
        constraint: String,
        alternatives: Vec<MethodId>,
    },

    /// The method is formally valid but numerically ill-conditioned at this point.
    #[error("conditioning error ({method}): {reason}; valid alternatives: {}", list_methods(.alternatives))]
    Conditioning {
        method: MethodId,
        reason: String,
        alternatives: Vec<MethodId>,
    },

    /// A table or truncation cap was exceeded.
    #[error("capacity error: {what} exceeds cap {cap}")]
    Capacity { what: String, cap: usize },

    /// The argument belongs to a different evaluation path.
    #[error("routing error: {0}")]
    Routing(String),
}

fn list_methods(methods: &[MethodId]) -> String {
    if methods.is_empty() {
        return "none".to_owned();
    }
    methods
        .iter()
        .map(|m| m.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn region(
    method: MethodId,
    constraint: impl Into<String>,
    alternatives: &[MethodId],
) -> Error {
    Error::Region {
        method,
        constraint: constraint.into(),
        alternatives: alternatives.to_vec(),
    }
}

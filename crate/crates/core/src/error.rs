use std::fmt;

use serde::Serialize;

/// A single broken invariant reported by descriptor or variety validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Short stable identifier of the invariant.
    pub invariant: &'static str,
    pub message: String,
}

impl Violation {
    pub fn new(invariant: &'static str, message: impl Into<String>) -> Self {
        Violation {
            invariant,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.invariant, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("malformed order expression: {0}")]
    Malformed(String),

    #[error("validation failed: {}", join(.0))]
    Invalid(Vec<Violation>),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("truncation width {n} is below the threshold n0 = {n0}")]
    BelowThreshold { n: u64, n0: u64 },

    #[error("standing hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("resource bound exceeded: {0}")]
    Resource(String),

    #[error("linear algebra: {0}")]
    Linalg(String),

    #[error("basis {basis} is not compatible with chain member {member} (dim {dim}, {found} basis vectors inside)")]
    IncompatibleBasis {
        basis: &'static str,
        member: usize,
        dim: usize,
        found: usize,
    },

    #[error("subspace is not isotropic: form(v{x}, v{y}) != 0")]
    NotIsotropic { x: usize, y: usize },
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

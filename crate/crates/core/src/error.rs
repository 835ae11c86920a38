use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::setalg::Vertex;

/// A hypothesis of the indistinguishability search that does not hold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaPrecondition {
    SetNotGeneralized { index: usize },
    AmbientNotGeneralized,
    IntersectionFinite,
    DifferenceFinite,
    IntersectionGeneralized,
}

impl fmt::Display for LemmaPrecondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LemmaPrecondition::SetNotGeneralized { index } => {
                write!(f, "X[{index}] is not a generalized vertex")
            }
            LemmaPrecondition::AmbientNotGeneralized => write!(f, "A is not a generalized vertex"),
            LemmaPrecondition::IntersectionFinite => write!(f, "A ∩ S is finite"),
            LemmaPrecondition::DifferenceFinite => write!(f, "A ∖ S is finite"),
            LemmaPrecondition::IntersectionGeneralized => {
                write!(f, "A ∩ S is a generalized vertex")
            }
        }
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Position-tagged parse failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Error)]
#[error("{line}:{column}: expected {}, found {found}", expected.join(" | "))]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {0} is not in the universe")]
    UnknownVertex(Vertex),
    #[error("precondition violated: {}", join(.0))]
    PreconditionViolated(Vec<LemmaPrecondition>),
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("ultragraph is not finite and acyclic: {0}")]
    NotFiniteAcyclic(String),
    #[error("subspace is not closed under left multiplication")]
    NotALeftIdeal,
    #[error("subspace is not spanned by homogeneous elements")]
    NotGraded,
    #[error("element is not homogeneous")]
    NotHomogeneous,
    #[error("element is not idempotent")]
    NotIdempotent,
    #[error("syntax error at {0}")]
    Syntax(SyntaxError),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

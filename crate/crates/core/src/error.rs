use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("tuple of arity {found} in a view of arity {expected}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("invalid constant {0:?}")]
    InvalidConstant(String),

    #[error("relation {0:?} declared twice")]
    DuplicateRelation(String),

    #[error("constant {constant} in relation {relation:?} is not in the declared domain")]
    ConstantOutsideDomain { relation: String, constant: String },

    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown relation {0:?}")]
    UnknownRelation(String),

    #[error("index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },

    #[error("union of arity {left} with arity {right}")]
    UnionArityMismatch { left: usize, right: usize },

    #[error("term mixes coproduct components")]
    CrossComponent,

    #[error("bound {bound} is below the required arity {required}")]
    BoundTooSmall { bound: usize, required: usize },

    #[error("closure exceeded the ceiling of {limit} views")]
    ResourceLimit { limit: usize },

    #[error("result of {term} is not a relation of the target")]
    ResultNotInTarget { term: String },

    #[error("endpoints do not chain: {0}")]
    EndpointMismatch(String),

    #[error("morphisms built at bounds {left} and {right}")]
    BoundMismatch { left: usize, right: usize },

    #[error("flux view {view} has no witness over the target at bound {bound}")]
    FluxViewNotExpressible { view: String, bound: usize },

    #[error("square does not commute")]
    SquareNotCommuting,

    #[error("program target is not the closure of {0:?}")]
    TargetNotClosed(String),

    #[error("view {0} is outside the flux")]
    NotRewritable(String),

    #[error("view {view} is in the flux but has no witness over the target at bound {bound}")]
    WitnessNotFound { view: String, bound: usize },

    #[error("variable {0} defined twice")]
    DuplicateVariable(String),

    #[error("variable {0} is used but never defined")]
    UndeclaredVariable(String),

    #[error("equation for {0} has a bare variable on the right-hand side")]
    BareVariableRhs(String),

    #[error("cyclic system: {}", .0.join(" -> "))]
    CyclicSystem(Vec<String>),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable machine-readable name, used after `ERROR` in CLI output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::InvalidConstant(_) => "InvalidConstant",
            Error::DuplicateRelation(_) => "DuplicateRelation",
            Error::ConstantOutsideDomain { .. } => "ConstantOutsideDomain",
            Error::Syntax { .. } => "SyntaxError",
            Error::UnknownRelation(_) => "UnknownRelation",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::UnionArityMismatch { .. } => "UnionArityMismatch",
            Error::CrossComponent => "CrossComponent",
            Error::BoundTooSmall { .. } => "BoundTooSmall",
            Error::ResourceLimit { .. } => "ResourceLimit",
            Error::ResultNotInTarget { .. } => "ResultNotInTarget",
            Error::EndpointMismatch(_) => "EndpointMismatch",
            Error::BoundMismatch { .. } => "BoundMismatch",
            Error::FluxViewNotExpressible { .. } => "FluxViewNotExpressible",
            Error::SquareNotCommuting => "SquareNotCommuting",
            Error::TargetNotClosed(_) => "TargetNotClosed",
            Error::NotRewritable(_) => "NotRewritable",
            Error::WitnessNotFound { .. } => "WitnessNotFound",
            Error::DuplicateVariable(_) => "DuplicateVariable",
            Error::UndeclaredVariable(_) => "UndeclaredVariable",
            Error::BareVariableRhs(_) => "BareVariableRHS",
            Error::CyclicSystem(_) => "CyclicSystem",
            Error::Io { .. } => "IoError",
        }
    }

    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}

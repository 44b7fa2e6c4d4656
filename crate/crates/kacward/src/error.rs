//! Error type shared by the whole crate.

use num_complex::Complex64;
use thiserror::Error;

/// Errors reported by graph construction, matrix assembly and the
/// partition-function / regime machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("edge ({}, {}) and edge ({}, {}) cross away from a shared endpoint", .0.0, .0.1, .1.0, .1.1)]
    CrossingEdges((u64, u64), (u64, u64)),

    #[error("graph is not simple: {0}")]
    NotSimple(String),

    #[error("edge references unknown vertex id {0}")]
    DanglingEdge(u64),

    #[error("duplicate vertex id {0}")]
    DuplicateVertex(u64),

    #[error("vertices {0} and {1} share the same position")]
    DuplicatePosition(u64, u64),

    #[error("vertex {0} has degree zero")]
    ZeroDegree(u64),

    #[error("face {index} is invalid: {reason}")]
    InvalidFace { index: usize, reason: String },

    #[error("unknown face index {0}")]
    UnknownFace(usize),

    #[error("unknown vertex index {0}")]
    UnknownVertex(usize),

    #[error("directed edge has zero length")]
    DegenerateEdge,

    #[error("subtiling has no interior vertices")]
    EmptyInterior,

    #[error("operation needs a dual embedding but none was supplied")]
    MissingDual,

    #[error("weight system covers {got} edges but the graph has {expected}")]
    MissingWeight { expected: usize, got: usize },

    #[error("weight on edge ({}, {}) is zero", .0.0, .0.1)]
    ZeroWeight((u64, u64)),

    #[error("{what} too large for exact enumeration: {got} exceeds the limit {limit}")]
    TooLarge {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("invalid inverse temperature {beta}: {reason}")]
    InvalidBeta {
        beta: Complex64,
        reason: &'static str,
    },

    #[error("certified operator norm {norm} is not below one; trace series diverges")]
    NotInRegime { norm: f64 },

    #[error("Re cosh(beta*J) <= 0 on edge ({}, {}); principal logarithm branch fails", .0.0, .0.1)]
    BranchFailure((u64, u64)),

    #[error("eigenvalue iteration failed to converge: {0}")]
    NoConvergence(String),

    #[error("base weight system is not contractive at vertex {vertex}: arctan sum {sum} > pi/2")]
    NotContractive { vertex: u64, sum: f64 },

    #[error("rhombus {index} is not a rhombus: {reason}")]
    NotRhombic { index: usize, reason: String },

    #[error("rhombus angle {theta} on edge ({}, {}) violates the declared bounds", .edge.0, .edge.1)]
    AngleOutOfBounds { edge: (u64, u64), theta: f64 },

    #[error("coupling constants violate the declared bounds: {0}")]
    CouplingBounds(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

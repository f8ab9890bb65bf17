use alloc::string::String;

use crate::grid::DomainKind;
use crate::solver::Trace;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("operation requires a {expected:?} domain, got {found:?}")]
    DomainMismatch { expected: DomainKind, found: DomainKind },
    #[error("expected {expected} samples, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite sample at node {0}")]
    NonFinite(usize),
    #[error("section of degree {section} used with a connection of degree {connection}")]
    DegreeMismatch { section: i64, connection: i64 },
    #[error("link field flux deviates from an integer by {deviation:e}")]
    IllFormedLinks { deviation: f64 },
    #[error("input is not holomorphic: sup |dbar f| = {residual:e}")]
    NotHolomorphic { residual: f64 },
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error("solver failed ({reason}) after {} iterations", trace.records.len())]
    Solver { reason: SolverFailure, trace: Trace },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverFailure {
    NonConvergence,
    SingularSystem,
}

impl core::fmt::Display for SolverFailure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SolverFailure::NonConvergence => f.write_str("no convergence"),
            SolverFailure::SingularSystem => f.write_str("singular Newton system"),
        }
    }
}

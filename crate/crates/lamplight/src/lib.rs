//! Desk-scale computations on lamplighter graphs and wreath products of
//! graphs: exact distances via the travelling-salesman formula, coarse
//! homotopy and persistence certificates, leaf structure, amenability
//! certificates, and explicit aptolic quasi-isometries.
//!
//! The library works with finite graphs throughout. Infinite graphs (lines,
//! grids, regular trees, lamplighter graphs over them) are represented as
//! finite *windows* carrying a descriptor; operations that could be falsified
//! by window truncation consult the descriptor and fail loudly instead of
//! returning a silently wrong answer.

pub mod amenability;
pub mod graph;
pub mod homotopy;
pub mod leaves;
pub mod wreath;

mod booktests;

pub use graph::{Graph, VertexSet, WindowDescriptor};
pub use wreath::{Colouring, LampVertex, MaterializedWindow, WreathElement, WreathSpace};

/// Errors shared by all modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown vertex: {0}")]
    UnknownVertex(String),
    #[error("graph is disconnected, but the operation requires connectivity")]
    Disconnected,
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),
    #[error("window too small: {0}")]
    Window(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

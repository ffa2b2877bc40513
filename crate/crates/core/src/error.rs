use thiserror::Error;

/// Errors produced by graph construction, divisor arithmetic and the rank machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("graph has no vertices")]
    Empty,
    #[error("graph is disconnected: vertex {0:?} is unreachable from {1:?}")]
    Disconnected(String, String),
    #[error("edge {edge} references undeclared vertex {vertex:?}")]
    DanglingEdge { edge: usize, vertex: String },
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("edge {0} is not a bridge")]
    NotABridge(usize),
    #[error("edge id {0} out of range")]
    UnknownEdge(usize),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("base vertex {0:?} is not a vertex of the host graph")]
    BadBaseVertex(String),
    #[error("vertex {0:?} has no counterpart in the target graph")]
    VertexNotInHost(String),
    #[error("divisor belongs to a different graph")]
    HostMismatch,
    #[error("operation requires a loopless graph")]
    HasLoops,
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(i64, i64),
    #[error("input divisor is not reduced at {0:?}")]
    NotReducedInput(String),
    #[error("enumeration budget exceeded: {0}")]
    TooLarge(String),
    #[error("hyperellipticity requires genus >= 2, got {0}")]
    GenusTooSmall(i64),
    #[error("expected weighted genus 3, got {0}")]
    WrongGenus(i64),
    #[error("graph is hyperelliptic")]
    IsHyperelliptic,
    #[error("unknown named graph {0:?}")]
    UnknownName(String),
    #[error("corpus budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("negative vertex weight at {0:?}")]
    NegativeWeight(String),
    #[error("invalid metric point: {0}")]
    InvalidPoint(String),
    #[error("invalid input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

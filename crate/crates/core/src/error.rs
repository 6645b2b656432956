use alloc::string::String;
use alloc::vec::Vec;

use crate::engine::Chip;
use crate::tree::VertexId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("arity must be at least 2, got {0}")]
    InvalidArity(u32),
    #[error("root has no parent slot")]
    RootHasNoSlot,
    #[error("chip label 0 is not allowed")]
    ZeroLabel,
    #[error("chip {0} appears more than once")]
    DuplicateChip(Chip),
    #[error("chip {chip} not present on vertex {vertex}")]
    ChipNotPresent { vertex: VertexId, chip: Chip },
    #[error("wrong selection size: expected {expected} chips, got {got}")]
    WrongSelectionSize { expected: usize, got: usize },
    #[error("configurations belong to different arities")]
    ShapeMismatch,
    #[error("script illegal at step {step}: {reason}")]
    ScriptIllegal { step: usize, reason: String },
    #[error("script ended on an unstable configuration")]
    ScriptIncomplete,
    #[error("step limit exceeded ({0} fires)")]
    StepLimitExceeded(u64),
    #[error("not an endgame-start shape; offending vertices: {0:?}")]
    NotEndgameShape(Vec<VertexId>),
    #[error("vertex {vertex} not ready in wave {wave}: holds {held} chips")]
    VertexNotReady { wave: usize, vertex: VertexId, held: usize },
    #[error("enumeration truncated; no exact count")]
    Truncated,
    #[error("{0} is out of the stated range")]
    OutOfRange(String),
    #[error("non-integral division in {0}")]
    NonIntegralDivision(String),
    #[error("missing T value for level {0}")]
    MissingTLevel(u32),
    #[error("vertex {0} holds multiple chips")]
    MultipleChips(VertexId),
    #[error("choice out of range: {0}")]
    ChoiceOutOfRange(String),
    #[error("symmetry violated: {0}")]
    SymmetryViolated(String),
}

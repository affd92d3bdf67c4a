use thiserror::Error;

use crate::point::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {0} is not a vertex of the graph")]
    NotAVertex(Point),

    #[error("operation needs an extensional graph with a finite vertex list")]
    UnsupportedMode,

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    /// `((x0, y0), (x1, y1))` is not an edge of the product graph.
    #[error("seed pair is not joined to its first iterate by a product-graph edge")]
    SeedEdge,

    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    #[error("no edge-compatible image point for the {coordinate} sequence at step {step}")]
    SelectionFailure { step: usize, coordinate: char },

    #[error("hypothesis violated at step {step}: {quantity} = {lhs:e} exceeds bound {rhs:e}")]
    HypothesisViolation {
        step: usize,
        quantity: &'static str,
        lhs: f64,
        rhs: f64,
    },

    #[error("check not applicable: {0}")]
    Inapplicable(String),

    #[error("map evaluation failed: {0}")]
    Map(String),
}

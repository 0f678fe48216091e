use thiserror::Error;

use crate::complex::{Simplex, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed complex: {0}")]
    MalformedComplex(String),

    #[error("simplex {0} is not in the complex")]
    SimplexNotFound(Simplex),

    #[error("vertex {0} is not in the complex")]
    VertexNotFound(VertexId),

    #[error("complex is not chromatic: {0}")]
    NotChromatic(String),

    #[error("invalid instant graph: {0}")]
    InvalidGraph(String),

    #[error("not a facet of the chromatic subdivision: {0}")]
    NotAFacet(String),

    #[error("facet budget exceeded: {needed} facets requested, budget is {budget}")]
    FacetBudget { needed: usize, budget: usize },

    #[error("search budget of {0} nodes exceeded")]
    SearchBudget(u64),

    #[error("invalid adversary: {0}")]
    InvalidAdversary(String),

    #[error("input configuration is outside the condition")]
    OutsideCondition,

    #[error("adversary admits no execution for this input")]
    EmptyAdversary,

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("point lies outside the realization")]
    OutsideRealization,

    #[error("point is outside the star of the retraction center")]
    OutsideStar,

    #[error("radial projection from its own center is undefined")]
    DegenerateProjection,

    #[error("geometrization is not contracting: {0}")]
    NotContracting(String),

    #[error("invalid task: {0}")]
    InvalidTask(String),

    #[error("carrier is empty on simplex {0}")]
    EmptyCarrier(Simplex),

    #[error("vertex choice violates the carrier at vertex {0}")]
    InvalidChoice(VertexId),

    #[error("invalid condition: {0}")]
    InvalidCondition(String),

    #[error("vertex {0} has no carrier tag")]
    Untagged(VertexId),

    #[error("parse error: {0}")]
    Parse(String),
}

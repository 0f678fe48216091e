//! Exact combinatorial topology for colorless tasks under message adversaries.
//!
//! The crate covers simplicial complexes and carrier maps, immediate-snapshot
//! graphs and the standard chromatic subdivision, symbolic message
//! adversaries over ultimately periodic words, exact rational geometry
//! (Chromatic Average, geometrization, radial retraction), colorless tasks,
//! and a decision procedure for k-set agreement on finite condition
//! complexes.

pub mod adversary;
pub mod chr;
pub mod complex;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod rational;
pub mod solvability;
pub mod task;

pub use adversary::{AdversarySpec, MessageAdversary, UpWord};
pub use complex::{
    check_carried, check_simplicial, AbstractComplex, Carrier, ChromaticComplex, Simplex,
    SimplicialMap, Value, ValueOrder, VertexData, VertexId,
};
pub use error::{Error, Result};
pub use geometry::BaryPoint;
pub use graph::{enumerate_ims, InstantGraph, ProcSet};
pub use rational::Rational;
pub use solvability::{Condition, ConditionComplex, Decision};
pub use task::{ColorlessTask, Delta};

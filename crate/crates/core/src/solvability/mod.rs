//! Condition-based solvability of colorless tasks.

pub mod condition;
pub mod decide;
pub mod ucomplex;

pub use condition::{c1_holds, c2_holds, Condition};
pub use decide::{decide, decide_condition, decide_exhaustive, is_maximal, Decision, Maximality, DEFAULT_SEARCH_BUDGET};
pub use ucomplex::{build_u, carrier_on_u, kin, ConditionComplex, UCarrier};

//! Cyclotomic searches: the Q(d, m) existence threshold, constraint systems that
//! encode the lifting conditions through class labels, a backtracking solver over
//! `F_q`, and repair of lifting data at suspect positions.

pub mod builders;
pub mod qbound;
pub mod repair;
pub mod solver;
pub mod system;
mod z125;

use crate::algebra::AlgebraError;
use crate::catalog::CatalogError;
use crate::lifting::LiftingError;

pub use builders::{SystemBuilder, SystemRegistry, SystemRequest};
pub use qbound::{q_bound, u_sum, QBound};
pub use repair::{repair_block, widen_to_blocks, RepairOutcome};
pub use solver::{solve, solve_any, Assignment, SolveOutcome, SolveStatus, DEFAULT_BUDGET};
pub use system::{ConstraintSystem, Label, LinearForm, LiftingTemplate, SystemSummary, UniformGroup};

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("unknown constraint system {0:?}")]
    UnknownSystem(String),
    #[error("{0}")]
    Parameters(String),
    #[error("the family does not have the required pattern: {0}")]
    Pattern(String),
    #[error("inconsistent constraint system: {0}")]
    Inconsistent(String),
    #[error("no completion exists with the other values held fixed")]
    NoCompletion,
    #[error("search budget exhausted after {0} values")]
    Budget(u64),
    #[error("lifting conditions fail away from the suspect positions: {0}")]
    NotLocal(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Lifting(#[from] LiftingError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

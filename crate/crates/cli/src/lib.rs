//! Batch front-end: named operations over the core library, recipes chaining
//! them, and the summary printed after a run.

pub mod artifact;
pub mod ops;
pub mod recipe;

use fdf_core::catalog::CatalogError;
use fdf_core::codes::CodeError;
use fdf_core::designs::DesignError;
use fdf_core::families::FamilyError;
use fdf_core::lifting::LiftingError;
use fdf_core::search::SearchError;

pub use artifact::{Artifact, ArtifactKind};
pub use ops::{Op, OpRegistry, StepContext, StepOutput};
pub use recipe::{run_recipe, Recipe, RunSummary, Step, StepRecord};

pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments, unknown names, malformed or missing input files.
    #[error("{0}")]
    Usage(String),
    /// A construction or check failed on well-formed input.
    #[error("{0}")]
    Failed(String),
    #[error("search budget exhausted after {0} values")]
    Budget(u64),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failed(_) => EXIT_VERIFICATION,
            CliError::Budget(_) => EXIT_BUDGET,
        }
    }

    /// The same error with `context: ` in front of its message.
    pub fn context(self, context: &str) -> Self {
        match self {
            CliError::Usage(m) => CliError::Usage(format!("{context}: {m}")),
            CliError::Failed(m) => CliError::Failed(format!("{context}: {m}")),
            b @ CliError::Budget(_) => b,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn failed(msg: impl Into<String>) -> CliError {
    CliError::Failed(msg.into())
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::Unknown(_)
            | CatalogError::Syntax(_)
            | CatalogError::Arity { .. }
            | CatalogError::Parameters(_)
            | CatalogError::NoLifting(_) => usage(e.to_string()),
            other => failed(other.to_string()),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Budget(n) => CliError::Budget(n),
            SearchError::UnknownSystem(_) | SearchError::Parameters(_) => usage(e.to_string()),
            SearchError::Catalog(c) => c.into(),
            other => failed(other.to_string()),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::Json(_) | FamilyError::Invalid(_) => usage(e.to_string()),
            other => failed(other.to_string()),
        }
    }
}

impl From<LiftingError> for CliError {
    fn from(e: LiftingError) -> Self {
        failed(e.to_string())
    }
}

impl From<DesignError> for CliError {
    fn from(e: DesignError) -> Self {
        match e {
            DesignError::Json(_) => usage(e.to_string()),
            other => failed(other.to_string()),
        }
    }
}

impl From<CodeError> for CliError {
    fn from(e: CodeError) -> Self {
        match e {
            CodeError::Json(_) => usage(e.to_string()),
            other => failed(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        usage(e.to_string())
    }
}

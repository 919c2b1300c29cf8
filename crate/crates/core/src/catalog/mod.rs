//! Named families: the classical strong difference families and the explicit
//! data sets, selectable at runtime by name with optional integer parameters.

mod classical;
mod printed;

use std::sync::OnceLock;

use crate::algebra::AlgebraError;
use crate::families::{DesignFamily, FamilyError};
use crate::lifting::{LiftingData, LiftingError};

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown catalog entry {0:?}")]
    Unknown(String),
    #[error("cannot parse catalog reference {0:?}")]
    Syntax(String),
    #[error("{name} takes {expected} parameter(s), got {found}")]
    Arity { name: &'static str, expected: usize, found: usize },
    #[error("{0}")]
    Parameters(String),
    #[error("{0} has no lifting datum")]
    NoLifting(&'static str),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Lifting(#[from] LiftingError),
}

/// One named construction in the registry.
pub trait CatalogEntry: Send + Sync {
    fn name(&self) -> &'static str;

    /// Names of the integer parameters, in call order.
    fn params(&self) -> &'static [&'static str] {
        &[]
    }

    /// Parameters used when the entry is listed or shown without arguments.
    fn default_params(&self) -> &'static [u64] {
        &[]
    }

    fn description(&self) -> &'static str;

    fn family(&self, params: &[u64]) -> Result<DesignFamily, CatalogError>;

    /// The lifting datum behind a frame family, for entries that have one.
    fn lifting(&self, _params: &[u64]) -> Result<LiftingData, CatalogError> {
        Err(CatalogError::NoLifting(self.name()))
    }

    fn has_lifting(&self) -> bool {
        false
    }
}

pub struct Catalog {
    entries: Vec<Box<dyn CatalogEntry>>,
}

impl Catalog {
    pub fn new() -> Self {
        Catalog { entries: Vec::new() }
    }

    /// The built-in registry, shared process-wide.
    pub fn standard() -> &'static Catalog {
        static STANDARD: OnceLock<Catalog> = OnceLock::new();
        STANDARD.get_or_init(|| {
            let mut c = Catalog::new();
            classical::register(&mut c);
            printed::register(&mut c);
            c
        })
    }

    pub fn register(&mut self, entry: Box<dyn CatalogEntry>) {
        assert!(self.get(entry.name()).is_none(), "duplicate catalog entry {}", entry.name());
        self.entries.push(entry);
    }

    pub fn entries(&self) -> impl Iterator<Item = &dyn CatalogEntry> {
        self.entries.iter().map(|e| e.as_ref())
    }

    pub fn get(&self, name: &str) -> Option<&dyn CatalogEntry> {
        self.entries.iter().find(|e| e.name() == name).map(|e| e.as_ref())
    }

    /// Resolves `name`, `name:1,2` or `name(1,2)` to an entry and its parameters.
    /// Missing parameters fall back to the entry's defaults.
    pub fn resolve(&self, reference: &str) -> Result<(&dyn CatalogEntry, Vec<u64>), CatalogError> {
        let (name, params) = parse_reference(reference)?;
        let entry = self.get(&name).ok_or_else(|| CatalogError::Unknown(name.clone()))?;
        let params = if params.is_empty() { entry.default_params().to_vec() } else { params };
        if params.len() != entry.params().len() {
            return Err(CatalogError::Arity {
                name: entry.name(),
                expected: entry.params().len(),
                found: params.len(),
            });
        }
        Ok((entry, params))
    }

    pub fn family(&self, reference: &str) -> Result<DesignFamily, CatalogError> {
        let (entry, params) = self.resolve(reference)?;
        entry.family(&params)
    }

    pub fn lifting(&self, reference: &str) -> Result<LiftingData, CatalogError> {
        let (entry, params) = self.resolve(reference)?;
        entry.lifting(&params)
    }
}

impl Default for Catalog {
    fn default() -> Self {
        Self::new()
    }
}

fn parse_reference(s: &str) -> Result<(String, Vec<u64>), CatalogError> {
    let s = s.trim();
    let syntax = || CatalogError::Syntax(s.to_string());
    let (name, args) = if let Some((name, rest)) = s.split_once(':') {
        (name, rest)
    } else if let Some((name, rest)) = s.split_once('(') {
        (name, rest.strip_suffix(')').ok_or_else(syntax)?)
    } else {
        (s, "")
    };
    if name.is_empty() {
        return Err(syntax());
    }
    let params = args
        .split(',')
        .map(str::trim)
        .filter(|a| !a.is_empty())
        .map(|a| a.parse::<u64>().map_err(|_| syntax()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((name.trim().to_string(), params))
}

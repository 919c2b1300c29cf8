//! Constant composition codes from partitioned difference families, and
//! frequency-hopping sequences from elementary frames over cyclic groups.

pub mod ccc;
pub mod fhs;

use crate::algebra::{AbelianGroup, AlgebraError, CrtIso, GroupKind};
use crate::families::{DesignFamily, FamilyError};
use crate::lifting::LiftingError;

pub use ccc::{ccc_bound, ccc_from_pdf, verify_ccc, Ccc, CccReport, DistanceSummary};
pub use fhs::{
    correlation_profile, fhs_bound, fhs_from_elementary_fdf, fhs_max_correlation, partial_hamming,
    verify_strictly_optimal, Fhs, OptimalityReport,
};

#[derive(Debug, thiserror::Error)]
pub enum CodeError {
    #[error("{0}")]
    Parameters(String),
    #[error("the bound does not apply: denominator {0} is not positive")]
    BoundInapplicable(String),
    #[error("the family is not over a cyclic group")]
    NotCyclic,
    #[error("the family does not verify: {0}")]
    Unverified(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Lifting(#[from] LiftingError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// The same family over `Z_n` through the CRT isomorphism, or a clone when the
/// group is already cyclic.
pub fn cyclic_image(fam: &DesignFamily) -> Result<DesignFamily, CodeError> {
    if matches!(fam.group.kind(), GroupKind::Cyclic(_)) {
        return Ok(fam.clone());
    }
    let crt = CrtIso::new(&fam.group)?;
    let target: AbelianGroup = crt.target().clone();
    let subgroup = match &fam.subgroup {
        Some(n) => Some(n.map_into(&target, |x| crt.apply(x))?),
        None => None,
    };
    Ok(DesignFamily {
        kind: fam.kind,
        group: target,
        subgroup,
        lambda: fam.lambda,
        blocks: fam.blocks.iter().map(|b| b.iter().map(|&x| crt.apply(x)).collect()).collect(),
        frame_partition: fam.frame_partition.clone(),
        provenance: format!("cyclic image of: {}", fam.provenance),
    })
}

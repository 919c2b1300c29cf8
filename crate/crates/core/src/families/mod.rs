//! Difference-family data model, difference lists and verification.

pub mod delta;
pub mod dm;
pub mod verify;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{AbelianGroup, AlgebraError, GroupDescriptor, GroupElement, Subgroup};

pub use delta::{delta_block, delta_counts};
pub use dm::{verify_dm, DifferenceMatrix, DmReport};
pub use verify::{
    verify_fdf, verify_pdf, verify_relative_df, verify_sdf, FdfReport, PdfReport, RelativeReport,
    SdfReport, Violation,
};

/// Position-ordered multiset of group elements.
pub type BaseBlock = Vec<GroupElement>;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    #[serde(rename = "SDF")]
    Sdf,
    #[serde(rename = "RelativeDF")]
    RelativeDf,
    #[serde(rename = "FDF")]
    Fdf,
    #[serde(rename = "PDF")]
    Pdf,
}

#[derive(Debug, thiserror::Error)]
pub enum FamilyError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("block {0} has fewer than two elements")]
    SingletonBlock(usize),
    #[error("expected a family of kind {expected}, found {found:?}")]
    WrongKind { expected: &'static str, found: FamilyKind },
    #[error("the family has no subgroup")]
    MissingSubgroup,
    #[error("the family has no frame partition")]
    MissingPartition,
    #[error("invalid frame partition: {0}")]
    BadPartition(String),
    #[error("difference matrix rows have unequal lengths")]
    RaggedMatrix,
    #[error("invalid family data: {0}")]
    Invalid(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignFamily {
    pub kind: FamilyKind,
    pub group: AbelianGroup,
    pub subgroup: Option<Subgroup>,
    pub lambda: u64,
    pub blocks: Vec<BaseBlock>,
    pub frame_partition: Option<Vec<Vec<usize>>>,
    pub provenance: String,
}

#[derive(Serialize, Deserialize)]
struct SubgroupFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generators: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    elements: Option<Vec<Value>>,
}

#[derive(Serialize, Deserialize)]
struct FamilyFile {
    kind: FamilyKind,
    group: GroupDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    subgroup: Option<SubgroupFile>,
    lambda: u64,
    blocks: Vec<Vec<Value>>,
    #[serde(rename = "framePartition", default, skip_serializing_if = "Option::is_none")]
    frame_partition: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    provenance: String,
}

pub(crate) fn subgroup_from_json(group: &AbelianGroup, v: &Value) -> Result<Subgroup, FamilyError> {
    let f: SubgroupFile = serde_json::from_value(v.clone())?;
    let decode = |xs: &[Value]| -> Result<Vec<GroupElement>, AlgebraError> {
        xs.iter().map(|x| group.decode(x)).collect()
    };
    match (f.generators, f.elements) {
        (Some(gens), None) => Ok(Subgroup::generated(group, &decode(&gens)?)?),
        (None, Some(elems)) => Ok(Subgroup::from_elements(group, &decode(&elems)?)?),
        _ => Err(FamilyError::Invalid(
            "subgroup needs exactly one of \"generators\" or \"elements\"".into(),
        )),
    }
}

impl DesignFamily {
    /// Uniform block size, if all blocks agree.
    pub fn block_size(&self) -> Option<usize> {
        let k = self.blocks.first()?.len();
        self.blocks.iter().all(|b| b.len() == k).then_some(k)
    }

    pub fn to_json(&self) -> Value {
        let g = &self.group;
        let file = FamilyFile {
            kind: self.kind,
            group: g.descriptor(),
            subgroup: self.subgroup.as_ref().map(|n| SubgroupFile {
                generators: Some(n.generators().iter().map(|&x| g.encode(x)).collect()),
                elements: None,
            }),
            lambda: self.lambda,
            blocks: self
                .blocks
                .iter()
                .map(|b| b.iter().map(|&x| g.encode(x)).collect())
                .collect(),
            frame_partition: self.frame_partition.clone(),
            provenance: self.provenance.clone(),
        };
        serde_json::to_value(file).expect("family serializes")
    }

    pub fn from_json(v: &Value) -> Result<Self, FamilyError> {
        let file: FamilyFile = serde_json::from_value(v.clone())?;
        let group = AbelianGroup::from_descriptor(&file.group)?;
        let subgroup = match &file.subgroup {
            None => None,
            Some(s) => Some(subgroup_from_json(&group, &serde_json::to_value(s)?)?),
        };
        let blocks = file
            .blocks
            .iter()
            .map(|b| b.iter().map(|x| group.decode(x)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        if blocks.iter().any(|b| b.is_empty()) {
            return Err(FamilyError::Invalid("empty base block".into()));
        }
        Ok(DesignFamily {
            kind: file.kind,
            group,
            subgroup,
            lambda: file.lambda,
            blocks,
            frame_partition: file.frame_partition,
            provenance: file.provenance,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("family serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self, FamilyError> {
        Self::from_json(&serde_json::from_str(s)?)
    }
}

//! Lifting strong difference families to frame difference families over `G x F_q`,
//! plus the difference-matrix product and the FDF to PDF step.

pub mod conditions;
pub mod construct;
pub mod matrix;
pub mod pdf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{AlgebraError, FieldDescriptor, FieldElement, FieldRef, FiniteField};
use crate::families::{DesignFamily, FamilyError, FamilyKind};

pub use conditions::{check_lifting_conditions, ConditionReport, SlotResult};
pub use construct::{coset_representatives, expand_unchecked, lift_sdf};
pub use matrix::{compose_fdf_dm, homogenize, mul_table_dm};
pub use pdf::fdf_to_pdf;

#[derive(Debug, thiserror::Error)]
pub enum LiftingError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("invalid lifting data: {0}")]
    Invalid(String),
    #[error("lifting conditions fail: {0}")]
    ConditionsFailed(String),
    #[error("difference matrix is not homogeneous")]
    NotHomogeneous,
    #[error("difference matrix has {have} rows, {need} needed")]
    TooFewRows { have: usize, need: usize },
    #[error("difference matrix index is {0}, expected 1")]
    NotLambdaOne(u64),
    #[error("not an elementary frame with |N| = k - 1: {0}")]
    NotElementary(String),
}

/// Block `block` equals `multiplier` times block `leader`, position by position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tie {
    pub block: usize,
    pub leader: usize,
    pub multiplier: FieldElement,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiftingData {
    pub sdf: DesignFamily,
    pub field: FieldRef,
    pub e: u64,
    pub d: u64,
    pub lambda: u64,
    pub phi: Vec<Vec<FieldElement>>,
    pub partition: Vec<Vec<usize>>,
    pub ties: Vec<Tie>,
}

/// Derived sizes of a consistent lifting datum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiftingShape {
    pub k: usize,
    pub t: u64,
    pub parts: u64,
}

#[derive(Serialize, Deserialize)]
struct TieFile {
    block: usize,
    leader: usize,
    multiplier: u64,
}

#[derive(Serialize, Deserialize)]
struct LiftingFile {
    sdf: Value,
    field: FieldDescriptor,
    e: u64,
    d: u64,
    lambda: u64,
    phi: Vec<Vec<u64>>,
    partition: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    ties: Vec<TieFile>,
}

fn invalid(msg: impl Into<String>) -> LiftingError {
    LiftingError::Invalid(msg.into())
}

impl LiftingData {
    /// Checks the structural and arithmetic requirements of the lifting construction.
    pub fn validate(&self) -> Result<LiftingShape, LiftingError> {
        if self.sdf.kind != FamilyKind::Sdf {
            return Err(invalid("the source family must be an SDF"));
        }
        let k = self.sdf.block_size().ok_or_else(|| invalid("SDF blocks must share one size"))?;
        if k < 2 {
            return Err(invalid("block size must be at least 2"));
        }
        let n = self.sdf.blocks.len();
        if self.phi.len() != n {
            return Err(invalid(format!("{} phi tuples for {n} blocks", self.phi.len())));
        }
        if let Some(i) = self.phi.iter().position(|p| p.len() != k) {
            return Err(invalid(format!("phi tuple {i} does not have length {k}")));
        }
        let q = self.field.order();
        if let Some(x) = self.phi.iter().flatten().find(|x| x.encoding() as u64 >= q) {
            return Err(invalid(format!("phi value {x} is not a field element")));
        }
        let (e, d, lambda) = (self.e, self.d, self.lambda);
        if e == 0 || d == 0 || (q - 1) % e != 0 || e % d != 0 {
            return Err(invalid(format!("need d | e | q-1, got d={d}, e={e}, q={q}")));
        }
        let g = self.sdf.group.order();
        let k64 = k as u64;
        if lambda == 0 || (lambda * g) % (k64 - 1) != 0 {
            return Err(invalid("lambda |G| must be divisible by k-1"));
        }
        if (d * (q - 1)) % (e * k64) != 0 {
            return Err(invalid("d(q-1) must be divisible by ek"));
        }
        let t = d * (q - 1) / (e * k64);
        if self.sdf.lambda != k64 * t * lambda {
            return Err(invalid(format!(
                "SDF index {} differs from k t lambda = {}",
                self.sdf.lambda,
                k64 * t * lambda
            )));
        }
        let parts = lambda * g / (k64 - 1);
        if self.partition.len() as u64 != parts {
            return Err(invalid(format!("{} parts, expected {parts}", self.partition.len())));
        }
        let mut seen = vec![false; n];
        for p in &self.partition {
            if p.len() as u64 != t {
                return Err(invalid(format!("part {p:?} does not have size t = {t}")));
            }
            for &i in p {
                if i >= n || std::mem::replace(&mut seen[i], true) {
                    return Err(invalid(format!("block index {i} repeated or out of range")));
                }
            }
        }
        for tie in &self.ties {
            if tie.block >= n || tie.leader >= n || tie.multiplier.is_zero() {
                return Err(invalid(format!("bad tie {tie:?}")));
            }
            if self.sdf.blocks[tie.block] != self.sdf.blocks[tie.leader] {
                return Err(invalid(format!("tied blocks {} and {} differ in G", tie.block, tie.leader)));
            }
            let f = &self.field;
            let scaled: Vec<FieldElement> =
                self.phi[tie.leader].iter().map(|&x| f.mul(x, tie.multiplier)).collect();
            if scaled != self.phi[tie.block] {
                return Err(invalid(format!("phi of block {} is not tied to {}", tie.block, tie.leader)));
            }
        }
        Ok(LiftingShape { k, t, parts })
    }

    pub fn to_json(&self) -> Value {
        let file = LiftingFile {
            sdf: self.sdf.to_json(),
            field: self.field.descriptor(),
            e: self.e,
            d: self.d,
            lambda: self.lambda,
            phi: self
                .phi
                .iter()
                .map(|p| p.iter().map(|x| x.encoding() as u64).collect())
                .collect(),
            partition: self.partition.clone(),
            ties: self
                .ties
                .iter()
                .map(|t| TieFile { block: t.block, leader: t.leader, multiplier: t.multiplier.encoding() as u64 })
                .collect(),
        };
        serde_json::to_value(file).expect("lifting data serializes")
    }

    /// Parses lifting data; `sdf` is either an inline family or `{"catalog": name}`.
    pub fn from_json(v: &Value) -> Result<Self, LiftingError> {
        let file: LiftingFile = serde_json::from_value(v.clone())?;
        let sdf = match file.sdf.get("catalog").and_then(|c| c.as_str()) {
            Some(name) => crate::catalog::Catalog::standard()
                .family(name)
                .map_err(|e| invalid(e.to_string()))?,
            None => DesignFamily::from_json(&file.sdf)?,
        };
        let field = FiniteField::from_descriptor(&file.field)?;
        let phi = file
            .phi
            .iter()
            .map(|p| p.iter().map(|&x| field.element(x)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let ties = file
            .ties
            .iter()
            .map(|t| Ok(Tie { block: t.block, leader: t.leader, multiplier: field.element(t.multiplier)? }))
            .collect::<Result<Vec<_>, AlgebraError>>()?;
        let data = LiftingData {
            sdf,
            field,
            e: file.e,
            d: file.d,
            lambda: file.lambda,
            phi,
            partition: file.partition,
            ties,
        };
        data.validate()?;
        Ok(data)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("lifting data serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self, LiftingError> {
        Self::from_json(&serde_json::from_str(s)?)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::algebra::AbelianGroup;

    /// The Z7 SDF [0,0,1,1,2,2,4,4] paired with phi values in GF(89).
    pub fn z7_f89() -> LiftingData {
        let g = AbelianGroup::cyclic(7).unwrap();
        let f = FiniteField::new(89, 1).unwrap();
        let block = [0, 0, 1, 1, 2, 2, 4, 4].iter().map(|&x| g.decode(&Value::from(x)).unwrap()).collect();
        LiftingData {
            sdf: DesignFamily {
                kind: FamilyKind::Sdf,
                group: g,
                subgroup: None,
                lambda: 8,
                blocks: vec![block],
                frame_partition: None,
                provenance: String::new(),
            },
            phi: vec![[1, 20, 14, 58, 18, 61, 26, 73].iter().map(|&x| f.from_int(x)).collect()],
            field: f,
            e: 88,
            d: 8,
            lambda: 1,
            partition: vec![vec![0]],
            ties: vec![],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_of_small_datum() {
        let data = fixtures::z7_f89();
        assert_eq!(data.validate().unwrap(), LiftingShape { k: 8, t: 1, parts: 1 });
    }

    #[test]
    fn json_round_trip() {
        let data = fixtures::z7_f89();
        let back = LiftingData::from_json_str(&data.to_json_string()).unwrap();
        assert_eq!(back, data);
    }

    #[test]
    fn arithmetic_violations() {
        let mut data = fixtures::z7_f89();
        data.d = 3;
        assert!(data.validate().is_err());
        let mut data = fixtures::z7_f89();
        data.phi[0].pop();
        assert!(data.validate().is_err());
    }
}

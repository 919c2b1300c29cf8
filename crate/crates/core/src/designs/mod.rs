//! Resolvable block designs: assembly from frame difference families, small
//! ingredient designs, exact verification and the JSON interchange format.

pub mod build;
pub mod recursion;
pub mod verify;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::AlgebraError;
use crate::families::FamilyError;

pub use build::{affine_plane, rbibd_from_fdf, trivial_rbibd};
pub use recursion::{recursion_params, RecursionParams, RecursionRule};
pub use verify::{
    verify_bibd, verify_one_rotational, verify_one_rotational_full, verify_resolution, BibdReport,
    PairDeficiency, ResolutionReport, RotationalReport, RotationalStructure,
};

#[derive(Debug, thiserror::Error)]
pub enum DesignError {
    #[error("parameter mismatch: {0}")]
    Parameters(String),
    #[error("class count mismatch: the frame has {frame} classes, the ingredient {ingredient}")]
    ClassCount { frame: usize, ingredient: usize },
    #[error("the frame difference family does not verify: {0}")]
    UnverifiedFamily(String),
    #[error("rejected design: {0}")]
    Rejected(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Points are `0..v`; blocks are sorted point lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDesign {
    pub v: usize,
    pub k: usize,
    pub lambda: u64,
    pub blocks: Vec<Vec<u32>>,
    pub provenance: String,
}

/// Parallel classes as lists of block indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub classes: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvableDesign {
    pub design: BlockDesign,
    pub resolution: Resolution,
}

#[derive(Serialize, Deserialize)]
struct DesignFile {
    v: usize,
    k: usize,
    lambda: u64,
    blocks: Vec<Vec<u32>>,
    resolution: Vec<Vec<usize>>,
    #[serde(default)]
    provenance: String,
}

impl BlockDesign {
    /// `lambda v (v-1) / (k (k-1))`, when integral.
    pub fn expected_blocks(&self) -> Option<u64> {
        let (v, k) = (self.v as u64, self.k as u64);
        let num = self.lambda * v * v.saturating_sub(1);
        let den = k * k.saturating_sub(1);
        (den > 0 && num % den == 0).then(|| num / den)
    }

    /// `lambda (v-1) / (k-1)`, when integral.
    pub fn expected_classes(&self) -> Option<u64> {
        let num = self.lambda * (self.v as u64).saturating_sub(1);
        let den = (self.k as u64).saturating_sub(1);
        (den > 0 && num % den == 0).then(|| num / den)
    }
}

impl ResolvableDesign {
    /// Sorts every block, the block list and every class, then orders the
    /// classes by their first block.
    pub fn canonicalize(&mut self) {
        let blocks = &mut self.design.blocks;
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        let mut order: Vec<usize> = (0..blocks.len()).collect();
        order.sort_by(|&a, &b| blocks[a].cmp(&blocks[b]));
        let mut new_index = vec![0; blocks.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        *blocks = order.iter().map(|&i| std::mem::take(&mut blocks[i])).collect();
        for class in &mut self.resolution.classes {
            for i in class.iter_mut() {
                if let Some(&j) = new_index.get(*i) {
                    *i = j;
                }
            }
            class.sort_unstable();
        }
        self.resolution.classes.sort();
    }

    pub fn to_json(&self) -> Value {
        let d = &self.design;
        serde_json::to_value(DesignFile {
            v: d.v,
            k: d.k,
            lambda: d.lambda,
            blocks: d.blocks.clone(),
            resolution: self.resolution.classes.clone(),
            provenance: d.provenance.clone(),
        })
        .expect("design serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("design serializes")
    }

    /// Parses without verifying; see [`import_rbibd`].
    pub fn from_json(v: &Value) -> Result<Self, DesignError> {
        let f: DesignFile = serde_json::from_value(v.clone())?;
        Ok(ResolvableDesign {
            design: BlockDesign { v: f.v, k: f.k, lambda: f.lambda, blocks: f.blocks, provenance: f.provenance },
            resolution: Resolution { classes: f.resolution },
        })
    }
}

/// Parses a design file and accepts it only if it verifies as an RBIBD with
/// its stated parameters.
pub fn import_rbibd(text: &str) -> Result<ResolvableDesign, DesignError> {
    let parsed = ResolvableDesign::from_json(&serde_json::from_str(text)?)?;
    let bibd = verify_bibd(&parsed.design);
    let res = verify_resolution(&parsed.design, &parsed.resolution);
    let mut problems = bibd.issues.clone();
    if bibd.deficient_pairs > 0 {
        problems.push(format!("{} pairs not covered exactly lambda times", bibd.deficient_pairs));
    }
    problems.extend(res.issues.iter().cloned());
    if problems.is_empty() {
        Ok(parsed)
    } else {
        Err(DesignError::Rejected(problems.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_keeps_classes_attached() {
        let mut d = ResolvableDesign {
            design: BlockDesign { v: 4, k: 2, lambda: 1, blocks: vec![vec![3, 2], vec![1, 0], vec![2, 0], vec![3, 1]], provenance: String::new() },
            resolution: Resolution { classes: vec![vec![2, 3], vec![1, 0]] },
        };
        d.canonicalize();
        assert_eq!(d.design.blocks, vec![vec![0, 1], vec![0, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(d.resolution.classes, vec![vec![0, 3], vec![1, 2]]);
    }

    #[test]
    fn round_trips_and_rejects_corruption() {
        for d in [trivial_rbibd(8).unwrap(), affine_plane(8).unwrap()] {
            let text = d.to_json_string();
            assert_eq!(import_rbibd(&text).unwrap(), d);
        }
        let mut d = affine_plane(3).unwrap();
        let moved = d.resolution.classes[0].pop().unwrap();
        d.resolution.classes[1].push(moved);
        let err = import_rbibd(&d.to_json_string()).unwrap_err().to_string();
        assert!(err.contains("class 0") && err.contains("class 1"), "{err}");
        assert!(import_rbibd("{\"v\": 3}").is_err());
    }
}

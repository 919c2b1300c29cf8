use serde::Serialize;
use serde_json::Value;

use super::FamilyError;
use crate::algebra::{AbelianGroup, GroupDescriptor, GroupElement};

/// A k x (lambda |H|) matrix over H whose row pairs have lambda-uniform differences.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceMatrix {
    pub group: AbelianGroup,
    pub rows: Vec<Vec<GroupElement>>,
    pub homogeneous: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DmReport {
    pub ok: bool,
    pub lambda: u64,
    pub homogeneous: bool,
}

impl DifferenceMatrix {
    pub fn columns(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    pub fn to_json(&self) -> Value {
        let g = &self.group;
        serde_json::json!({
            "group": g.descriptor(),
            "rows": self.rows.iter().map(|r| r.iter().map(|&x| g.encode(x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "homogeneous": self.homogeneous,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, FamilyError> {
        let desc: GroupDescriptor = serde_json::from_value(v["group"].clone())?;
        let group = AbelianGroup::from_descriptor(&desc)?;
        let rows = v["rows"]
            .as_array()
            .ok_or_else(|| FamilyError::Invalid("rows must be an array".into()))?
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| FamilyError::Invalid("row must be an array".into()))?
                    .iter()
                    .map(|x| group.decode(x).map_err(FamilyError::from))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DifferenceMatrix {
            group,
            rows,
            homogeneous: v["homogeneous"].as_bool().unwrap_or(false),
        })
    }
}

pub fn verify_dm(dm: &DifferenceMatrix) -> Result<DmReport, FamilyError> {
    let cols = dm.columns();
    if dm.rows.iter().any(|r| r.len() != cols) {
        return Err(FamilyError::RaggedMatrix);
    }
    let h = dm.group.order() as usize;
    let uniform_lambda = (cols % h == 0).then_some((cols / h) as u64);
    let mut ok = uniform_lambda.is_some() && cols > 0;
    let lambda = uniform_lambda.unwrap_or(0);
    'pairs: for i in 0..dm.rows.len() {
        for j in i + 1..dm.rows.len() {
            if !ok {
                break 'pairs;
            }
            let mut counts = vec![0u64; h];
            for c in 0..cols {
                counts[dm.group.sub(dm.rows[i][c], dm.rows[j][c]).index()] += 1;
            }
            ok = counts.iter().all(|&x| x == lambda);
        }
    }
    let is_perm = |r: &Vec<GroupElement>| {
        let mut seen = vec![false; h];
        r.len() == h && r.iter().all(|x| !std::mem::replace(&mut seen[x.index()], true))
    };
    let homogeneous = ok && lambda == 1 && dm.rows.iter().all(is_perm);
    Ok(DmReport { ok, lambda, homogeneous })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dm(rows: &[&[u32]]) -> DifferenceMatrix {
        DifferenceMatrix {
            group: AbelianGroup::cyclic(3).unwrap(),
            rows: rows.iter().map(|r| r.iter().map(|&x| GroupElement(x)).collect()).collect(),
            homogeneous: false,
        }
    }

    #[test]
    fn gf3_rows() {
        let r = verify_dm(&dm(&[&[0, 1, 2], &[0, 2, 1]])).unwrap();
        assert!(r.ok && r.homogeneous);
        let full = verify_dm(&dm(&[&[0, 0, 0], &[0, 1, 2], &[0, 2, 1]])).unwrap();
        assert!(full.ok && !full.homogeneous);
        assert!(!verify_dm(&dm(&[&[0, 1, 2], &[0, 1, 2]])).unwrap().ok);
        assert!(matches!(verify_dm(&dm(&[&[0, 1, 2], &[0, 1]])), Err(FamilyError::RaggedMatrix)));
    }
}

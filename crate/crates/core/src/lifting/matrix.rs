use super::LiftingError;
use crate::algebra::{AbelianGroup, FieldRef, GroupElement, Subgroup};
use crate::families::{verify_dm, verify_fdf, DesignFamily, DifferenceMatrix, FamilyKind};

/// The multiplication table `d_ij = r_i c_j` of GF(q), rows and columns in encoding order.
pub fn mul_table_dm(field: &FieldRef) -> DifferenceMatrix {
    let rows = field
        .elements()
        .map(|r| field.elements().map(|c| GroupElement(field.mul(r, c).encoding())).collect())
        .collect();
    DifferenceMatrix { group: AbelianGroup::additive(field.clone()), rows, homogeneous: false }
}

/// Normalizes so row 0 is zero, then deletes row 0.
pub fn homogenize(dm: &DifferenceMatrix) -> Result<DifferenceMatrix, LiftingError> {
    let report = verify_dm(dm)?;
    if !report.ok || report.lambda != 1 {
        return Err(LiftingError::NotLambdaOne(report.lambda));
    }
    let g = &dm.group;
    let first = &dm.rows[0];
    let rows: Vec<Vec<GroupElement>> = dm.rows[1..]
        .iter()
        .map(|r| r.iter().zip(first).map(|(&x, &y)| g.sub(x, y)).collect())
        .collect();
    let out = DifferenceMatrix { group: g.clone(), rows, homogeneous: true };
    if !verify_dm(&out)?.homogeneous {
        return Err(LiftingError::NotHomogeneous);
    }
    Ok(out)
}

/// `{(b_a, d_aj)}` for every frame block and every column of a homogeneous matrix,
/// a frame over `G x H` relative to `N x H`. Each frame class `P` splits into one
/// class per column, since the new frame needs `|H|` times as many classes.
pub fn compose_fdf_dm(fdf: &DesignFamily, dm: &DifferenceMatrix) -> Result<DesignFamily, LiftingError> {
    let report = verify_fdf(fdf)?;
    if !report.ok {
        return Err(LiftingError::Invalid("input frame does not verify".into()));
    }
    if fdf.lambda != 1 {
        return Err(LiftingError::Invalid("frame index must be 1".into()));
    }
    let k = fdf.block_size().expect("verified frames have uniform blocks");
    let dmr = verify_dm(dm)?;
    if !dmr.homogeneous {
        return Err(LiftingError::NotHomogeneous);
    }
    if dm.rows.len() < k {
        return Err(LiftingError::TooFewRows { have: dm.rows.len(), need: k });
    }
    let g = &fdf.group;
    let h = &dm.group;
    let group = AbelianGroup::product(vec![g.clone(), h.clone()])?;
    let cols = dm.columns();
    let mut blocks = Vec::with_capacity(fdf.blocks.len() * cols);
    for b in &fdf.blocks {
        for j in 0..cols {
            blocks.push(b.iter().enumerate().map(|(a, &x)| group.pair(x, dm.rows[a][j])).collect());
        }
    }
    let n = fdf.subgroup.as_ref().expect("verified frames carry N");
    let mut gens: Vec<GroupElement> = n.generators().iter().map(|&x| group.pair(x, h.zero())).collect();
    gens.extend(h.standard_generators().into_iter().map(|y| group.pair(g.zero(), y)));
    let partition = fdf
        .frame_partition
        .as_ref()
        .expect("verified frames carry a partition")
        .iter()
        .flat_map(|p| (0..cols).map(move |j| p.iter().map(|&i| i * cols + j).collect()))
        .collect();
    Ok(DesignFamily {
        kind: FamilyKind::Fdf,
        subgroup: Some(Subgroup::generated(&group, &gens)?),
        group,
        lambda: 1,
        blocks,
        frame_partition: Some(partition),
        provenance: format!("product with a homogeneous ({:?},{},1) difference matrix of: {}", h, k, fdf.provenance),
    })
}

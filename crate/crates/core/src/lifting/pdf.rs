use super::LiftingError;
use crate::algebra::GroupElement;
use crate::families::{verify_fdf, DesignFamily, FamilyKind};

/// `{F + h : F, h in N} u {N}` from an elementary frame with `|N| = k - 1`.
///
/// Block 0 is `N`; the translates follow, sorted by their least element.
/// Every block is stored in ascending order.
pub fn fdf_to_pdf(fdf: &DesignFamily) -> Result<DesignFamily, LiftingError> {
    let report = verify_fdf(fdf)?;
    if !report.ok {
        return Err(LiftingError::NotElementary("input frame does not verify".into()));
    }
    let n = fdf.subgroup.as_ref().expect("verified frames carry N");
    let k = fdf.block_size().expect("verified frames have uniform blocks") as u64;
    if fdf.lambda != 1 || n.order() != k - 1 {
        return Err(LiftingError::NotElementary(format!(
            "lambda = {}, |N| = {}, k = {k}",
            fdf.lambda,
            n.order()
        )));
    }
    let g = &fdf.group;
    let mut translates: Vec<Vec<GroupElement>> = Vec::with_capacity(fdf.blocks.len() * n.members().len());
    for b in &fdf.blocks {
        for &h in n.members() {
            let mut t: Vec<GroupElement> = b.iter().map(|&x| g.add(x, h)).collect();
            t.sort_unstable();
            translates.push(t);
        }
    }
    translates.sort_unstable_by_key(|t| t[0]);
    let mut blocks = vec![n.members().to_vec()];
    blocks.extend(translates);
    Ok(DesignFamily {
        kind: FamilyKind::Pdf,
        group: g.clone(),
        subgroup: None,
        lambda: k - 1,
        blocks,
        frame_partition: None,
        provenance: format!("partition from the translates of: {}", fdf.provenance),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::verify_pdf;
    use crate::lifting::{fixtures, lift_sdf};

    #[test]
    fn small_frame_partition() {
        let fdf = lift_sdf(&fixtures::z7_f89()).unwrap();
        let pdf = fdf_to_pdf(&fdf).unwrap();
        let r = verify_pdf(&pdf).unwrap();
        assert!(r.ok);
        assert_eq!(r.lambda, 7);
        assert_eq!(r.composition, vec![(7, 1), (8, 77)]);
        assert_eq!((623 - 8 + 1) / 8, 77);
    }
}

use super::conditions::check_lifting_conditions;
use super::{LiftingData, LiftingError};
use crate::algebra::{AbelianGroup, FieldElement, FieldRef, GroupElement, Subgroup};
use crate::families::{DesignFamily, FamilyKind};

/// Representatives of the cosets of `C_0^e` in `C_0^d`: generator^(d j), `0 <= j < e/d`.
pub fn coset_representatives(field: &FieldRef, e: u64, d: u64) -> Vec<FieldElement> {
    (0..e / d).map(|j| field.exp((d * j) as i64)).collect()
}

/// Builds the frame family without checking the lifting conditions.
pub fn expand_unchecked(data: &LiftingData) -> Result<DesignFamily, LiftingError> {
    data.validate()?;
    let g = &data.sdf.group;
    let f = &data.field;
    let fq = AbelianGroup::additive(f.clone());
    let group = AbelianGroup::product(vec![g.clone(), fq])?;
    let s = coset_representatives(f, data.e, data.d);
    let mut blocks = Vec::with_capacity(data.sdf.blocks.len() * s.len());
    for (fb, phi) in data.sdf.blocks.iter().zip(&data.phi) {
        for &sj in &s {
            let block: Vec<GroupElement> = fb
                .iter()
                .zip(phi)
                .map(|(&x, &y)| group.pair(x, GroupElement(f.mul(y, sj).encoding())))
                .collect();
            blocks.push(block);
        }
    }
    let ns = s.len();
    let partition = data
        .partition
        .iter()
        .map(|part| part.iter().flat_map(|&i| (0..ns).map(move |j| i * ns + j)).collect())
        .collect();
    let subgroup = Subgroup::factors(&group, &[true, false])?;
    Ok(DesignFamily {
        kind: FamilyKind::Fdf,
        group,
        subgroup: Some(subgroup),
        lambda: data.lambda,
        blocks,
        frame_partition: Some(partition),
        provenance: format!("lifted over GF({}) from: {}", f.order(), data.sdf.provenance),
    })
}

/// The frame family `[B_i . (1, s) : i, s in S]`, after checking the lifting conditions.
pub fn lift_sdf(data: &LiftingData) -> Result<DesignFamily, LiftingError> {
    let report = check_lifting_conditions(data)?;
    if !report.ok {
        let mut msg = Vec::new();
        if !report.zero_phi.is_empty() {
            msg.push(format!("zero phi at {:?}", report.zero_phi));
        }
        let bad_h = report.failing_differences();
        if !bad_h.is_empty() {
            msg.push(format!("{} difference slots fail", bad_h.len()));
        }
        let bad_p = report.failing_parts();
        if !bad_p.is_empty() {
            msg.push(format!("parts {bad_p:?} fail"));
        }
        return Err(LiftingError::ConditionsFailed(msg.join("; ")));
    }
    expand_unchecked(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::verify_fdf;
    use crate::lifting::fixtures;

    #[test]
    fn small_datum_lifts_to_verified_frame() {
        let fam = lift_sdf(&fixtures::z7_f89()).unwrap();
        assert_eq!(fam.blocks.len(), 11);
        assert_eq!(fam.group.order(), 623);
        let r = verify_fdf(&fam).unwrap();
        assert!(r.ok, "{r:?}");
    }

    #[test]
    fn failing_datum_refused() {
        let mut data = fixtures::z7_f89();
        data.phi[0].swap(0, 7);
        assert!(matches!(lift_sdf(&data), Err(LiftingError::ConditionsFailed(_))));
        assert!(expand_unchecked(&data).is_ok());
    }

    #[test]
    fn block_multiplication_invariance() {
        // the union over s of Delta(B.(1,s)) equals Delta(B).(1, C_0^8)
        let data = fixtures::z7_f89();
        let fam = expand_unchecked(&data).unwrap();
        let g = &fam.group;
        let f = &data.field;
        let lhs = crate::families::delta_counts(g, &fam.blocks).unwrap();
        let base: Vec<GroupElement> = data.sdf.blocks[0]
            .iter()
            .zip(&data.phi[0])
            .map(|(&x, &y)| g.pair(x, GroupElement(y.encoding())))
            .collect();
        let mut rhs = vec![0u64; g.order() as usize];
        for dlt in crate::families::delta_block(g, &base).unwrap() {
            let parts = g.components(dlt);
            for s in coset_representatives(f, 88, 8) {
                let y = f.mul(f.element(parts[1].0 as u64).unwrap(), s);
                rhs[g.pair(parts[0], GroupElement(y.encoding())).index()] += 1;
            }
        }
        assert_eq!(lhs, rhs);
    }
}

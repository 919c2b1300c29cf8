use serde::Serialize;

use super::delta::delta_counts;
use super::{DesignFamily, FamilyError, FamilyKind};
use crate::algebra::GroupElement;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub element: GroupElement,
    pub expected: u64,
    pub found: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SdfReport {
    pub ok: bool,
    pub mu: u64,
    pub block_size: Option<usize>,
    pub mu_even: bool,
    pub divisibility_ok: bool,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelativeReport {
    pub ok: bool,
    pub lambda: u64,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FdfReport {
    pub ok: bool,
    pub relative_ok: bool,
    pub partition_ok: bool,
    pub violations: Vec<Violation>,
    pub partition_issues: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PdfReport {
    pub ok: bool,
    pub lambda: u64,
    /// (block size, number of blocks of that size), ascending by size.
    pub composition: Vec<(usize, usize)>,
    pub partition_ok: bool,
    pub violations: Vec<Violation>,
}

fn expect_kind(fam: &DesignFamily, allowed: &[FamilyKind], name: &'static str) -> Result<(), FamilyError> {
    if allowed.contains(&fam.kind) {
        Ok(())
    } else {
        Err(FamilyError::WrongKind { expected: name, found: fam.kind })
    }
}

fn violations(counts: &[u64], expected: impl Fn(usize) -> u64) -> Vec<Violation> {
    counts
        .iter()
        .enumerate()
        .filter_map(|(i, &c)| {
            let e = expected(i);
            (c != e).then_some(Violation { element: GroupElement(i as u32), expected: e, found: c })
        })
        .collect()
}

/// Checks that the differences cover every element, zero included, exactly `lambda` times.
pub fn verify_sdf(fam: &DesignFamily) -> Result<SdfReport, FamilyError> {
    expect_kind(fam, &[FamilyKind::Sdf], "SDF")?;
    let mu = fam.lambda;
    let counts = delta_counts(&fam.group, &fam.blocks)?;
    let violations = violations(&counts, |_| mu);
    let k = fam.block_size();
    let g = fam.group.order();
    let divisibility_ok = match k {
        Some(k) => (mu * g) % (k as u64 * (k as u64 - 1)) == 0,
        None => true,
    };
    let mu_even = mu % 2 == 0;
    Ok(SdfReport {
        ok: violations.is_empty() && mu_even && divisibility_ok,
        mu,
        block_size: k,
        mu_even,
        divisibility_ok,
        violations,
    })
}

/// Checks that the differences cover `G \ N` exactly `lambda` times and miss `N`.
pub fn verify_relative_df(fam: &DesignFamily) -> Result<RelativeReport, FamilyError> {
    expect_kind(fam, &[FamilyKind::RelativeDf, FamilyKind::Fdf], "RelativeDF or FDF")?;
    let n = fam.subgroup.as_ref().ok_or(FamilyError::MissingSubgroup)?;
    if n.group() != &fam.group {
        return Err(FamilyError::Algebra(crate::algebra::AlgebraError::GroupMismatch));
    }
    let counts = if fam.blocks.is_empty() {
        vec![0u64; fam.group.order() as usize]
    } else {
        delta_counts(&fam.group, &fam.blocks)?
    };
    let lambda = fam.lambda;
    let violations = violations(&counts, |i| if n.contains(GroupElement(i as u32)) { 0 } else { lambda });
    Ok(RelativeReport { ok: violations.is_empty(), lambda, violations })
}

pub fn verify_fdf(fam: &DesignFamily) -> Result<FdfReport, FamilyError> {
    expect_kind(fam, &[FamilyKind::Fdf], "FDF")?;
    let parts = fam.frame_partition.as_ref().ok_or(FamilyError::MissingPartition)?;
    let mut seen = vec![0usize; fam.blocks.len()];
    for p in parts {
        for &i in p {
            if i >= fam.blocks.len() {
                return Err(FamilyError::BadPartition(format!("block index {i} out of range")));
            }
            seen[i] += 1;
        }
    }
    if let Some(i) = seen.iter().position(|&c| c != 1) {
        return Err(FamilyError::BadPartition(format!(
            "block {i} appears {} times in the partition",
            seen[i]
        )));
    }
    let rel = verify_relative_df(fam)?;
    let n = fam.subgroup.as_ref().expect("checked by verify_relative_df");
    let mut issues = Vec::new();
    let g = fam.group.order();
    let n_ord = n.order();
    match fam.block_size() {
        None => issues.push("blocks have mixed sizes".to_string()),
        Some(k) => {
            let k = k as u64;
            let want_parts = fam.lambda * n_ord;
            if want_parts % (k - 1) != 0 || want_parts / (k - 1) != parts.len() as u64 {
                issues.push(format!(
                    "{} parts, expected lambda*|N|/(k-1) = {}/{}",
                    parts.len(),
                    want_parts,
                    k - 1
                ));
            }
            let want_size = (g - n_ord) / (n_ord * k);
            if (g - n_ord) % (n_ord * k) != 0 {
                issues.push("(|G|-|N|) is not divisible by |N|k".to_string());
            }
            for (pi, p) in parts.iter().enumerate() {
                if p.len() as u64 != want_size {
                    issues.push(format!("part {pi} has {} blocks, expected {want_size}", p.len()));
                }
            }
        }
    }
    let (labels, cosets) = n.coset_labels();
    let trivial = labels[0];
    for (pi, p) in parts.iter().enumerate() {
        let mut hits = vec![0u64; cosets];
        for &i in p {
            for &x in &fam.blocks[i] {
                hits[labels[x.index()] as usize] += 1;
            }
        }
        let bad = hits
            .iter()
            .enumerate()
            .filter(|&(c, &h)| h != if c as u32 == trivial { 0 } else { 1 })
            .count();
        if bad > 0 {
            issues.push(format!("part {pi} misses or repeats {bad} cosets"));
        }
    }
    let partition_ok = issues.is_empty();
    Ok(FdfReport {
        ok: rel.ok && partition_ok,
        relative_ok: rel.ok,
        partition_ok,
        violations: rel.violations,
        partition_issues: issues,
    })
}

/// Blocks partition `G` (or `G \ N`) and their differences cover the nonzero part `lambda` times.
pub fn verify_pdf(fam: &DesignFamily) -> Result<PdfReport, FamilyError> {
    expect_kind(fam, &[FamilyKind::Pdf], "PDF")?;
    let g = &fam.group;
    let n = fam.subgroup.as_ref();
    let mut cover = vec![0u64; g.order() as usize];
    for b in &fam.blocks {
        for &x in b {
            cover[x.index()] += 1;
        }
    }
    let partition_ok = cover.iter().enumerate().all(|(i, &c)| {
        let excluded = n.is_some_and(|n| n.contains(GroupElement(i as u32)));
        c == if excluded { 0 } else { 1 }
    });
    let mut counts = vec![0u64; g.order() as usize];
    for b in fam.blocks.iter().filter(|b| b.len() > 1) {
        for (a, &x) in b.iter().enumerate() {
            for (c, &y) in b.iter().enumerate() {
                if a != c {
                    counts[g.sub(x, y).index()] += 1;
                }
            }
        }
    }
    let lambda = fam.lambda;
    let violations = violations(&counts, |i| {
        let x = GroupElement(i as u32);
        let excluded = i == 0 || n.is_some_and(|n| n.contains(x));
        if excluded { 0 } else { lambda }
    });
    let mut sizes: Vec<usize> = fam.blocks.iter().map(|b| b.len()).collect();
    sizes.sort_unstable();
    let mut composition: Vec<(usize, usize)> = Vec::new();
    for s in sizes {
        match composition.last_mut() {
            Some((size, count)) if *size == s => *count += 1,
            _ => composition.push((s, 1)),
        }
    }
    Ok(PdfReport {
        ok: partition_ok && violations.is_empty(),
        lambda,
        composition,
        partition_ok,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AbelianGroup, Subgroup};

    fn fam(kind: FamilyKind, g: &AbelianGroup, lambda: u64, blocks: &[&[i64]]) -> DesignFamily {
        DesignFamily {
            kind,
            group: g.clone(),
            subgroup: None,
            lambda,
            blocks: blocks
                .iter()
                .map(|b| b.iter().map(|&x| g.decode(&x.into()).unwrap()).collect())
                .collect(),
            frame_partition: None,
            provenance: String::new(),
        }
    }

    #[test]
    fn z7_sdf() {
        let g = AbelianGroup::cyclic(7).unwrap();
        let r = verify_sdf(&fam(FamilyKind::Sdf, &g, 8, &[&[0, 0, 1, 1, 2, 2, 4, 4]])).unwrap();
        assert!(r.ok);
        assert_eq!(r.mu, 8);
        let bad = verify_sdf(&fam(FamilyKind::Sdf, &g, 1, &[&[0, 1, 3]])).unwrap();
        assert!(!bad.ok);
        assert!(bad.violations.iter().any(|v| v.element.0 == 0 && v.found == 0));
    }

    #[test]
    fn difference_set_as_relative_family() {
        let g = AbelianGroup::cyclic(7).unwrap();
        let mut f = fam(FamilyKind::RelativeDf, &g, 1, &[&[0, 1, 3]]);
        f.subgroup = Some(Subgroup::trivial(&g));
        assert!(verify_relative_df(&f).unwrap().ok);
    }

    #[test]
    fn relative_family_violation() {
        let z7 = AbelianGroup::cyclic(7).unwrap();
        let z2 = AbelianGroup::cyclic(2).unwrap();
        let g = AbelianGroup::product(vec![z7, z2]).unwrap();
        let mut f = DesignFamily {
            kind: FamilyKind::RelativeDf,
            group: g.clone(),
            subgroup: Some(Subgroup::factors(&g, &[true, false]).unwrap()),
            lambda: 1,
            blocks: vec![vec![g.decode(&serde_json::json!([0, 0])).unwrap(), g.decode(&serde_json::json!([0, 1])).unwrap()]],
            frame_partition: None,
            provenance: String::new(),
        };
        let r = verify_relative_df(&f).unwrap();
        let x = g.decode(&serde_json::json!([0, 1])).unwrap();
        assert!(r.violations.contains(&Violation { element: x, expected: 1, found: 2 }));
        f.blocks.clear();
        f.subgroup = Some(Subgroup::whole(&g));
        assert!(verify_relative_df(&f).unwrap().ok);
    }

    #[test]
    fn pdf_examples() {
        let g = AbelianGroup::cyclic(5).unwrap();
        let mut f = fam(FamilyKind::Pdf, &g, 3, &[&[1, 2, 3, 4]]);
        f.subgroup = Some(Subgroup::trivial(&g));
        let r = verify_pdf(&f).unwrap();
        assert!(r.ok);
        assert_eq!(r.composition, vec![(4, 1)]);
        let overlap = fam(FamilyKind::Pdf, &g, 1, &[&[0, 1, 2], &[2, 3, 4]]);
        assert!(!verify_pdf(&overlap).unwrap().ok);
        let z2 = AbelianGroup::cyclic(2).unwrap();
        assert!(verify_pdf(&fam(FamilyKind::Pdf, &z2, 0, &[&[0], &[1]])).unwrap().ok);
    }

    #[test]
    fn wrong_kind_rejected() {
        let g = AbelianGroup::cyclic(7).unwrap();
        let f = fam(FamilyKind::Pdf, &g, 1, &[&[0, 1, 3]]);
        assert!(matches!(verify_sdf(&f), Err(FamilyError::WrongKind { .. })));
    }
}

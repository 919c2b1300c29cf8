//! Exact checks of pair coverage, resolutions and 1-rotational automorphisms.

use rayon::prelude::*;
use serde::Serialize;

use super::{BlockDesign, Resolution};
use crate::algebra::{AbelianGroup, CrtIso, GroupElement};

/// Deficiencies kept in a report; the count is always exact.
const MAX_LISTED: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PairDeficiency {
    pub x: u32,
    pub y: u32,
    pub count: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BibdReport {
    pub ok: bool,
    pub pairs_checked: u64,
    pub deficient_pairs: u64,
    /// The first deficient pairs in lexicographic order.
    pub deficiencies: Vec<PairDeficiency>,
    /// Malformed blocks and count mismatches.
    pub issues: Vec<String>,
}

/// Counts every pair of points over all blocks, one worker per first point.
pub fn verify_bibd(d: &BlockDesign) -> BibdReport {
    let v = d.v;
    let mut issues = Vec::new();
    let mut incidence: Vec<Vec<usize>> = vec![Vec::new(); v];
    for (i, b) in d.blocks.iter().enumerate() {
        if b.len() != d.k {
            issues.push(format!("block {i} has {} points, expected {}", b.len(), d.k));
        }
        let mut sorted = b.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            issues.push(format!("block {i} repeats a point"));
        }
        for &x in b {
            match incidence.get_mut(x as usize) {
                Some(list) => list.push(i),
                None => issues.push(format!("block {i} has point {x} outside 0..{v}")),
            }
        }
    }
    if d.expected_blocks() != Some(d.blocks.len() as u64) {
        issues.push(format!("{} blocks, expected lambda v(v-1)/(k(k-1))", d.blocks.len()));
    }

    let lambda = d.lambda;
    let per_point: Vec<(u64, Vec<PairDeficiency>)> = (0..v)
        .into_par_iter()
        .map_init(
            || vec![0u64; v],
            |counts, x| {
                for &i in &incidence[x] {
                    for &y in &d.blocks[i] {
                        if (y as usize) > x && (y as usize) < v {
                            counts[y as usize] += 1;
                        }
                    }
                }
                let mut bad = 0;
                let mut listed = Vec::new();
                for (y, c) in counts.iter_mut().enumerate().skip(x + 1) {
                    if *c != lambda {
                        bad += 1;
                        if listed.len() < MAX_LISTED {
                            listed.push(PairDeficiency { x: x as u32, y: y as u32, count: *c });
                        }
                    }
                    *c = 0;
                }
                (bad, listed)
            },
        )
        .collect();
    let deficient_pairs = per_point.iter().map(|(b, _)| b).sum();
    let deficiencies: Vec<PairDeficiency> =
        per_point.into_iter().flat_map(|(_, l)| l).take(MAX_LISTED).collect();
    let pairs = (v as u64) * (v as u64).saturating_sub(1) / 2;
    BibdReport { ok: issues.is_empty() && deficient_pairs == 0, pairs_checked: pairs, deficient_pairs, deficiencies, issues }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolutionReport {
    pub ok: bool,
    pub issues: Vec<String>,
}

/// Classes partition the blocks and each class partitions the points.
pub fn verify_resolution(d: &BlockDesign, r: &Resolution) -> ResolutionReport {
    let mut issues = Vec::new();
    let mut owner: Vec<Option<usize>> = vec![None; d.blocks.len()];
    for (c, class) in r.classes.iter().enumerate() {
        let mut cover = vec![0u32; d.v];
        for &b in class {
            let Some(slot) = owner.get_mut(b) else {
                issues.push(format!("class {c} names block {b}, which does not exist"));
                continue;
            };
            if let Some(prev) = slot.replace(c) {
                issues.push(format!("block {b} is in class {prev} and class {c}"));
            }
            for &x in &d.blocks[b] {
                if let Some(n) = cover.get_mut(x as usize) {
                    *n += 1;
                }
            }
        }
        let missed = cover.iter().filter(|&&n| n == 0).count();
        let repeated = cover.iter().filter(|&&n| n > 1).count();
        if missed + repeated > 0 {
            issues.push(format!("class {c} misses {missed} points and repeats {repeated}"));
        }
    }
    for (b, o) in owner.iter().enumerate() {
        if o.is_none() {
            issues.push(format!("block {b} is in no class"));
        }
    }
    if let Some(want) = d.expected_classes() {
        if want != r.classes.len() as u64 {
            issues.push(format!("{} classes, expected lambda(v-1)/(k-1) = {want}", r.classes.len()));
        }
    }
    ResolutionReport { ok: issues.is_empty(), issues }
}

/// A group of order `v - 1` acting on the points other than `fixed_point`:
/// `action[g]` is the point carrying the element of index `g`, and `t` sends it
/// to `action[g + t]`.
#[derive(Clone, Debug)]
pub struct RotationalStructure {
    pub group: AbelianGroup,
    pub fixed_point: u32,
    pub action: Vec<u32>,
}

impl RotationalStructure {
    /// `G` acting on the designs built over it: element `g` is point `g`, and
    /// `∞ = |G|` is fixed.
    pub fn of_group(group: &AbelianGroup) -> Self {
        let n = group.order() as u32;
        RotationalStructure { group: group.clone(), fixed_point: n, action: (0..n).collect() }
    }

    /// The cyclic image of `G` acting on the same points through `iso`.
    pub fn through(iso: &CrtIso) -> Self {
        let target = iso.target().clone();
        let n = target.order() as u32;
        let action = (0..n).map(|x| iso.invert(GroupElement(x)).0).collect();
        RotationalStructure { group: target, fixed_point: n, action }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RotationalReport {
    pub ok: bool,
    /// Group elements checked.
    pub elements_checked: usize,
    pub issues: Vec<String>,
}

/// Invariance of the blocks and the classes under the standard generators.
pub fn verify_one_rotational(d: &BlockDesign, r: &Resolution, rot: &RotationalStructure) -> RotationalReport {
    verify_under(d, r, rot, &rot.group.standard_generators())
}

/// Invariance under every element of the group.
pub fn verify_one_rotational_full(d: &BlockDesign, r: &Resolution, rot: &RotationalStructure) -> RotationalReport {
    let all: Vec<GroupElement> = rot.group.elements().collect();
    verify_under(d, r, rot, &all)
}

fn sorted_blocks(blocks: impl Iterator<Item = Vec<u32>>) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = blocks
        .map(|mut b| {
            b.sort_unstable();
            b
        })
        .collect();
    out.sort_unstable();
    out
}

fn verify_under(d: &BlockDesign, r: &Resolution, rot: &RotationalStructure, elems: &[GroupElement]) -> RotationalReport {
    let g = &rot.group;
    let v = d.v;
    let mut issues = Vec::new();
    if g.order() + 1 != v as u64 || rot.action.len() != v.saturating_sub(1) || rot.fixed_point as usize >= v {
        issues.push(format!("a group of order {} cannot act on {v} points fixing one", g.order()));
        return RotationalReport { ok: false, elements_checked: 0, issues };
    }
    let mut inverse = vec![u32::MAX; v];
    for (x, &p) in rot.action.iter().enumerate() {
        if p as usize >= v || p == rot.fixed_point || inverse[p as usize] != u32::MAX {
            issues.push(format!("the action is not a bijection onto the points other than {}", rot.fixed_point));
            return RotationalReport { ok: false, elements_checked: 0, issues };
        }
        inverse[p as usize] = x as u32;
    }
    if r.classes.iter().flatten().any(|&b| b >= d.blocks.len()) {
        issues.push("the resolution names a missing block".into());
        return RotationalReport { ok: false, elements_checked: 0, issues };
    }

    let blocks = sorted_blocks(d.blocks.iter().cloned());
    let class_sig = |map: &dyn Fn(u32) -> u32| -> Vec<Vec<Vec<u32>>> {
        let mut sigs: Vec<Vec<Vec<u32>>> = r
            .classes
            .iter()
            .map(|c| sorted_blocks(c.iter().map(|&b| d.blocks[b].iter().map(|&x| map(x)).collect())))
            .collect();
        sigs.sort_unstable();
        sigs
    };
    let classes = class_sig(&|x| x);
    let failures: Vec<String> = elems
        .par_iter()
        .filter_map(|&t| {
            let map = |p: u32| -> u32 {
                if p == rot.fixed_point {
                    p
                } else {
                    rot.action[g.add(GroupElement(inverse[p as usize]), t).index()]
                }
            };
            let image = sorted_blocks(d.blocks.iter().map(|b| b.iter().map(|&x| map(x)).collect()));
            if image != blocks {
                return Some(format!("translation by {} does not preserve the blocks", g.show(t)));
            }
            if class_sig(&map) != classes {
                return Some(format!("translation by {} does not preserve the classes", g.show(t)));
            }
            None
        })
        .collect();
    issues.extend(failures);
    RotationalReport { ok: issues.is_empty(), elements_checked: elems.len(), issues }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{affine_plane, ResolvableDesign};
    use std::collections::HashMap;

    fn fano() -> BlockDesign {
        let blocks = (0..7u32).map(|s| [0, 1, 3].iter().map(|x| (x + s) % 7).collect()).collect();
        BlockDesign { v: 7, k: 3, lambda: 1, blocks, provenance: String::new() }
    }

    /// Pair counts through a hash map, independent of the incidence scan.
    fn dictionary_deficiencies(d: &BlockDesign) -> u64 {
        let mut counts: HashMap<(u32, u32), u64> = HashMap::new();
        for b in &d.blocks {
            for (i, &x) in b.iter().enumerate() {
                for &y in &b[i + 1..] {
                    *counts.entry((x.min(y), x.max(y))).or_default() += 1;
                }
            }
        }
        let v = d.v as u32;
        (0..v).flat_map(|x| (x + 1..v).map(move |y| (x, y))).filter(|p| counts.get(p).copied().unwrap_or(0) != d.lambda).count() as u64
    }

    #[test]
    fn fano_plane_verifies() {
        let d = fano();
        let r = verify_bibd(&d);
        assert!(r.ok);
        assert_eq!(r.pairs_checked, 21);
        assert_eq!(dictionary_deficiencies(&d), 0);
    }

    #[test]
    fn deleted_block_shows_its_pairs() {
        let mut d = affine_plane(8).unwrap().design;
        let gone = d.blocks.remove(5);
        let r = verify_bibd(&d);
        assert!(!r.ok);
        assert_eq!(r.deficient_pairs, 28);
        assert_eq!(dictionary_deficiencies(&d), 28);
        for p in &r.deficiencies {
            assert_eq!(p.count, 0);
            assert!(gone.contains(&p.x) && gone.contains(&p.y));
        }
    }

    #[test]
    fn resolution_perturbations() {
        let ResolvableDesign { design, resolution } = affine_plane(4).unwrap();
        assert!(verify_resolution(&design, &resolution).ok);
        let mut bad = resolution.clone();
        let b = bad.classes[0].pop().unwrap();
        bad.classes[1].push(b);
        let r = verify_resolution(&design, &bad);
        assert_eq!(r.issues.len(), 2, "{:?}", r.issues);
        let mut bad = resolution.clone();
        bad.classes.pop();
        assert!(!verify_resolution(&design, &bad).ok);
    }

    #[test]
    fn k4_factorization_is_one_rotational_over_z3() {
        // Points 0, 1, 2 of Z_3 and 3 = ∞; the base class {∞,0}, {1,2} developed.
        let blocks = (0..3u32).flat_map(|s| [vec![3, s], vec![(1 + s) % 3, (2 + s) % 3]]).collect();
        let d = BlockDesign { v: 4, k: 2, lambda: 1, blocks, provenance: String::new() };
        let r = Resolution { classes: vec![vec![0, 1], vec![2, 3], vec![4, 5]] };
        assert!(verify_bibd(&d).ok && verify_resolution(&d, &r).ok);
        let rot = RotationalStructure { group: AbelianGroup::cyclic(3).unwrap(), fixed_point: 3, action: vec![0, 1, 2] };
        assert!(verify_one_rotational(&d, &r, &rot).ok);
        assert!(verify_one_rotational_full(&d, &r, &rot).ok);
        // Splitting the classes differently breaks class invariance only.
        let r2 = Resolution { classes: vec![vec![0, 1], vec![2, 3, 4, 5]] };
        let rep = verify_one_rotational(&d, &r2, &rot);
        assert!(!rep.ok && rep.issues[0].contains("classes"));
        let bad = RotationalStructure { action: vec![0, 0, 2], ..rot };
        assert!(!verify_one_rotational(&d, &r, &bad).ok);
    }
}

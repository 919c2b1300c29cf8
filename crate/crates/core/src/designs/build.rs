//! Ingredient designs and the frame assembly.

use super::{verify_bibd, verify_resolution, BlockDesign, DesignError, Resolution, ResolvableDesign};
use crate::algebra::numtheory::prime_power;
use crate::algebra::FiniteField;
use crate::families::{verify_fdf, DesignFamily};

/// The single block on `k` points.
pub fn trivial_rbibd(k: usize) -> Result<ResolvableDesign, DesignError> {
    if k < 2 {
        return Err(DesignError::Parameters(format!("k = {k} is below 2")));
    }
    Ok(ResolvableDesign {
        design: BlockDesign {
            v: k,
            k,
            lambda: 1,
            blocks: vec![(0..k as u32).collect()],
            provenance: format!("trivial ({k},{k},1)-RBIBD"),
        },
        resolution: Resolution { classes: vec![vec![0]] },
    })
}

/// Lines of `AG(2, q)`. The point `(x, y)` is `x q + y` with field elements by
/// encoding; the classes are the slopes followed by the vertical lines.
pub fn affine_plane(q: u64) -> Result<ResolvableDesign, DesignError> {
    let (p, m) = prime_power(q).ok_or_else(|| DesignError::Parameters(format!("{q} is not a prime power")))?;
    let f = FiniteField::new(p, m as u32)?;
    let elems: Vec<_> = f.elements().collect();
    let point = |x: u64, y: u64| (x * q + y) as u32;
    let mut blocks = Vec::new();
    let mut classes = Vec::new();
    for &slope in &elems {
        let mut class = Vec::new();
        for &c in &elems {
            class.push(blocks.len());
            blocks.push(
                elems
                    .iter()
                    .map(|&x| point(x.encoding() as u64, f.add(f.mul(slope, x), c).encoding() as u64))
                    .collect(),
            );
        }
        classes.push(class);
    }
    let mut vertical = Vec::new();
    for &c in &elems {
        vertical.push(blocks.len());
        blocks.push(elems.iter().map(|&y| point(c.encoding() as u64, y.encoding() as u64)).collect());
    }
    classes.push(vertical);
    let mut d = ResolvableDesign {
        design: BlockDesign {
            v: (q * q) as usize,
            k: q as usize,
            lambda: 1,
            blocks,
            provenance: format!("affine plane of order {q}"),
        },
        resolution: Resolution { classes },
    };
    d.canonicalize();
    Ok(d)
}

/// The RBIBD on `G ∪ {∞}` from a frame difference family over `G` relative to
/// `N` and an RBIBD on `|N| + 1` points.
///
/// Points are group elements by index with `∞ = |G|`. For each coset
/// representative `s` and frame class `i`, the class is every `F + h + s`
/// (`F` in the `i`-th part, `h` in `N`) together with the ingredient's `i`-th
/// class, whose point `j < |N|` is read as the `j`-th smallest element of `N`
/// plus `s` and whose last point is `∞`.
pub fn rbibd_from_fdf(fdf: &DesignFamily, ingredient: &ResolvableDesign) -> Result<ResolvableDesign, DesignError> {
    let report = verify_fdf(fdf)?;
    if !report.ok {
        let mut why: Vec<String> = report.partition_issues.clone();
        if !report.relative_ok {
            why.push(format!("{} difference violations", report.violations.len()));
        }
        return Err(DesignError::UnverifiedFamily(why.join("; ")));
    }
    let g = &fdf.group;
    let n = fdf.subgroup.as_ref().expect("verified FDF has a subgroup");
    let parts = fdf.frame_partition.as_ref().expect("verified FDF has a partition");
    let k = fdf.block_size().expect("verified FDF has uniform blocks");
    let ing = &ingredient.design;
    if ing.k != k || ing.lambda != fdf.lambda {
        return Err(DesignError::Parameters(format!(
            "ingredient is a ({},{},{}) design, the family has k = {k}, lambda = {}",
            ing.v, ing.k, ing.lambda, fdf.lambda
        )));
    }
    if ing.v as u64 != n.order() + 1 {
        return Err(DesignError::Parameters(format!("ingredient has {} points, expected |N|+1 = {}", ing.v, n.order() + 1)));
    }
    if ingredient.resolution.classes.len() != parts.len() {
        return Err(DesignError::ClassCount { frame: parts.len(), ingredient: ingredient.resolution.classes.len() });
    }
    let bibd = verify_bibd(ing);
    let res = verify_resolution(ing, &ingredient.resolution);
    if !bibd.ok || !res.ok {
        return Err(DesignError::Parameters("the ingredient does not verify as an RBIBD".into()));
    }

    let infinity = g.order() as u32;
    let members = n.members();
    let mut blocks: Vec<Vec<u32>> = Vec::new();
    let mut classes = Vec::new();
    for s in n.coset_representatives() {
        let relabel = |j: u32| -> u32 {
            match members.get(j as usize) {
                Some(&h) => g.add(h, s).0,
                None => infinity,
            }
        };
        for (part, ing_class) in parts.iter().zip(&ingredient.resolution.classes) {
            let mut class = Vec::new();
            for &i in part {
                for &h in members {
                    let shift = g.add(h, s);
                    class.push(blocks.len());
                    blocks.push(fdf.blocks[i].iter().map(|&x| g.add(x, shift).0).collect());
                }
            }
            for &b in ing_class {
                class.push(blocks.len());
                blocks.push(ing.blocks[b].iter().map(|&j| relabel(j)).collect());
            }
            classes.push(class);
        }
    }
    let v = g.order() as usize + 1;
    let mut out = ResolvableDesign {
        design: BlockDesign {
            v,
            k,
            lambda: fdf.lambda,
            blocks,
            provenance: format!("frame assembly of [{}] with [{}]", fdf.provenance, ing.provenance),
        },
        resolution: Resolution { classes },
    };
    out.canonicalize();
    let d = &out.design;
    assert_eq!(Some(d.blocks.len() as u64), d.expected_blocks(), "block count");
    assert_eq!(Some(out.resolution.classes.len() as u64), d.expected_classes(), "class count");
    assert!(out.resolution.classes.iter().all(|c| c.len() == v / k), "class size");
    Ok(out)
}

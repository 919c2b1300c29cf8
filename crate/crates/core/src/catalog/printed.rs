//! Explicit families and lifting data, transcribed as printed. Negative residues
//! are reduced modulo the group order; nothing else is altered.

use super::{Catalog, CatalogEntry, CatalogError};
use crate::algebra::{AbelianGroup, FieldElement, FieldRef, FiniteField, GroupElement};
use crate::families::{DesignFamily, FamilyKind};
use crate::lifting::{expand_unchecked, LiftingData, Tie};

pub(super) fn register(c: &mut Catalog) {
    for sdf in [PrintedSdf::Z7, PrintedSdf::Z63, PrintedSdf::Z119, PrintedSdf::Z125] {
        c.register(Box::new(sdf));
    }
    for fdf in [PrintedFdf::Z7F89, PrintedFdf::Z63F25, PrintedFdf::Z119F25, PrintedFdf::Z125F67] {
        c.register(Box::new(fdf));
    }
}

const F1_8: [i64; 8] = [20, 20, -20, -20, 29, 29, -29, -29];

const Z63_ORBITS: [[i64; 8]; 2] = [[0, 1, 3, 7, 19, 34, 42, 53], [0, 1, 4, 6, 26, 36, 43, 51]];

const Z119_ORBITS: [[i64; 8]; 4] = [
    [0, 1, 42, 28, 101, 97, 94, 114],
    [0, 1, 12, 23, 41, 85, 104, 106],
    [0, 2, 5, 17, 37, 47, 68, 76],
    [0, 4, 10, 38, 54, 62, 86, 93],
];

const Z125_FIRST: [i64; 6] = [0, 0, 19, 19, 71, 71];

const Z125_PAIRS: [[i64; 6]; 12] = [
    [0, 10, 28, 51, 78, 97],
    [0, 3, 62, 75, 86, 110],
    [0, 5, 12, 58, 70, 112],
    [0, 7, 27, 44, 70, 96],
    [0, 1, 42, 93, 85, 45],
    [0, 1, 100, 104, 109, 88],
    [0, 1, 90, 81, 21, 32],
    [0, 3, 16, 40, 46, 50],
    [0, 2, 7, 29, 35, 68],
    [0, 2, 8, 57, 102, 116],
    [0, 2, 22, 32, 36, 96],
    [0, 8, 23, 38, 72, 86],
];

/// Second coordinates over GF(67) for the first block and the even-numbered
/// block of each pair; the odd-numbered block is the negative.
const F67_FIRST: [i64; 6] = [1, -1, 6, -6, 7, -7];

const F67_PAIRS: [[i64; 6]; 12] = [
    [1, -1, 2, -2, 4, 20],
    [1, -1, 2, -2, 4, 11],
    [1, -1, 17, -17, 12, 29],
    [2, -2, 1, -1, 4, 32],
    [1, -1, 30, -30, 12, 35],
    [2, -2, 5, -5, 20, 4],
    [1, 43, 13, 19, 4, 46],
    [1, 5, 13, 16, 31, 36],
    [1, 3, 10, 44, 46, 33],
    [1, 53, 17, 50, 63, 21],
    [2, 37, 63, 4, 42, 9],
    [2, 6, 53, 1, 35, 12],
];

/// Second coordinates over GF(25) as exponents of the generator; `None` is 0.
type Exps = [Option<i64>; 8];

const fn w(i: i64) -> Option<i64> {
    Some(i)
}

const GF25_Z63: [Exps; 2] = [
    [None, w(2), w(18), w(13), w(4), w(9), w(6), w(0)],
    [None, w(9), w(13), w(18), w(4), w(6), w(2), w(0)],
];

const GF25_Z119: [Exps; 4] = [
    [w(1), w(7), w(0), w(6), w(18), w(13), w(12), w(19)],
    [w(0), w(12), w(1), w(18), w(13), w(7), w(6), w(19)],
    [w(1), w(7), w(12), w(6), w(19), w(18), w(0), w(13)],
    [w(1), w(4), w(10), w(7), w(22), w(19), w(16), w(13)],
];

fn block(g: &AbelianGroup, xs: &[i64]) -> Vec<GroupElement> {
    let n = g.order() as i64;
    xs.iter().map(|&x| GroupElement(x.rem_euclid(n) as u32)).collect()
}

#[derive(Clone, Copy)]
enum PrintedSdf {
    Z7,
    Z63,
    Z119,
    Z125,
}

impl PrintedSdf {
    fn build(self) -> Result<DesignFamily, CatalogError> {
        let (n, lambda, provenance) = match self {
            PrintedSdf::Z7 => (7, 8, "(Z7,8,8)-SDF with the single base block [0,0,1,1,2,2,4,4]"),
            PrintedSdf::Z63 => (63, 8, "printed (Z63,8,8)-SDF, nine base blocks"),
            PrintedSdf::Z119 => (119, 8, "printed (Z119,8,8)-SDF, seventeen base blocks"),
            PrintedSdf::Z125 => (125, 6, "printed (Z125,6,6)-SDF, twenty-five base blocks"),
        };
        let g = AbelianGroup::cyclic(n)?;
        let blocks = match self {
            PrintedSdf::Z7 => vec![block(&g, &[0, 0, 1, 1, 2, 2, 4, 4])],
            PrintedSdf::Z63 => frame_blocks(&g, &Z63_ORBITS),
            PrintedSdf::Z119 => frame_blocks(&g, &Z119_ORBITS),
            PrintedSdf::Z125 => {
                let mut bs = vec![block(&g, &Z125_FIRST)];
                for b in &Z125_PAIRS {
                    bs.push(block(&g, b));
                    bs.push(block(&g, b));
                }
                bs
            }
        };
        Ok(DesignFamily {
            kind: FamilyKind::Sdf,
            group: g,
            subgroup: None,
            lambda,
            blocks,
            frame_partition: None,
            provenance: provenance.to_string(),
        })
    }
}

/// `F_1` followed by each orbit block four times.
fn frame_blocks(g: &AbelianGroup, orbits: &[[i64; 8]]) -> Vec<Vec<GroupElement>> {
    let mut bs = vec![block(g, &F1_8)];
    for b in orbits {
        bs.extend(std::iter::repeat(block(g, b)).take(4));
    }
    bs
}

impl CatalogEntry for PrintedSdf {
    fn name(&self) -> &'static str {
        match self {
            PrintedSdf::Z7 => "z7_8_8",
            PrintedSdf::Z63 => "z63_8_8",
            PrintedSdf::Z119 => "z119_8_8",
            PrintedSdf::Z125 => "z125_6_6",
        }
    }
    fn description(&self) -> &'static str {
        match self {
            PrintedSdf::Z7 => "(Z7,8,8)-SDF, the second-type Paley multiset for p = 7",
            PrintedSdf::Z63 => "(Z63,8,8)-SDF",
            PrintedSdf::Z119 => "(Z119,8,8)-SDF",
            PrintedSdf::Z125 => "(Z125,6,6)-SDF",
        }
    }
    fn family(&self, _params: &[u64]) -> Result<DesignFamily, CatalogError> {
        self.build()
    }
}

#[derive(Clone, Copy)]
enum PrintedFdf {
    Z7F89,
    Z63F25,
    Z119F25,
    Z125F67,
}

impl PrintedFdf {
    fn datum(self) -> Result<LiftingData, CatalogError> {
        match self {
            PrintedFdf::Z7F89 => {
                let f = FiniteField::new(89, 1)?;
                let phi = vec![ints(&f, &[1, 20, 14, 58, 18, 61, 26, 73])];
                Ok(LiftingData {
                    sdf: PrintedSdf::Z7.build()?,
                    field: f,
                    e: 88,
                    d: 8,
                    lambda: 1,
                    phi,
                    partition: vec![vec![0]],
                    ties: vec![],
                })
            }
            PrintedFdf::Z63F25 => gf25_datum(PrintedSdf::Z63, &GF25_Z63),
            PrintedFdf::Z119F25 => gf25_datum(PrintedSdf::Z119, &GF25_Z119),
            PrintedFdf::Z125F67 => {
                let f = FiniteField::new(67, 1)?;
                let minus_one = f.neg(f.one());
                let mut phi = vec![ints(&f, &F67_FIRST)];
                let mut ties = Vec::new();
                for c in &F67_PAIRS {
                    let leader = ints(&f, c);
                    ties.push(Tie { block: phi.len() + 1, leader: phi.len(), multiplier: minus_one });
                    phi.push(leader.clone());
                    phi.push(leader.iter().map(|&x| f.neg(x)).collect());
                }
                Ok(LiftingData {
                    sdf: PrintedSdf::Z125.build()?,
                    field: f,
                    e: 66,
                    d: 6,
                    lambda: 1,
                    partition: (0..25).map(|i| vec![i]).collect(),
                    phi,
                    ties,
                })
            }
        }
    }
}

fn ints(f: &FieldRef, xs: &[i64]) -> Vec<FieldElement> {
    xs.iter().map(|&x| f.from_int(x)).collect()
}

/// Lifting data over GF(25) with modulus x^2 - x + 2 and `xi = w^6`: block 1 is
/// `(1, -1, xi, -xi, w, -w, w xi, -w xi)`, and each orbit leader is followed by
/// its multiples by -1, xi and -xi.
fn gf25_datum(sdf: PrintedSdf, leaders: &[Exps]) -> Result<LiftingData, CatalogError> {
    let f = FiniteField::with_modulus(5, 2, &[2, -1, 1])?;
    let xi = f.exp(6);
    let (one, om) = (f.one(), f.generator());
    let first_pairs = [one, xi, om, f.mul(om, xi)];
    let first = first_pairs.iter().flat_map(|&x| [x, f.neg(x)]).collect();
    let mut phi: Vec<Vec<FieldElement>> = vec![first];
    let multipliers = [f.neg(one), xi, f.neg(xi)];
    let mut ties = Vec::new();
    for exps in leaders {
        let leader: Vec<FieldElement> = exps.iter().map(|e| e.map_or(f.zero(), |i| f.exp(i))).collect();
        let at = phi.len();
        for (j, &m) in multipliers.iter().enumerate() {
            ties.push(Tie { block: at + 1 + j, leader: at, multiplier: m });
        }
        phi.push(leader.clone());
        for &m in &multipliers {
            phi.push(leader.iter().map(|&x| f.mul(x, m)).collect());
        }
    }
    let n = phi.len();
    Ok(LiftingData {
        sdf: sdf.build()?,
        field: f,
        e: 6,
        d: 2,
        lambda: 1,
        phi,
        partition: (0..n).map(|i| vec![i]).collect(),
        ties,
    })
}

impl CatalogEntry for PrintedFdf {
    fn name(&self) -> &'static str {
        match self {
            PrintedFdf::Z7F89 => "fdf_z7xF89",
            PrintedFdf::Z63F25 => "fdf_z63xF25",
            PrintedFdf::Z119F25 => "fdf_z119xF25",
            PrintedFdf::Z125F67 => "fdf_z125xF67",
        }
    }
    fn description(&self) -> &'static str {
        match self {
            PrintedFdf::Z7F89 => "elementary (Z7 x F89, Z7 x {0}, 8, 1)-FDF from the block B and its multiplier orbit",
            PrintedFdf::Z63F25 => {
                "(Z63 x F25, Z63 x {0}, 8, 1)-FDF as printed; two second coordinates are 0 and need repair"
            }
            PrintedFdf::Z119F25 => "(Z119 x F25, Z119 x {0}, 8, 1)-FDF",
            PrintedFdf::Z125F67 => "(Z125 x F67, Z125 x {0}, 6, 1)-FDF from the printed C_j for q = 67",
        }
    }
    /// The expanded family. The conditions are not enforced here, so a defective
    /// datum still yields its (failing) family for inspection.
    fn family(&self, params: &[u64]) -> Result<DesignFamily, CatalogError> {
        let mut fam = expand_unchecked(&self.lifting(params)?)?;
        fam.provenance = format!("{}; {}", self.description(), fam.provenance);
        Ok(fam)
    }
    fn lifting(&self, _params: &[u64]) -> Result<LiftingData, CatalogError> {
        self.datum()
    }
    fn has_lifting(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::check_lifting_conditions;

    #[test]
    fn printed_blocks() {
        let fam = PrintedSdf::Z125.build().unwrap();
        assert_eq!(fam.blocks.len(), 25);
        assert_eq!(fam.to_json()["blocks"][0], serde_json::json!([0, 0, 19, 19, 71, 71]));
        let fam = PrintedSdf::Z63.build().unwrap();
        assert_eq!(fam.to_json()["blocks"][0], serde_json::json!([20, 20, 43, 43, 29, 29, 34, 34]));
    }

    #[test]
    fn data_shapes() {
        for (fdf, blocks) in [
            (PrintedFdf::Z7F89, 1),
            (PrintedFdf::Z63F25, 9),
            (PrintedFdf::Z119F25, 17),
            (PrintedFdf::Z125F67, 25),
        ] {
            let data = fdf.datum().unwrap();
            assert_eq!(data.phi.len(), blocks);
            data.validate().unwrap();
        }
    }

    #[test]
    fn gf25_zero_positions() {
        let data = PrintedFdf::Z63F25.datum().unwrap();
        let report = check_lifting_conditions(&data).unwrap();
        assert!(!report.ok);
        // Leaders 1 and 5 print 0, and the tied copies inherit it.
        let mut zeros: Vec<_> = report.zero_phi.iter().map(|&(i, _)| i).collect();
        zeros.dedup();
        assert_eq!(zeros, vec![1, 2, 3, 4, 5, 6, 7, 8]);
    }
}

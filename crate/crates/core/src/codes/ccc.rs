use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::CodeError;
use crate::algebra::GroupElement;
use crate::families::{verify_pdf, DesignFamily};

/// Above this many codewords the distances come from translation invariance
/// (`d(c_g, c_h) = d(c_0, c_{h-g})`) instead of all pairs.
const EXHAUSTIVE_LIMIT: usize = 3000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceSummary {
    pub min: usize,
    pub max: usize,
    /// Pairs compared.
    pub pairs: u64,
    pub exhaustive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ccc {
    pub n: usize,
    /// Alphabet size.
    pub q: usize,
    pub codewords: Vec<Vec<u32>>,
    /// Occurrences of each symbol in every codeword.
    pub composition: Vec<usize>,
    pub distance: DistanceSummary,
    pub provenance: String,
}

impl Ccc {
    pub fn d(&self) -> usize {
        self.distance.min
    }

    pub fn size(&self) -> usize {
        self.codewords.len()
    }

    /// The composition as `[(size, multiplicity)]`, ascending.
    pub fn composition_profile(&self) -> Vec<(usize, usize)> {
        let mut sizes = self.composition.clone();
        sizes.sort_unstable();
        let mut out: Vec<(usize, usize)> = Vec::new();
        for s in sizes {
            match out.last_mut() {
                Some((t, c)) if *t == s => *c += 1,
                _ => out.push((s, 1)),
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "q": self.q,
            "M": self.size(),
            "d": self.d(),
            "composition": self.composition,
            "codewords": self.codewords,
            "provenance": self.provenance,
        })
    }

    /// Reads a code as claimed by its file: `d` and `composition` are taken as
    /// stated and only checked by [`verify_ccc`].
    pub fn from_json(v: &Value) -> Result<Self, CodeError> {
        #[derive(serde::Deserialize)]
        struct File {
            q: usize,
            d: usize,
            composition: Vec<usize>,
            codewords: Vec<Vec<u32>>,
            #[serde(default)]
            provenance: String,
        }
        let f: File = serde_json::from_value(v.clone())?;
        let n = f.codewords.first().map_or(0, |c| c.len());
        Ok(Ccc {
            n,
            q: f.q,
            codewords: f.codewords,
            composition: f.composition,
            distance: DistanceSummary { min: f.d, max: f.d, pairs: 0, exhaustive: false },
            provenance: f.provenance,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CccReport {
    pub ok: bool,
    pub n: usize,
    pub m: usize,
    pub q: usize,
    /// Minimum distance over all pairs, recomputed.
    pub d: usize,
    /// `M` equals the bound exactly.
    pub meets_bound: bool,
    /// The bound as `num/den`, when it applies.
    pub bound: Option<String>,
    pub issues: Vec<String>,
}

/// Recomputes the composition of every codeword and all pairwise distances, and
/// compares them with the stored claims.
pub fn verify_ccc(c: &Ccc) -> CccReport {
    let mut issues = Vec::new();
    let m = c.codewords.len();
    if c.composition.len() != c.q {
        issues.push(format!("composition lists {} symbols, q = {}", c.composition.len(), c.q));
    }
    for (i, w) in c.codewords.iter().enumerate() {
        if w.len() != c.n {
            issues.push(format!("codeword {i} has length {}, expected {}", w.len(), c.n));
            continue;
        }
        let mut counts = vec![0usize; c.q];
        for &x in w {
            match counts.get_mut(x as usize) {
                Some(k) => *k += 1,
                None => {
                    issues.push(format!("codeword {i} uses symbol {x} outside 0..{}", c.q));
                    break;
                }
            }
        }
        if counts != c.composition {
            issues.push(format!("codeword {i} does not have the stated composition"));
        }
        if issues.len() > 20 {
            break;
        }
    }
    let d = if issues.is_empty() && m > 1 { all_pairs(&c.codewords).min } else { 0 };
    if issues.is_empty() && m > 1 && d != c.d() {
        issues.push(format!("minimum distance is {d}, stated {}", c.d()));
    }
    let comp: Vec<u64> = c.composition.iter().map(|&w| w as u64).collect();
    let bound = ccc_bound(c.n as u64, d as u64, &comp).ok();
    let meets_bound = bound.as_ref().is_some_and(|b| *b == BigRational::from_integer(BigInt::from(m)));
    CccReport {
        ok: issues.is_empty(),
        n: c.n,
        m,
        q: c.q,
        d,
        meets_bound,
        bound: bound.map(|b| b.to_string()),
        issues,
    }
}

fn hamming(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

fn all_pairs(codewords: &[Vec<u32>]) -> DistanceSummary {
    let m = codewords.len();
    let (min, max) = (0..m)
        .into_par_iter()
        .flat_map_iter(|a| (a + 1..m).map(move |b| (a, b)))
        .map(|(a, b)| {
            let h = hamming(&codewords[a], &codewords[b]);
            (h, h)
        })
        .reduce(|| (usize::MAX, 0), |x, y| (x.0.min(y.0), x.1.max(y.1)));
    DistanceSummary { min, max, pairs: (m * m.saturating_sub(1) / 2) as u64, exhaustive: true }
}

/// One codeword per group element `g`: position `t` holds the index of the
/// block containing `t - g`.
pub fn ccc_from_pdf(pdf: &DesignFamily) -> Result<Ccc, CodeError> {
    let report = verify_pdf(pdf)?;
    if !report.ok || pdf.subgroup.is_some() {
        return Err(CodeError::Unverified("the PDF must partition the whole group".into()));
    }
    let g = &pdf.group;
    let n = g.order() as usize;
    let mut owner = vec![0u32; n];
    for (i, b) in pdf.blocks.iter().enumerate() {
        for &x in b {
            owner[x.index()] = i as u32;
        }
    }
    let codewords: Vec<Vec<u32>> = (0..n)
        .map(|gi| {
            let shift = GroupElement(gi as u32);
            (0..n).map(|t| owner[g.sub(GroupElement(t as u32), shift).index()]).collect()
        })
        .collect();
    let composition = pdf.blocks.iter().map(|b| b.len()).collect();
    let distance = if n <= EXHAUSTIVE_LIMIT {
        all_pairs(&codewords)
    } else {
        let (min, max) = (1..n)
            .into_par_iter()
            .map(|h| {
                let d = hamming(&codewords[0], &codewords[h]);
                (d, d)
            })
            .reduce(|| (usize::MAX, 0), |x, y| (x.0.min(y.0), x.1.max(y.1)));
        DistanceSummary { min, max, pairs: (n - 1) as u64, exhaustive: false }
    };
    Ok(Ccc {
        n,
        q: pdf.blocks.len(),
        codewords,
        composition,
        distance,
        provenance: format!("codewords from the translates of: {}", pdf.provenance),
    })
}

/// `n d / (n d - n^2 + sum w_i^2)`, exactly.
pub fn ccc_bound(n: u64, d: u64, composition: &[u64]) -> Result<BigRational, CodeError> {
    let n = BigInt::from(n);
    let nd = &n * BigInt::from(d);
    let squares: BigInt = composition.iter().map(|&w| BigInt::from(w) * BigInt::from(w)).sum();
    let den = &nd - &n * &n + squares;
    if !den.is_positive() {
        return Err(CodeError::BoundInapplicable(den.to_string()));
    }
    Ok(BigRational::new(nd, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AbelianGroup, GroupElement};
    use crate::families::FamilyKind;
    use num_traits::One;

    #[test]
    fn two_point_partition() {
        let g = AbelianGroup::cyclic(2).unwrap();
        let pdf = DesignFamily {
            kind: FamilyKind::Pdf,
            group: g,
            subgroup: None,
            lambda: 0,
            blocks: vec![vec![GroupElement(0)], vec![GroupElement(1)]],
            frame_partition: None,
            provenance: String::new(),
        };
        let c = ccc_from_pdf(&pdf).unwrap();
        assert_eq!(c.codewords, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!((c.d(), c.composition.clone()), (2, vec![1, 1]));
    }

    #[test]
    fn bound_values() {
        let mut comp = vec![7];
        comp.extend(std::iter::repeat(8).take(77));
        assert_eq!(ccc_bound(623, 616, &comp).unwrap(), BigRational::from_integer(623.into()));
        assert!(ccc_bound(5, 5, &[5]).unwrap().is_one());
        assert!(ccc_bound(4, 1, &[1, 1, 1, 1]).is_err());
    }

    #[test]
    fn verification_recomputes_claims() {
        let words = vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]];
        let file = json!({ "q": 2, "d": 2, "composition": [2, 1], "codewords": words });
        let c = Ccc::from_json(&file).unwrap();
        let r = verify_ccc(&c);
        assert!(r.ok && r.meets_bound, "{r:?}");
        assert_eq!(r.bound.as_deref(), Some("3"));
        let mut wrong = c.clone();
        wrong.distance.min = 3;
        assert!(!verify_ccc(&wrong).ok);
        wrong.codewords[1] = vec![1, 1, 0];
        assert!(verify_ccc(&wrong).issues[0].contains("codeword 1"));
    }
}

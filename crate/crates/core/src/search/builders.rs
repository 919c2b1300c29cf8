//! Constraint-system builders, registered by name and selected at runtime.

use std::sync::OnceLock;

use super::system::{ConstraintSystem, LiftingTemplate, LinearForm};
use super::{z125, SearchError};
use crate::algebra::numtheory::{is_prime, prime_power};
use crate::algebra::{FieldRef, FiniteField, GroupElement};
use crate::catalog::Catalog;
use crate::families::{DesignFamily, FamilyKind};
use crate::lifting::LiftingData;

/// Inputs shared by all builders; each builder reads the fields it needs.
#[derive(Clone, Debug, Default)]
pub struct SystemRequest {
    pub sdf: Option<DesignFamily>,
    pub q: u64,
    pub e: Option<u64>,
    pub d: Option<u64>,
    pub lambda: Option<u64>,
    pub partition: Option<Vec<Vec<usize>>>,
    /// Parameter of a parametrized family, such as `p` for the third-type Paley SDF.
    pub p: Option<u64>,
    /// Generic system only: a repeated SDF block takes the negated phi row of
    /// its previous unpaired copy instead of fresh unknowns. Needs -1 in
    /// `C_{d/2}`, i.e. `q = d+1 mod 2d`.
    pub tie_duplicates: bool,
}

pub trait SystemBuilder: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn build(&self, req: &SystemRequest) -> Result<ConstraintSystem, SearchError>;
}

pub struct SystemRegistry {
    builders: Vec<Box<dyn SystemBuilder>>,
}

impl SystemRegistry {
    pub fn new() -> Self {
        SystemRegistry { builders: Vec::new() }
    }

    pub fn standard() -> &'static SystemRegistry {
        static STANDARD: OnceLock<SystemRegistry> = OnceLock::new();
        STANDARD.get_or_init(|| {
            let mut r = SystemRegistry::new();
            r.register(Box::new(Generic));
            r.register(Box::new(Paired));
            r.register(Box::new(Paley3));
            r.register(Box::new(z125::Z125));
            r
        })
    }

    pub fn register(&mut self, builder: Box<dyn SystemBuilder>) {
        assert!(self.get(builder.name()).is_none(), "duplicate system builder {}", builder.name());
        self.builders.push(builder);
    }

    pub fn get(&self, name: &str) -> Option<&dyn SystemBuilder> {
        self.builders.iter().find(|b| b.name() == name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.builders.iter().map(|b| b.name())
    }

    pub fn build(&self, name: &str, req: &SystemRequest) -> Result<ConstraintSystem, SearchError> {
        let b = self.get(name).ok_or_else(|| SearchError::UnknownSystem(name.to_string()))?;
        let sys = b.build(req)?;
        sys.validate()?;
        Ok(sys)
    }
}

impl Default for SystemRegistry {
    fn default() -> Self {
        Self::new()
    }
}

fn params(msg: impl Into<String>) -> SearchError {
    SearchError::Parameters(msg.into())
}

pub(super) fn field_of_order(q: u64) -> Result<FieldRef, SearchError> {
    let (p, m) = prime_power(q).ok_or_else(|| params(format!("{q} is not a prime power")))?;
    if p == 2 {
        return Err(params("q must be odd"));
    }
    Ok(FiniteField::new(p, m)?)
}

fn require_sdf(req: &SystemRequest) -> Result<&DesignFamily, SearchError> {
    let sdf = req.sdf.as_ref().ok_or_else(|| params("this system needs an SDF"))?;
    if sdf.kind != FamilyKind::Sdf {
        return Err(params("the source family must be an SDF"));
    }
    Ok(sdf)
}

/// Runs the arithmetic checks of the lifting construction on the template shape.
fn check_shape(field: &FieldRef, t: &LiftingTemplate) -> Result<(), SearchError> {
    let data = LiftingData {
        sdf: t.sdf.clone(),
        field: field.clone(),
        e: t.e,
        d: t.d,
        lambda: t.lambda,
        phi: t.phi.iter().map(|row| vec![field.one(); row.len()]).collect(),
        partition: t.partition.clone(),
        ties: vec![],
    };
    data.validate()?;
    Ok(())
}

/// One unknown per block position; the label groups are exactly the lifting
/// conditions with `e = q - 1`.
struct Generic;

impl SystemBuilder for Generic {
    fn name(&self) -> &'static str {
        "generic"
    }

    fn description(&self) -> &'static str {
        "one unknown per (block, position) of any SDF; e = q-1, d = kt"
    }

    fn build(&self, req: &SystemRequest) -> Result<ConstraintSystem, SearchError> {
        let sdf = require_sdf(req)?;
        let field = field_of_order(req.q)?;
        let q = req.q;
        let e = req.e.unwrap_or(q - 1);
        if e != q - 1 {
            return Err(params("the generic system works with e = q - 1"));
        }
        let lambda = req.lambda.unwrap_or(1);
        let k = sdf.block_size().ok_or_else(|| params("SDF blocks must share one size"))? as u64;
        if lambda == 0 || sdf.lambda % lambda != 0 {
            return Err(params(format!("lambda {lambda} does not divide the SDF index {}", sdf.lambda)));
        }
        let d = req.d.unwrap_or(sdf.lambda / lambda);
        if d == 0 || d % k != 0 {
            return Err(params(format!("d = {d} is not a multiple of k = {k}")));
        }
        if (q - 1) % d != 0 {
            return Err(params(format!("q = {q} is not 1 mod d = {d}")));
        }
        if lambda % 2 == 1 && q % (2 * d) != d + 1 {
            return Err(params(format!("odd lambda needs q = d+1 mod 2d, got q = {q}, d = {d}")));
        }
        let n = sdf.blocks.len();
        let t = (d / k) as usize;
        let partition = match &req.partition {
            Some(p) => p.clone(),
            None if t > 0 && n % t == 0 => (0..n / t).map(|j| (j * t..(j + 1) * t).collect()).collect(),
            None => return Err(params(format!("{n} blocks cannot be split into parts of size {t}"))),
        };

        // Leader of each block and the sign of its row.
        let mut lead: Vec<(usize, i64)> = (0..n).map(|i| (i, 1)).collect();
        let mut ties = Vec::new();
        if req.tie_duplicates {
            if q % (2 * d) != d + 1 {
                return Err(params(format!("tied copies need q = d+1 mod 2d, got q = {q}, d = {d}")));
            }
            let mut open: Vec<usize> = Vec::new();
            for i in 0..n {
                match open.iter().position(|&j| sdf.blocks[j] == sdf.blocks[i]) {
                    Some(pos) => {
                        let j = open.swap_remove(pos);
                        lead[i] = (j, -1);
                        ties.push((i, j, -1));
                    }
                    None => open.push(i),
                }
            }
        }

        let mut sys = ConstraintSystem::new(format!("generic q={q}"), field.clone(), d);
        let mut var = vec![Vec::new(); n];
        for (i, block) in sdf.blocks.iter().enumerate() {
            if lead[i].0 == i {
                for a in 0..block.len() {
                    var[i].push(sys.add_unknown(format!("phi{i}.{a}")));
                }
            }
        }
        let phi: Vec<Vec<LinearForm>> = (0..n)
            .map(|i| {
                let (j, sign) = lead[i];
                var[j].iter().map(|&u| LinearForm::var(u).scaled(sign)).collect()
            })
            .collect();
        for (j, part) in partition.iter().enumerate() {
            let forms = part
                .iter()
                .flat_map(|&i| phi.get(i).cloned().unwrap_or_default())
                .map(|form| sys.intern(form))
                .collect();
            sys.add_group(format!("E{j}"), forms, d, 1);
        }
        let g = &sdf.group;
        let mut slots: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); g.order() as usize];
        for (i, block) in sdf.blocks.iter().enumerate() {
            for (a, &x) in block.iter().enumerate() {
                for (b, &y) in block.iter().enumerate() {
                    if a != b {
                        slots[g.sub(x, y).index()].push((i, a, b));
                    }
                }
            }
        }
        for (h, slot) in slots.iter().enumerate() {
            let he = GroupElement(h as u32);
            let involution = g.add(he, he) == g.zero();
            let (pairs, modulus, lam): (Vec<_>, u64, u64) = if !involution {
                (slot.clone(), d, lambda)
            } else if lambda % 2 == 0 {
                (slot.iter().copied().filter(|&(_, a, b)| a < b).collect(), d, lambda / 2)
            } else {
                (slot.iter().copied().filter(|&(_, a, b)| a < b).collect(), d / 2, lambda)
            };
            let forms = pairs
                .iter()
                .map(|&(i, a, b)| sys.intern(phi[i][a].minus(&phi[i][b])))
                .collect();
            sys.add_group(format!("D{}", g.show(he)), forms, modulus, lam);
        }
        sys.anchors = var.iter().filter_map(|v| v.first().copied()).collect();
        let template = LiftingTemplate {
            sdf: sdf.clone(),
            e,
            d,
            lambda,
            partition,
            phi,
            ties,
        };
        check_shape(&field, &template)?;
        sys.template = Some(template);
        Ok(sys)
    }
}

/// Blocks of the form `(x0, x0, x1, x1, ...)` receive `(y0, -y0, y1, -y1, ...)`.
/// With `e = (q-1)/2` the orbits are `{x, -x}`, so the difference slot of `h`
/// is `{1,-1} D_h` and only the forms `2y_i` and `y_i +- y_j` need labels.
fn doubled_pattern(name: &str, sdf: &DesignFamily, q: u64) -> Result<ConstraintSystem, SearchError> {
    let field = field_of_order(q)?;
    let g = &sdf.group;
    let mut xs: Vec<Vec<GroupElement>> = Vec::new();
    for (i, block) in sdf.blocks.iter().enumerate() {
        if block.len() % 2 != 0 || block.chunks(2).any(|c| c[0] != c[1]) {
            return Err(SearchError::Pattern(format!("block {i} is not of the form (x0,x0,x1,x1,...)")));
        }
        let x: Vec<GroupElement> = block.iter().step_by(2).copied().collect();
        let mut sorted = x.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != x.len() {
            return Err(SearchError::Pattern(format!("block {i} repeats an element more than twice")));
        }
        xs.push(x);
    }
    let k = sdf.blocks[0].len() as u64;
    if sdf.blocks.iter().any(|b| b.len() as u64 != k) {
        return Err(SearchError::Pattern("blocks differ in size".into()));
    }
    let n = sdf.blocks.len() as u64;
    let d = n * k / 2;
    if q % (2 * d) != 1 {
        return Err(params(format!("q = {q} is not 1 mod {}", 2 * d)));
    }
    let mut sys = ConstraintSystem::new(format!("{name} q={q}"), field.clone(), d);
    let mut ys: Vec<Vec<usize>> = Vec::new();
    for x in &xs {
        ys.push(x.iter().map(|_| sys.add_unknown(format!("y{}", sys.unknowns.len()))).collect());
    }
    let twice: Vec<usize> =
        ys.iter().flatten().map(|&u| sys.intern(LinearForm::var(u).scaled(2))).collect();
    sys.add_group("D0", twice, d, 1);
    let mut per_h: Vec<Vec<usize>> = vec![Vec::new(); g.order() as usize];
    for (x, y) in xs.iter().zip(&ys) {
        for (a, &xa) in x.iter().enumerate() {
            for (b, &xb) in x.iter().enumerate() {
                let h = g.sub(xa, xb);
                if a == b || g.neg(h).index() < h.index() {
                    continue;
                }
                let (ya, yb) = (LinearForm::var(y[a]), LinearForm::var(y[b]));
                let minus = sys.intern(ya.minus(&yb));
                let plus = sys.intern(ya.plus(&yb));
                per_h[h.index()].extend([minus, plus]);
            }
        }
    }
    for (h, forms) in per_h.into_iter().enumerate() {
        if !forms.is_empty() {
            sys.add_group(format!("D{}", g.show(GroupElement(h as u32))), forms, d, 1);
        }
    }
    sys.anchors = ys.iter().filter_map(|y| y.first().copied()).collect();
    let template = LiftingTemplate {
        sdf: sdf.clone(),
        e: (q - 1) / 2,
        d,
        lambda: 1,
        partition: vec![(0..sdf.blocks.len()).collect()],
        phi: ys
            .iter()
            .map(|y| y.iter().flat_map(|&u| [LinearForm::var(u), LinearForm::var(u).scaled(-1)]).collect())
            .collect(),
        ties: vec![],
    };
    check_shape(&field, &template)?;
    sys.template = Some(template);
    Ok(sys)
}

struct Paired;

impl SystemBuilder for Paired {
    fn name(&self) -> &'static str {
        "paired"
    }

    fn description(&self) -> &'static str {
        "difference multiset (x0,x0,...,x_(l-1)/2,x_(l-1)/2) with phi = (y0,-y0,...); d = (l+1)/2"
    }

    fn build(&self, req: &SystemRequest) -> Result<ConstraintSystem, SearchError> {
        let sdf = require_sdf(req)?;
        if sdf.blocks.len() != 1 {
            return Err(SearchError::Pattern("the paired system takes a single base block".into()));
        }
        doubled_pattern("paired", sdf, req.q)
    }
}

struct Paley3;

impl SystemBuilder for Paley3 {
    fn name(&self) -> &'static str {
        "paley3"
    }

    fn description(&self) -> &'static str {
        "third-type Paley SDF over GF(p), p = 1 mod 4, with phi = (y,-y,...) on both blocks; d = p+1"
    }

    fn build(&self, req: &SystemRequest) -> Result<ConstraintSystem, SearchError> {
        let p = req.p.ok_or_else(|| params("the paley3 system needs p"))?;
        if p % 4 != 1 || prime_power(p).is_none() {
            return Err(params(format!("p = {p} is not a prime power = 1 mod 4")));
        }
        let sdf = Catalog::standard().family(&format!("paley3:{p}"))?;
        doubled_pattern("paley3", &sdf, req.q)
    }
}

pub(super) fn require_prime(q: u64) -> Result<(), SearchError> {
    if is_prime(q) {
        Ok(())
    } else {
        Err(params(format!("{q} is not prime")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog(name: &str) -> DesignFamily {
        Catalog::standard().family(name).unwrap()
    }

    fn request(sdf: &str, q: u64) -> SystemRequest {
        SystemRequest { sdf: Some(catalog(sdf)), q, ..Default::default() }
    }

    #[test]
    fn generic_shapes() {
        let r = SystemRegistry::standard();
        let s = r.build("generic", &request("z7_8_8", 89)).unwrap();
        assert_eq!((s.unknowns.len(), s.groups.len()), (8, 8));
        let half = s.groups.iter().find(|g| g.name == "D0").unwrap();
        assert_eq!((half.forms.len(), half.modulus), (4, 4));
        let s = r.build("generic", &request("z125_6_6", 67)).unwrap();
        assert_eq!(s.unknowns.len(), 150);
        assert_eq!(s.groups.iter().filter(|g| g.name.starts_with('D')).count(), 125);
        assert_eq!(s.groups.iter().filter(|g| g.name.starts_with('E')).count(), 25);
    }

    #[test]
    fn tied_copies_share_unknowns() {
        let r = SystemRegistry::standard();
        let mut req = request("z125_6_6", 67);
        req.tie_duplicates = true;
        let s = r.build("generic", &req).unwrap();
        assert_eq!(s.unknowns.len(), 6 * 13);
        assert_eq!(s.anchors.len(), 13);
        let t = s.template.as_ref().unwrap();
        assert_eq!(t.ties, (1..=12).map(|i| (2 * i, 2 * i - 1, -1)).collect::<Vec<_>>());
        assert_eq!(t.phi[2][0], t.phi[1][0].scaled(-1));

        // The printed data over GF(67) is one witness.
        let data = Catalog::standard().lifting("fdf_z125xF67").unwrap();
        let values: Vec<_> = (0..25).filter(|&i| i == 0 || i % 2 == 1).flat_map(|i| data.phi[i].clone()).collect();
        assert_eq!(s.check(&values), Ok(()));
        assert_eq!(s.to_lifting_data(&values).unwrap(), data);

        // -1 must sit in the class d/2: 37 = 1 mod 12.
        let mut req = request("paley3:5", 37);
        req.lambda = Some(2);
        req.tie_duplicates = true;
        assert!(r.build("generic", &req).is_err());
    }

    #[test]
    fn generic_congruences() {
        let r = SystemRegistry::standard();
        // 97 = 1 mod 8 but not 9 mod 16
        assert!(r.build("generic", &request("z7_8_8", 97)).is_err());
        assert!(r.build("generic", &request("z7_8_8", 88)).is_err());
        let mut req = request("z7_8_8", 89);
        req.e = Some(44);
        assert!(r.build("generic", &req).is_err());
    }

    #[test]
    fn even_lambda_uses_full_moduli() {
        // (Z7,8,8) read with lambda = 2 gives d = 4, t = 1/2: rejected. Singer (2,3)
        // doubled gives lambda = 8, so lambda = 2 with d = 4 is also not a multiple of 8.
        // The paley3 SDF with lambda = 2: d = 6 = k, t = 1, parts = 2*5/5 = 2.
        let r = SystemRegistry::standard();
        let mut req = request("paley3:5", 37);
        req.lambda = Some(2);
        let s = r.build("generic", &req).unwrap();
        assert!(s.groups.iter().all(|g| g.modulus == 6));
        let zero = s.groups.iter().find(|g| g.name == "D0").unwrap();
        assert_eq!(zero.lambda, 1);
    }

    #[test]
    fn paired_shapes() {
        let r = SystemRegistry::standard();
        let s = r.build("paired", &request("paley2:7", 17)).unwrap();
        assert_eq!((s.unknowns.len(), s.d), (4, 4));
        // D0 plus one group per pair {h, -h}
        assert_eq!(s.groups.len(), 1 + 3);
        assert!(s.conditions_per_unknown().iter().all(|&c| c == 7));
        let s = r.build("paired", &request("twin_prime:3", 17)).unwrap();
        assert_eq!((s.unknowns.len(), s.d), (8, 8));
        assert!(s.conditions_per_unknown().iter().all(|&c| c == 15));
        for m in 3..=5u64 {
            let q = if m == 5 { 97 } else { 17 };
            let s = r.build("paired", &request(&format!("singer:2,{m}"), q)).unwrap();
            assert_eq!(s.unknowns.len(), 1 << (m - 1));
            assert!(s.conditions_per_unknown().iter().all(|&c| c as u64 == (1 << m) - 1));
        }
        assert!(matches!(r.build("paired", &request("paley3:5", 13)), Err(SearchError::Pattern(_))));
        assert!(r.build("paired", &request("paley2:7", 13)).is_err());
    }

    #[test]
    fn paley3_shapes() {
        let r = SystemRegistry::standard();
        let req = SystemRequest { q: 37, p: Some(5), ..Default::default() };
        let s = r.build("paley3", &req).unwrap();
        assert_eq!((s.unknowns.len(), s.d), (6, 6));
        assert!(s.conditions_per_unknown().iter().all(|&c| c == 5));
        assert_eq!(s.anchors, vec![0, 3]);
        let req = SystemRequest { q: 29, p: Some(13), ..Default::default() };
        let s = r.build("paley3", &req).unwrap();
        assert_eq!(s.unknowns.len(), 14);
        let req = SystemRequest { q: 37, p: Some(7), ..Default::default() };
        assert!(r.build("paley3", &req).is_err());
    }

    #[test]
    fn unknown_builder() {
        assert!(matches!(
            SystemRegistry::standard().build("nope", &SystemRequest::default()),
            Err(SearchError::UnknownSystem(_))
        ));
    }
}

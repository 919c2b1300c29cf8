use serde::Serialize;

use super::{LiftingData, LiftingError};
use crate::algebra::{FieldElement, FieldRef, GroupElement};

#[derive(Clone, Debug, Serialize)]
pub struct SlotResult {
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// One representative per `C_0^e`-orbit, repeated by orbit multiplicity
    /// (the `D_h` or `E_P` of the construction).
    pub representatives: Vec<FieldElement>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub ok: bool,
    /// Indexed by group element index `h`.
    pub cond1: Vec<SlotResult>,
    /// Indexed by part of the partition.
    pub cond2: Vec<SlotResult>,
    /// (block, position) of every zero phi value.
    pub zero_phi: Vec<(usize, usize)>,
}

impl ConditionReport {
    pub fn failing_differences(&self) -> Vec<GroupElement> {
        self.cond1
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.ok)
            .map(|(h, _)| GroupElement(h as u32))
            .collect()
    }

    pub fn failing_parts(&self) -> Vec<usize> {
        self.cond2.iter().enumerate().filter(|(_, s)| !s.ok).map(|(i, _)| i).collect()
    }
}

/// Tests whether a multiset of field elements has the form `C_0^e . D` with `D`
/// a lambda-transversal of the `d`-classes.
///
/// Orbits of `C_0^e` are exactly the `e`-classes, so the test is: multiplicity is
/// constant on every `e`-class, and the `d`-class counts are uniform.
#[derive(Clone, Debug)]
pub(crate) struct SlotChecker {
    e: u64,
    d: u64,
    orbit: u64,
    class_e: Vec<u32>,
    class_min: Vec<FieldElement>,
}

impl SlotChecker {
    pub fn new(field: &FieldRef, e: u64, d: u64) -> Result<Self, LiftingError> {
        let q = field.order();
        let mut class_e = vec![u32::MAX; q as usize];
        let mut class_min: Vec<Option<FieldElement>> = vec![None; e as usize];
        for x in field.nonzero() {
            let c = (field.dlog(x)? % e) as u32;
            class_e[x.encoding() as usize] = c;
            class_min[c as usize].get_or_insert(x);
        }
        let class_min = class_min.into_iter().map(|x| x.expect("classes are nonempty")).collect();
        Ok(SlotChecker { e, d, orbit: (q - 1) / e, class_e, class_min })
    }

    fn tally(&self, m: &[FieldElement]) -> Result<Vec<(u32, u64, u64, u64)>, String> {
        // per e-class: (class, distinct elements, max multiplicity, total)
        let mut enc: Vec<u32> = m.iter().map(|x| x.encoding()).collect();
        if enc.contains(&0) {
            return Err("zero difference".into());
        }
        enc.sort_unstable_by_key(|&x| (self.class_e[x as usize], x));
        let mut out: Vec<(u32, u64, u64, u64)> = Vec::new();
        let mut i = 0;
        while i < enc.len() {
            let mut j = i;
            while j < enc.len() && enc[j] == enc[i] {
                j += 1;
            }
            let mult = (j - i) as u64;
            let c = self.class_e[enc[i] as usize];
            match out.last_mut() {
                Some(last) if last.0 == c => {
                    last.1 += 1;
                    last.2 = last.2.max(mult);
                    last.3 += mult;
                }
                _ => out.push((c, 1, mult, mult)),
            }
            i = j;
        }
        Ok(out)
    }

    pub fn check(&self, m: &[FieldElement], lambda: u64) -> SlotResult {
        let fail = |r: String| SlotResult { ok: false, reason: Some(r), representatives: vec![] };
        let tally = match self.tally(m) {
            Ok(t) => t,
            Err(r) => return fail(r),
        };
        let mut per_d = vec![0u64; self.d as usize];
        let mut reps = Vec::new();
        for &(c, distinct, max, total) in &tally {
            if distinct != self.orbit || total != distinct * max {
                return fail(format!("not a union of C_0^{} orbits (class {c})", self.e));
            }
            per_d[(c as u64 % self.d) as usize] += max;
            for _ in 0..max {
                reps.push(self.class_min[c as usize]);
            }
        }
        if let Some(j) = per_d.iter().position(|&x| x != lambda) {
            return fail(format!("d-class {j} receives {} orbits, expected {lambda}", per_d[j]));
        }
        reps.sort_unstable();
        SlotResult { ok: true, reason: None, representatives: reps }
    }

    /// Necessary condition on a sub-multiset of a slot that is still being filled.
    pub fn partial_ok(&self, m: &[FieldElement], lambda: u64) -> bool {
        let tally = match self.tally(m) {
            Ok(t) => t,
            Err(_) => return false,
        };
        let mut per_d = vec![0u64; self.d as usize];
        for &(c, distinct, max, total) in &tally {
            if distinct > self.orbit {
                return false;
            }
            let need = max.max(total.div_ceil(self.orbit));
            let slot = &mut per_d[(c as u64 % self.d) as usize];
            *slot += need;
            if *slot > lambda {
                return false;
            }
        }
        true
    }
}

/// Difference slots: for every `h`, the (block, a, b) triples with `f_a - f_b = h`.
pub(crate) fn difference_slots(data: &LiftingData) -> Vec<Vec<(usize, usize, usize)>> {
    let g = &data.sdf.group;
    let mut slots = vec![Vec::new(); g.order() as usize];
    for (i, block) in data.sdf.blocks.iter().enumerate() {
        for (a, &x) in block.iter().enumerate() {
            for (b, &y) in block.iter().enumerate() {
                if a != b {
                    slots[g.sub(x, y).index()].push((i, a, b));
                }
            }
        }
    }
    slots
}

pub fn check_lifting_conditions(data: &LiftingData) -> Result<ConditionReport, LiftingError> {
    data.validate()?;
    let f = &data.field;
    let checker = SlotChecker::new(f, data.e, data.d)?;
    let zero_phi: Vec<(usize, usize)> = data
        .phi
        .iter()
        .enumerate()
        .flat_map(|(i, p)| p.iter().enumerate().filter(|(_, x)| x.is_zero()).map(move |(a, _)| (i, a)))
        .collect();
    let cond1: Vec<SlotResult> = difference_slots(data)
        .iter()
        .map(|slot| {
            let m: Vec<FieldElement> =
                slot.iter().map(|&(i, a, b)| f.sub(data.phi[i][a], data.phi[i][b])).collect();
            checker.check(&m, data.lambda)
        })
        .collect();
    let cond2: Vec<SlotResult> = data
        .partition
        .iter()
        .map(|part| {
            let m: Vec<FieldElement> = part.iter().flat_map(|&i| data.phi[i].iter().copied()).collect();
            if m.iter().any(|x| x.is_zero()) {
                return SlotResult { ok: false, reason: Some("zero phi value".into()), representatives: vec![] };
            }
            checker.check(&m, 1)
        })
        .collect();
    let ok = zero_phi.is_empty() && cond1.iter().all(|s| s.ok) && cond2.iter().all(|s| s.ok);
    Ok(ConditionReport { ok, cond1, cond2, zero_phi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::fixtures;

    #[test]
    fn small_datum_passes_with_known_d0() {
        let data = fixtures::z7_f89();
        let r = check_lifting_conditions(&data).unwrap();
        assert!(r.ok, "{r:?}");
        let d0: Vec<u32> = r.cond1[0].representatives.iter().map(|x| x.encoding()).collect();
        assert_eq!(d0, vec![19, 42, 43, 44, 45, 46, 47, 70]);
    }

    #[test]
    fn perturbation_breaks_condition_one() {
        let mut data = fixtures::z7_f89();
        data.phi[0].swap(1, 2);
        let r = check_lifting_conditions(&data).unwrap();
        assert!(!r.ok);
        assert!(!r.failing_differences().is_empty());
    }

    #[test]
    fn zero_phi_reported() {
        let mut data = fixtures::z7_f89();
        data.phi[0][3] = data.field.zero();
        let r = check_lifting_conditions(&data).unwrap();
        assert_eq!(r.zero_phi, vec![(0, 3)]);
        assert_eq!(r.failing_parts(), vec![0]);
    }

    #[test]
    fn checker_orbits() {
        let f = crate::algebra::FiniteField::new(5, 2).unwrap();
        let c = SlotChecker::new(&f, 6, 2).unwrap();
        // one full e-class of a square and one of a non-square
        let m: Vec<FieldElement> = (0..4).flat_map(|j| [f.exp(6 * j), f.exp(6 * j + 1)]).collect();
        assert!(c.check(&m, 1).ok);
        assert!(c.partial_ok(&m[..3], 1));
        let twice_even: Vec<FieldElement> = vec![f.exp(0), f.exp(2)];
        assert!(!c.partial_ok(&twice_even, 1));
    }
}

//! Re-solving lifting data at suspect positions while every other phi value
//! stays fixed.
//!
//! A position in a block tied to a leader is replaced by the leader's position,
//! and the tied copies follow the leader. The search walks the free positions in
//! a fixed order that completes as many difference terms as early as possible,
//! and prunes with the orbit test of the lifting conditions on every affected
//! slot.

use std::collections::BTreeSet;

use serde::Serialize;

use super::SearchError;
use crate::algebra::FieldElement;
use crate::lifting::conditions::{difference_slots, SlotChecker};
use crate::lifting::{check_lifting_conditions, LiftingData};

#[derive(Clone, Debug, Serialize)]
pub struct RepairOutcome {
    #[serde(skip)]
    pub data: LiftingData,
    /// The free (block, position) pairs after mapping tied blocks to leaders.
    pub positions: Vec<(usize, usize)>,
    /// Values tried.
    pub nodes: u64,
}

/// A term of one affected constraint: a difference `phi[i][a] - phi[i][b]` or,
/// when `b` is `None`, the element `phi[i][a]`.
#[derive(Clone, Copy)]
struct Term {
    block: usize,
    a: usize,
    b: Option<usize>,
}

struct Constraint {
    terms: Vec<Term>,
    lambda: u64,
}

fn leader_of(data: &LiftingData, block: usize) -> (usize, FieldElement) {
    let f = &data.field;
    let mut b = block;
    let mut m = f.one();
    while let Some(t) = data.ties.iter().find(|t| t.block == b) {
        m = f.mul(m, t.multiplier);
        b = t.leader;
        if b == block {
            break;
        }
    }
    (b, m)
}

/// All positions of the leader blocks behind `suspects`.
pub fn widen_to_blocks(data: &LiftingData, suspects: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let leaders: BTreeSet<usize> = suspects.iter().map(|&(i, _)| leader_of(data, i).0).collect();
    leaders.into_iter().flat_map(|i| (0..data.phi[i].len()).map(move |a| (i, a))).collect()
}

struct Repair<'a> {
    data: &'a LiftingData,
    checker: SlotChecker,
    /// Per block: (leader, multiplier).
    lead: Vec<(usize, FieldElement)>,
    /// `var[block][pos]`: index of the free position behind it.
    var: Vec<Vec<Option<usize>>>,
    constraints: Vec<Constraint>,
    /// Constraints touched by each free position.
    touching: Vec<Vec<usize>>,
    domains: Vec<Vec<FieldElement>>,
    order: Vec<usize>,
    values: Vec<Option<FieldElement>>,
    nodes: u64,
    budget: u64,
}

impl Repair<'_> {
    fn value(&self, i: usize, a: usize) -> Option<FieldElement> {
        match self.var[i][a] {
            Some(v) => self.values[v].map(|x| self.data.field.mul(self.lead[i].1, x)),
            None => Some(self.data.phi[i][a]),
        }
    }

    fn term(&self, t: Term) -> Option<FieldElement> {
        let x = self.value(t.block, t.a)?;
        match t.b {
            Some(b) => Some(self.data.field.sub(x, self.value(t.block, b)?)),
            None => Some(x),
        }
    }

    fn constraint_ok(&self, c: &Constraint) -> bool {
        let mut m = Vec::with_capacity(c.terms.len());
        let mut complete = true;
        for &t in &c.terms {
            match self.term(t) {
                Some(x) => m.push(x),
                None => complete = false,
            }
        }
        if complete {
            self.checker.check(&m, c.lambda).ok
        } else {
            self.checker.partial_ok(&m, c.lambda)
        }
    }

    fn run(&mut self, depth: usize) -> Option<bool> {
        let Some(&v) = self.order.get(depth) else {
            return Some(true);
        };
        for k in 0..self.domains[v].len() {
            if self.nodes >= self.budget {
                return None;
            }
            self.nodes += 1;
            self.values[v] = Some(self.domains[v][k]);
            if self.touching[v].iter().all(|&c| self.constraint_ok(&self.constraints[c])) {
                match self.run(depth + 1) {
                    Some(false) => {}
                    other => return other,
                }
            }
        }
        self.values[v] = None;
        Some(false)
    }
}

/// Re-solves the phi values at `suspects`, holding all other values fixed. The
/// input is never modified. An empty suspect set returns the data unchanged when
/// it already satisfies the conditions.
pub fn repair_block(
    data: &LiftingData,
    suspects: &[(usize, usize)],
    budget: u64,
) -> Result<RepairOutcome, SearchError> {
    data.validate()?;
    let f = &data.field;
    let n = data.phi.len();
    for &(i, a) in suspects {
        if i >= n || a >= data.phi[i].len() {
            return Err(SearchError::Parameters(format!("no position ({i}, {a})")));
        }
    }
    let lead: Vec<(usize, FieldElement)> = (0..n).map(|i| leader_of(data, i)).collect();
    let positions: Vec<(usize, usize)> =
        suspects.iter().map(|&(i, a)| (lead[i].0, a)).collect::<BTreeSet<_>>().into_iter().collect();
    let mut var = data.phi.iter().map(|p| vec![None; p.len()]).collect::<Vec<_>>();
    for (i, row) in var.iter_mut().enumerate() {
        for (a, slot) in row.iter_mut().enumerate() {
            *slot = positions.iter().position(|&p| p == (lead[i].0, a));
        }
    }

    let report = check_lifting_conditions(data)?;
    let slots = difference_slots(data);
    let touches = |i: usize, a: usize| var[i][a].is_some();
    let mut constraints = Vec::new();
    for (h, slot) in slots.iter().enumerate() {
        let affected = slot.iter().any(|&(i, a, b)| touches(i, a) || touches(i, b));
        if affected {
            let terms = slot.iter().map(|&(block, a, b)| Term { block, a, b: Some(b) }).collect();
            constraints.push(Constraint { terms, lambda: data.lambda });
        } else if !report.cond1[h].ok {
            return Err(SearchError::NotLocal(format!("difference slot {h}")));
        }
    }
    for (j, part) in data.partition.iter().enumerate() {
        let affected = part.iter().any(|&i| (0..data.phi[i].len()).any(|a| touches(i, a)));
        if affected {
            let terms = part
                .iter()
                .flat_map(|&block| (0..data.phi[block].len()).map(move |a| Term { block, a, b: None }))
                .collect();
            constraints.push(Constraint { terms, lambda: 1 });
        } else if !report.cond2[j].ok {
            return Err(SearchError::NotLocal(format!("part {j}")));
        }
    }

    let nv = positions.len();
    let mut touching = vec![BTreeSet::new(); nv];
    let mut deps: Vec<Vec<BTreeSet<usize>>> = Vec::new();
    for (c, con) in constraints.iter().enumerate() {
        let mut per_term = Vec::new();
        for t in &con.terms {
            let d: BTreeSet<usize> =
                std::iter::once(var[t.block][t.a]).chain(t.b.map(|b| var[t.block][b])).flatten().collect();
            for &v in &d {
                touching[v].insert(c);
            }
            per_term.push(d);
        }
        deps.push(per_term);
    }

    // Greedy static order: next is the position completing the most terms.
    let mut order = Vec::with_capacity(nv);
    let mut chosen = vec![false; nv];
    for _ in 0..nv {
        let score = |v: usize| {
            deps.iter()
                .flatten()
                .filter(|d| d.contains(&v) && d.iter().all(|&w| w == v || chosen[w]))
                .count()
        };
        let best = (0..nv).filter(|&v| !chosen[v]).max_by_key(|&v| (score(v), std::cmp::Reverse(v))).unwrap();
        chosen[best] = true;
        order.push(best);
    }

    // Scaling a leader block whose positions are all free by an element of
    // C_0^e changes no orbit, so its first position in the order may be taken
    // from one representative per e-class.
    let all_elems: Vec<FieldElement> = (0..f.order() - 1).map(|i| f.exp(i as i64)).collect();
    let mut domains = vec![all_elems.clone(); nv];
    let mut seen_blocks = BTreeSet::new();
    for &v in &order {
        let (i, _) = positions[v];
        if seen_blocks.insert(i) && (0..data.phi[i].len()).all(|a| var[i][a].is_some()) {
            domains[v] = all_elems[..data.e as usize].to_vec();
        }
    }

    let mut search = Repair {
        data,
        checker: SlotChecker::new(f, data.e, data.d)?,
        lead,
        var,
        constraints,
        touching: touching.into_iter().map(|s| s.into_iter().collect()).collect(),
        domains,
        order,
        values: vec![None; nv],
        nodes: 0,
        budget,
    };
    match search.run(0) {
        Some(true) => {}
        Some(false) => return Err(SearchError::NoCompletion),
        None => return Err(SearchError::Budget(search.nodes)),
    }
    let mut out = data.clone();
    for i in 0..n {
        for a in 0..out.phi[i].len() {
            out.phi[i][a] = search.value(i, a).expect("all positions assigned");
        }
    }
    let report = check_lifting_conditions(&out)?;
    assert!(report.ok, "repair produced data failing the lifting conditions");
    Ok(RepairOutcome { data: out, positions, nodes: search.nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;

    const BUDGET: u64 = 50_000_000;

    #[test]
    fn empty_suspect_set_is_identity() {
        let data = Catalog::standard().lifting("fdf_z7xF89").unwrap();
        let out = repair_block(&data, &[], BUDGET).unwrap();
        assert_eq!(out.data, data);
        assert_eq!(out.nodes, 0);
    }

    #[test]
    fn blanked_value_is_recovered() {
        let data = Catalog::standard().lifting("fdf_z7xF89").unwrap();
        let mut broken = data.clone();
        broken.phi[0][3] = broken.field.zero();
        let before = broken.clone();
        let out = repair_block(&broken, &[(0, 3)], BUDGET).unwrap();
        assert_eq!(broken, before);
        assert!(check_lifting_conditions(&out.data).unwrap().ok);
        assert!(!out.data.phi[0][3].is_zero());
    }

    #[test]
    fn failure_away_from_suspects_is_rejected() {
        let data = Catalog::standard().lifting("fdf_z119xF25").unwrap();
        let mut broken = data.clone();
        broken.phi[0][0] = broken.field.zero();
        // The leader of block 1 has nothing to do with the zero in block 0.
        assert!(matches!(repair_block(&broken, &[(1, 2)], BUDGET), Err(SearchError::NotLocal(_))));
    }

    #[test]
    fn tied_positions_map_to_leaders() {
        let data = Catalog::standard().lifting("fdf_z119xF25").unwrap();
        let wide = widen_to_blocks(&data, &[(3, 0)]);
        assert_eq!(wide, (0..8).map(|a| (1, a)).collect::<Vec<_>>());
        let out = repair_block(&data, &[(2, 5), (4, 6)], BUDGET).unwrap();
        assert_eq!(out.positions, vec![(1, 5), (1, 6)]);
        assert!(check_lifting_conditions(&out.data).unwrap().ok);
    }

    #[test]
    fn printed_zero_pair_needs_whole_blocks() {
        let data = Catalog::standard().lifting("fdf_z63xF25").unwrap();
        assert!(!check_lifting_conditions(&data).unwrap().ok);
        let suspects = [(1, 0), (5, 0)];
        assert!(matches!(repair_block(&data, &suspects, BUDGET), Err(SearchError::NoCompletion)));
        let wide = widen_to_blocks(&data, &suspects);
        assert_eq!(wide.len(), 16);
        let out = repair_block(&data, &wide, BUDGET).unwrap();
        assert!(check_lifting_conditions(&out.data).unwrap().ok);
        assert_eq!(out.data.phi[0], data.phi[0]);
    }
}

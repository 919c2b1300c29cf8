//! Depth-first search for an assignment of nonzero field elements satisfying a
//! [`ConstraintSystem`].
//!
//! The next unknown is the one with the fewest surviving values among those
//! that would complete a form with at least two unknowns; ties go to declaration
//! order. Forms are evaluated incrementally and every uniformity group keeps its
//! class counts, so a value is refused as soon as a group would exceed `lambda`
//! in some class.
//!
//! When `-1` lies in the class `m/2` of a group of modulus `m` and index 1, a
//! form and its negative in that group land in opposite classes. Such a group
//! also tracks its open pairs and refuses a value that leaves fewer free pairs
//! of opposite classes than open pairs.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::system::ConstraintSystem;
use super::SearchError;
use crate::algebra::FieldElement;
use crate::lifting::{check_lifting_conditions, LiftingData};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Largest field handled with a full log table.
const MAX_ORDER: u64 = 1 << 22;
const RESTARTS: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Solved,
    /// The whole search space was covered without a solution.
    Exhausted,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub values: Vec<FieldElement>,
}

impl Assignment {
    pub fn to_json(&self, system: &ConstraintSystem) -> Value {
        let map: serde_json::Map<String, Value> = system
            .unknowns
            .iter()
            .zip(&self.values)
            .map(|(name, x)| (name.clone(), json!(x.encoding())))
            .collect();
        Value::Object(map)
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub assignment: Option<Assignment>,
    /// Values tried, over all attempts.
    pub nodes: u64,
    pub attempts: u32,
    pub seed: u64,
}

impl SolveOutcome {
    pub fn lifting_data(&self, system: &ConstraintSystem) -> Option<LiftingData> {
        system.to_lifting_data(&self.assignment.as_ref()?.values)
    }
}

struct Prepared {
    /// `log[encoding]`, `u32::MAX` at zero.
    log: Vec<u32>,
    /// Nonzero elements by discrete log.
    powers: Vec<FieldElement>,
    /// Per unknown: (form, coefficient) for every form containing it.
    forms_of: Vec<Vec<(usize, FieldElement)>>,
    form_len: Vec<usize>,
    groups_of: Vec<Vec<usize>>,
    labels: Vec<Option<(u32, u32)>>,
    group_mod: Vec<u32>,
    group_lambda: Vec<u32>,
    /// Upper bound (exclusive) on the discrete log of each unknown.
    log_bound: Vec<u32>,
    /// Per form: the groups where it heads a pair with its negative.
    pair_heads: Vec<Vec<usize>>,
    /// Per group: the number of such pairs, zero unless the group qualifies.
    pairs: Vec<u32>,
}

impl Prepared {
    fn new(sys: &ConstraintSystem) -> Result<Self, SearchError> {
        sys.validate()?;
        let f = &sys.field;
        let q = f.order();
        if q > MAX_ORDER {
            return Err(SearchError::Parameters(format!("the solver handles q up to {MAX_ORDER}")));
        }
        let mut log = vec![u32::MAX; q as usize];
        let mut powers = Vec::with_capacity(q as usize - 1);
        let mut x = f.one();
        for i in 0..q - 1 {
            log[x.encoding() as usize] = i as u32;
            powers.push(x);
            x = f.mul(x, f.generator());
        }
        let n = sys.unknowns.len();
        let mut forms_of = vec![Vec::new(); n];
        for (i, form) in sys.forms.iter().enumerate() {
            for &(u, c) in &form.terms {
                forms_of[u].push((i, f.from_int(c)));
            }
        }
        let mut groups_of = vec![Vec::new(); sys.forms.len()];
        for (g, group) in sys.groups.iter().enumerate() {
            for &i in &group.forms {
                groups_of[i].push(g);
            }
        }
        let half = (q - 1) / 2;
        let mut pair_heads = vec![Vec::new(); sys.forms.len()];
        let mut pairs = vec![0; sys.groups.len()];
        for (g, group) in sys.groups.iter().enumerate() {
            let m = group.modulus;
            if group.lambda != 1 || m % 2 != 0 || half % m != m / 2 {
                continue;
            }
            for &i in &group.forms {
                let neg = sys.forms[i].scaled(-1);
                if group.forms.iter().any(|&j| j > i && sys.forms[j] == neg) {
                    pair_heads[i].push(g);
                    pairs[g] += 1;
                }
            }
        }
        let m = sys.anchor_modulus().min(q - 1) as u32;
        let mut log_bound = vec![(q - 1) as u32; n];
        for &u in &sys.anchors {
            log_bound[u] = m;
        }
        Ok(Prepared {
            log,
            powers,
            forms_of,
            form_len: sys.forms.iter().map(|f| f.terms.len()).collect(),
            groups_of,
            labels: sys.labels.iter().map(|l| l.map(|l| (l.modulus as u32, l.residue as u32))).collect(),
            group_mod: sys.groups.iter().map(|g| g.modulus as u32).collect(),
            group_lambda: sys.groups.iter().map(|g| g.lambda as u32).collect(),
            log_bound,
            pair_heads,
            pairs,
        })
    }
}

enum Step {
    Found,
    Exhausted,
    OutOfBudget,
}

struct Search<'a> {
    sys: &'a ConstraintSystem,
    pre: &'a Prepared,
    order: &'a [u32],
    values: Vec<Option<FieldElement>>,
    remaining: Vec<usize>,
    partial: Vec<FieldElement>,
    counts: Vec<Vec<u32>>,
    nodes: u64,
    limit: u64,
    cancel: &'a (dyn Fn() -> bool + Sync),
    scratch: Vec<(usize, u32)>,
    open_pairs: Vec<u32>,
    closing: Vec<usize>,
    spare: Vec<u32>,
}

impl<'a> Search<'a> {
    fn new(
        sys: &'a ConstraintSystem,
        pre: &'a Prepared,
        order: &'a [u32],
        limit: u64,
        cancel: &'a (dyn Fn() -> bool + Sync),
    ) -> Self {
        Search {
            sys,
            pre,
            order,
            values: vec![None; sys.unknowns.len()],
            remaining: pre.form_len.clone(),
            partial: vec![sys.field.zero(); sys.forms.len()],
            counts: pre.group_mod.iter().map(|&m| vec![0; m as usize]).collect(),
            nodes: 0,
            limit,
            cancel,
            scratch: Vec::new(),
            open_pairs: pre.pairs.clone(),
            closing: Vec::new(),
            spare: Vec::new(),
        }
    }

    /// Whether `x` for `u` keeps every form it would complete admissible.
    fn admissible(&mut self, u: usize, x: FieldElement) -> bool {
        let f = &self.sys.field;
        self.scratch.clear();
        self.closing.clear();
        for &(i, c) in &self.pre.forms_of[u] {
            if self.remaining[i] != 1 {
                continue;
            }
            let v = f.add(self.partial[i], f.mul(c, x));
            let l = self.pre.log[v.encoding() as usize];
            if l == u32::MAX {
                return false;
            }
            if let Some((m, r)) = self.pre.labels[i] {
                if l % m != r {
                    return false;
                }
            }
            for &g in &self.pre.groups_of[i] {
                self.scratch.push((g, l % self.pre.group_mod[g]));
            }
            self.closing.extend_from_slice(&self.pre.pair_heads[i]);
        }
        self.scratch.sort_unstable();
        let mut j = 0;
        while j < self.scratch.len() {
            let mut k = j;
            while k < self.scratch.len() && self.scratch[k] == self.scratch[j] {
                k += 1;
            }
            let (g, c) = self.scratch[j];
            if self.counts[g][c as usize] + (k - j) as u32 > self.pre.group_lambda[g] {
                return false;
            }
            j = k;
        }
        let mut j = 0;
        while j < self.scratch.len() {
            let g = self.scratch[j].0;
            let mut k = j;
            while k < self.scratch.len() && self.scratch[k].0 == g {
                k += 1;
            }
            if self.pre.pairs[g] > 0 && !self.opposite_pairs_suffice(g, j..k) {
                return false;
            }
            j = k;
        }
        true
    }

    /// Whether group `g`, with the classes `scratch[range]` newly filled, keeps
    /// a free pair of opposite classes for every open pair.
    fn opposite_pairs_suffice(&mut self, g: usize, range: std::ops::Range<usize>) -> bool {
        let closed = self.closing.iter().filter(|&&h| h == g).count() as u32;
        let open = self.open_pairs[g] - closed;
        if open == 0 {
            return true;
        }
        self.spare.clear();
        self.spare.extend_from_slice(&self.counts[g]);
        for &(_, c) in &self.scratch[range] {
            self.spare[c as usize] += 1;
        }
        let half = self.spare.len() / 2;
        let free = (0..half).filter(|&c| self.spare[c] == 0 && self.spare[c + half] == 0).count();
        free as u32 >= open
    }

    /// Admissible values for `u` in search order, stopping once `cap` are found.
    fn candidates(&mut self, u: usize, cap: usize) -> Vec<FieldElement> {
        let bound = self.pre.log_bound[u];
        let mut out = Vec::new();
        for &l in self.order {
            if out.len() >= cap {
                break;
            }
            if l >= bound {
                continue;
            }
            let x = self.pre.powers[l as usize];
            if self.admissible(u, x) {
                out.push(x);
            }
        }
        out
    }

    fn assign(&mut self, u: usize, x: FieldElement) {
        let f = &self.sys.field;
        self.values[u] = Some(x);
        for &(i, c) in &self.pre.forms_of[u] {
            self.partial[i] = f.add(self.partial[i], f.mul(c, x));
            self.remaining[i] -= 1;
            if self.remaining[i] == 0 {
                let l = self.pre.log[self.partial[i].encoding() as usize];
                for &g in &self.pre.groups_of[i] {
                    self.counts[g][(l % self.pre.group_mod[g]) as usize] += 1;
                }
                for &g in &self.pre.pair_heads[i] {
                    self.open_pairs[g] -= 1;
                }
            }
        }
    }

    fn unassign(&mut self, u: usize) {
        let f = &self.sys.field;
        let x = self.values[u].take().expect("assigned");
        for &(i, c) in &self.pre.forms_of[u] {
            if self.remaining[i] == 0 {
                let l = self.pre.log[self.partial[i].encoding() as usize];
                for &g in &self.pre.groups_of[i] {
                    self.counts[g][(l % self.pre.group_mod[g]) as usize] -= 1;
                }
                for &g in &self.pre.pair_heads[i] {
                    self.open_pairs[g] += 1;
                }
            }
            self.remaining[i] += 1;
            self.partial[i] = f.sub(self.partial[i], f.mul(c, x));
        }
    }

    /// The unknown to branch on with its values, or `None` when all are assigned.
    fn select(&mut self) -> Option<(usize, Vec<FieldElement>)> {
        let mut best: Option<(usize, Vec<FieldElement>)> = None;
        let mut first_free = None;
        for u in 0..self.values.len() {
            if self.values[u].is_some() {
                continue;
            }
            first_free.get_or_insert(u);
            let linked = self.pre.forms_of[u]
                .iter()
                .any(|&(i, _)| self.remaining[i] == 1 && self.pre.form_len[i] >= 2);
            if !linked {
                continue;
            }
            // A list as long as the best one so far cannot win, so stop there.
            let cap = best.as_ref().map_or(usize::MAX, |(_, b)| b.len());
            let c = self.candidates(u, cap);
            if c.len() < cap {
                let empty = c.is_empty();
                best = Some((u, c));
                if empty {
                    break;
                }
            }
        }
        match best {
            Some(b) => Some(b),
            None => first_free.map(|u| (u, self.candidates(u, usize::MAX))),
        }
    }

    fn run(&mut self) -> Step {
        let Some((u, cands)) = self.select() else {
            return Step::Found;
        };
        for x in cands {
            if self.nodes >= self.limit || (self.nodes % 4096 == 0 && (self.cancel)()) {
                return Step::OutOfBudget;
            }
            self.nodes += 1;
            self.assign(u, x);
            match self.run() {
                Step::Exhausted => self.unassign(u),
                other => return other,
            }
        }
        Step::Exhausted
    }
}

/// Solves `system` with the value order fixed by `seed`; see the module docs.
pub fn solve(system: &ConstraintSystem, seed: u64, budget: u64) -> Result<SolveOutcome, SearchError> {
    Ok(solve_cancellable(system, seed, budget, &|| false)?.0)
}

/// Returns the outcome and whether the run was cut short by `cancel`.
fn solve_cancellable(
    system: &ConstraintSystem,
    seed: u64,
    budget: u64,
    cancel: &(dyn Fn() -> bool + Sync),
) -> Result<(SolveOutcome, bool), SearchError> {
    let pre = Prepared::new(system)?;
    let q1 = system.field.order() - 1;
    let per_attempt = (budget / 4).max(1);
    let mut used = 0u64;
    let mut attempts = 0;
    for attempt in 0..=RESTARTS {
        if used >= budget {
            break;
        }
        attempts += 1;
        let mut order: Vec<u32> = (0..q1 as u32).collect();
        if seed != 0 || attempt != 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(attempt as u64);
            order.shuffle(&mut rng);
        }
        let mut search = Search::new(system, &pre, &order, per_attempt.min(budget - used), cancel);
        let step = search.run();
        used += search.nodes;
        let outcome = |status, assignment| SolveOutcome { status, assignment, nodes: used, attempts, seed };
        match step {
            Step::Found => {
                let values: Vec<FieldElement> = search.values.iter().map(|v| v.expect("complete")).collect();
                verify_solution(system, &values);
                return Ok((outcome(SolveStatus::Solved, Some(Assignment { values })), false));
            }
            Step::Exhausted => return Ok((outcome(SolveStatus::Exhausted, None), false)),
            Step::OutOfBudget if cancel() => return Ok((outcome(SolveStatus::BudgetExceeded, None), true)),
            Step::OutOfBudget => {}
        }
    }
    Ok((SolveOutcome { status: SolveStatus::BudgetExceeded, assignment: None, nodes: used, attempts, seed }, false))
}

/// Re-checks a solution against the system and, through the template, against
/// the lifting conditions themselves.
fn verify_solution(system: &ConstraintSystem, values: &[FieldElement]) {
    if let Err(e) = system.check(values) {
        panic!("solver produced an invalid assignment: {e}");
    }
    if let Some(data) = system.to_lifting_data(values) {
        let report = check_lifting_conditions(&data).expect("template shape was validated");
        assert!(report.ok, "assignment satisfies the system but not the lifting conditions");
    }
}

/// Runs one search per seed in parallel. The successful seed with the lowest
/// index wins; runs with higher indices are cancelled once it is known.
pub fn solve_any(system: &ConstraintSystem, seeds: &[u64], budget: u64) -> Result<SolveOutcome, SearchError> {
    if seeds.is_empty() {
        return Err(SearchError::Parameters("no seeds given".into()));
    }
    let winner = AtomicUsize::new(usize::MAX);
    let results: Vec<Result<(SolveOutcome, bool), SearchError>> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &seed)| {
            let cancel = || winner.load(Ordering::Relaxed) < i;
            let r = solve_cancellable(system, seed, budget, &cancel);
            if let Ok((o, _)) = &r {
                if o.status == SolveStatus::Solved {
                    winner.fetch_min(i, Ordering::Relaxed);
                }
            }
            r
        })
        .collect();
    let mut results = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let total: u64 = results.iter().map(|(o, _)| o.nodes).sum();
    if let Some(i) = results.iter().position(|(o, _)| o.status == SolveStatus::Solved) {
        return Ok(results.swap_remove(i).0);
    }
    let exhausted = results.iter().find(|(o, _)| o.status == SolveStatus::Exhausted);
    let mut out = exhausted.unwrap_or(&results[0]).0.clone();
    out.nodes = total;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FiniteField;
    use crate::catalog::Catalog;
    use crate::search::system::LinearForm;
    use crate::search::{SystemRegistry, SystemRequest};

    fn generic(sdf: &str, q: u64) -> ConstraintSystem {
        let req = SystemRequest { sdf: Some(Catalog::standard().family(sdf).unwrap()), q, ..Default::default() };
        SystemRegistry::standard().build("generic", &req).unwrap()
    }

    fn tied_z125(q: u64) -> ConstraintSystem {
        let req = SystemRequest {
            sdf: Some(Catalog::standard().family("z125_6_6").unwrap()),
            q,
            tie_duplicates: true,
            ..Default::default()
        };
        SystemRegistry::standard().build("generic", &req).unwrap()
    }

    #[test]
    fn small_generic_system_solves() {
        let sys = generic("z7_8_8", 89);
        let out = solve(&sys, 0, DEFAULT_BUDGET).unwrap();
        assert_eq!(out.status, SolveStatus::Solved);
        let data = out.lifting_data(&sys).unwrap();
        assert!(check_lifting_conditions(&data).unwrap().ok);
    }

    #[test]
    fn tied_z125_solves() {
        for q in [67, 79] {
            let sys = tied_z125(q);
            let out = solve(&sys, 0, DEFAULT_BUDGET).unwrap();
            assert_eq!(out.status, SolveStatus::Solved);
            let data = out.lifting_data(&sys).unwrap();
            assert!(check_lifting_conditions(&data).unwrap().ok);
        }
    }

    #[test]
    fn same_seed_same_assignment() {
        let sys = tied_z125(79);
        for seed in [0, 7] {
            let a = solve(&sys, seed, DEFAULT_BUDGET).unwrap();
            let b = solve(&sys, seed, DEFAULT_BUDGET).unwrap();
            assert_eq!(a.assignment, b.assignment);
            assert_eq!(a.nodes, b.nodes);
        }
    }

    #[test]
    fn contradictory_labels_exhaust() {
        let f = FiniteField::new(13, 1).unwrap();
        let mut sys = ConstraintSystem::new("toy", f, 2);
        let y = sys.add_unknown("y");
        let a = sys.push_form(LinearForm::var(y).scaled(2));
        let b = sys.push_form(LinearForm::var(y).scaled(2));
        sys.fix_label(a, 2, 0).unwrap();
        sys.fix_label(b, 2, 1).unwrap();
        let out = solve(&sys, 0, 1000).unwrap();
        assert_eq!(out.status, SolveStatus::Exhausted);
        assert_eq!(out.nodes, 0);
    }

    #[test]
    fn budget_is_respected() {
        let sys = generic("z125_6_6", 67);
        let out = solve(&sys, 0, 40).unwrap();
        assert_eq!(out.status, SolveStatus::BudgetExceeded);
        assert!(out.nodes <= 40);
    }

    #[test]
    fn parallel_winner_is_lowest_successful_seed() {
        let sys = tied_z125(79);
        let seeds = [3, 1, 4, 1, 5];
        let out = solve_any(&sys, &seeds, DEFAULT_BUDGET).unwrap();
        assert_eq!(out.seed, 3);
        assert_eq!(out.assignment, solve(&sys, 3, DEFAULT_BUDGET).unwrap().assignment);
    }
}

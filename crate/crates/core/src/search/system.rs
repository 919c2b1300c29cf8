//! Cyclotomic constraint systems: unknowns over `F_q^*`, linear forms in them,
//! prescribed class labels and uniformity groups.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::SearchError;
use crate::algebra::{FieldElement, FieldRef};
use crate::families::DesignFamily;
use crate::lifting::{LiftingData, Tie};

/// `sum c_u y_u` with distinct unknowns and nonzero coefficients, sorted by unknown.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LinearForm {
    pub terms: Vec<(usize, i64)>,
}

impl LinearForm {
    pub fn new(terms: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        for (u, c) in terms {
            *acc.entry(u).or_default() += c;
        }
        LinearForm { terms: acc.into_iter().filter(|&(_, c)| c != 0).collect() }
    }

    pub fn var(u: usize) -> Self {
        Self::new([(u, 1)])
    }

    pub fn scaled(&self, c: i64) -> Self {
        Self::new(self.terms.iter().map(|&(u, a)| (u, a * c)))
    }

    pub fn minus(&self, other: &LinearForm) -> Self {
        Self::new(self.terms.iter().copied().chain(other.terms.iter().map(|&(u, c)| (u, -c))))
    }

    pub fn plus(&self, other: &LinearForm) -> Self {
        Self::new(self.terms.iter().chain(&other.terms).copied())
    }

    pub fn unknowns(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().map(|&(u, _)| u)
    }

    /// The form divided by the gcd of its coefficients, first coefficient positive.
    /// Forms with the same primitive part differ by a constant factor, so their
    /// classes determine each other.
    pub fn primitive(&self) -> LinearForm {
        let g = self.terms.iter().fold(0u64, |g, &(_, c)| crate::algebra::numtheory::gcd(g, c.unsigned_abs()));
        let sign = if self.terms.first().is_some_and(|&(_, c)| c < 0) { -1 } else { 1 };
        if g == 0 {
            return self.clone();
        }
        LinearForm { terms: self.terms.iter().map(|&(u, c)| (u, sign * c / g as i64)).collect() }
    }

    pub fn eval(&self, field: &FieldRef, values: &[FieldElement]) -> FieldElement {
        self.terms.iter().fold(field.zero(), |acc, &(u, c)| field.add(acc, field.mul(field.from_int(c), values[u])))
    }

    pub fn display(&self, names: &[String]) -> String {
        let mut out = String::new();
        for (i, &(u, c)) in self.terms.iter().enumerate() {
            let sign = if c < 0 { "-" } else if i > 0 { "+" } else { "" };
            let mag = c.unsigned_abs();
            let coef = if mag == 1 { String::new() } else { mag.to_string() };
            out.push_str(&format!("{sign}{coef}{}", names[u]));
        }
        out
    }
}

/// A prescribed class: `dlog(x) = residue (mod modulus)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Label {
    pub modulus: u64,
    pub residue: u64,
}

/// The class labels of `forms` modulo `modulus` take every residue exactly
/// `lambda` times.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniformGroup {
    pub name: String,
    pub forms: Vec<usize>,
    pub modulus: u64,
    pub lambda: u64,
}

/// How a solution becomes lifting data: the phi value at each block position as
/// a form in the unknowns.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftingTemplate {
    pub sdf: DesignFamily,
    pub e: u64,
    pub d: u64,
    pub lambda: u64,
    pub partition: Vec<Vec<usize>>,
    pub phi: Vec<Vec<LinearForm>>,
    /// `(block, leader, multiplier)`: the block's row is the leader's row times
    /// the multiplier.
    pub ties: Vec<(usize, usize, i64)>,
}

#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub name: String,
    pub field: FieldRef,
    pub d: u64,
    pub unknowns: Vec<String>,
    pub forms: Vec<LinearForm>,
    /// Fixed labels, indexed like `forms`.
    pub labels: Vec<Option<Label>>,
    pub groups: Vec<UniformGroup>,
    /// Unknowns that may be restricted to `dlog < anchor_modulus()`. Each anchor
    /// stands for a set of unknowns that can be scaled together without changing
    /// any label, so some solution always has the anchor in that range.
    pub anchors: Vec<usize>,
    pub template: Option<LiftingTemplate>,
}

impl ConstraintSystem {
    pub fn new(name: impl Into<String>, field: FieldRef, d: u64) -> Self {
        ConstraintSystem {
            name: name.into(),
            field,
            d,
            unknowns: Vec::new(),
            forms: Vec::new(),
            labels: Vec::new(),
            groups: Vec::new(),
            anchors: Vec::new(),
            template: None,
        }
    }

    pub fn add_unknown(&mut self, name: impl Into<String>) -> usize {
        self.unknowns.push(name.into());
        self.unknowns.len() - 1
    }

    /// Index of `form`, adding it if new.
    pub fn intern(&mut self, form: LinearForm) -> usize {
        if let Some(i) = self.form_index(&form) {
            return i;
        }
        self.forms.push(form);
        self.labels.push(None);
        self.forms.len() - 1
    }

    pub fn form_index(&self, form: &LinearForm) -> Option<usize> {
        self.forms.iter().position(|f| f == form)
    }

    /// Adds a form without merging it with an equal one already present.
    pub fn push_form(&mut self, form: LinearForm) -> usize {
        self.forms.push(form);
        self.labels.push(None);
        self.forms.len() - 1
    }

    pub fn fix_label(&mut self, form: usize, modulus: u64, residue: u64) -> Result<(), SearchError> {
        let label = Label { modulus, residue: residue % modulus };
        match self.labels[form] {
            Some(old) if old != label => Err(SearchError::Inconsistent(format!(
                "form {} labelled both {} and {} mod {modulus}",
                self.forms[form].display(&self.unknowns),
                old.residue,
                label.residue
            ))),
            _ => {
                self.labels[form] = Some(label);
                Ok(())
            }
        }
    }

    pub fn add_group(&mut self, name: impl Into<String>, forms: Vec<usize>, modulus: u64, lambda: u64) {
        self.groups.push(UniformGroup { name: name.into(), forms, modulus, lambda });
    }

    /// Least common multiple of every label and group modulus.
    pub fn anchor_modulus(&self) -> u64 {
        let moduli = self.groups.iter().map(|g| g.modulus).chain(self.labels.iter().flatten().map(|l| l.modulus));
        moduli.fold(1, crate::algebra::numtheory::lcm)
    }

    /// Checks the structural invariants: forms reference declared unknowns, moduli
    /// divide `q - 1`, and each group has `lambda * modulus` forms.
    pub fn validate(&self) -> Result<(), SearchError> {
        let q1 = self.field.order() - 1;
        let n = self.unknowns.len();
        if let Some(f) = self.forms.iter().find(|f| f.terms.is_empty() || f.unknowns().any(|u| u >= n)) {
            return Err(SearchError::Inconsistent(format!("malformed form {f:?}")));
        }
        for l in self.labels.iter().flatten() {
            if l.modulus == 0 || q1 % l.modulus != 0 {
                return Err(SearchError::Inconsistent(format!("label modulus {} does not divide q-1", l.modulus)));
            }
        }
        for g in &self.groups {
            if g.modulus == 0 || q1 % g.modulus != 0 {
                return Err(SearchError::Inconsistent(format!("group {} modulus does not divide q-1", g.name)));
            }
            if g.forms.len() as u64 != g.lambda * g.modulus {
                return Err(SearchError::Inconsistent(format!(
                    "group {} has {} forms, expected {}",
                    g.name,
                    g.forms.len(),
                    g.lambda * g.modulus
                )));
            }
            if g.forms.iter().any(|&f| f >= self.forms.len()) {
                return Err(SearchError::Inconsistent(format!("group {} references a missing form", g.name)));
            }
        }
        if self.anchors.iter().any(|&u| u >= n) {
            return Err(SearchError::Inconsistent("anchor out of range".into()));
        }
        Ok(())
    }

    /// Re-evaluates every constraint on a total assignment.
    pub fn check(&self, values: &[FieldElement]) -> Result<(), String> {
        if values.len() != self.unknowns.len() {
            return Err(format!("{} values for {} unknowns", values.len(), self.unknowns.len()));
        }
        if let Some(u) = values.iter().position(|x| x.is_zero()) {
            return Err(format!("{} is zero", self.unknowns[u]));
        }
        let f = &self.field;
        let mut logs = Vec::with_capacity(self.forms.len());
        for (i, form) in self.forms.iter().enumerate() {
            let x = form.eval(f, values);
            let Ok(l) = f.dlog(x) else {
                return Err(format!("{} vanishes", form.display(&self.unknowns)));
            };
            if let Some(label) = self.labels[i] {
                if l % label.modulus != label.residue {
                    return Err(format!(
                        "{} has class {} mod {}, expected {}",
                        form.display(&self.unknowns),
                        l % label.modulus,
                        label.modulus,
                        label.residue
                    ));
                }
            }
            logs.push(l);
        }
        for g in &self.groups {
            let mut counts = vec![0u64; g.modulus as usize];
            for &i in &g.forms {
                counts[(logs[i] % g.modulus) as usize] += 1;
            }
            if counts.iter().any(|&c| c != g.lambda) {
                return Err(format!("group {} has class counts {counts:?}", g.name));
            }
        }
        Ok(())
    }

    pub fn to_lifting_data(&self, values: &[FieldElement]) -> Option<LiftingData> {
        let t = self.template.as_ref()?;
        let f = &self.field;
        Some(LiftingData {
            sdf: t.sdf.clone(),
            field: f.clone(),
            e: t.e,
            d: t.d,
            lambda: t.lambda,
            phi: t.phi.iter().map(|row| row.iter().map(|form| form.eval(f, values)).collect()).collect(),
            partition: t.partition.clone(),
            ties: t
                .ties
                .iter()
                .map(|&(block, leader, m)| Tie { block, leader, multiplier: f.from_int(m) })
                .collect(),
        })
    }

    /// For each unknown, the number of independent cyclotomic conditions on it:
    /// the distinct forms in uniformity groups that involve it, counted once per
    /// constant multiple (so `y`, `-y` and `2y` are one condition).
    pub fn conditions_per_unknown(&self) -> Vec<usize> {
        let mut seen: Vec<BTreeSet<LinearForm>> = vec![BTreeSet::new(); self.unknowns.len()];
        for g in &self.groups {
            for &i in &g.forms {
                let form = self.forms[i].primitive();
                for u in form.unknowns() {
                    seen[u].insert(form.clone());
                }
            }
        }
        seen.iter().map(|s| s.len()).collect()
    }

    pub fn summary(&self) -> SystemSummary {
        SystemSummary {
            name: self.name.clone(),
            q: self.field.order(),
            d: self.d,
            unknowns: self.unknowns.len(),
            forms: self.forms.len(),
            fixed_labels: self.labels.iter().flatten().count(),
            groups: self.groups.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SystemSummary {
    pub name: String,
    pub q: u64,
    pub d: u64,
    pub unknowns: usize,
    pub forms: usize,
    pub fixed_labels: usize,
    pub groups: usize,
}

impl fmt::Display for SystemSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} over GF({}), d = {}: {} unknowns, {} forms ({} with fixed labels), {} groups",
            self.name, self.q, self.d, self.unknowns, self.forms, self.fixed_labels, self.groups
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FiniteField;

    #[test]
    fn forms_normalize() {
        let f = LinearForm::new([(2, 1), (0, -1), (2, 1)]);
        assert_eq!(f.terms, vec![(0, -1), (2, 2)]);
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        assert_eq!(f.display(&names), "-a+2c");
        assert_eq!(LinearForm::var(1).scaled(-2).primitive(), LinearForm::var(1));
        assert_eq!(f.scaled(-3).primitive(), LinearForm::new([(0, 1), (2, -2)]));
        assert!(LinearForm::var(1).minus(&LinearForm::var(1)).terms.is_empty());
    }

    #[test]
    fn check_reports_violations() {
        let f = FiniteField::new(7, 1).unwrap();
        let mut s = ConstraintSystem::new("toy", f.clone(), 2);
        let y = s.add_unknown("y");
        let a = s.push_form(LinearForm::var(y));
        let b = s.push_form(LinearForm::var(y).scaled(3));
        s.add_group("g", vec![a, b], 2, 1);
        s.validate().unwrap();
        // 3 is a non-square mod 7, so y and 3y always land in different classes.
        assert!(s.check(&[f.from_int(1)]).is_ok());
        s.fix_label(a, 2, 1).unwrap();
        assert!(s.check(&[f.from_int(1)]).is_err());
        assert!(s.check(&[f.from_int(3)]).is_ok());
        assert!(s.fix_label(a, 2, 0).is_err());
    }
}

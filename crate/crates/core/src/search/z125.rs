//! The refined system for the (Z125,6,6)-SDF: 51 unknowns, class labels modulo 3
//! on the forms of each `D_l`, and a fixed label plan for the forms
//! `y_{2i,2} +- y_{2i,1}` and `2 y_{2i,s}`.

use super::builders::{field_of_order, require_prime, SystemBuilder, SystemRequest};
use super::system::{ConstraintSystem, LiftingTemplate, LinearForm};
use super::SearchError;
use crate::catalog::Catalog;

/// `D_l` for `0 <= l <= 62`; `D_l = D_{-l}`. `yA.B` is `y_{A,B}`.
const D_TABLE: &str = "\
0: 2y1.1, 2y1.2, 2y1.3
1: 2y10.1, 2y12.1, 2y14.1
2: 2y18.1, 2y20.1, 2y22.1
3: 2y4.1, y10.4-y10.2, 2y16.1
4: 2y12.2, y16.4-y16.3, y22.3+y22.2
5: 2y6.1, y12.3+y12.2, y18.2+y18.1
6: y16.3+y16.2, y18.3+y18.2, y20.2+y20.1
7: y6.2+y6.1, 2y8.1, y18.2-y18.1
8: y10.3+y10.2, y20.2-y20.1, 2y24.1
9: y12.3-y12.2, 2y14.2, y20.4-y20.1
10: 2y2.1, y16.4+y16.2, 2y22.2
11: y4.3+y4.2, y14.4-y14.3, y20.4+y20.1
12: y6.2-y6.1, y6.3+y6.2, y12.4-y12.2
13: 2y4.2, y6.4-y6.1, y16.2+y16.1
14: y20.4-y20.3, y22.3-y22.2, y24.4-y24.3
15: y4.4-y4.1, 2y24.2, y24.2+y24.1
16: y12.3-y12.1, y12.4+y12.2, y16.2-y16.1
17: 2y8.2, y12.3+y12.1, y20.4-y20.2
18: y2.2+y2.1, y4.4+y4.1, y6.4+y6.1
19: y1.2+y1.1, y1.2-y1.1, y2.4-y2.3
20: y8.2+y8.1, y14.3+y14.1, y22.2+y22.1
21: y12.2+y12.1, y12.4-y12.3, y14.3-y14.1
22: y12.2-y12.1, 2y18.2, y22.2-y22.1
23: 2y2.2, y20.3-y20.1, y24.2-y24.1
24: y4.3-y4.2, y4.4-y4.3, 2y16.2
25: y6.4-y6.2, y12.2-y12.1, y20.3+y20.1
26: y8.3+y8.2, y8.4-y8.3, y12.2+y12.1
27: y2.3+y2.2, y8.2-y8.1, y18.2-y18.1
28: y2.2-y2.1, y2.4-y2.1, y18.3-y18.2
29: y8.4-y8.1, y18.2+y18.1, y22.4-y22.1
30: y16.3-y16.2, y22.2-y22.1, y24.2-y24.1
31: y14.4+y14.1, y20.3-y20.2, y22.4+y22.1
32: y10.2+y10.1, y14.4-y14.1, y22.2+y22.1
33: y10.2-y10.1, y18.3+y18.1, y18.4-y18.3
34: y16.4-y16.2, y22.3+y22.1, y24.3+y24.2
35: y4.4+y4.2, y14.2-y14.1, y18.3-y18.1
36: y8.4+y8.1, y14.2+y14.1, y22.3-y22.1
37: y8.2-y8.1, y12.4-y12.1, y16.2-y16.1
38: y2.4+y2.1, y12.4+y12.1, y24.2+y24.1
39: y4.3-y4.1, y18.4+y18.2, y24.4-y24.1
40: y10.3-y10.1, y10.4-y10.3, y16.2+y16.1
41: y2.2-y2.1, y10.2+y10.1, y10.3+y10.1
42: y4.3+y4.1, y6.4-y6.3, y10.2-y10.1
43: y8.3-y8.2, y10.3-y10.2, y16.3+y16.1
44: y8.2+y8.1, y10.4+y10.1, y14.2+y14.1
45: y10.4-y10.1, y14.2-y14.1, y20.3+y20.2
46: y2.4+y2.2, 2y6.2, y16.3-y16.1
47: y2.3-y2.1, y16.4+y16.1, y24.4+y24.1
48: y4.4-y4.2, y10.4+y10.2, y24.4+y24.2
49: y14.4+y14.2, 2y20.2, y24.3-y24.2
50: y2.3-y2.2, y4.2+y4.1, y16.4-y16.1
51: y2.2+y2.1, 2y10.2, y22.4-y22.2
52: y1.3-y1.2, y1.3+y1.2, y8.4+y8.2
53: y4.2-y4.1, y6.2-y6.1, y24.3-y24.1
54: y1.3-y1.1, y1.3+y1.1, y6.4+y6.2
55: y6.3-y6.1, y8.3-y8.1, y20.2-y20.1
56: y2.4-y2.2, y8.4-y8.2, y14.3-y14.2
57: y2.3+y2.1, y18.4-y18.1, y20.2+y20.1
58: y6.2+y6.1, y6.3-y6.2, y14.4-y14.2
59: y4.2+y4.1, y18.4+y18.1, y20.4+y20.2
60: y6.3+y6.1, y14.3+y14.2, y22.4-y22.3
61: y18.4-y18.2, y22.4+y22.2, y24.3+y24.1
62: y4.2-y4.1, y8.3+y8.1, y24.4-y24.2
";

/// Labels modulo 3 of `2y_{2i,1}`, `2y_{2i,2}`, `y_{2i,2}-y_{2i,1}`, `y_{2i,2}+y_{2i,1}`
/// for `i = 1..=12`.
const G_TWICE_1: [u64; 12] = [1, 1, 1, 2, 1, 2, 0, 0, 1, 2, 0, 2];
const G_TWICE_2: [u64; 12] = [2, 2, 2, 1, 2, 1, 2, 1, 0, 0, 2, 0];
const G_DIFF: [u64; 12] = [2, 1, 2, 1, 1, 2, 2, 2, 0, 1, 1, 0];
const G_SUM: [u64; 12] = [1, 1, 1, 1, 1, 0, 2, 1, 2, 0, 0, 1];

/// Index of `y_{a,b}`: `y_{1,1..3}` first, then `y_{2i,1..4}` for `i = 1..=12`.
fn unknown(a: usize, b: usize) -> Option<usize> {
    match (a, b) {
        (1, 1..=3) => Some(b - 1),
        (a, 1..=4) if a % 2 == 0 && (2..=24).contains(&a) => Some(3 + 4 * (a / 2 - 1) + b - 1),
        _ => None,
    }
}

fn parse_form(s: &str) -> Option<LinearForm> {
    let mut terms = Vec::new();
    let mut rest = s.trim();
    let mut sign = 1;
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            sign = 1;
            rest = r;
        }
        let (coef, r) = match rest.split_once('y')? {
            ("", r) => (1, r),
            (c, r) => (c.parse::<i64>().ok()?, r),
        };
        let end = r.find(['+', '-']).unwrap_or(r.len());
        let (a, b) = r[..end].split_once('.')?;
        terms.push((unknown(a.parse().ok()?, b.parse().ok()?)?, sign * coef));
        rest = &r[end..];
    }
    Some(LinearForm::new(terms))
}

/// The forms of each `D_l`, `l = 0..=62`.
pub(super) fn d_table() -> Vec<Vec<LinearForm>> {
    D_TABLE
        .lines()
        .enumerate()
        .map(|(l, line)| {
            let (idx, forms) = line.split_once(':').expect("table line");
            assert_eq!(idx.parse::<usize>().ok(), Some(l));
            forms.split(',').map(|f| parse_form(f).expect("table form")).collect()
        })
        .collect()
}

pub(super) struct Z125;

impl SystemBuilder for Z125 {
    fn name(&self) -> &'static str {
        "z125"
    }

    fn description(&self) -> &'static str {
        "the (Z125,6,6)-SDF with C_1 = {1,-1}{y11,y12,y13}, C_2i = (y1,-y1,y2,-y2,y3,y4), C_2i+1 = -C_2i; q = 7 mod 12 prime"
    }

    fn build(&self, req: &SystemRequest) -> Result<ConstraintSystem, SearchError> {
        let q = req.q;
        require_prime(q)?;
        if q % 12 != 7 {
            return Err(SearchError::Parameters(format!("q = {q} is not 7 mod 12")));
        }
        let field = field_of_order(q)?;
        let mut sys = ConstraintSystem::new(format!("z125 q={q}"), field.clone(), 6);
        for b in 1..=3 {
            sys.add_unknown(format!("y1.{b}"));
        }
        for i in 1..=12 {
            for b in 1..=4 {
                sys.add_unknown(format!("y{}.{b}", 2 * i));
            }
        }
        let y = |a, b| LinearForm::var(unknown(a, b).expect("declared unknown"));

        // C_j: the phi values of block j, a representative system modulo 6.
        let mut phi: Vec<Vec<LinearForm>> = Vec::new();
        phi.push((1..=3).flat_map(|b| [y(1, b), y(1, b).scaled(-1)]).collect());
        for i in 1..=12 {
            let a = 2 * i;
            let c: Vec<LinearForm> =
                vec![y(a, 1), y(a, 1).scaled(-1), y(a, 2), y(a, 2).scaled(-1), y(a, 3), y(a, 4)];
            phi.push(c.clone());
            phi.push(c.iter().map(|f| f.scaled(-1)).collect());
        }
        let c_groups: Vec<(String, Vec<usize>)> = std::iter::once((1, &phi[0]))
            .chain((1..=12).map(|i| (2 * i, &phi[2 * i - 1])))
            .map(|(j, forms)| (format!("C{j}"), forms.iter().map(|f| sys.intern(f.clone())).collect()))
            .collect();
        for (name, forms) in c_groups {
            sys.add_group(name, forms, 6, 1);
        }

        // D_l: -1 lies in the class of index 3 modulo 6, so the slot of l is
        // {1,-1} D_l and the labels of D_l modulo 3 must be {0,1,2}.
        let table = d_table();
        let mut groups = Vec::new();
        for (l, forms) in table.iter().enumerate() {
            let ids: Vec<usize> = forms.iter().map(|f| sys.intern(f.clone())).collect();
            sys.add_group(format!("D{l}"), ids.clone(), 3, 1);
            groups.push(ids);
        }
        for i in 1..=12 {
            let a = 2 * i;
            let plan = [
                (y(a, 1).scaled(2), G_TWICE_1[i - 1]),
                (y(a, 2).scaled(2), G_TWICE_2[i - 1]),
                (y(a, 2).minus(&y(a, 1)), G_DIFF[i - 1]),
                (y(a, 2).plus(&y(a, 1)), G_SUM[i - 1]),
            ];
            for (form, label) in plan {
                let id = sys.intern(form);
                sys.fix_label(id, 3, label)?;
            }
        }
        // Remaining labels: in ascending l, the missing values of {0,1,2} go in
        // ascending order to the unlabelled forms in listed order.
        for (l, ids) in groups.iter().enumerate().skip(1) {
            let mut free = vec![true; 3];
            for &id in ids {
                if let Some(label) = sys.labels[id] {
                    let slot = &mut free[label.residue as usize];
                    if !std::mem::replace(slot, false) {
                        return Err(SearchError::Inconsistent(format!("D{l} repeats label {}", label.residue)));
                    }
                }
            }
            let mut missing = (0..3u64).filter(|&r| free[r as usize]);
            for &id in ids {
                if sys.labels[id].is_none() {
                    let r = missing.next().expect("one label per unlabelled form");
                    sys.fix_label(id, 3, r)?;
                }
            }
        }
        sys.anchors = std::iter::once(unknown(1, 1)).chain((1..=12).map(|i| unknown(2 * i, 1))).flatten().collect();
        let sdf = Catalog::standard().family("z125_6_6")?;
        sys.template = Some(LiftingTemplate {
            sdf,
            e: q - 1,
            d: 6,
            lambda: 1,
            partition: (0..25).map(|j| vec![j]).collect(),
            phi,
            ties: (1..=12).map(|i| (2 * i, 2 * i - 1, -1)).collect(),
        });
        Ok(sys)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::DesignFamily;
    use std::collections::BTreeMap;

    fn system(q: u64) -> ConstraintSystem {
        Z125.build(&SystemRequest { q, ..Default::default() }).unwrap()
    }

    /// Recomputes every D_l from the printed SDF and the +-y pattern: the ordered
    /// differences of block positions landing on `l`, each paired with its negation.
    #[test]
    fn table_matches_symbolic_differences() {
        let sys = system(67);
        let t = sys.template.as_ref().unwrap();
        let sdf: &DesignFamily = &t.sdf;
        let g = &sdf.group;
        let mut slots: BTreeMap<usize, BTreeMap<LinearForm, i32>> = BTreeMap::new();
        for (block, phi) in sdf.blocks.iter().zip(&t.phi) {
            for a in 0..6 {
                for b in 0..6 {
                    if a != b {
                        let h = g.sub(block[a], block[b]).index();
                        *slots.entry(h).or_default().entry(phi[a].minus(&phi[b])).or_default() += 1;
                    }
                }
            }
        }
        for (l, forms) in d_table().iter().enumerate() {
            let mut want: BTreeMap<LinearForm, i32> = BTreeMap::new();
            for f in forms {
                *want.entry(f.clone()).or_default() += 1;
                *want.entry(f.scaled(-1)).or_default() += 1;
            }
            assert_eq!(slots[&l], want, "D{l}");
            assert_eq!(slots[&((125 - l) % 125)], want, "D-{l}");
        }
    }

    #[test]
    fn example_group_and_labels() {
        let sys = system(67);
        let d33 = sys.groups.iter().find(|g| g.name == "D33").unwrap();
        let shown: Vec<String> = d33.forms.iter().map(|&f| sys.forms[f].display(&sys.unknowns)).collect();
        assert_eq!(shown, ["-y10.1+y10.2", "y18.1+y18.3", "-y18.3+y18.4"]);
        let labels: Vec<u64> = d33.forms.iter().map(|&f| sys.labels[f].unwrap().residue).collect();
        assert_eq!(labels, [1, 0, 2]);
        let twice = sys.form_index(&LinearForm::var(unknown(2, 1).unwrap()).scaled(2)).unwrap();
        assert_eq!(sys.labels[twice].unwrap().residue, 1);
    }

    #[test]
    fn every_d_group_is_fully_labelled_with_distinct_classes() {
        let sys = system(79);
        for g in sys.groups.iter().filter(|g| g.name.starts_with('D') && g.name != "D0") {
            let mut r: Vec<u64> = g.forms.iter().map(|&f| sys.labels[f].unwrap().residue).collect();
            r.sort();
            assert_eq!(r, [0, 1, 2], "{}", g.name);
        }
    }

    #[test]
    fn condition_counts_per_unknown() {
        let sys = system(67);
        let counts = sys.conditions_per_unknown();
        for (u, name) in sys.unknowns.iter().enumerate() {
            let want = match name.as_str() {
                n if n.starts_with("y1.") => 5,
                n if n.ends_with(".1") || n.ends_with(".2") => 7,
                _ => 6,
            };
            assert_eq!(counts[u], want, "{name}");
        }
        assert_eq!(sys.unknowns.len(), 51);
    }

    #[test]
    fn congruence_checked() {
        assert!(Z125.build(&SystemRequest { q: 61, ..Default::default() }).is_err());
        assert!(Z125.build(&SystemRequest { q: 55, ..Default::default() }).is_err());
    }
}

//! Parameter arithmetic of two recursive (v,8,1)-RBIBD constructions. Nothing is
//! built: the record lists the ingredients each rule needs.

use serde::Serialize;

use super::DesignError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum RecursionRule {
    /// TD(10,m), (56m+8,8,1)- and (56n+8,8,1)-RBIBDs, 0 <= n <= m give v = 56(9m+n)+8.
    AGre,
    /// TD(9,8n), (56n+8,8,1)- and (56m+8,8,1)-RBIBDs give v = 56(8mn+n)+8.
    AGreBis,
}

impl std::str::FromStr for RecursionRule {
    type Err = DesignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "aGre" => Ok(RecursionRule::AGre),
            "aGreBis" => Ok(RecursionRule::AGreBis),
            _ => Err(DesignError::Parameters(format!("unknown recursion rule {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecursionParams {
    pub rule: RecursionRule,
    pub m: u64,
    pub n: u64,
    pub v: u64,
    /// Point counts of the (u,8,1)-RBIBDs the rule consumes.
    pub ingredients: Vec<u64>,
    /// Transversal design the rule assumes, as (k, n) for TD(k, n).
    pub transversal_design: (u64, u64),
}

pub fn recursion_params(rule: RecursionRule, m: u64, n: u64) -> Result<RecursionParams, DesignError> {
    let rbibd = |x: u64| 56 * x + 8;
    let (v, mut ingredients, td) = match rule {
        RecursionRule::AGre => {
            if n > m {
                return Err(DesignError::Parameters(format!("n = {n} exceeds m = {m}")));
            }
            (56 * (9 * m + n) + 8, vec![rbibd(m), rbibd(n)], (10, m))
        }
        RecursionRule::AGreBis => (56 * (8 * m * n + n) + 8, vec![rbibd(n), rbibd(m)], (9, 8 * n)),
    };
    ingredients.sort_unstable();
    ingredients.dedup();
    Ok(RecursionParams { rule, m, n, v, ingredients, transversal_design: td })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_applications() {
        let p = recursion_params(RecursionRule::AGreBis, 2, 6).unwrap();
        assert_eq!((p.v, p.ingredients.clone()), (5720, vec![120, 344]));
        assert_eq!(p.transversal_design, (9, 48));
        for (m, n, v, ing) in [(11, 4, 5776, [232, 624]), (19, 11, 10200, [624, 1072]), (48, 5, 24480, [288, 2696])] {
            let p = recursion_params(RecursionRule::AGre, m, n).unwrap();
            assert_eq!((p.v, p.ingredients), (v, ing.to_vec()));
        }
        assert!(recursion_params(RecursionRule::AGre, 3, 4).is_err());
        assert_eq!("aGreBis".parse::<RecursionRule>().unwrap(), RecursionRule::AGreBis);
    }
}

use super::{Catalog, CatalogEntry, CatalogError};
use crate::algebra::numtheory::prime_power;
use crate::algebra::{AbelianGroup, FieldElement, FieldRef, FiniteField, GroupElement};
use crate::families::{DesignFamily, FamilyKind};

pub(super) fn register(c: &mut Catalog) {
    c.register(Box::new(Paley2));
    c.register(Box::new(Paley3));
    c.register(Box::new(TwinPrime));
    c.register(Box::new(Singer));
}

/// The additive group of GF(q) together with the field. Prime orders use `Z_q`,
/// which has the same element indices.
fn field_group(q: u64) -> Result<(AbelianGroup, FieldRef), CatalogError> {
    let (p, m) = prime_power(q).ok_or_else(|| CatalogError::Parameters(format!("{q} is not a prime power")))?;
    let field = FiniteField::new(p, m)?;
    let group = if m == 1 { AbelianGroup::cyclic(q)? } else { AbelianGroup::additive(field.clone()) };
    Ok((group, field))
}

fn as_group(x: FieldElement) -> GroupElement {
    GroupElement(x.encoding())
}

fn doubled(xs: impl IntoIterator<Item = GroupElement>, times: usize) -> Vec<GroupElement> {
    xs.into_iter().flat_map(|x| std::iter::repeat(x).take(times)).collect()
}

fn sdf(group: AbelianGroup, lambda: u64, blocks: Vec<Vec<GroupElement>>, provenance: String) -> DesignFamily {
    DesignFamily { kind: FamilyKind::Sdf, group, subgroup: None, lambda, blocks, frame_partition: None, provenance }
}

fn odd_prime_power(p: u64) -> Result<(AbelianGroup, FieldRef), CatalogError> {
    if p % 2 == 0 {
        return Err(CatalogError::Parameters(format!("{p} is not odd")));
    }
    field_group(p)
}

struct Paley2;

impl CatalogEntry for Paley2 {
    fn name(&self) -> &'static str {
        "paley2"
    }
    fn params(&self) -> &'static [&'static str] {
        &["p"]
    }
    fn default_params(&self) -> &'static [u64] {
        &[7]
    }
    fn description(&self) -> &'static str {
        "Paley difference multiset of the second type: 2({0} u squares) over GF(p), p = 3 mod 4"
    }
    fn family(&self, params: &[u64]) -> Result<DesignFamily, CatalogError> {
        let p = params[0];
        if p % 4 != 3 {
            return Err(CatalogError::Parameters(format!("paley2 needs p = 3 mod 4, got {p}")));
        }
        let (group, f) = odd_prime_power(p)?;
        let mut set: Vec<FieldElement> = vec![f.zero()];
        set.extend(f.nonzero().filter(|&x| f.is_square(x).unwrap()));
        set.sort();
        Ok(sdf(
            group,
            p + 1,
            vec![doubled(set.into_iter().map(as_group), 2)],
            format!("second-type Paley difference multiset, p = {p}"),
        ))
    }
}

struct Paley3;

impl CatalogEntry for Paley3 {
    fn name(&self) -> &'static str {
        "paley3"
    }
    fn params(&self) -> &'static [&'static str] {
        &["p"]
    }
    fn default_params(&self) -> &'static [u64] {
        &[5]
    }
    fn description(&self) -> &'static str {
        "third-type Paley SDF: 2({0} u squares), 2({0} u non-squares) over GF(p), p odd"
    }
    fn family(&self, params: &[u64]) -> Result<DesignFamily, CatalogError> {
        let p = params[0];
        let (group, f) = odd_prime_power(p)?;
        // Positions follow the powers of the generator: w^2, w^4, ..., w^(p-1) for the
        // squares and w, w^3, ..., w^(p-2) for the rest.
        let half = (p - 1) / 2;
        let squares = (1..=half).map(|j| f.exp(2 * j as i64));
        let others = (0..half).map(|j| f.exp(2 * j as i64 + 1));
        let x1 = std::iter::once(f.zero()).chain(squares).map(as_group);
        let x2 = std::iter::once(f.zero()).chain(others).map(as_group);
        Ok(sdf(
            group,
            2 * p + 2,
            vec![doubled(x1, 2), doubled(x2, 2)],
            format!("third-type Paley strong difference family, p = {p}"),
        ))
    }
}

struct TwinPrime;

impl CatalogEntry for TwinPrime {
    fn name(&self) -> &'static str {
        "twin_prime"
    }
    fn params(&self) -> &'static [&'static str] {
        &["p"]
    }
    fn default_params(&self) -> &'static [u64] {
        &[3]
    }
    fn description(&self) -> &'static str {
        "twin prime power difference multiset over GF(p) x GF(p+2)"
    }
    fn family(&self, params: &[u64]) -> Result<DesignFamily, CatalogError> {
        let p = params[0];
        if p <= 2 {
            return Err(CatalogError::Parameters(format!("twin_prime needs p > 2, got {p}")));
        }
        let (g1, f1) = odd_prime_power(p)?;
        let (g2, f2) = odd_prime_power(p + 2)?;
        let group = AbelianGroup::product(vec![g1, g2])?;
        let class = |f: &FieldRef, x: FieldElement| -> Option<bool> {
            (!x.is_zero()).then(|| f.is_square(x).unwrap())
        };
        let mut complement = Vec::new();
        for a in f1.elements() {
            for b in f2.elements() {
                let in_set = match (class(&f1, a), class(&f2, b)) {
                    (_, None) => true,
                    (Some(x), Some(y)) => x == y,
                    (None, Some(_)) => false,
                };
                if !in_set {
                    complement.push(group.pair(as_group(a), as_group(b)));
                }
            }
        }
        complement.sort();
        let v = p * (p + 2);
        Ok(sdf(
            group,
            v + 1,
            vec![doubled(complement, 2)],
            format!("twin prime power difference multiset, p = {p}"),
        ))
    }
}

struct Singer;

impl CatalogEntry for Singer {
    fn name(&self) -> &'static str {
        "singer"
    }
    fn params(&self) -> &'static [&'static str] {
        &["p", "m"]
    }
    fn default_params(&self) -> &'static [u64] {
        &[2, 3]
    }
    fn description(&self) -> &'static str {
        "Singer difference multiset: p copies of the complement of the trace-hyperplane difference set"
    }
    fn family(&self, params: &[u64]) -> Result<DesignFamily, CatalogError> {
        let (p, m) = (params[0], params[1]);
        if m < 3 {
            return Err(CatalogError::Parameters(format!("singer needs m >= 3, got {m}")));
        }
        let (r, a) = prime_power(p).ok_or_else(|| CatalogError::Parameters(format!("{p} is not a prime power")))?;
        let degree = u32::try_from(m)
            .ok()
            .and_then(|m| m.checked_mul(a))
            .ok_or_else(|| CatalogError::Parameters("field too large".into()))?;
        let big = FiniteField::new(r, degree)?;
        let v = (big.order() - 1) / (p - 1);
        let group = AbelianGroup::cyclic(v)?;
        // Relative trace down to GF(p): x + x^p + ... + x^(p^(m-1)).
        let trace = |x: FieldElement| {
            let mut acc = big.zero();
            let mut y = x;
            for _ in 0..m {
                acc = big.add(acc, y);
                y = big.pow(y, p);
            }
            acc
        };
        let complement: Vec<GroupElement> = (0..v)
            .filter(|&i| !trace(big.exp(i as i64)).is_zero())
            .map(|i| GroupElement(i as u32))
            .collect();
        Ok(sdf(
            group,
            big.order() * (p - 1),
            vec![doubled(complement, p as usize)],
            format!("Singer difference multiset, p = {p}, m = {m}"),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::verify_sdf;
    use serde_json::json;

    fn encoded(fam: &DesignFamily) -> serde_json::Value {
        fam.to_json()["blocks"].clone()
    }

    #[test]
    fn paley2_seven() {
        let fam = Paley2.family(&[7]).unwrap();
        assert_eq!(encoded(&fam), json!([[0, 0, 1, 1, 2, 2, 4, 4]]));
        assert!(verify_sdf(&fam).unwrap().ok);
        assert!(Paley2.family(&[5]).is_err());
    }

    #[test]
    fn paley3_block_order() {
        // GF(5) has generator 2: squares in order 4, 1; others 2, 3.
        let fam = Paley3.family(&[5]).unwrap();
        assert_eq!(encoded(&fam), json!([[0, 0, 4, 4, 1, 1], [0, 0, 2, 2, 3, 3]]));
        assert!(verify_sdf(&fam).unwrap().ok);
        assert_eq!(fam.lambda, 12);
    }

    #[test]
    fn twin_prime_sizes() {
        let fam = TwinPrime.family(&[3]).unwrap();
        assert_eq!(fam.blocks[0].len(), 16);
        assert!(verify_sdf(&fam).unwrap().ok);
    }

    #[test]
    fn singer_sizes() {
        let fam = Singer.family(&[2, 3]).unwrap();
        assert_eq!(fam.group.order(), 7);
        assert_eq!(fam.blocks[0].len(), 8);
        assert_eq!(fam.lambda, 8);
        assert!(verify_sdf(&fam).unwrap().ok);
        let fam = Singer.family(&[3, 3]).unwrap();
        assert_eq!((fam.group.order(), fam.blocks[0].len(), fam.lambda), (13, 27, 54));
        assert!(verify_sdf(&fam).unwrap().ok);
        let fam = Singer.family(&[4, 3]).unwrap();
        assert_eq!((fam.group.order(), fam.blocks[0].len(), fam.lambda), (21, 64, 192));
        assert!(verify_sdf(&fam).unwrap().ok);
    }
}

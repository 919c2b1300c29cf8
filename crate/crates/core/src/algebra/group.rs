use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::field::{FieldDescriptor, FieldRef, FiniteField};
use super::numtheory::{gcd, lcm};
use super::AlgebraError;

/// Index of an element in the canonical enumeration of its group.
///
/// Enumeration is mixed radix over the descriptor tree, first factor most
/// significant; an additive field contributes its coefficient digits, so the
/// index of a field element equals its encoding.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub u32);

impl GroupElement {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupDescriptor {
    Cyclic(u64),
    Field(FieldDescriptor),
    Product(Vec<GroupDescriptor>),
}

pub enum GroupKind {
    Cyclic(u64),
    AdditiveField(FieldRef),
    Product(Vec<AbelianGroup>),
}

struct GroupInner {
    kind: GroupKind,
    order: u64,
    radices: Vec<u64>,
    factor_orders: Vec<u64>,
    factor_strides: Vec<u64>,
}

#[derive(Clone)]
pub struct AbelianGroup(Arc<GroupInner>);

impl fmt::Debug for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            GroupKind::Cyclic(n) => write!(f, "Z{n}"),
            GroupKind::AdditiveField(k) => write!(f, "F{}+", k.order()),
            GroupKind::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(|g| format!("{g:?}")).collect();
                write!(f, "{}", parts.join("x"))
            }
        }
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl PartialEq for AbelianGroup {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (&self.0.kind, &other.0.kind) {
            (GroupKind::Cyclic(a), GroupKind::Cyclic(b)) => a == b,
            (GroupKind::AdditiveField(a), GroupKind::AdditiveField(b)) => {
                a.characteristic() == b.characteristic()
                    && a.degree() == b.degree()
                    && a.modulus() == b.modulus()
            }
            (GroupKind::Product(a), GroupKind::Product(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for AbelianGroup {}

impl AbelianGroup {
    fn from_kind(kind: GroupKind) -> Result<Self, AlgebraError> {
        let (radices, factor_orders) = match &kind {
            GroupKind::Cyclic(n) => {
                if *n == 0 {
                    return Err(AlgebraError::InvalidGroup("cyclic group of order 0".into()));
                }
                (vec![*n], vec![*n])
            }
            GroupKind::AdditiveField(f) => {
                (vec![f.characteristic(); f.degree() as usize], vec![f.order()])
            }
            GroupKind::Product(fs) => {
                if fs.is_empty() {
                    return Err(AlgebraError::InvalidGroup("empty product".into()));
                }
                let radices = fs.iter().flat_map(|g| g.0.radices.iter().copied()).collect();
                (radices, fs.iter().map(|g| g.order()).collect())
            }
        };
        let mut order: u64 = 1;
        for &o in &factor_orders {
            order = order
                .checked_mul(o)
                .filter(|&x| x <= u32::MAX as u64)
                .ok_or(AlgebraError::InvalidGroup("group too large".into()))?;
        }
        let mut factor_strides = vec![1u64; factor_orders.len()];
        for i in (0..factor_orders.len().saturating_sub(1)).rev() {
            factor_strides[i] = factor_strides[i + 1] * factor_orders[i + 1];
        }
        Ok(AbelianGroup(Arc::new(GroupInner {
            kind,
            order,
            radices,
            factor_orders,
            factor_strides,
        })))
    }

    pub fn cyclic(n: u64) -> Result<Self, AlgebraError> {
        Self::from_kind(GroupKind::Cyclic(n))
    }

    pub fn additive(field: FieldRef) -> Self {
        Self::from_kind(GroupKind::AdditiveField(field)).expect("field orders fit")
    }

    pub fn product(factors: Vec<AbelianGroup>) -> Result<Self, AlgebraError> {
        Self::from_kind(GroupKind::Product(factors))
    }

    pub fn from_descriptor(d: &GroupDescriptor) -> Result<Self, AlgebraError> {
        match d {
            GroupDescriptor::Cyclic(n) => Self::cyclic(*n),
            GroupDescriptor::Field(fd) => Ok(Self::additive(FiniteField::from_descriptor(fd)?)),
            GroupDescriptor::Product(fs) => {
                Self::product(fs.iter().map(Self::from_descriptor).collect::<Result<_, _>>()?)
            }
        }
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        match &self.0.kind {
            GroupKind::Cyclic(n) => GroupDescriptor::Cyclic(*n),
            GroupKind::AdditiveField(f) => GroupDescriptor::Field(f.descriptor()),
            GroupKind::Product(fs) => GroupDescriptor::Product(fs.iter().map(|g| g.descriptor()).collect()),
        }
    }

    pub fn kind(&self) -> &GroupKind {
        &self.0.kind
    }

    pub fn order(&self) -> u64 {
        self.0.order
    }

    /// Top-level factors (a non-product group is its own single factor).
    pub fn factors(&self) -> Vec<AbelianGroup> {
        match &self.0.kind {
            GroupKind::Product(fs) => fs.clone(),
            _ => vec![self.clone()],
        }
    }

    /// The field of an additive field group.
    pub fn field(&self) -> Option<&FieldRef> {
        match &self.0.kind {
            GroupKind::AdditiveField(f) => Some(f),
            _ => None,
        }
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(0)
    }

    pub fn contains(&self, a: GroupElement) -> bool {
        (a.0 as u64) < self.0.order
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> {
        (0..self.0.order as u32).map(GroupElement)
    }

    pub fn element(&self, index: u64) -> Result<GroupElement, AlgebraError> {
        if index >= self.0.order {
            return Err(AlgebraError::ElementOutOfRange(index as i64, self.0.order));
        }
        Ok(GroupElement(index as u32))
    }

    pub fn add(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        let r = &self.0.radices;
        if r.len() == 1 {
            return GroupElement(((a.0 as u64 + b.0 as u64) % r[0]) as u32);
        }
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        let mut out = 0u64;
        let mut place = 1u64;
        for &rad in r.iter().rev() {
            out += ((x % rad + y % rad) % rad) * place;
            x /= rad;
            y /= rad;
            place *= rad;
        }
        GroupElement(out as u32)
    }

    pub fn neg(&self, a: GroupElement) -> GroupElement {
        let r = &self.0.radices;
        if r.len() == 1 {
            return GroupElement(((r[0] - a.0 as u64 % r[0]) % r[0]) as u32);
        }
        let mut x = a.0 as u64;
        let mut out = 0u64;
        let mut place = 1u64;
        for &rad in r.iter().rev() {
            out += ((rad - x % rad) % rad) * place;
            x /= rad;
            place *= rad;
        }
        GroupElement(out as u32)
    }

    pub fn sub(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        self.add(a, self.neg(b))
    }

    pub fn checked_add(&self, a: GroupElement, b: GroupElement) -> Result<GroupElement, AlgebraError> {
        if !self.contains(a) || !self.contains(b) {
            return Err(AlgebraError::GroupMismatch);
        }
        Ok(self.add(a, b))
    }

    pub fn checked_sub(&self, a: GroupElement, b: GroupElement) -> Result<GroupElement, AlgebraError> {
        if !self.contains(a) || !self.contains(b) {
            return Err(AlgebraError::GroupMismatch);
        }
        Ok(self.sub(a, b))
    }

    /// n * a
    pub fn scale(&self, a: GroupElement, n: i64) -> GroupElement {
        let mut x = a.0 as u64;
        let mut out = 0u64;
        let mut place = 1u64;
        for &rad in self.0.radices.iter().rev() {
            let d = ((x % rad) as i128 * n as i128).rem_euclid(rad as i128) as u64;
            out += d * place;
            x /= rad;
            place *= rad;
        }
        GroupElement(out as u32)
    }

    pub fn element_order(&self, a: GroupElement) -> u64 {
        let mut x = a.0 as u64;
        let mut ord = 1u64;
        for &rad in self.0.radices.iter().rev() {
            let d = x % rad;
            ord = lcm(ord, rad / gcd(d, rad));
            x /= rad;
        }
        ord
    }

    /// Unit vectors of the flattened digit representation; they generate the group.
    pub fn standard_generators(&self) -> Vec<GroupElement> {
        let r = &self.0.radices;
        let mut out = Vec::with_capacity(r.len());
        let mut place = 1u64;
        for &rad in r.iter().rev() {
            if rad > 1 {
                out.push(GroupElement(place as u32));
            }
            place *= rad;
        }
        out.reverse();
        out
    }

    pub fn components(&self, a: GroupElement) -> Vec<GroupElement> {
        let x = a.0 as u64;
        self.0
            .factor_orders
            .iter()
            .zip(&self.0.factor_strides)
            .map(|(&o, &s)| GroupElement((x / s % o) as u32))
            .collect()
    }

    /// Component in top-level factor `i`.
    pub fn component(&self, a: GroupElement, i: usize) -> GroupElement {
        GroupElement((a.0 as u64 / self.0.factor_strides[i] % self.0.factor_orders[i]) as u32)
    }

    pub fn compose(&self, parts: &[GroupElement]) -> Result<GroupElement, AlgebraError> {
        if parts.len() != self.0.factor_orders.len() {
            return Err(AlgebraError::BadEncoding(format!(
                "expected {} components, got {}",
                self.0.factor_orders.len(),
                parts.len()
            )));
        }
        let mut x = 0u64;
        for ((&p, &o), &s) in parts.iter().zip(&self.0.factor_orders).zip(&self.0.factor_strides) {
            if p.0 as u64 >= o {
                return Err(AlgebraError::ElementOutOfRange(p.0 as i64, o));
            }
            x += p.0 as u64 * s;
        }
        Ok(GroupElement(x as u32))
    }

    pub fn pair(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        self.compose(&[a, b]).expect("two-factor product")
    }

    pub fn encode(&self, a: GroupElement) -> Value {
        match &self.0.kind {
            GroupKind::Product(fs) => Value::Array(
                fs.iter()
                    .zip(self.components(a))
                    .map(|(g, c)| g.encode(c))
                    .collect(),
            ),
            _ => Value::from(a.0),
        }
    }

    pub fn decode(&self, v: &Value) -> Result<GroupElement, AlgebraError> {
        match &self.0.kind {
            GroupKind::Product(fs) => {
                let arr = v
                    .as_array()
                    .ok_or_else(|| AlgebraError::BadEncoding(format!("expected array, got {v}")))?;
                if arr.len() != fs.len() {
                    return Err(AlgebraError::BadEncoding(format!(
                        "expected {} components, got {v}",
                        fs.len()
                    )));
                }
                let parts = fs
                    .iter()
                    .zip(arr)
                    .map(|(g, x)| g.decode(x))
                    .collect::<Result<Vec<_>, _>>()?;
                self.compose(&parts)
            }
            GroupKind::Cyclic(n) => {
                let x = v
                    .as_i64()
                    .ok_or_else(|| AlgebraError::BadEncoding(format!("expected integer, got {v}")))?;
                Ok(GroupElement(x.rem_euclid(*n as i64) as u32))
            }
            GroupKind::AdditiveField(f) => {
                let x = v
                    .as_i64()
                    .ok_or_else(|| AlgebraError::BadEncoding(format!("expected integer, got {v}")))?;
                if x < 0 && f.degree() == 1 {
                    return Ok(GroupElement(f.from_int(x).encoding()));
                }
                if x < 0 || x as u64 >= f.order() {
                    return Err(AlgebraError::ElementOutOfRange(x, f.order()));
                }
                Ok(GroupElement(x as u32))
            }
        }
    }

    pub fn show(&self, a: GroupElement) -> String {
        match &self.0.kind {
            GroupKind::Product(fs) => {
                let parts: Vec<String> =
                    fs.iter().zip(self.components(a)).map(|(g, c)| g.show(c)).collect();
                format!("({})", parts.join(","))
            }
            _ => a.0.to_string(),
        }
    }
}

/// A subgroup, stored with generators and its full member list.
#[derive(Clone)]
pub struct Subgroup {
    group: AbelianGroup,
    generators: Vec<GroupElement>,
    members: Vec<GroupElement>,
    mask: Vec<bool>,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(order {} of {:?})", self.members.len(), self.group)
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.members == other.members
    }
}

impl Subgroup {
    pub fn trivial(group: &AbelianGroup) -> Self {
        Self::generated(group, &[]).expect("empty generator list")
    }

    pub fn whole(group: &AbelianGroup) -> Self {
        Self::generated(group, &group.standard_generators()).expect("standard generators")
    }

    pub fn generated(group: &AbelianGroup, gens: &[GroupElement]) -> Result<Self, AlgebraError> {
        for &g in gens {
            if !group.contains(g) {
                return Err(AlgebraError::GroupMismatch);
            }
        }
        let mut mask = vec![false; group.order() as usize];
        let mut members = vec![group.zero()];
        mask[0] = true;
        let mut i = 0;
        while i < members.len() {
            let x = members[i];
            for &g in gens {
                let y = group.add(x, g);
                if !mask[y.index()] {
                    mask[y.index()] = true;
                    members.push(y);
                }
            }
            i += 1;
        }
        members.sort_unstable();
        Ok(Subgroup {
            group: group.clone(),
            generators: gens.to_vec(),
            members,
            mask,
        })
    }

    /// Validates that `elems` is closed under addition and contains zero.
    pub fn from_elements(group: &AbelianGroup, elems: &[GroupElement]) -> Result<Self, AlgebraError> {
        let mut mask = vec![false; group.order() as usize];
        for &x in elems {
            if !group.contains(x) {
                return Err(AlgebraError::GroupMismatch);
            }
            mask[x.index()] = true;
        }
        let mut members: Vec<GroupElement> = elems.to_vec();
        members.sort_unstable();
        members.dedup();
        if !mask[0] {
            return Err(AlgebraError::NotSubgroup("zero missing".into()));
        }
        for &x in &members {
            for &y in &members {
                let z = group.add(x, y);
                if !mask[z.index()] {
                    return Err(AlgebraError::NotSubgroup(format!(
                        "{} + {} = {} lies outside",
                        group.show(x),
                        group.show(y),
                        group.show(z)
                    )));
                }
            }
        }
        Ok(Subgroup {
            group: group.clone(),
            generators: members.clone(),
            members,
            mask,
        })
    }

    /// The product of the selected top-level factors, embedded with zeros elsewhere.
    pub fn factors(group: &AbelianGroup, keep: &[bool]) -> Result<Self, AlgebraError> {
        let fs = group.factors();
        if keep.len() != fs.len() {
            return Err(AlgebraError::BadEncoding("factor mask length".into()));
        }
        let mut gens = Vec::new();
        for (i, f) in fs.iter().enumerate() {
            if !keep[i] {
                continue;
            }
            for g in f.standard_generators() {
                let mut parts = vec![GroupElement(0); fs.len()];
                parts[i] = g;
                gens.push(group.compose(&parts)?);
            }
        }
        Self::generated(group, &gens)
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn order(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn members(&self) -> &[GroupElement] {
        &self.members
    }

    pub fn contains(&self, a: GroupElement) -> bool {
        self.mask.get(a.index()).copied().unwrap_or(false)
    }

    /// Coset label for every group element; labels follow the order of coset minima.
    pub fn coset_labels(&self) -> (Vec<u32>, usize) {
        let n = self.group.order() as usize;
        let mut labels = vec![u32::MAX; n];
        let mut count = 0u32;
        for x in 0..n {
            if labels[x] != u32::MAX {
                continue;
            }
            let base = GroupElement(x as u32);
            for &h in &self.members {
                labels[self.group.add(base, h).index()] = count;
            }
            count += 1;
        }
        (labels, count as usize)
    }

    /// Smallest element of each coset, in ascending order.
    pub fn coset_representatives(&self) -> Vec<GroupElement> {
        let (labels, count) = self.coset_labels();
        let mut reps = Vec::with_capacity(count);
        for (x, &l) in labels.iter().enumerate() {
            if l as usize == reps.len() {
                reps.push(GroupElement(x as u32));
            }
        }
        reps
    }

    /// The same subgroup transported into `target` through an element map.
    pub fn map_into(
        &self,
        target: &AbelianGroup,
        f: impl Fn(GroupElement) -> GroupElement,
    ) -> Result<Subgroup, AlgebraError> {
        let gens: Vec<GroupElement> = self.generators.iter().map(|&g| f(g)).collect();
        Subgroup::generated(target, &gens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z7_f89() -> AbelianGroup {
        let f = FiniteField::new(89, 1).unwrap();
        AbelianGroup::product(vec![AbelianGroup::cyclic(7).unwrap(), AbelianGroup::additive(f)]).unwrap()
    }

    #[test]
    fn cyclic_arithmetic() {
        let g = AbelianGroup::cyclic(125).unwrap();
        assert_eq!(g.add(GroupElement(100), GroupElement(50)), GroupElement(25));
        assert_eq!(g.neg(g.zero()), g.zero());
    }

    #[test]
    fn product_orders_and_encoding() {
        let g = z7_f89();
        assert_eq!(g.order(), 623);
        let x = g.decode(&serde_json::json!([1, 1])).unwrap();
        assert_eq!(g.element_order(x), 623);
        assert_eq!(g.encode(x), serde_json::json!([1, 1]));
        let y = g.decode(&serde_json::json!([-1, -20])).unwrap();
        assert_eq!(g.components(y), vec![GroupElement(6), GroupElement(69)]);
        assert_eq!(g.add(x, y), g.decode(&serde_json::json!([0, 70])).unwrap());
    }

    #[test]
    fn field_digits_follow_encoding() {
        let f = FiniteField::new(5, 2).unwrap();
        let g = AbelianGroup::additive(f.clone());
        for a in f.elements() {
            for b in [f.one(), f.generator(), f.exp(7)] {
                let s = g.add(GroupElement(a.encoding()), GroupElement(b.encoding()));
                assert_eq!(s.0, f.add(a, b).encoding());
            }
        }
    }

    #[test]
    fn descriptor_round_trip() {
        let g = z7_f89();
        let d = g.descriptor();
        let text = serde_json::to_string(&d).unwrap();
        assert!(text.starts_with("{\"product\":[{\"cyclic\":7},{\"field\":"));
        let back: GroupDescriptor = serde_json::from_str(&text).unwrap();
        assert_eq!(AbelianGroup::from_descriptor(&back).unwrap(), g);
    }

    #[test]
    fn subgroups() {
        let g = z7_f89();
        let n = Subgroup::factors(&g, &[true, false]).unwrap();
        assert_eq!(n.order(), 7);
        let (labels, count) = n.coset_labels();
        assert_eq!(count, 89);
        assert_eq!(labels[g.pair(GroupElement(3), GroupElement(5)).index()], 5);
        let z12 = AbelianGroup::cyclic(12).unwrap();
        let bad = Subgroup::from_elements(&z12, &[GroupElement(0), GroupElement(3)]);
        assert!(matches!(bad, Err(AlgebraError::NotSubgroup(_))));
        let ok = Subgroup::from_elements(&z12, &[GroupElement(0), GroupElement(4), GroupElement(8)]).unwrap();
        assert_eq!(ok.order(), 3);
        assert_eq!(ok.coset_representatives().len(), 4);
    }

    #[test]
    fn mixing_detected() {
        let g = AbelianGroup::cyclic(7).unwrap();
        assert!(matches!(
            g.checked_add(GroupElement(3), GroupElement(9)),
            Err(AlgebraError::GroupMismatch)
        ));
    }
}

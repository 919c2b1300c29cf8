use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::numtheory::{is_prime, mod_inv, prime_factors};
use super::poly;
use super::AlgebraError;

const TABLE_LIMIT: u64 = 1 << 20;
const MAX_DEGREE: usize = 32;

/// An element of a finite field, stored as its canonical encoding `sum c_i p^i`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
#[serde(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);

    pub fn encoding(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u64,
    pub m: u32,
    pub modulus: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Vec<i64>>,
}

struct LogTables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

struct BabySteps {
    step: u64,
    baby: HashMap<u32, u32>,
    giant: FieldElement,
}

/// GF(p^m) with a fixed primitive modulus and primitive element.
pub struct FiniteField {
    p: u64,
    m: u32,
    q: u64,
    modulus: Vec<u64>,
    generator: FieldElement,
    tables: Option<LogTables>,
    bsgs: OnceLock<BabySteps>,
}

pub type FieldRef = Arc<FiniteField>;

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.m)
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.m == other.m
            && self.modulus == other.modulus
            && self.generator == other.generator
    }
}

impl Eq for FiniteField {}

fn field_order(p: u64, m: u32) -> Result<u64, AlgebraError> {
    if m == 0 || m as usize > MAX_DEGREE {
        return Err(AlgebraError::InvalidDegree(m));
    }
    let mut q: u64 = 1;
    for _ in 0..m {
        q = q.checked_mul(p).ok_or(AlgebraError::FieldTooLarge)?;
    }
    if q > u32::MAX as u64 {
        return Err(AlgebraError::FieldTooLarge);
    }
    Ok(q)
}

fn least_primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors = prime_factors(p - 1);
    (2..p)
        .find(|&g| {
            factors
                .iter()
                .all(|&r| super::numtheory::mod_pow(g, (p - 1) / r, p) != 1)
        })
        .expect("prime fields have primitive roots")
}

/// Lexicographically least primitive polynomial, comparing ascending
/// coefficient lists.
fn least_primitive_poly(p: u64, m: u32) -> Vec<u64> {
    let m = m as usize;
    let mut coeffs = vec![0u64; m];
    loop {
        let mut f = coeffs.clone();
        f.push(1);
        if poly::is_primitive(&f, p) {
            return f;
        }
        // coefficient 0 is the most significant position in the ordering
        let mut i = m;
        loop {
            i -= 1;
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            assert!(i > 0, "a primitive polynomial always exists");
        }
    }
}

fn default_modulus(p: u64, m: u32) -> Vec<u64> {
    if (p, m) == (5, 2) {
        // x^2 - x + 2
        return vec![2, 4, 1];
    }
    least_primitive_poly(p, m)
}

impl FiniteField {
    /// The canonical field GF(p^m).
    pub fn new(p: u64, m: u32) -> Result<FieldRef, AlgebraError> {
        if !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        field_order(p, m)?;
        if m == 1 {
            let g = least_primitive_root(p);
            return Self::build(p, 1, vec![(p - g) % p, 1], None);
        }
        Self::build(p, m, default_modulus(p, m), None)
    }

    /// GF(p^m) with a caller-supplied modulus (coefficients ascending, may be negative).
    pub fn with_modulus(p: u64, m: u32, modulus: &[i64]) -> Result<FieldRef, AlgebraError> {
        if !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        field_order(p, m)?;
        let f: Vec<u64> = modulus
            .iter()
            .map(|&c| c.rem_euclid(p as i64) as u64)
            .collect();
        if f.len() != m as usize + 1 || f[m as usize] != 1 {
            return Err(AlgebraError::BadModulus(format!(
                "expected a monic polynomial of degree {m}, got {modulus:?}"
            )));
        }
        if !poly::is_irreducible(&f, p) {
            return Err(AlgebraError::ReducibleModulus);
        }
        if !poly::is_primitive(&f, p) {
            return Err(AlgebraError::ImprimitiveModulus);
        }
        Self::build(p, m, f, None)
    }

    pub fn from_descriptor(d: &FieldDescriptor) -> Result<FieldRef, AlgebraError> {
        let base = Self::with_modulus(d.p, d.m, &d.modulus)?;
        match &d.generator {
            None => Ok(base),
            Some(g) => {
                let coeffs: Vec<u64> = g.iter().map(|&c| c.rem_euclid(d.p as i64) as u64).collect();
                let x = base.from_coeffs(&coeffs)?;
                if x == base.generator {
                    Ok(base)
                } else {
                    base.with_generator(x)
                }
            }
        }
    }

    /// Same field and modulus, discrete logs taken to a different primitive element.
    pub fn with_generator(&self, g: FieldElement) -> Result<FieldRef, AlgebraError> {
        if g.is_zero() || self.multiplicative_order(g)? != self.q - 1 {
            return Err(AlgebraError::NotPrimitiveElement(g.0));
        }
        Self::build(self.p, self.m, self.modulus.clone(), Some(g))
    }

    fn build(
        p: u64,
        m: u32,
        modulus: Vec<u64>,
        generator: Option<FieldElement>,
    ) -> Result<FieldRef, AlgebraError> {
        let q = field_order(p, m)?;
        let root = if m == 1 {
            FieldElement(((p - modulus[0]) % p) as u32)
        } else {
            FieldElement(p as u32)
        };
        let mut field = FiniteField {
            p,
            m,
            q,
            modulus,
            generator: generator.unwrap_or(root),
            tables: None,
            bsgs: OnceLock::new(),
        };
        if q <= TABLE_LIMIT {
            let n = (q - 1) as usize;
            let mut exp = vec![0u32; n];
            let mut log = vec![0u32; q as usize];
            let mut x = FieldElement(1);
            for (i, slot) in exp.iter_mut().enumerate() {
                if i > 0 && x.0 == 1 {
                    return Err(AlgebraError::NotPrimitiveElement(field.generator.0));
                }
                *slot = x.0;
                log[x.0 as usize] = i as u32;
                x = field.mul_raw(x, field.generator);
            }
            if x.0 != 1 {
                return Err(AlgebraError::NotPrimitiveElement(field.generator.0));
            }
            field.tables = Some(LogTables { exp, log });
        }
        Ok(Arc::new(field))
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p,
            m: self.m,
            modulus: self.modulus.iter().map(|&c| c as i64).collect(),
            generator: Some(self.to_coeffs(self.generator).iter().map(|&c| c as i64).collect()),
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// Element with the given canonical encoding.
    pub fn element(&self, encoding: u64) -> Result<FieldElement, AlgebraError> {
        if encoding >= self.q {
            return Err(AlgebraError::ElementOutOfRange(encoding as i64, self.q));
        }
        Ok(FieldElement(encoding as u32))
    }

    /// An integer read as an element of the prime subfield.
    pub fn from_int(&self, v: i64) -> FieldElement {
        FieldElement(v.rem_euclid(self.p as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement, AlgebraError> {
        if coeffs.len() > self.m as usize && coeffs[self.m as usize..].iter().any(|&c| c != 0) {
            return Err(AlgebraError::BadEncoding(format!("{coeffs:?} has degree >= {}", self.m)));
        }
        let mut enc = 0u64;
        for &c in coeffs.iter().take(self.m as usize).rev() {
            if c >= self.p {
                return Err(AlgebraError::BadEncoding(format!("coefficient {c} >= {}", self.p)));
            }
            enc = enc * self.p + c;
        }
        Ok(FieldElement(enc as u32))
    }

    pub fn to_coeffs(&self, a: FieldElement) -> Vec<u64> {
        let mut x = a.0 as u64;
        (0..self.m)
            .map(|_| {
                let c = x % self.p;
                x /= self.p;
                c
            })
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q as u32).map(FieldElement)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.q as u32).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.m == 1 {
            return FieldElement(((a.0 as u64 + b.0 as u64) % self.p) as u32);
        }
        self.digitwise(a, b, |x, y, p| (x + y) % p)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.m == 1 {
            return FieldElement(((a.0 as u64 + self.p - b.0 as u64) % self.p) as u32);
        }
        self.digitwise(a, b, |x, y, p| (x + p - y) % p)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.sub(FieldElement(0), a)
    }

    fn digitwise(&self, a: FieldElement, b: FieldElement, op: impl Fn(u64, u64, u64) -> u64) -> FieldElement {
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.m {
            out += op(x % self.p, y % self.p, self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        FieldElement(out as u32)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement(0);
        }
        match &self.tables {
            Some(t) => {
                let s = t.log[a.0 as usize] as u64 + t.log[b.0 as usize] as u64;
                FieldElement(t.exp[(s % (self.q - 1)) as usize])
            }
            None => self.mul_raw(a, b),
        }
    }

    fn mul_raw(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.p;
        if self.m == 1 {
            return FieldElement((a.0 as u64 * b.0 as u64 % p) as u32);
        }
        let m = self.m as usize;
        let mut ca = [0u64; MAX_DEGREE];
        let mut cb = [0u64; MAX_DEGREE];
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        for i in 0..m {
            ca[i] = x % p;
            cb[i] = y % p;
            x /= p;
            y /= p;
        }
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..m {
            if ca[i] == 0 {
                continue;
            }
            for j in 0..m {
                prod[i + j] = (prod[i + j] + ca[i] * cb[j]) % p;
            }
        }
        for deg in (m..2 * m - 1).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for i in 0..m {
                prod[deg - m + i] = (prod[deg - m + i] + c * (p - self.modulus[i]) % p) % p;
            }
        }
        let mut enc = 0u64;
        for i in (0..m).rev() {
            enc = enc * p + prod[i];
        }
        FieldElement(enc as u32)
    }

    pub fn pow(&self, a: FieldElement, exp: u64) -> FieldElement {
        if a.0 == 0 {
            return FieldElement(if exp == 0 { 1 } else { 0 });
        }
        if let Some(t) = &self.tables {
            let n = self.q - 1;
            let l = t.log[a.0 as usize] as u128 * (exp % n) as u128 % n as u128;
            return FieldElement(t.exp[l as usize]);
        }
        let mut acc = FieldElement(1);
        let mut b = a;
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, b);
            }
            b = self.mul_raw(b, b);
            e >>= 1;
        }
        acc
    }

    /// generator^i, with i reduced mod q-1 (negative exponents allowed).
    pub fn exp(&self, i: i64) -> FieldElement {
        let n = (self.q - 1) as i64;
        let i = i.rem_euclid(n) as u64;
        match &self.tables {
            Some(t) => FieldElement(t.exp[i as usize]),
            None => self.pow(self.generator, i),
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, AlgebraError> {
        if a.0 == 0 {
            return Err(AlgebraError::ZeroDivision);
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, AlgebraError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Discrete log to the base of the field generator, in `[0, q-1)`.
    pub fn dlog(&self, a: FieldElement) -> Result<u64, AlgebraError> {
        if a.0 == 0 {
            return Err(AlgebraError::ZeroHasNoLog);
        }
        if a.0 as u64 >= self.q {
            return Err(AlgebraError::ElementOutOfRange(a.0 as i64, self.q));
        }
        if let Some(t) = &self.tables {
            return Ok(t.log[a.0 as usize] as u64);
        }
        let bs = self.bsgs.get_or_init(|| self.baby_steps());
        let mut y = a;
        for i in 0..=bs.step {
            if let Some(&j) = bs.baby.get(&y.0) {
                return Ok((i * bs.step + j as u64) % (self.q - 1));
            }
            y = self.mul_raw(y, bs.giant);
        }
        unreachable!("generator is primitive")
    }

    fn baby_steps(&self) -> BabySteps {
        let n = self.q - 1;
        let step = (n as f64).sqrt().ceil() as u64;
        let mut baby = HashMap::with_capacity(step as usize);
        let mut x = FieldElement(1);
        for j in 0..step {
            baby.entry(x.0).or_insert(j as u32);
            x = self.mul_raw(x, self.generator);
        }
        // x = g^step; giant = g^(-step)
        let giant = self.pow(x, n - 1);
        BabySteps { step, baby, giant }
    }

    pub fn multiplicative_order(&self, a: FieldElement) -> Result<u64, AlgebraError> {
        if a.0 == 0 {
            return Err(AlgebraError::ZeroHasNoLog);
        }
        let n = self.q - 1;
        let mut ord = n;
        for r in prime_factors(n) {
            while ord % r == 0 && self.pow(a, ord / r).0 == 1 {
                ord /= r;
            }
        }
        Ok(ord)
    }

    /// Absolute trace to the prime subfield.
    pub fn trace(&self, a: FieldElement) -> FieldElement {
        let mut acc = FieldElement(0);
        let mut x = a;
        for _ in 0..self.m {
            acc = self.add(acc, x);
            x = self.pow(x, self.p);
        }
        acc
    }

    pub fn is_square(&self, a: FieldElement) -> Result<bool, AlgebraError> {
        if self.p == 2 {
            return Ok(true);
        }
        Ok(self.dlog(a)? % 2 == 0)
    }

    /// Inverse of `k` modulo the multiplicative group order.
    pub(crate) fn unit_log_inverse(&self, k: u64) -> Option<u64> {
        mod_inv(k, self.q - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_generators() {
        assert_eq!(FiniteField::new(89, 1).unwrap().generator().encoding(), 3);
        assert_eq!(FiniteField::new(7, 1).unwrap().generator().encoding(), 3);
        assert_eq!(FiniteField::new(67, 1).unwrap().generator().encoding(), 2);
        assert_eq!(FiniteField::new(2, 1).unwrap().generator().encoding(), 1);
    }

    #[test]
    fn gf25_default_modulus() {
        let f = FiniteField::new(5, 2).unwrap();
        assert_eq!(f.modulus(), &[2, 4, 1]);
        let w = f.generator();
        // w^2 = w - 2
        let rhs = f.sub(w, f.from_int(2));
        assert_eq!(f.mul(w, w), rhs);
        let g = FiniteField::with_modulus(5, 2, &[2, -1, 1]).unwrap();
        assert_eq!(*f, *g);
    }

    #[test]
    fn dlog_examples() {
        let f = FiniteField::new(7, 1).unwrap();
        assert_eq!(f.dlog(f.one()).unwrap(), 0);
        assert_eq!(f.dlog(f.generator()).unwrap(), 1);
        assert_eq!(f.dlog(f.from_int(2)).unwrap(), 2);
        assert!(matches!(f.dlog(f.zero()), Err(AlgebraError::ZeroHasNoLog)));
    }

    #[test]
    fn dlog_round_trip() {
        for (p, m) in [(2, 4), (3, 3), (89, 1), (5, 2), (7, 2), (2, 8)] {
            let f = FiniteField::new(p, m).unwrap();
            for x in f.nonzero() {
                assert_eq!(f.exp(f.dlog(x).unwrap() as i64), x);
            }
        }
    }

    #[test]
    fn baby_step_giant_step_large_field() {
        let f = FiniteField::new(1_048_583, 1).unwrap();
        assert!(f.tables.is_none());
        for k in [0u64, 1, 2, 12345, 1_048_581] {
            let x = f.exp(k as i64);
            assert_eq!(f.dlog(x).unwrap(), k);
        }
        let g = FiniteField::new(2, 21).unwrap();
        let x = g.exp(1_000_000);
        assert_eq!(g.dlog(x).unwrap(), 1_000_000);
    }

    #[test]
    fn modulus_errors() {
        assert!(matches!(FiniteField::new(6, 1), Err(AlgebraError::NotPrime(6))));
        assert!(matches!(
            FiniteField::with_modulus(2, 2, &[1, 0, 1]),
            Err(AlgebraError::ReducibleModulus)
        ));
        assert!(matches!(
            FiniteField::with_modulus(2, 4, &[1, 1, 1, 1, 1]),
            Err(AlgebraError::ImprimitiveModulus)
        ));
    }

    #[test]
    fn canonical_extension_moduli_are_primitive() {
        for (p, m) in [(2, 3), (2, 5), (3, 2), (3, 4), (11, 2), (2, 10)] {
            let f = FiniteField::new(p, m).unwrap();
            assert!(poly::is_primitive(f.modulus(), p));
            assert_eq!(f.multiplicative_order(f.generator()).unwrap(), f.order() - 1);
        }
        // ascending lists: [1,0,1,1] (x^3 + x^2 + 1) precedes [1,1,0,1]
        assert_eq!(FiniteField::new(2, 3).unwrap().modulus(), &[1, 0, 1, 1]);
        assert_eq!(FiniteField::new(3, 2).unwrap().modulus(), &[2, 1, 1]);
    }

    #[test]
    fn descriptor_round_trip() {
        let f = FiniteField::new(3, 2).unwrap();
        let d = f.descriptor();
        let g = FiniteField::from_descriptor(&d).unwrap();
        assert_eq!(*f, *g);
        let h = f.with_generator(f.exp(3)).unwrap();
        let h2 = FiniteField::from_descriptor(&h.descriptor()).unwrap();
        assert_eq!(h2.generator(), f.exp(3));
        assert_eq!(h2.dlog(f.exp(3)).unwrap(), 1);
    }
}

use super::field::{FieldElement, FieldRef};
use super::AlgebraError;

/// Assigns nonzero field elements to the cyclotomic classes `C_i^{e,q}`.
#[derive(Clone, Debug)]
pub struct CyclotomicIndexer {
    field: FieldRef,
    e: u64,
    // dlog to the chosen primitive element = dlog(x) * scale mod (q-1)
    scale: u64,
}

impl CyclotomicIndexer {
    pub fn new(field: FieldRef, e: u64) -> Result<Self, AlgebraError> {
        let n = field.order() - 1;
        if e == 0 || n % e != 0 {
            return Err(AlgebraError::ClassCount { e, q: field.order() });
        }
        Ok(CyclotomicIndexer { field, e, scale: 1 })
    }

    /// Classes taken relative to another primitive element `w`.
    pub fn with_primitive(field: FieldRef, e: u64, w: FieldElement) -> Result<Self, AlgebraError> {
        let mut idx = Self::new(field, e)?;
        let lw = idx.field.dlog(w)?;
        idx.scale = idx
            .field
            .unit_log_inverse(lw)
            .ok_or(AlgebraError::NotPrimitiveElement(w.encoding()))?;
        Ok(idx)
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn e(&self) -> u64 {
        self.e
    }

    pub fn class_of(&self, x: FieldElement) -> Result<u64, AlgebraError> {
        let n = self.field.order() - 1;
        let l = self.field.dlog(x)? as u128 * self.scale as u128 % n as u128;
        Ok(l as u64 % self.e)
    }

    pub fn class_counts(&self, a: &[FieldElement]) -> Result<Vec<u64>, AlgebraError> {
        let mut counts = vec![0u64; self.e as usize];
        for &x in a {
            if x.is_zero() {
                return Err(AlgebraError::ZeroInMultiset);
            }
            counts[self.class_of(x)? as usize] += 1;
        }
        Ok(counts)
    }

    /// Every class holds exactly `lambda` members of `a`, with multiplicity.
    pub fn is_transversal(&self, a: &[FieldElement], lambda: u64) -> Result<bool, AlgebraError> {
        Ok(self.class_counts(a)?.iter().all(|&c| c == lambda))
    }

    /// Members of `C_i`, ascending by discrete log.
    pub fn class_members(&self, i: u64) -> Vec<FieldElement> {
        let n = self.field.order() - 1;
        let unscale = self.field.unit_log_inverse(self.scale).expect("scale is a unit");
        (0..n / self.e)
            .map(|j| {
                let l = (i + j * self.e) as u128 * unscale as u128 % n as u128;
                self.field.exp(l as i64)
            })
            .collect()
    }
}

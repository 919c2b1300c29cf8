use super::group::{AbelianGroup, GroupElement, GroupKind};
use super::numtheory::{gcd, mod_inv};
use super::AlgebraError;

/// Isomorphism from a product of cyclic groups with coprime orders onto `Z_n`.
#[derive(Clone, Debug)]
pub struct CrtIso {
    source: AbelianGroup,
    target: AbelianGroup,
    forward: Vec<u32>,
    backward: Vec<u32>,
}

fn cyclic_leaves(g: &AbelianGroup, out: &mut Vec<u64>) -> Result<(), AlgebraError> {
    match g.kind() {
        GroupKind::Cyclic(n) => out.push(*n),
        GroupKind::AdditiveField(f) => {
            if f.degree() != 1 {
                return Err(AlgebraError::NonCyclicFactor(format!("{g:?}")));
            }
            out.push(f.order());
        }
        GroupKind::Product(fs) => {
            for f in fs {
                cyclic_leaves(f, out)?;
            }
        }
    }
    Ok(())
}

impl CrtIso {
    pub fn new(source: &AbelianGroup) -> Result<Self, AlgebraError> {
        let mut leaves = Vec::new();
        cyclic_leaves(source, &mut leaves)?;
        for i in 0..leaves.len() {
            for j in i + 1..leaves.len() {
                if gcd(leaves[i], leaves[j]) != 1 {
                    return Err(AlgebraError::NonCoprimeFactors(leaves[i], leaves[j]));
                }
            }
        }
        let n = source.order();
        // leaf digits are the mixed-radix digits of the index, most significant first
        let coeffs: Vec<u64> = leaves
            .iter()
            .map(|&ni| {
                let mi = n / ni;
                mi * mod_inv(mi % ni, ni).unwrap_or(0) % n
            })
            .collect();
        let mut forward = vec![0u32; n as usize];
        let mut backward = vec![0u32; n as usize];
        for x in 0..n {
            let mut rest = x;
            let mut img: u128 = 0;
            for (&ni, &c) in leaves.iter().zip(&coeffs).rev() {
                let d = rest % ni;
                rest /= ni;
                img = (img + d as u128 * c as u128) % n as u128;
            }
            forward[x as usize] = img as u32;
            backward[img as usize] = x as u32;
        }
        Ok(CrtIso {
            source: source.clone(),
            target: AbelianGroup::cyclic(n)?,
            forward,
            backward,
        })
    }

    pub fn source(&self) -> &AbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &AbelianGroup {
        &self.target
    }

    pub fn apply(&self, a: GroupElement) -> GroupElement {
        GroupElement(self.forward[a.index()])
    }

    pub fn invert(&self, x: GroupElement) -> GroupElement {
        GroupElement(self.backward[x.index()])
    }
}

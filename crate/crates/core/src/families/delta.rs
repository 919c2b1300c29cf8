use rayon::prelude::*;

use super::{BaseBlock, FamilyError};
use crate::algebra::{AbelianGroup, GroupElement};

const PARALLEL_PAIRS: usize = 1 << 16;

/// All ordered-position differences `x_a - x_b`, `a != b`.
pub fn delta_block(group: &AbelianGroup, block: &[GroupElement]) -> Result<Vec<GroupElement>, FamilyError> {
    if block.len() < 2 {
        return Err(FamilyError::SingletonBlock(0));
    }
    let mut out = Vec::with_capacity(block.len() * (block.len() - 1));
    for (a, &x) in block.iter().enumerate() {
        for (b, &y) in block.iter().enumerate() {
            if a != b {
                out.push(group.sub(x, y));
            }
        }
    }
    Ok(out)
}

fn count_into(group: &AbelianGroup, block: &[GroupElement], counts: &mut [u64]) {
    for (a, &x) in block.iter().enumerate() {
        for (b, &y) in block.iter().enumerate() {
            if a != b {
                counts[group.sub(x, y).index()] += 1;
            }
        }
    }
}

/// Multiplicity of every group element in the union of the blocks' difference lists.
pub fn delta_counts(group: &AbelianGroup, blocks: &[BaseBlock]) -> Result<Vec<u64>, FamilyError> {
    if let Some(i) = blocks.iter().position(|b| b.len() < 2) {
        return Err(FamilyError::SingletonBlock(i));
    }
    let n = group.order() as usize;
    let pairs: usize = blocks.iter().map(|b| b.len() * (b.len() - 1)).sum();
    if pairs < PARALLEL_PAIRS || blocks.len() < 2 {
        let mut counts = vec![0u64; n];
        for b in blocks {
            count_into(group, b, &mut counts);
        }
        return Ok(counts);
    }
    let chunk = blocks.len().div_ceil(rayon::current_num_threads().max(1));
    Ok(blocks
        .par_chunks(chunk.max(1))
        .map(|bs| {
            let mut counts = vec![0u64; n];
            for b in bs {
                count_into(group, b, &mut counts);
            }
            counts
        })
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64) -> AbelianGroup {
        AbelianGroup::cyclic(n).unwrap()
    }

    fn els(g: &AbelianGroup, v: &[i64]) -> Vec<GroupElement> {
        v.iter().map(|&x| g.decode(&x.into()).unwrap()).collect()
    }

    #[test]
    fn small_examples() {
        let g = z(7);
        let d: Vec<u32> = delta_block(&g, &els(&g, &[0, 1, 3])).unwrap().iter().map(|x| x.0).collect();
        let mut sorted = d.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 2, 3, 4, 5, 6]);
        let d0 = delta_block(&g, &els(&g, &[0, 0])).unwrap();
        assert_eq!(d0, vec![GroupElement(0), GroupElement(0)]);
        assert!(matches!(delta_block(&g, &els(&g, &[2])), Err(FamilyError::SingletonBlock(_))));
    }

    #[test]
    fn repeated_values_give_zeros() {
        let g = z(63);
        let b = els(&g, &[20, 20, -20, -20, 29, 29, -29, -29]);
        let d = delta_block(&g, &b).unwrap();
        assert_eq!(d.len(), 56);
        assert_eq!(d.iter().filter(|x| x.0 == 0).count(), 8);
    }

    #[test]
    fn parallel_matches_sequential() {
        let g = z(199);
        let blocks: Vec<BaseBlock> = (0..3000)
            .map(|i| els(&g, &[i, 3 * i + 1, 7 * i + 5, i * i % 199, 11, 2 * i]))
            .collect();
        let par = delta_counts(&g, &blocks).unwrap();
        let mut seq = vec![0u64; 199];
        for b in &blocks {
            count_into(&g, b, &mut seq);
        }
        assert_eq!(par, seq);
    }
}

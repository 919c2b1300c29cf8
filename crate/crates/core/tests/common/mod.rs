//! Independent oracles for the integration tests. Each one recomputes a
//! quantity from first principles with plain integer arithmetic and hash maps,
//! sharing no code with the library routine it checks.

#![allow(dead_code)]

use std::collections::HashMap;

use fdf_core::algebra::{FieldElement, FieldRef};

/// Ordered differences `x - y` (`x`, `y` at distinct positions) in
/// `Z_{m_1} x ... x Z_{m_r}`, elements given as residue tuples.
pub fn differences(moduli: &[u64], block: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for (a, x) in block.iter().enumerate() {
        for (b, y) in block.iter().enumerate() {
            if a != b {
                out.push(moduli.iter().enumerate().map(|(i, &m)| (x[i] + m - y[i]) % m).collect());
            }
        }
    }
    out.sort();
    out
}

/// Multiplicity of every nonzero residue among the differences of the blocks in `Z_n`.
pub fn cyclic_difference_counts(n: u64, blocks: &[Vec<u64>]) -> HashMap<u64, u64> {
    let mut counts = HashMap::new();
    for b in blocks {
        for (i, &x) in b.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                if i != j {
                    *counts.entry((x + n - y) % n).or_insert(0) += 1;
                }
            }
        }
    }
    counts
}

/// How often each unordered pair of distinct points occurs in a block.
pub fn pair_counts(blocks: &[Vec<u32>]) -> HashMap<(u32, u32), u64> {
    let mut counts = HashMap::new();
    for b in blocks {
        for (i, &x) in b.iter().enumerate() {
            for &y in &b[i + 1..] {
                *counts.entry((x.min(y), x.max(y))).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// `H(X;L)` by three nested loops: every shift, every start, every position.
pub fn naive_max_correlation(seq: &[u32], l: usize) -> usize {
    let n = seq.len();
    let mut best = 0;
    for tau in 1..n {
        for j in 0..n {
            let hits = (j..j + l).filter(|&t| seq[t % n] == seq[(t + tau) % n]).count();
            best = best.max(hits);
        }
    }
    best
}

/// Discrete logarithms to base `w` by repeated multiplication, or `None` when
/// `w` does not generate the multiplicative group.
pub fn log_table(f: &FieldRef, w: FieldElement) -> Option<HashMap<FieldElement, u64>> {
    let n = f.order() - 1;
    let mut table = HashMap::new();
    let mut x = f.one();
    for i in 0..n {
        if table.insert(x, i).is_some() {
            return None;
        }
        x = f.mul(x, w);
    }
    Some(table)
}

/// Members of `a` in each class `C_i = w^i <w^e>`.
pub fn class_counts(logs: &HashMap<FieldElement, u64>, e: u64, a: &[FieldElement]) -> Vec<u64> {
    let mut c = vec![0; e as usize];
    for x in a {
        c[(logs[x] % e) as usize] += 1;
    }
    c
}

pub fn binomial2(v: u64) -> u64 {
    v * (v - 1) / 2
}

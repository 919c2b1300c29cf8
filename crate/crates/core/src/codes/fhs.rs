use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::CodeError;
use crate::algebra::GroupKind;
use crate::families::DesignFamily;
use crate::lifting::fdf_to_pdf;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fhs {
    pub alphabet_size: usize,
    pub seq: Vec<u32>,
    pub provenance: String,
}

impl Fhs {
    /// Checks that every symbol lies in `0..alphabet_size` and occurs.
    pub fn new(seq: Vec<u32>, alphabet_size: usize) -> Result<Self, CodeError> {
        let mut used = vec![false; alphabet_size];
        for &s in &seq {
            *used
                .get_mut(s as usize)
                .ok_or_else(|| CodeError::Parameters(format!("symbol {s} outside 0..{alphabet_size}")))? = true;
        }
        if let Some(s) = used.iter().position(|u| !u) {
            return Err(CodeError::Parameters(format!("symbol {s} never occurs")));
        }
        if seq.is_empty() {
            return Err(CodeError::Parameters("empty sequence".into()));
        }
        Ok(Fhs { alphabet_size, seq, provenance: String::new() })
    }

    pub fn n(&self) -> usize {
        self.seq.len()
    }

    pub fn to_json(&self) -> Value {
        json!({ "n": self.n(), "l": self.alphabet_size, "seq": self.seq, "provenance": self.provenance })
    }

    pub fn from_json(v: &Value) -> Result<Self, CodeError> {
        #[derive(serde::Deserialize)]
        struct File {
            l: usize,
            seq: Vec<u32>,
            #[serde(default)]
            provenance: String,
        }
        let f: File = serde_json::from_value(v.clone())?;
        let mut x = Fhs::new(f.seq, f.l)?;
        x.provenance = f.provenance;
        Ok(x)
    }
}

/// Labels `Z_kv` by the part containing each element: `N` is symbol 0 and the
/// translates of the base blocks by `N` follow in order of their least element.
pub fn fhs_from_elementary_fdf(fdf: &DesignFamily) -> Result<Fhs, CodeError> {
    if !matches!(fdf.group.kind(), GroupKind::Cyclic(_)) {
        return Err(CodeError::NotCyclic);
    }
    let k = fdf.block_size().unwrap_or(0);
    if k < 3 {
        return Err(CodeError::Parameters(format!("blocks of size {k} give no frame")));
    }
    let pdf = fdf_to_pdf(fdf)?;
    let n = fdf.group.order() as usize;
    let mut seq = vec![0u32; n];
    for (i, b) in pdf.blocks.iter().enumerate() {
        for &x in b {
            seq[x.index()] = i as u32;
        }
    }
    let mut x = Fhs::new(seq, pdf.blocks.len())?;
    x.provenance = format!("part labels of: {}", fdf.provenance);
    Ok(x)
}

/// `sum_{t=j}^{j+L-1} [x(t) = x(t + tau)]` with indices mod n.
pub fn partial_hamming(x: &Fhs, tau: usize, j: usize, l: usize) -> Result<usize, CodeError> {
    let n = x.n();
    if l == 0 || l > n || tau >= n || j >= n {
        return Err(CodeError::Parameters(format!("need 1 <= L <= {n} and tau, j < {n}")));
    }
    Ok((j..j + l).filter(|&t| x.seq[t % n] == x.seq[(t + tau) % n]).count())
}

/// Prefix sums of the coincidence indicator of shift `tau` over two periods.
fn coincidence_prefix(x: &Fhs, tau: usize) -> Vec<u32> {
    let n = x.n();
    let mut p = Vec::with_capacity(2 * n + 1);
    p.push(0);
    for t in 0..2 * n {
        let hit = (x.seq[t % n] == x.seq[(t + tau) % n]) as u32;
        p.push(p[t] + hit);
    }
    p
}

fn window_max(p: &[u32], n: usize, l: usize) -> u32 {
    (0..n).map(|j| p[j + l] - p[j]).max().unwrap_or(0)
}

/// `H(X; L)`: the largest window count over all shifts `1 <= tau < n` and starts.
pub fn fhs_max_correlation(x: &Fhs, l: usize) -> Result<usize, CodeError> {
    let n = x.n();
    if l == 0 || l > n {
        return Err(CodeError::Parameters(format!("need 1 <= L <= {n}")));
    }
    Ok((1..n).into_par_iter().map(|tau| window_max(&coincidence_prefix(x, tau), n, l)).max().unwrap_or(0) as usize)
}

/// `H(X; L)` for every `L` in `1..=n`, entry `L - 1`.
pub fn correlation_profile(x: &Fhs) -> Vec<usize> {
    let n = x.n();
    (1..n)
        .into_par_iter()
        .map(|tau| {
            let p = coincidence_prefix(x, tau);
            (1..=n).map(|l| window_max(&p, n, l)).collect::<Vec<u32>>()
        })
        .reduce(|| vec![0; n], |a, b| a.iter().zip(&b).map(|(u, v)| *u.max(v)).collect())
        .into_iter()
        .map(|v| v as usize)
        .collect()
}

/// `ceil((L/n) ceil((n-e)(n+e-l) / (l(n-1))))` with `e = n mod l`.
pub fn fhs_bound(n: u64, l: u64, big_l: u64) -> Result<u64, CodeError> {
    if l < 2 || n < 2 {
        return Err(CodeError::Parameters(format!("need l >= 2 and n >= 2, got n = {n}, l = {l}")));
    }
    let (n, l, big_l) = (n as i128, l as i128, big_l as i128);
    let e = n % l;
    let inner = Integer::div_ceil(&((n - e) * (n + e - l)), &(l * (n - 1)));
    let outer = Integer::div_ceil(&(big_l * inner), &n);
    Ok(outer.max(0) as u64)
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimalityReport {
    pub ok: bool,
    pub n: usize,
    pub alphabet_size: usize,
    /// `(L, H(X;L), bound)` for every failing window length, ascending.
    pub failing: Vec<(usize, usize, u64)>,
}

impl OptimalityReport {
    pub fn first_failing_l(&self) -> Option<usize> {
        self.failing.first().map(|f| f.0)
    }
}

/// Compares `H(X;L)` with the bound for every `L` in `1..=n`.
pub fn verify_strictly_optimal(x: &Fhs) -> Result<OptimalityReport, CodeError> {
    let n = x.n();
    let profile = correlation_profile(x);
    let mut failing = Vec::new();
    for (i, &h) in profile.iter().enumerate() {
        let l = i + 1;
        let b = fhs_bound(n as u64, x.alphabet_size as u64, l as u64)?;
        if h as u64 != b {
            failing.push((l, h, b));
        }
    }
    Ok(OptimalityReport { ok: failing.is_empty(), n, alphabet_size: x.alphabet_size, failing })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(seq: Vec<u32>) -> Fhs {
        let l = *seq.iter().max().unwrap() as usize + 1;
        Fhs::new(seq, l).unwrap()
    }

    #[test]
    fn window_counts() {
        let x = raw(vec![0, 1, 0, 1]);
        assert_eq!(partial_hamming(&x, 2, 0, 4).unwrap(), 4);
        assert_eq!(partial_hamming(&x, 1, 1, 3).unwrap(), 0);
        for l in 1..=4 {
            assert_eq!(partial_hamming(&x, 0, 3, l).unwrap(), l);
        }
        assert!(partial_hamming(&x, 4, 0, 1).is_err());
        let c = raw(vec![0; 5]);
        assert_eq!(correlation_profile(&c), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn bound_arithmetic() {
        assert_eq!(fhs_bound(623, 78, 623).unwrap(), 7);
        assert_eq!(fhs_bound(623, 78, 89).unwrap(), 1);
        assert_eq!(fhs_bound(623, 78, 90).unwrap(), 2);
        assert_eq!(fhs_bound(10, 10, 1).unwrap(), 0);
        assert!(fhs_bound(10, 1, 1).is_err());
    }

    #[test]
    fn symbols_must_all_occur() {
        assert!(Fhs::new(vec![0, 2], 3).is_err());
        assert!(Fhs::new(vec![0, 3], 3).is_err());
    }
}

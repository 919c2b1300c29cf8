//! Dense polynomials over a prime field, coefficients in ascending order.

use super::numtheory::{mod_inv, prime_factors};

pub type Poly = Vec<u64>;

fn trim(mut a: Poly) -> Poly {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    if a.is_empty() {
        a.push(0);
    }
    a
}

pub fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y % p) % p;
        }
    }
    trim(out)
}

/// Remainder of `a` modulo `f`.
pub fn rem(a: &[u64], f: &[u64], p: u64) -> Poly {
    let df = degree(f).expect("zero divisor");
    let lead_inv = mod_inv(f[df], p).expect("non-invertible leading coefficient");
    let mut r: Poly = a.to_vec();
    while let Some(dr) = degree(&r) {
        if dr < df {
            break;
        }
        let c = r[dr] * lead_inv % p;
        let shift = dr - df;
        for (i, &fc) in f.iter().enumerate().take(df + 1) {
            r[i + shift] = (r[i + shift] + p - c * fc % p) % p;
        }
    }
    trim(r)
}

pub fn mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Poly {
    rem(&mul(a, b, p), f, p)
}

pub fn pow_mod(base: &[u64], mut exp: u64, f: &[u64], p: u64) -> Poly {
    let mut acc: Poly = vec![1];
    let mut b = rem(base, f, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(&acc, &b, f, p);
        }
        b = mul_mod(&b, &b, f, p);
        exp >>= 1;
    }
    acc
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while degree(&y).is_some() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn is_one(a: &[u64]) -> bool {
    degree(a) == Some(0) && a[0] == 1
}

/// Rabin irreducibility test for a monic `f` of degree `m`.
pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    let m = match degree(f) {
        Some(m) if m >= 1 => m,
        _ => return false,
    };
    let x = rem(&[0, 1], f, p);
    let q = p;
    // x^(p^m) must equal x mod f.
    let mut xp = x.clone();
    for _ in 0..m {
        xp = pow_mod(&xp, q, f, p);
    }
    if degree(&sub(&xp, &x, p)).is_some() {
        return false;
    }
    for r in prime_factors(m as u64) {
        let mut y = x.clone();
        for _ in 0..(m as u64 / r) {
            y = pow_mod(&y, q, f, p);
        }
        let g = gcd(f, &sub(&y, &x, p), p);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// The root of `f` generates the multiplicative group of GF(p)[x]/(f).
pub fn is_primitive(f: &[u64], p: u64) -> bool {
    let m = match degree(f) {
        Some(m) if m >= 1 => m as u32,
        _ => return false,
    };
    if f[0] == 0 {
        return false;
    }
    let order = p.pow(m) - 1;
    let x: Poly = vec![0, 1];
    if !is_one(&pow_mod(&x, order, f, p)) {
        return false;
    }
    prime_factors(order)
        .into_iter()
        .all(|r| !is_one(&pow_mod(&x, order / r, f, p)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducibility() {
        assert!(is_irreducible(&[1, 1, 1], 2));
        assert!(!is_irreducible(&[1, 0, 1], 2));
        assert!(is_irreducible(&[1, 1, 0, 1], 2));
    }

    #[test]
    fn primitivity() {
        // x^2 - x + 2 over GF(5)
        assert!(is_primitive(&[2, 4, 1], 5));
        // x^4 + x^3 + x^2 + x + 1 is irreducible over GF(2) but has order 5
        assert!(is_irreducible(&[1, 1, 1, 1, 1], 2));
        assert!(!is_primitive(&[1, 1, 1, 1, 1], 2));
    }
}

//! The threshold `Q(d,m) = (U + sqrt(U^2 + 4 d^(m-1) m))^2 / 4` with
//! `U = sum_{h=1}^m C(m,h) (d-1)^h (h-1)`, above which any `m` prescribed
//! cyclotomic conditions of modulus `d` can be met simultaneously.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Digits kept after the decimal point in the fixed-point evaluation.
const SCALE_DIGITS: u32 = 40;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QBound {
    pub d: u64,
    pub m: u64,
    u: BigInt,
    /// `floor(Q * 10^(2 SCALE_DIGITS))`, up to `U` units of rounding in the square root.
    scaled: BigInt,
}

pub fn u_sum(d: u64, m: u64) -> BigInt {
    let mut u = BigInt::zero();
    let mut binom = BigInt::one();
    let dm1 = BigInt::from(d) - 1;
    let mut pow = BigInt::one();
    for h in 1..=m {
        binom = binom * (m - h + 1) / h;
        pow *= &dm1;
        u += &binom * &pow * (h as i64 - 1);
    }
    u
}

pub fn q_bound(d: u64, m: u64) -> QBound {
    assert!(d >= 1 && m >= 1, "Q(d,m) needs d, m >= 1");
    let u = u_sum(d, m);
    // Q = (U^2 + 2c + U sqrt(U^2 + 4c)) / 2 with c = d^(m-1) m, so only one
    // term is irrational and integral cases come out exact.
    let c = BigInt::from(d).pow((m - 1) as u32) * m;
    let radicand = &u * &u + BigInt::from(4u32) * &c;
    let s2 = BigInt::from(10u32).pow(2 * SCALE_DIGITS);
    let root = (radicand * &s2 * &s2).sqrt();
    let scaled = ((&u * &u + BigInt::from(2u32) * c) * &s2 + &u * root) / 2;
    QBound { d, m, scaled, u }
}

impl QBound {
    pub fn u(&self) -> &BigInt {
        &self.u
    }

    pub fn to_f64(&self) -> f64 {
        let (digits, exp) = self.significant(17);
        format!("{}.{}e{}", &digits[..1], &digits[1..], exp).parse().unwrap_or(f64::INFINITY)
    }

    /// The value rounded (half up) to `n` significant digits: the digit string and
    /// the decimal exponent of its leading digit.
    pub fn significant(&self, n: usize) -> (String, i64) {
        assert!(n >= 1);
        let s = self.scaled.abs().to_string();
        let mut exp = s.len() as i64 - 1 - 2 * SCALE_DIGITS as i64;
        if s.len() <= n {
            return (format!("{s:0<n$}"), exp);
        }
        let mut head = BigInt::parse_bytes(s[..n].as_bytes(), 10).unwrap();
        if s.as_bytes()[n] >= b'5' {
            head += 1;
        }
        let mut digits = head.to_string();
        if digits.len() > n {
            digits.truncate(n);
            exp += 1;
        }
        (digits, exp)
    }

    /// Scientific notation with `n` significant digits, e.g. `6.43306e7`.
    pub fn format_sig(&self, n: usize) -> String {
        let (digits, exp) = self.significant(n);
        if n == 1 {
            format!("{digits}e{exp}")
        } else {
            format!("{}.{}e{}", &digits[..1], &digits[1..], exp)
        }
    }

    /// Whether `q > Q(d,m)`.
    pub fn is_below(&self, q: u64) -> bool {
        let s = BigInt::from(10u32).pow(2 * SCALE_DIGITS);
        BigInt::from(q) * s > self.scaled
    }

    /// Integer part of the bound, when it fits.
    pub fn floor_u128(&self) -> Option<u128> {
        (&self.scaled / BigInt::from(10u32).pow(2 * SCALE_DIGITS)).to_u128()
    }
}

impl fmt::Display for QBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_sig(6))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn printed_values() {
        assert_eq!(q_bound(3, 7).format_sig(6), "6.43306e7");
        assert_eq!(q_bound(6, 6).format_sig(5), "3.4829e10");
        assert_eq!(q_bound(12, 12).format_sig(6), "7.94968e27");
        assert_eq!(q_bound(6, 11).format_sig(6), "8.77844e18");
    }

    #[test]
    fn degenerate_modulus() {
        // d = 1: U = 0 and Q = m.
        for m in 1..6 {
            assert_eq!(q_bound(1, m).floor_u128(), Some(m as u128));
        }
    }

    #[test]
    fn threshold_comparison() {
        let q = q_bound(3, 7);
        // Q(3,7) = 64330605.59...
        assert!(q.is_below(64_330_606));
        assert!(!q.is_below(64_330_605));
    }

    /// Bisection on exact rationals, independent of the integer square root.
    fn oracle(d: u64, m: u64) -> f64 {
        let mut u = BigRational::zero();
        for h in 1..=m {
            let mut c = BigRational::one();
            for i in 0..h {
                c = c * BigRational::from_integer((m - i).into()) / BigRational::from_integer((i + 1).into());
            }
            let mut p = BigRational::one();
            for _ in 0..h {
                p *= BigRational::from_integer((d as i64 - 1).into());
            }
            u += c * p * BigRational::from_integer((h as i64 - 1).into());
        }
        let mut dpow = BigRational::one();
        for _ in 0..m - 1 {
            dpow *= BigRational::from_integer(d.into());
        }
        let r = u.clone() * u.clone() + BigRational::from_integer(4.into()) * dpow * BigRational::from_integer(m.into());
        let (mut lo, mut hi) = (BigRational::zero(), r.clone() + BigRational::one());
        let eps = BigRational::new(1.into(), BigInt::from(10u32).pow(30));
        while hi.clone() - lo.clone() > eps.clone() * (hi.clone() + BigRational::one()) {
            let mid = (lo.clone() + hi.clone()) / BigRational::from_integer(2.into());
            if mid.clone() * mid.clone() <= r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = u + lo;
        let q = x.clone() * x / BigRational::from_integer(4.into());
        q.to_f64().unwrap()
    }

    #[test]
    fn agrees_with_rational_oracle() {
        for d in 1..=16 {
            for m in 1..=16 {
                let got = q_bound(d, m).to_f64();
                let want = oracle(d, m);
                assert!(((got - want) / want).abs() < 1e-9, "Q({d},{m}): {got} vs {want}");
            }
        }
    }
}

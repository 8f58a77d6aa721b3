//! Small exact-arithmetic helpers shared across modules.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Table of `0!..=n!`.
pub fn factorials(n: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(BigUint::one());
    for k in 1..=n {
        let next = &out[k - 1] * k;
        out.push(next);
    }
    out
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Generalized binomial `C(n, k)` for any integer `n`, `k >= 0`.
pub fn binomial_signed(n: &BigInt, k: u64) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= n - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

pub fn pow_u(base: u64, exp: u32) -> BigUint {
    num_traits::pow(BigUint::from(base), exp as usize)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Converts an integral rational to `BigInt`, or `None`.
pub fn to_integer(q: &BigRational) -> Option<BigInt> {
    if q.is_integer() {
        Some(q.to_integer())
    } else {
        None
    }
}

/// Converts a nonnegative integral rational to `BigUint`, or `None`.
pub fn to_natural(q: &BigRational) -> Option<BigUint> {
    to_integer(q).and_then(|n| n.to_biguint())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(factorial(5), BigUint::from(120u32));
        assert_eq!(binomial(14, 7), BigUint::from(3432u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(factorials(4)[4], BigUint::from(24u32));
    }

    #[test]
    fn signed_binomial_negative_top() {
        // C(-1, 3) = -1
        assert_eq!(binomial_signed(&BigInt::from(-1), 3), BigInt::from(-1));
        assert_eq!(binomial_signed(&BigInt::from(2), 3), BigInt::zero());
    }
}

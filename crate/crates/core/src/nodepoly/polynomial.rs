use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{factorial, rat_int};

/// Polynomial in one variable with exact rational coefficients, lowest
/// degree first. Trailing zeros are always trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RatPolynomial {
    coeffs: Vec<BigRational>,
}

impl RatPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPolynomial { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| rat_int(x)).collect())
    }

    pub fn zero() -> Self {
        RatPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// The variable itself.
    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_int(&self, x: i64) -> BigRational {
        self.eval(&rat_int(x))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `p(x + c)`.
    pub fn shift(&self, c: i64) -> Self {
        let lin = Self::from_ints(&[c, 1]);
        let mut out = Self::zero();
        for a in self.coeffs.iter().rev() {
            out = &(&out * &lin) + &Self::constant(a.clone());
        }
        out
    }

    /// `C(x, m) = x(x-1)⋯(x-m+1)/m!`.
    pub fn binomial(m: usize) -> Self {
        let mut p = Self::one();
        for i in 0..m {
            p = &p * &Self::from_ints(&[-(i as i64), 1]);
        }
        p.scale(&BigRational::new(BigInt::one(), factorial(m as u64).into()))
    }

    /// Coefficients `c_m` with `p(x) = Σ c_m C(x, m)`, from forward
    /// differences at 0.
    pub fn to_binomial_basis(&self) -> Vec<BigRational> {
        let n = self.coeffs.len();
        let mut vals: Vec<BigRational> = (0..n as i64).map(|x| self.eval_int(x)).collect();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(vals[0].clone());
            vals = vals.windows(2).map(|w| &w[1] - &w[0]).collect();
        }
        out
    }

    pub fn from_binomial_basis(c: &[BigRational]) -> Self {
        c.iter().enumerate().fold(Self::zero(), |acc, (m, cm)| &acc + &Self::binomial(m).scale(cm))
    }

    /// True when every value at an integer is an integer.
    pub fn is_integer_valued(&self) -> bool {
        self.to_binomial_basis().iter().all(|c| c.is_integer())
    }

    /// Monomial form in the given variable, highest degree first, e.g.
    /// `3*d^2 - 6*d + 3`.
    pub fn format_in(&self, var: &str) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if mono.is_empty() {
                s.push_str(&a.to_string());
            } else if a.is_one() {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{a}*{mono}"));
            }
        }
        s
    }
}

impl fmt::Display for RatPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_in("x"))
    }
}

impl Add for &RatPolynomial {
    type Output = RatPolynomial;
    fn add(self, o: &RatPolynomial) -> RatPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPolynomial::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &RatPolynomial {
    type Output = RatPolynomial;
    fn sub(self, o: &RatPolynomial) -> RatPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPolynomial::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &RatPolynomial {
    type Output = RatPolynomial;
    fn mul(self, o: &RatPolynomial) -> RatPolynomial {
        if self.is_zero() || o.is_zero() {
            return RatPolynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPolynomial::new(out)
    }
}

impl Neg for &RatPolynomial {
    type Output = RatPolynomial;
    fn neg(self) -> RatPolynomial {
        RatPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// `q(n) = Σ_{k=a}^{n−shift} p(k)`, valid for `n >= a + shift - 1`
/// (where it is the empty sum 0). Works in the binomial basis:
/// `Σ_{k=a}^{N} C(k,m) = C(N+1, m+1) − C(a, m+1)`.
pub fn discrete_sum(p: &RatPolynomial, a: i64, shift: i64) -> RatPolynomial {
    let mut q = RatPolynomial::zero();
    let a_rat = rat_int(a);
    for (m, cm) in p.to_binomial_basis().iter().enumerate() {
        if cm.is_zero() {
            continue;
        }
        let upper = RatPolynomial::binomial(m + 1).shift(1 - shift);
        let lower = RatPolynomial::binomial(m + 1).eval(&a_rat);
        let term = &upper - &RatPolynomial::constant(lower);
        q = &q + &term.scale(cm);
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn arithmetic() {
        let p = RatPolynomial::from_ints(&[-1, 1]);
        let q = &p * &p;
        assert_eq!(q, RatPolynomial::from_ints(&[1, -2, 1]));
        assert_eq!((&q - &q).degree(), None);
        assert_eq!(q.shift(1), RatPolynomial::from_ints(&[0, 0, 1]));
        assert_eq!(q.eval_int(4), rat_int(9));
    }

    #[test]
    fn binomial_basis_round_trip() {
        let p = RatPolynomial::new(vec![rat(3, 2), rat(-7, 3), rat_int(0), rat(5, 4)]);
        assert_eq!(RatPolynomial::from_binomial_basis(&p.to_binomial_basis()), p);
        assert!(RatPolynomial::binomial(3).is_integer_valued());
        assert!(!RatPolynomial::from_ints(&[0, 1]).scale(&rat(1, 2)).is_integer_valued());
    }

    #[test]
    fn discrete_sum_examples() {
        let one = RatPolynomial::one();
        assert_eq!(discrete_sum(&one, 1, 0), RatPolynomial::x());
        let k = RatPolynomial::x();
        assert_eq!(discrete_sum(&k, 1, 0), RatPolynomial::new(vec![rat_int(0), rat(1, 2), rat(1, 2)]));
        let p = RatPolynomial::from_ints(&[1, 2]);
        assert_eq!(discrete_sum(&p, 1, 1), RatPolynomial::from_ints(&[-1, 0, 1]));
    }

    #[test]
    fn discrete_sum_empty_boundary() {
        let p = RatPolynomial::from_ints(&[4, -3, 2]);
        for (a, s) in [(2, 0), (-1, 3), (5, 2)] {
            let q = discrete_sum(&p, a, s);
            assert_eq!(q.eval_int(a + s - 1), rat_int(0));
            for n in a + s..a + s + 6 {
                let direct: BigRational = (a..=n - s).map(|k| p.eval_int(k)).sum();
                assert_eq!(q.eval_int(n), direct);
            }
        }
    }

    #[test]
    fn formatting() {
        assert_eq!(RatPolynomial::from_ints(&[3, -6, 3]).format_in("d"), "3*d^2 - 6*d + 3");
        assert_eq!(RatPolynomial::new(vec![rat(-1, 2), rat_int(1)]).format_in("k"), "k - 1/2");
        assert_eq!(RatPolynomial::zero().format_in("d"), "0");
        assert_eq!(RatPolynomial::from_ints(&[0, -1]).format_in("d"), "-d");
    }
}

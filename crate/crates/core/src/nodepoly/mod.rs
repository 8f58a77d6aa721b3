//! Templates, extension polynomials and node polynomials.

mod polynomial;
mod template;

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::arith::{rat_int, to_natural};

pub use polynomial::{discrete_sum, RatPolynomial};
pub use template::{brute_force_templates, enumerate_templates, Template, TemplateStats};

/// Templates of cogenus `1..=delta` with their extension polynomials.
struct Catalog {
    by_delta: Vec<Vec<(Template, RatPolynomial)>>,
}

impl Catalog {
    fn new(delta: u32) -> Self {
        let by_delta = (0..=delta)
            .map(|dl| {
                enumerate_templates(dl)
                    .into_par_iter()
                    .map(|t| {
                        let p = t.extension_polynomial();
                        (t, p)
                    })
                    .collect()
            })
            .collect();
        Catalog { by_delta }
    }
}

/// Severi degree `N^{d,δ}` summed over left-to-right template sequences
/// placed at integer offsets.
pub fn severi_numeric(d: u32, delta: u32) -> BigUint {
    if delta == 0 {
        return BigUint::from(1u32);
    }
    let cat = Catalog::new(delta);
    let mut memo = HashMap::new();
    let total = severi_rec(&cat, d as i64, 0, delta, &mut memo);
    to_natural(&total).expect("severi sum is a natural number")
}

fn severi_rec(
    cat: &Catalog,
    d: i64,
    from: i64,
    left: u32,
    memo: &mut HashMap<(i64, u32), BigRational>,
) -> BigRational {
    if let Some(v) = memo.get(&(from, left)) {
        return v.clone();
    }
    let mut acc = BigRational::zero();
    for dl in 1..=left {
        for (t, p) in &cat.by_delta[dl as usize] {
            let len = t.length() as i64;
            let mu = rat_int(BigInt::from(t.mu()));
            let last_max = d + t.epsilon() as i64 - len;
            let mut k = from.max(t.k_min());
            while k + len <= d + 1 {
                let rest = if dl == left {
                    if k > last_max {
                        break;
                    }
                    rat_int(1)
                } else {
                    severi_rec(cat, d, k + len, left - dl, memo)
                };
                if !rest.is_zero() {
                    acc += &mu * p.eval_int(k) * rest;
                }
                k += 1;
            }
        }
    }
    memo.insert((from, left), acc.clone());
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodePolynomial {
    pub polynomial: RatPolynomial,
    pub threshold: u32,
    /// Largest per-sequence validity bound seen; never exceeds `threshold`.
    pub sharp_bound: i64,
}

/// `N_δ(d)`, agreeing with the Severi degree for all `d >= 2δ`.
pub fn node_polynomial(delta: u32) -> NodePolynomial {
    if delta == 0 {
        return NodePolynomial { polynomial: RatPolynomial::one(), threshold: 0, sharp_bound: 0 };
    }
    let cat = Catalog::new(delta);
    let seqs = sequences(&cat, delta);
    let (polynomial, sharp_bound) = seqs
        .par_iter()
        .map(|seq| sequence_polynomial(seq))
        .reduce(|| (RatPolynomial::zero(), i64::MIN), |a, b| (&a.0 + &b.0, a.1.max(b.1)));
    assert!(sharp_bound <= 2 * delta as i64, "validity bound {sharp_bound} exceeds 2δ");
    NodePolynomial { polynomial, threshold: 2 * delta, sharp_bound }
}

fn sequences(cat: &Catalog, delta: u32) -> Vec<Vec<&(Template, RatPolynomial)>> {
    fn go<'a>(
        cat: &'a Catalog,
        left: u32,
        cur: &mut Vec<&'a (Template, RatPolynomial)>,
        out: &mut Vec<Vec<&'a (Template, RatPolynomial)>>,
    ) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for dl in 1..=left {
            for t in &cat.by_delta[dl as usize] {
                cur.push(t);
                go(cat, left - dl, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(cat, delta, &mut Vec::new(), &mut out);
    out
}

/// Nested sums `Σ_{k_1} ⋯ Σ_{k_m}` with lower bounds
/// `L_i = max(k_min_i, L_{i−1} + ℓ_{i−1})`; returns the polynomial in `d`
/// and the smallest `d` from which it is exact.
fn sequence_polynomial(seq: &[&(Template, RatPolynomial)]) -> (RatPolynomial, i64) {
    let mut inner = RatPolynomial::one();
    let mut lower = i64::MIN;
    let mut prev_len = 0i64;
    let mut mu = BigUint::from(1u32);
    let m = seq.len();
    let mut bound = 0;
    for (idx, (t, p)) in seq.iter().enumerate() {
        let l = if idx == 0 { t.k_min() } else { t.k_min().max(lower + prev_len) };
        let summand = &inner * p;
        let len = t.length() as i64;
        let shift = if idx + 1 == m { len - t.epsilon() as i64 } else { len };
        inner = discrete_sum(&summand, l, shift);
        if idx + 1 == m {
            bound = l + shift - 1;
        }
        lower = l;
        prev_len = len;
        mu *= t.mu();
    }
    (inner.scale(&rat_int(BigInt::from(mu))), bound)
}

/// `A_1..A_{δ_max}` with `Σ_δ N_δ t^δ = exp(Σ_j A_j t^j / j)`.
pub fn aj_polynomials(delta_max: u32) -> Vec<RatPolynomial> {
    let n: Vec<RatPolynomial> = (0..=delta_max).into_par_iter().map(|dl| node_polynomial(dl).polynomial).collect();
    let mut g = vec![RatPolynomial::zero(); n.len()];
    for k in 1..n.len() {
        let mut s = n[k].scale(&rat_int(k as i64));
        for i in 1..k {
            s = &s - &(&g[i].scale(&rat_int(i as i64)) * &n[k - i]);
        }
        g[k] = s.scale(&BigRational::new(1.into(), (k as i64).into()));
    }
    (1..n.len()).map(|j| g[j].scale(&rat_int(j as i64))).collect()
}

/// Inverse of [`aj_polynomials`]: `N_0..N_{len}` from `A_1..A_{len}`.
pub fn exp_from_aj(a: &[RatPolynomial]) -> Vec<RatPolynomial> {
    let mut e = vec![RatPolynomial::one()];
    for k in 1..=a.len() {
        let mut s = RatPolynomial::zero();
        for i in 1..=k {
            s = &s + &(&a[i - 1] * &e[k - i]);
        }
        e.push(s.scale(&BigRational::new(1.into(), (k as i64).into())));
    }
    e
}

/// Convenience for evaluation at an integer, asserting integrality.
pub fn eval_natural(p: &RatPolynomial, x: i64) -> Option<BigUint> {
    to_natural(&p.eval_int(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::invariants::severi;
    use crate::markings::gap_orderings;
    use crate::arith::factorial;
    use crate::Engine;

    #[test]
    fn one_and_two_nodes() {
        let p1 = node_polynomial(1);
        assert_eq!(p1.polynomial, RatPolynomial::from_ints(&[3, -6, 3]));
        assert_eq!(p1.threshold, 2);
        // (3/2)(d−1)(d−2)(3d²−3d−11)
        let expect = &(&RatPolynomial::from_ints(&[-1, 1]) * &RatPolynomial::from_ints(&[-2, 1]))
            * &RatPolynomial::from_ints(&[-11, -3, 3]);
        assert_eq!(node_polynomial(2).polynomial, expect.scale(&rat(3, 2)));
    }

    #[test]
    fn three_nodes() {
        let p = node_polynomial(3);
        assert_eq!(p.polynomial.degree(), Some(6));
        assert_eq!(p.polynomial.eval_int(5), rat_int(7915));
        assert_eq!(p.polynomial.eval_int(4), rat_int(675));
        for d in 6..=9 {
            assert_eq!(eval_natural(&p.polynomial, d).unwrap(), severi_numeric(d as u32, 3));
        }
    }

    #[test]
    fn numeric_matches_diagrams() {
        let engine = Engine::new();
        for d in 1..=5u32 {
            for delta in 1..=6u32 {
                let s = severi(&engine, d, delta).unwrap();
                assert_eq!(severi_numeric(d, delta), s, "d={d} δ={delta}");
            }
        }
        for d in 2..=7u32 {
            assert_eq!(severi_numeric(d, 1), BigUint::from(3 * (d - 1) * (d - 1)));
        }
    }

    #[test]
    fn degree_is_twice_delta() {
        for dl in 0..=4u32 {
            let p = node_polynomial(dl);
            assert_eq!(p.polynomial.degree(), Some(2 * dl as usize));
            assert!(p.sharp_bound <= p.threshold as i64);
        }
    }

    #[test]
    fn aj() {
        let a = aj_polynomials(3);
        assert_eq!(a[0], RatPolynomial::from_ints(&[3, -6, 3]));
        assert_eq!(a[1], &RatPolynomial::from_ints(&[-1, 1]) * &RatPolynomial::from_ints(&[75, -42]));
        assert_eq!(a[2], RatPolynomial::from_ints(&[1899, -2364, 690]));
        let back = exp_from_aj(&a);
        for (dl, p) in back.iter().enumerate() {
            assert_eq!(p, &node_polynomial(dl as u32).polynomial);
        }
    }

    #[test]
    fn extension_polynomial_counts_concrete_extensions() {
        for delta in 1..=3 {
            for t in enumerate_templates(delta) {
                let p = t.extension_polynomial();
                for k in t.k_min()..t.k_min() + 5 {
                    let shorts = t.short_edges(k);
                    let mut items = Vec::new();
                    let mut div = BigUint::from(1u32);
                    for (idx, &s) in shorts.iter().enumerate() {
                        assert!(s >= 0);
                        for _ in 0..s {
                            items.push((idx + 1, idx + 1));
                        }
                        div *= factorial(s as u64);
                    }
                    for &(i, j, _) in t.edges() {
                        items.push((i as usize + 1, j as usize));
                    }
                    let mut e = 0;
                    while e < t.edges().len() {
                        let f = (e..t.edges().len()).find(|&f| t.edges()[f] != t.edges()[e]).unwrap_or(t.edges().len());
                        div *= factorial((f - e) as u64);
                        e = f;
                    }
                    let count = gap_orderings(t.length() as usize + 1, &items) / div;
                    assert_eq!(p.eval_int(k), rat_int(BigInt::from(count)), "{t} at k={k}");
                }
            }
        }
    }

    #[test]
    fn discrete_sum_validity() {
        let p = RatPolynomial::from_ints(&[1, 2]);
        let q = discrete_sum(&p, 1, 1);
        assert_eq!(q, RatPolynomial::from_ints(&[-1, 0, 1]));
    }
}

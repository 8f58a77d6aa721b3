use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::tree::{all_trees, LabeledTree};
use crate::arith::{binomial, factorial, pow_u, rat_int, to_natural};
use crate::enumeration::{enumerate, DiagramQuery};
use crate::error::{Error, Result};

/// Largest degree for which [`closed_counts`] also enumerates diagrams.
pub const EXHAUSTIVE_LIMIT: u32 = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedCounts {
    pub d: u32,
    pub cayley: BigUint,
    pub alternating: BigUint,
    pub odd: BigUint,
    /// Increasing rooted trees with cyclically ordered branches.
    pub cyclic_increasing: BigUint,
    pub enumerated: Option<EnumeratedCounts>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumeratedCounts {
    pub diagrams: BigUint,
    pub multiplicity_free: BigUint,
    pub odd: BigUint,
}

fn exact_div(num: BigInt, den: BigInt) -> BigUint {
    let (q, r) = num.div_rem(&den);
    assert!(r.is_zero() && !q.is_negative(), "closed formula is not integral");
    q.magnitude().clone()
}

/// `a_d = Σ_k C(d,k) k^{d−1} / (d 2^{d−1})`.
pub fn alternating_closed(d: u32) -> BigUint {
    let num: BigUint = (1..=d).map(|k| binomial(d as u64, k as u64) * pow_u(k as u64, d - 1)).sum();
    exact_div(num.into(), BigInt::from(d) << (d - 1))
}

/// `b_d = Σ_k (−1)^k C(d,k) (d−2k)^{d−1} / d`.
pub fn odd_closed(d: u32) -> BigUint {
    let mut num = BigInt::zero();
    for k in 0..=d / 2 {
        let term = BigInt::from(binomial(d as u64, k as u64) * pow_u((d - 2 * k) as u64, d - 1));
        if k % 2 == 0 {
            num += term;
        } else {
            num -= term;
        }
    }
    exact_div(num, BigInt::from(d))
}

/// `c_1..=c_n` with exponential generating function `A′ = 1 − log(1 − A)`.
pub fn cyclic_increasing_trees(n: u32) -> Vec<BigUint> {
    let n = n as usize;
    // a[m] is the ordinary coefficient of x^m in A.
    let mut a = vec![BigRational::zero(); n + 1];
    for m in 0..n {
        // [x^m] −log(1−A) = Σ_k [x^m] A^k / k, needing only a[1..=m].
        let mut rhs = if m == 0 { BigRational::one() } else { BigRational::zero() };
        let mut pow = a.clone();
        for k in 1..=m {
            rhs += &pow[m] / rat_int(k as i64);
            let mut next = vec![BigRational::zero(); n + 1];
            for i in 1..=m {
                for j in 1..=m - i {
                    next[i + j] += &a[i] * &pow[j];
                }
            }
            pow = next;
        }
        a[m + 1] = rhs / rat_int(m as i64 + 1);
    }
    (1..=n).map(|m| to_natural(&(&a[m] * rat_int(BigInt::from(factorial(m as u64))))).expect("integral")).collect()
}

pub fn alternating_trees_brute(d: u32) -> usize {
    all_trees(d).iter().filter(|t| t.is_alternating()).count()
}

pub fn closed_counts(d: u32) -> Result<ClosedCounts> {
    if d == 0 {
        return Err(Error::Domain("degree must be positive".into()));
    }
    let enumerated = if d <= EXHAUSTIVE_LIMIT {
        let all = enumerate(&DiagramQuery::genus(d, 0))?;
        let unit = all.iter().filter(|g| g.edges().iter().all(|e| e.weight == 1)).count();
        let odd = all.iter().filter(|g| g.is_odd()).count();
        Some(EnumeratedCounts {
            diagrams: all.len().into(),
            multiplicity_free: unit.into(),
            odd: odd.into(),
        })
    } else {
        None
    };
    Ok(ClosedCounts {
        d,
        cayley: if d == 1 { BigUint::one() } else { pow_u(d as u64, d - 2) },
        alternating: alternating_closed(d),
        odd: odd_closed(d),
        cyclic_increasing: cyclic_increasing_trees(d).pop().expect("d >= 1"),
        enumerated,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnderlyingTreeReport {
    pub d: u32,
    /// Distinct unweighted trees underlying genus-0 diagrams.
    pub underlying_trees: usize,
    pub alternating: BigUint,
    pub equal: bool,
}

/// Compares the number of trees underlying genus-0 diagrams with `a_d`.
/// Only a report; no claim is made either way.
pub fn underlying_tree_report(d: u32) -> Result<UnderlyingTreeReport> {
    if d == 0 || d > EXHAUSTIVE_LIMIT {
        return Err(Error::Refused(format!("underlying-tree report needs 1 <= d <= {EXHAUSTIVE_LIMIT}")));
    }
    let mut seen = BTreeSet::new();
    for g in enumerate(&DiagramQuery::genus(d, 0))? {
        seen.insert(LabeledTree::new(d, g.edges().iter().map(|e| (e.src, e.tgt)))?);
    }
    let alternating = alternating_closed(d);
    Ok(UnderlyingTreeReport { d, underlying_trees: seen.len(), equal: BigUint::from(seen.len()) == alternating, alternating })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{count_filtered, Filter};

    fn u(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn closed_formulas() {
        let a: Vec<BigUint> = (1..=6).map(alternating_closed).collect();
        assert_eq!(a, u(&[1, 1, 2, 7, 36, 246]));
        for d in 1..=7 {
            assert_eq!(BigUint::from(alternating_trees_brute(d)), alternating_closed(d));
        }
        let b: Vec<BigUint> = (1..=6).map(odd_closed).collect();
        assert_eq!(b, u(&[1, 1, 2, 8, 46, 352]));
        assert_eq!(cyclic_increasing_trees(6), u(&[1, 1, 2, 7, 36, 245]));
    }

    #[test]
    fn record_matches_enumeration() {
        for d in 1..=6 {
            let c = closed_counts(d).unwrap();
            let e = c.enumerated.clone().unwrap();
            assert_eq!(e.diagrams, c.cayley);
            assert_eq!(e.odd, c.odd);
            assert_eq!(e.multiplicity_free, c.cyclic_increasing);
            assert_eq!(e.odd, count_filtered(d, 0, &[Filter::OddWeights]).unwrap());
        }
        assert_eq!(closed_counts(4).unwrap().alternating, BigUint::from(7u32));
        assert_eq!(closed_counts(5).unwrap().odd, BigUint::from(46u32));
        assert_eq!(closed_counts(2).unwrap().cayley, BigUint::one());
        assert!(closed_counts(9).unwrap().enumerated.is_none());
    }

    #[test]
    fn short_edge_subsets_match_trees() {
        for d in 2..=6u32 {
            let diagrams = enumerate(&DiagramQuery::genus(d, 0)).unwrap();
            let trees = all_trees(d);
            for mask in 0u32..1 << (d - 1) {
                let a: Vec<u32> = (1..d).filter(|i| mask >> (i - 1) & 1 == 1).collect();
                let nd = diagrams
                    .iter()
                    .filter(|g| a.iter().all(|&i| g.edges().iter().any(|e| (e.src, e.tgt, e.weight) == (i, i + 1, 1))))
                    .count();
                let nt = trees.iter().filter(|t| a.iter().all(|&i| t.contains(i, i + 1))).count();
                assert_eq!(nd, nt, "d={d} A={a:?}");
            }
            // chains a → a+1 → ⋯ → a+b: (b+1) d^{d−b−2}
            for a in 1..d {
                for b in 1..=d - a {
                    let n = count_filtered(d, 0, &[Filter::chain(a, b)]).unwrap();
                    let expect = if b + 2 > d { BigUint::one() } else { BigUint::from(b + 1) * pow_u(d as u64, d - b - 2) };
                    assert_eq!(n, expect, "d={d} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn heaviest_edge_count() {
        for d in 2..=7u32 {
            let n = enumerate(&DiagramQuery::genus(d, 0))
                .unwrap()
                .iter()
                .filter(|g| g.edges().iter().any(|e| e.weight == d - 1))
                .count();
            assert_eq!(BigUint::from(n), factorial(d as u64 - 2), "d={d}");
        }
    }

    #[test]
    fn underlying_trees() {
        for d in 1..=6 {
            let r = underlying_tree_report(d).unwrap();
            assert!(r.underlying_trees > 0);
            assert_eq!(r.alternating, alternating_closed(d));
        }
        assert!(underlying_tree_report(9).is_err());
    }
}

//! Maximal tangency numbers, the tree bijection and closed counting formulas.

mod counts;
mod tree;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{factorial, rat_int, to_natural};
use crate::error::{Error, Result};
use crate::markings::count_markings;
use crate::model::{Edge, FloorDiagram};

pub use counts::{
    alternating_closed, alternating_trees_brute, closed_counts, cyclic_increasing_trees, odd_closed,
    underlying_tree_report, ClosedCounts, UnderlyingTreeReport,
};
pub use tree::{all_trees, diagram_to_tree, tree_to_diagram, LabeledTree};

/// `z(1..=d_max)` from the composition recurrence.
pub fn max_tangency_sequence(d_max: u32) -> Vec<BigUint> {
    let mut z: Vec<BigUint> = vec![BigUint::zero(), BigUint::one()];
    // t[a] = a² z(a) / (2a)!
    let mut t: Vec<BigRational> = vec![BigRational::zero()];
    for d in 1..d_max as usize {
        t.push(rat_int(BigInt::from(&z[d] * (d * d))) / rat_int(BigInt::from(factorial(2 * d as u64))));
        // pow[m] = [x^m] T^k, updated for k = 1, 2, …
        let mut pow = t.clone();
        let mut sum = BigRational::zero();
        for k in 1..=d {
            sum += &pow[d] / rat_int(BigInt::from(factorial(k as u64)));
            let mut next = vec![BigRational::zero(); d + 1];
            for (m, slot) in next.iter_mut().enumerate() {
                for a in 1..m {
                    if !pow[m - a].is_zero() {
                        *slot += &t[a] * &pow[m - a];
                    }
                }
            }
            pow = next;
        }
        let val = sum * rat_int(BigInt::from(factorial(2 * d as u64)));
        z.push(to_natural(&val).expect("z(d) is an integer"));
    }
    z.truncate(d_max as usize + 1);
    z.remove(0);
    z
}

/// `z(d)`: irreducible rational curves through `2d−1` points with one
/// fixed point of maximal tangency to a line.
pub fn max_tangency_fixed(d: u32) -> Result<BigUint> {
    if d == 0 {
        return Err(Error::Domain("degree must be positive".into()));
    }
    Ok(max_tangency_sequence(d).pop().expect("nonempty"))
}

/// Same count with the tangency point free: `d · z(d)`.
pub fn max_tangency_free(d: u32) -> Result<BigUint> {
    Ok(max_tangency_fixed(d)? * d)
}

pub const INCREASING_TREE_LIMIT: u32 = 7;

/// `Σ μ ν` over increasing trees rooted at `d`, each edge `v → parent(v)`
/// weighted by the size of the subtree under `v`.
pub fn increasing_tree_oracle(d: u32) -> Result<BigUint> {
    if d == 0 || d > INCREASING_TREE_LIMIT {
        return Err(Error::Refused(format!("increasing-tree enumeration needs 1 <= d <= {INCREASING_TREE_LIMIT}")));
    }
    let mut parent = vec![0u32; d as usize + 1];
    let mut total = BigUint::zero();
    increasing_rec(d, 1, &mut parent, &mut total)?;
    Ok(total)
}

fn increasing_rec(d: u32, v: u32, parent: &mut [u32], total: &mut BigUint) -> Result<()> {
    if v == d {
        let mut size = vec![1u32; d as usize + 1];
        for u in 1..d {
            size[parent[u as usize] as usize] += size[u as usize];
        }
        let edges = (1..d).map(|u| Edge::new(u, parent[u as usize], size[u as usize])).collect();
        let dg = FloorDiagram::new(d, edges)?;
        *total += dg.multiplicity() * count_markings(&dg)?;
        return Ok(());
    }
    for p in v + 1..=d {
        parent[v as usize] = p;
        increasing_rec(d, v + 1, parent, total)?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OdeCheck {
    /// `y_0..=y_n` with `y_d = d² z(d) / (2d)!`.
    pub y: Vec<BigRational>,
    /// Coefficients of `x^0..x^{n-1}` of `x(4y′ − e^y − x e^y y′) − 2y`.
    pub residual: Vec<BigRational>,
}

impl OdeCheck {
    pub fn is_zero(&self) -> bool {
        self.residual.iter().all(Zero::is_zero)
    }
}

pub fn ode_residual(n: usize) -> Result<OdeCheck> {
    if n == 0 {
        return Err(Error::Domain("order must be positive".into()));
    }
    let z = max_tangency_sequence(n as u32);
    let mut y = vec![BigRational::zero()];
    for (i, zd) in z.iter().enumerate() {
        let d = i + 1;
        y.push(rat_int(BigInt::from(zd * (d * d))) / rat_int(BigInt::from(factorial(2 * d as u64))));
    }
    // n E_n = Σ k y_k E_{n−k}
    let mut e = vec![BigRational::one()];
    for m in 1..=n {
        let mut s = BigRational::zero();
        for k in 1..=m {
            s += rat_int(k as i64) * &y[k] * &e[m - k];
        }
        e.push(s / rat_int(m as i64));
    }
    let dy: Vec<BigRational> = (0..n).map(|m| rat_int(m as i64 + 1) * &y[m + 1]).collect();
    let ey = |m: usize| -> BigRational { (0..=m).map(|i| &e[i] * &dy[m - i]).sum() };
    let residual = (0..n)
        .map(|m| {
            let mut r = rat_int(4 * m as i64) * &y[m] - rat_int(2) * &y[m];
            if m >= 1 {
                r -= &e[m - 1];
            }
            if m >= 2 {
                r -= ey(m - 2);
            }
            r
        })
        .collect();
    Ok(OdeCheck { y, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::invariants::relative_gw;
    use crate::model::Partition;
    use crate::Engine;

    #[test]
    fn z_values() {
        let z = max_tangency_sequence(16);
        assert_eq!(z[2], BigUint::from(7u32));
        assert_eq!(z[3], BigUint::from(138u32));
        assert_eq!(z[15].to_string(), "4426738320076692932937846865920");
        assert_eq!(max_tangency_free(3).unwrap(), BigUint::from(21u32));
        assert_eq!(max_tangency_free(10).unwrap().to_string(), "2677576265015040");
        assert_eq!(max_tangency_free(1).unwrap(), BigUint::one());
        assert!(max_tangency_fixed(0).is_err());
    }

    #[test]
    fn increasing_trees_agree() {
        assert_eq!(increasing_tree_oracle(2).unwrap(), BigUint::one());
        assert_eq!(increasing_tree_oracle(3).unwrap(), BigUint::from(7u32));
        assert_eq!(increasing_tree_oracle(4).unwrap(), BigUint::from(138u32));
        let z = max_tangency_sequence(7);
        for d in 1..=7 {
            assert_eq!(increasing_tree_oracle(d).unwrap(), z[d as usize - 1]);
        }
        assert!(increasing_tree_oracle(8).is_err());
    }

    #[test]
    fn agrees_with_relative_invariant() {
        let engine = Engine::new();
        let z = max_tangency_sequence(5);
        for d in 1..=5u32 {
            let r = relative_gw(&engine, d, 0, &Partition::single(d), &Partition::empty()).unwrap();
            assert_eq!(r, z[d as usize - 1], "d={d}");
        }
    }

    #[test]
    fn ode() {
        let c = ode_residual(8).unwrap();
        assert_eq!(c.y[0], BigRational::zero());
        assert_eq!(&c.y[1..5], &[rat(1, 2), rat(1, 6), rat(7, 80), rat(23, 420)]);
        assert_eq!(c.residual.len(), 8);
        assert!(c.is_zero());
        assert!(ode_residual(20).unwrap().is_zero());
    }
}

//! Enumerative invariants assembled from diagrams and markings, plus the
//! closed forms and recursions used to cross-check them.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::{binomial, factorial, rat_int, to_natural};
use crate::engine::Engine;
use crate::enumeration::{DiagramQuery, Filter};
use crate::error::{domain, Error, Result};
use crate::markings::{
    count_markings, count_point_tangency_markings, count_relative_markings, count_sink_tail_markings,
};
use crate::model::{max_genus, FloorDiagram, Partition};

/// What to compute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvariantRequest {
    Gw { d: u32, g: u32 },
    Severi { d: u32, delta: u32 },
    Relative { d: u32, g: u32, lambda: Partition, rho: Partition },
    Welschinger { d: u32 },
}

impl InvariantRequest {
    pub fn evaluate(&self, engine: &Engine) -> Result<BigUint> {
        match self {
            InvariantRequest::Gw { d, g } => gw(engine, *d, *g),
            InvariantRequest::Severi { d, delta } => severi(engine, *d, *delta),
            InvariantRequest::Relative { d, g, lambda, rho } => relative_gw(engine, *d, *g, lambda, rho),
            InvariantRequest::Welschinger { d } => welschinger(engine, *d),
        }
    }
}

fn need_degree(d: u32) -> Result<()> {
    if d == 0 {
        return domain("degree must be at least 1");
    }
    Ok(())
}

fn check_tangency(d: u32, lambda: &Partition, rho: &Partition) -> Result<()> {
    if lambda.size() + rho.size() != d {
        return domain(format!("|λ|+|ρ| = {} must equal d = {d}", lambda.size() + rho.size()));
    }
    Ok(())
}

fn weighted_sum<F>(diagrams: &[FloorDiagram], f: F) -> Result<BigUint>
where
    F: Fn(&FloorDiagram) -> Result<BigUint> + Sync,
{
    diagrams
        .par_iter()
        .map(&f)
        .try_reduce(BigUint::zero, |a, b| Ok(a + b))
}

/// `N_{d,g} = Σ μ(D) ν(D)` over connected diagrams.
pub fn gw(engine: &Engine, d: u32, g: u32) -> Result<BigUint> {
    need_degree(d)?;
    let ds = engine.diagrams(&DiagramQuery::genus(d, g))?;
    weighted_sum(&ds, |dg| Ok(dg.multiplicity() * count_markings(dg)?))
}

/// `N^{d,δ}`: the same sum over possibly disconnected diagrams of cogenus δ.
pub fn severi(engine: &Engine, d: u32, delta: u32) -> Result<BigUint> {
    need_degree(d)?;
    let ds = engine.diagrams(&DiagramQuery::cogenus(d, delta))?;
    weighted_sum(&ds, |dg| Ok(dg.multiplicity() * count_markings(dg)?))
}

/// `N_{d,g}(λ,ρ) = Σ μ(D) ∏ρ_i ν_{λ,ρ}(D)`.
pub fn relative_gw(engine: &Engine, d: u32, g: u32, lambda: &Partition, rho: &Partition) -> Result<BigUint> {
    need_degree(d)?;
    check_tangency(d, lambda, rho)?;
    let rho_prod: BigUint = rho.parts().iter().map(|&p| BigUint::from(p)).product();
    let ds = engine.diagrams(&DiagramQuery::genus(d, g))?;
    weighted_sum(&ds, |dg| Ok(dg.multiplicity() * &rho_prod * count_relative_markings(dg, lambda, rho)?))
}

/// `W_d`: ν summed over genus-0 diagrams with all weights odd.
pub fn welschinger(engine: &Engine, d: u32) -> Result<BigUint> {
    need_degree(d)?;
    let ds = engine.diagrams(&DiagramQuery::genus(d, 0).with_filter(Filter::OddWeights))?;
    weighted_sum(&ds, count_markings)
}

/// `N_{d,0}` from Kontsevich's recursion.
pub fn kontsevich_oracle(d: u32) -> Result<BigUint> {
    need_degree(d)?;
    let mut n: Vec<BigInt> = vec![BigInt::zero(), BigInt::one()];
    for dd in 2..=d as u64 {
        let mut acc = BigInt::zero();
        for k in 1..dd {
            let l = dd - k;
            let top = 3 * dd - 4;
            let term = BigInt::from(l) * BigInt::from(binomial(top, 3 * k - 2))
                - BigInt::from(k) * BigInt::from(binomial(top, 3 * k - 1));
            acc += &n[k as usize] * &n[l as usize] * BigInt::from(k * k * l) * term;
        }
        n.push(acc);
    }
    n[d as usize].to_biguint().ok_or_else(|| Error::Internal("negative recursion value".into()))
}

/// Connected count for each component type `(d_j, δ_j)`, by splitting.
/// Sums over unordered splittings of the point set.
pub fn severi_split_oracle(engine: &Engine, d: u32, delta: u32) -> Result<BigUint> {
    need_degree(d)?;
    let total = d as i64 * (d as i64 + 3) / 2 - delta as i64;
    if total < 0 {
        return Ok(BigUint::zero());
    }
    let mut types = Vec::new();
    for dj in 1..=d {
        for dl in 0..=max_genus(dj) {
            types.push((dj, dl));
        }
    }
    let mut acc = BigUint::zero();
    let mut pick = Vec::new();
    split_rec(engine, &types, 0, d, &mut pick, delta, total as u64, &mut acc)?;
    Ok(acc)
}

#[allow(clippy::too_many_arguments)]
fn split_rec(
    engine: &Engine,
    types: &[(u32, u32)],
    from: usize,
    left: u32,
    pick: &mut Vec<(u32, u32)>,
    delta: u32,
    n: u64,
    acc: &mut BigUint,
) -> Result<()> {
    if left == 0 {
        let mut cog: u64 = pick.iter().map(|t| t.1 as u64).sum();
        for i in 0..pick.len() {
            for j in i + 1..pick.len() {
                cog += pick[i].0 as u64 * pick[j].0 as u64;
            }
        }
        if cog != delta as u64 {
            return Ok(());
        }
        let mut num = factorial(n);
        let mut den = BigUint::one();
        let mut prod = BigUint::one();
        let mut i = 0;
        while i < pick.len() {
            let mut j = i;
            while j < pick.len() && pick[j] == pick[i] {
                j += 1;
            }
            let (dj, dl) = pick[i];
            let m = (dj * (dj + 3) / 2 - dl) as u64;
            let n_conn = gw(engine, dj, max_genus(dj) - dl)?;
            for _ in i..j {
                den *= factorial(m);
                prod *= &n_conn;
            }
            den *= factorial((j - i) as u64);
            i = j;
        }
        num *= prod;
        let (q, r) = num.div_rem(&den);
        if !r.is_zero() {
            return Err(Error::Internal("splitting count is not integral".into()));
        }
        *acc += q;
        return Ok(());
    }
    for t in from..types.len() {
        if types[t].0 <= left {
            pick.push(types[t]);
            split_rec(engine, types, t, left - types[t].0, pick, delta, n, acc)?;
            pick.pop();
        }
    }
    Ok(())
}

/// `ρ_1 ρ_2 ⋯ ℓ(ρ)! / (β_1! β_2! ⋯)`, the top-genus relative invariant.
pub fn closed_form_gmax(d: u32, lambda: &Partition, rho: &Partition) -> Result<BigUint> {
    check_tangency(d, lambda, rho)?;
    let mut num: BigUint = rho.parts().iter().map(|&p| BigUint::from(p)).product();
    num *= factorial(rho.len() as u64);
    let den: BigUint = rho.multiplicities().iter().map(|&(_, b)| factorial(b as u64)).product();
    Ok(num / den)
}

/// Relative invariant one genus below the top, in closed form.
pub fn closed_form_uninodal(d: u32, lambda: &Partition, rho: &Partition) -> Result<BigUint> {
    check_tangency(d, lambda, rho)?;
    if d < 3 {
        return domain("closed form needs d >= 3");
    }
    let d_ = d as i64;
    let alpha1 = lambda.multiplicity(1) as i64;
    let mut factor = rat_int((d_ - 2) * (3 * d_ - 2) + alpha1);
    if !rho.is_empty() {
        let beta1 = rho.multiplicity(1) as i64;
        factor += rat_int(beta1) + BigRational::new(((d_ - 1) * beta1).into(), (rho.len() as i64).into());
    }
    let value = factor * BigRational::from_integer(closed_form_gmax(d, lambda, rho)?.into());
    to_natural(&value).ok_or_else(|| Error::Internal(format!("uninodal closed form is not a natural number: {value}")))
}

/// `N_{d,g} − (d−1) N_{d−1,g}`.
pub fn collinear_triple(engine: &Engine, d: u32, g: u32) -> Result<BigInt> {
    if d < 3 {
        return domain("collinear points need d >= 3");
    }
    let a = BigInt::from(gw(engine, d, g)?);
    let b = BigInt::from(gw(engine, d - 1, g)?) * BigInt::from(d - 1);
    Ok(a - b)
}

/// `N_{d,g}((k), ⟨1^{d−k}⟩)` computed from ordinary markings whose last `k`
/// elements are sinks at one floor, checked against the relative rule.
pub fn tangency_at_point(engine: &Engine, d: u32, g: u32, k: u32) -> Result<BigUint> {
    if k == 0 || k > d {
        return domain("need 1 <= k <= d");
    }
    let ds = engine.diagrams(&DiagramQuery::genus(d, g))?;
    let filtered = weighted_sum(&ds, |dg| Ok(dg.multiplicity() * count_point_tangency_markings(dg, k)?))?;
    let relative = relative_gw(engine, d, g, &Partition::single(k), &Partition::ones(d - k))?;
    if filtered != relative {
        return Err(Error::Internal(format!("tangency routes disagree: {filtered} vs {relative}")));
    }
    Ok(filtered)
}

/// μ-weighted count of ordinary markings whose last `k` elements are sinks.
pub fn sink_tail_sum(engine: &Engine, d: u32, g: u32, k: u32) -> Result<BigUint> {
    need_degree(d)?;
    let ds = engine.diagrams(&DiagramQuery::genus(d, g))?;
    weighted_sum(&ds, |dg| Ok(dg.multiplicity() * count_sink_tail_markings(dg, k)?))
}

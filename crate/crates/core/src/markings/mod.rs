//! Markings of floor diagrams: the extended graph, its constrained linear
//! orders, and the counts ν(D) and ν_{λ,ρ}(D).

mod downset;
mod gap;
mod oracle;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::factorial;
use crate::error::{domain, Error, Result};
use crate::model::{Edge, FloorDiagram, Partition};

pub use downset::downset_orderings;
pub use gap::gap_orderings;
pub use oracle::{automorphism_count, brute_force_markings, BRUTE_FORCE_LIMIT};

/// A vertex of the extended graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    Floor(u32),
    /// Midpoint of an original edge.
    Midpoint(Edge),
    /// Endpoint of a new edge of the given weight leaving `floor`.
    Sink { floor: u32, weight: u32 },
    /// The `index`-th tangency point (1-based), receiving weight `weight`
    /// from `floor`.
    Lambda { index: u32, weight: u32, floor: u32 },
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Floor(v) => write!(f, "F{v}"),
            Element::Midpoint(e) => write!(f, "M{}-{}w{}", e.src, e.tgt, e.weight),
            Element::Sink { floor, weight } => write!(f, "S{floor}w{weight}"),
            Element::Lambda { index, weight, floor } => write!(f, "L{index}w{weight}@{floor}"),
        }
    }
}

impl FromStr for Element {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad marking token {s:?}"));
        let num = |x: &str| x.parse::<u32>().map_err(|_| bad());
        let split_w = |x: &str| -> Result<(u32, u32)> {
            let (a, w) = x.split_once('w').ok_or_else(bad)?;
            Ok((num(a)?, num(w)?))
        };
        let (head, rest) = s.split_at(s.char_indices().nth(1).map(|(i, _)| i).ok_or_else(bad)?);
        match head {
            "F" => Ok(Element::Floor(num(rest)?)),
            "S" => {
                let (floor, weight) = split_w(rest)?;
                Ok(Element::Sink { floor, weight })
            }
            "L" => {
                let (iw, floor) = rest.split_once('@').ok_or_else(bad)?;
                let (index, weight) = split_w(iw)?;
                Ok(Element::Lambda { index, weight, floor: num(floor)? })
            }
            "M" => {
                let (st, w) = rest.split_once('w').ok_or_else(bad)?;
                let (a, b) = st.split_once('-').ok_or_else(bad)?;
                Ok(Element::Midpoint(Edge::new(num(a)?, num(b)?, num(w)?)))
            }
            _ => Err(bad()),
        }
    }
}

/// A marking modulo automorphisms: the extended graph's elements listed in
/// marking order. Identical tokens are interchangeable, so the token
/// sequence determines the marking.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Marking(pub Vec<Element>);

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        f.write_str(&s.join(" "))
    }
}

impl FromStr for Marking {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>>>()
            .map(Marking)
    }
}

/// Where the new edges go. `lambda_sources[i]` feeds tangency point `i+1`
/// with weight `lambda_weights[i]`; `rho_sinks[v-1]` holds the sink weights
/// at floor `v`, largest first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Distribution {
    pub lambda_sources: Vec<u32>,
    pub rho_sinks: Vec<Vec<u32>>,
    pub lambda_weights: Vec<u32>,
}

impl Distribution {
    /// The unique distribution for `λ = ∅`, `ρ = ⟨1^d⟩`.
    pub fn ordinary(dg: &FloorDiagram) -> Self {
        let rho_sinks = dg.divergences().iter().map(|&div| vec![1; (1 - div) as usize]).collect();
        Distribution { lambda_sources: Vec::new(), rho_sinks, lambda_weights: Vec::new() }
    }
}

fn check_sizes(dg: &FloorDiagram, lambda: &Partition, rho: &Partition) -> Result<()> {
    if lambda.size() + rho.size() != dg.d() {
        return domain(format!("|λ|+|ρ| = {} must equal d = {}", lambda.size() + rho.size(), dg.d()));
    }
    Ok(())
}

/// Every distribution, once each, in canonical order.
pub fn enumerate_distributions(dg: &FloorDiagram, lambda: &Partition, rho: &Partition) -> Result<Vec<Distribution>> {
    check_sizes(dg, lambda, rho)?;
    let budget: Vec<u32> = dg.divergences().iter().map(|&div| (1 - div) as u32).collect();
    let lam = lambda.parts().to_vec();
    let values: Vec<(u32, usize)> = rho.multiplicities().into_iter().rev().collect();
    let mut out = Vec::new();
    let mut sources = Vec::with_capacity(lam.len());
    let mut remaining = budget.clone();
    assign_lambda(&lam, &mut sources, &mut remaining, &values, &mut out);
    out.sort();
    Ok(out)
}

fn assign_lambda(
    lam: &[u32],
    sources: &mut Vec<u32>,
    remaining: &mut [u32],
    values: &[(u32, usize)],
    out: &mut Vec<Distribution>,
) {
    let i = sources.len();
    if i == lam.len() {
        let mut avail: Vec<usize> = values.iter().map(|v| v.1).collect();
        let mut sinks = vec![Vec::new(); remaining.len()];
        split_rho(0, remaining, values, &mut avail, &mut sinks, &mut |s| {
            out.push(Distribution { lambda_sources: sources.clone(), rho_sinks: s.to_vec(), lambda_weights: lam.to_vec() })
        });
        return;
    }
    for v in 0..remaining.len() {
        if remaining[v] >= lam[i] {
            remaining[v] -= lam[i];
            sources.push(v as u32 + 1);
            assign_lambda(lam, sources, remaining, values, out);
            sources.pop();
            remaining[v] += lam[i];
        }
    }
}

/// Splits the multiset `values` (largest first, with `avail` copies left)
/// among floors so that floor `v` receives total weight `need[v]`.
fn split_rho(
    v: usize,
    need: &[u32],
    values: &[(u32, usize)],
    avail: &mut [usize],
    sinks: &mut [Vec<u32>],
    emit: &mut dyn FnMut(&[Vec<u32>]),
) {
    if v == need.len() {
        if avail.iter().all(|&a| a == 0) {
            emit(sinks);
        }
        return;
    }
    fill_floor(v, 0, need[v], need, values, avail, sinks, emit);
}

#[allow(clippy::too_many_arguments)]
fn fill_floor(
    v: usize,
    k: usize,
    left: u32,
    need: &[u32],
    values: &[(u32, usize)],
    avail: &mut [usize],
    sinks: &mut [Vec<u32>],
    emit: &mut dyn FnMut(&[Vec<u32>]),
) {
    if left == 0 {
        split_rho(v + 1, need, values, avail, sinks, emit);
        return;
    }
    if k == values.len() {
        return;
    }
    let (w, _) = values[k];
    let max_take = avail[k].min((left / w) as usize);
    for take in (0..=max_take).rev() {
        avail[k] -= take;
        sinks[v].extend(std::iter::repeat_n(w, take));
        fill_floor(v, k + 1, left - w * take as u32, need, values, avail, sinks, emit);
        let n = sinks[v].len();
        sinks[v].truncate(n - take);
        avail[k] += take;
    }
}

/// The extended graph of a diagram with a distribution, viewed as a poset.
#[derive(Clone, Debug)]
pub struct MarkingPoset {
    d: u32,
    elements: Vec<Element>,
    sigma: BigUint,
}

/// Builds the poset. Elements are floors `1..=d`, then midpoints in edge
/// order, then sinks floor by floor, then tangency points.
pub fn build_poset(dg: &FloorDiagram, dist: &Distribution) -> MarkingPoset {
    let d = dg.d();
    let mut elements: Vec<Element> = (1..=d).map(Element::Floor).collect();
    elements.extend(dg.edges().iter().map(|&e| Element::Midpoint(e)));
    for (i, ws) in dist.rho_sinks.iter().enumerate() {
        elements.extend(ws.iter().map(|&weight| Element::Sink { floor: i as u32 + 1, weight }));
    }
    for (i, &weight) in dist.lambda_weights.iter().enumerate() {
        elements.push(Element::Lambda { index: i as u32 + 1, weight, floor: dist.lambda_sources[i] });
    }
    let mut sigma = BigUint::one();
    for run in runs(&elements) {
        if !matches!(run.0, Element::Floor(_) | Element::Lambda { .. }) {
            sigma *= factorial(run.1 as u64);
        }
    }
    MarkingPoset { d, elements, sigma }
}

/// Maximal runs of equal adjacent elements.
fn runs(elements: &[Element]) -> Vec<(Element, usize)> {
    let mut out: Vec<(Element, usize)> = Vec::new();
    for &e in elements {
        match out.last_mut() {
            Some((p, c)) if *p == e => *c += 1,
            _ => out.push((e, 1)),
        }
    }
    out
}

impl MarkingPoset {
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `∏ (same-weight sinks at one floor)! · ∏ (parallel edge class)!`
    pub fn sigma(&self) -> &BigUint {
        &self.sigma
    }

    fn index_of_floor(&self, v: u32) -> usize {
        v as usize - 1
    }

    /// Lambda elements, lowest first.
    fn lambda_indices(&self) -> Vec<usize> {
        let mut ls: Vec<(u32, usize)> = self
            .elements
            .iter()
            .enumerate()
            .filter_map(|(i, e)| match e {
                Element::Lambda { index, .. } => Some((*index, i)),
                _ => None,
            })
            .collect();
        ls.sort_by_key(|x| std::cmp::Reverse(x.0));
        ls.into_iter().map(|x| x.1).collect()
    }

    /// Direct predecessors of every element; together they generate the order.
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut preds = vec![Vec::new(); self.len()];
        let lambdas = self.lambda_indices();
        for (i, e) in self.elements.iter().enumerate() {
            match *e {
                Element::Floor(v) if v > 1 => preds[i].push(self.index_of_floor(v - 1)),
                Element::Floor(_) => {}
                Element::Midpoint(edge) => {
                    preds[i].push(self.index_of_floor(edge.src));
                    preds[self.index_of_floor(edge.tgt)].push(i);
                }
                Element::Sink { floor, .. } => preds[i].push(self.index_of_floor(floor)),
                Element::Lambda { .. } => {}
            }
        }
        if let Some(&lowest) = lambdas.first() {
            for (i, e) in self.elements.iter().enumerate() {
                if !matches!(e, Element::Lambda { .. }) {
                    preds[lowest].push(i);
                }
            }
            for w in lambdas.windows(2) {
                preds[w[1]].push(w[0]);
            }
        }
        preds
    }

    /// Weighted edges `(from, to, weight)` of the extended graph.
    pub fn graph_edges(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for (i, e) in self.elements.iter().enumerate() {
            match *e {
                Element::Floor(_) => {}
                Element::Midpoint(edge) => {
                    out.push((self.index_of_floor(edge.src), i, edge.weight));
                    out.push((i, self.index_of_floor(edge.tgt), edge.weight));
                }
                Element::Sink { floor, weight } => out.push((self.index_of_floor(floor), i, weight)),
                Element::Lambda { weight, floor, .. } => out.push((self.index_of_floor(floor), i, weight)),
            }
        }
        out
    }

    /// Gap intervals of the non-floor, non-tangency elements.
    pub fn gap_items(&self) -> Vec<(usize, usize)> {
        let d = self.d as usize;
        self.elements
            .iter()
            .filter_map(|e| match *e {
                Element::Midpoint(edge) => Some((edge.src as usize, edge.tgt as usize - 1)),
                Element::Sink { floor, .. } => Some((floor as usize, d)),
                _ => None,
            })
            .collect()
    }
}

/// Linear extensions with all elements distinguishable. Tangency points sit
/// in reserved top positions and contribute a factor of 1.
pub fn count_orderings(p: &MarkingPoset) -> BigUint {
    gap_orderings(p.d as usize, &p.gap_items())
}

/// Same count through the generic downset DP.
pub fn count_orderings_downset(p: &MarkingPoset) -> Result<BigUint> {
    downset_orderings(&p.predecessors())
}

fn exact_div(n: BigUint, sigma: &BigUint) -> Result<BigUint> {
    let (q, r) = n.div_rem(sigma);
    if !r.is_zero() {
        return Err(Error::Internal(format!("symmetry factor {sigma} does not divide ordering count {n}")));
    }
    Ok(q)
}

/// ν(D).
pub fn count_markings(dg: &FloorDiagram) -> Result<BigUint> {
    let p = build_poset(dg, &Distribution::ordinary(dg));
    exact_div(count_orderings(&p), p.sigma())
}

/// ν_{λ,ρ}(D).
pub fn count_relative_markings(dg: &FloorDiagram, lambda: &Partition, rho: &Partition) -> Result<BigUint> {
    let mut total = BigUint::zero();
    for dist in enumerate_distributions(dg, lambda, rho)? {
        let p = build_poset(dg, &dist);
        total += exact_div(count_orderings(&p), p.sigma())?;
    }
    Ok(total)
}

/// Raw ordering counts for the ordinary poset with `remove[v-1]` sinks of
/// floor `v` taken out.
fn ordinary_orderings_without(dg: &FloorDiagram, remove: &[u32]) -> BigUint {
    let d = dg.d() as usize;
    let mut items: Vec<(usize, usize)> = dg.edges().iter().map(|e| (e.src as usize, e.tgt as usize - 1)).collect();
    for (i, &div) in dg.divergences().iter().enumerate() {
        let keep = (1 - div) as u32 - remove[i];
        items.extend(std::iter::repeat_n((i + 1, d), keep as usize));
    }
    gap_orderings(d, &items)
}

fn falling(n: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i))
}

/// Ordinary markings whose last `k` elements are sinks of one and the same
/// floor.
pub fn count_point_tangency_markings(dg: &FloorDiagram, k: u32) -> Result<BigUint> {
    let sinks: Vec<u32> = dg.divergences().iter().map(|&div| (1 - div) as u32).collect();
    let mut raw = BigUint::zero();
    for (v, &s) in sinks.iter().enumerate() {
        if s >= k {
            let mut remove = vec![0; sinks.len()];
            remove[v] = k;
            raw += falling(s as u64, k as u64) * ordinary_orderings_without(dg, &remove);
        }
    }
    let p = build_poset(dg, &Distribution::ordinary(dg));
    exact_div(raw, p.sigma())
}

/// Ordinary markings whose last `k` elements are sinks (of any floors).
pub fn count_sink_tail_markings(dg: &FloorDiagram, k: u32) -> Result<BigUint> {
    let sinks: Vec<u32> = dg.divergences().iter().map(|&div| (1 - div) as u32).collect();
    let mut raw = BigUint::zero();
    let mut remove = vec![0u32; sinks.len()];
    tail_rec(dg, &sinks, 0, k, &mut remove, &mut raw);
    let p = build_poset(dg, &Distribution::ordinary(dg));
    exact_div(raw, p.sigma())
}

fn tail_rec(dg: &FloorDiagram, sinks: &[u32], v: usize, left: u32, remove: &mut Vec<u32>, acc: &mut BigUint) {
    if v == sinks.len() {
        if left == 0 {
            let total: u32 = remove.iter().sum();
            let mut ways = factorial(total as u64);
            for (i, &c) in remove.iter().enumerate() {
                ways = ways / factorial(c as u64) * falling(sinks[i] as u64, c as u64);
            }
            *acc += ways * ordinary_orderings_without(dg, remove);
        }
        return;
    }
    for c in 0..=sinks[v].min(left) {
        remove[v] = c;
        tail_rec(dg, sinks, v + 1, left - c, remove, acc);
    }
    remove[v] = 0;
}

/// Upper bound on raw orderings for which [`list_markings`] will run.
pub const LIST_LIMIT: u64 = 2_000_000;

/// Every (λ,ρ)-marking as a token sequence, sorted.
pub fn list_markings(dg: &FloorDiagram, lambda: &Partition, rho: &Partition) -> Result<Vec<Marking>> {
    let mut out = BTreeSet::new();
    for dist in enumerate_distributions(dg, lambda, rho)? {
        let p = build_poset(dg, &dist);
        if count_orderings(&p) > BigUint::from(LIST_LIMIT) {
            return Err(Error::Refused(format!("more than {LIST_LIMIT} orderings; listing is for small diagrams")));
        }
        let preds = p.predecessors();
        let mut placed = vec![false; p.len()];
        let mut seq = Vec::with_capacity(p.len());
        list_rec(&p, &preds, &mut placed, &mut seq, &mut out);
    }
    Ok(out.into_iter().collect())
}

fn list_rec(
    p: &MarkingPoset,
    preds: &[Vec<usize>],
    placed: &mut [bool],
    seq: &mut Vec<Element>,
    out: &mut BTreeSet<Marking>,
) {
    if seq.len() == p.len() {
        out.insert(Marking(seq.clone()));
        return;
    }
    // One representative per distinct token: equal tokens are interchangeable.
    let mut tried: Vec<Element> = Vec::new();
    for i in 0..p.len() {
        let e = p.elements[i];
        if placed[i] || tried.contains(&e) || !preds[i].iter().all(|&j| placed[j]) {
            continue;
        }
        tried.push(e);
        placed[i] = true;
        seq.push(e);
        list_rec(p, preds, placed, seq, out);
        seq.pop();
        placed[i] = false;
    }
}

/// Checks that `m` is an ordinary marking of `dg`.
pub fn validate_marking(dg: &FloorDiagram, m: &Marking) -> Result<()> {
    let p = build_poset(dg, &Distribution::ordinary(dg));
    let mut want: Vec<Element> = p.elements().to_vec();
    let mut got = m.0.clone();
    want.sort();
    got.sort();
    if want != got {
        return domain("marking tokens do not match the diagram's extended graph");
    }
    let preds = p.predecessors();
    let mut pos = vec![usize::MAX; p.len()];
    let mut used = vec![false; p.len()];
    for (k, tok) in m.0.iter().enumerate() {
        // Equal tokens are interchangeable; bind each to the first free copy.
        let i = (0..p.len()).find(|&i| !used[i] && p.elements[i] == *tok).expect("multiset checked");
        used[i] = true;
        pos[i] = k;
    }
    for (i, ps) in preds.iter().enumerate() {
        for &j in ps {
            if pos[j] > pos[i] {
                return domain(format!("{} must come after {}", p.elements[i], p.elements[j]));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dg(s: &str) -> FloorDiagram {
        s.parse().unwrap()
    }

    fn part(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn n(x: u64) -> BigUint {
        BigUint::from(x)
    }

    const EXAMPLE: &str = "d=4; edges=(1,2,1);(2,3,1);(2,3,1);(3,4,2)";
    const CHAIN: &str = "d=3; edges=(1,2,1);(2,3,1)";
    const W12: &str = "d=3; edges=(1,2,1);(2,3,2)";
    const FORK: &str = "d=3; edges=(1,3,1);(2,3,1)";

    #[test]
    fn distributions_examples() {
        let ds = enumerate_distributions(&dg(CHAIN), &part("1^3"), &part("")).unwrap();
        assert_eq!(ds.len(), 3);
        assert!(ds.iter().all(|d| d.lambda_sources.iter().filter(|&&v| v == 2).count() == 1));
        assert_eq!(enumerate_distributions(&dg(W12), &part(""), &part("3")).unwrap().len(), 1);
        assert!(enumerate_distributions(&dg(CHAIN), &part(""), &part("3")).unwrap().is_empty());
        assert!(enumerate_distributions(&dg(CHAIN), &part("1"), &part("1")).is_err());
    }

    #[test]
    fn distributions_are_canonical_and_distinct() {
        let ds = enumerate_distributions(&dg(EXAMPLE), &part("1,1"), &part("1,1")).unwrap();
        let mut sorted = ds.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, ds);
    }

    #[test]
    fn poset_sizes_and_sigma() {
        let p = build_poset(&dg(EXAMPLE), &Distribution::ordinary(&dg(EXAMPLE)));
        assert_eq!(p.len(), 12);
        assert_eq!(p.sigma(), &n(12));
        let p = build_poset(&dg(CHAIN), &Distribution::ordinary(&dg(CHAIN)));
        assert_eq!(p.len(), 8);
        assert_eq!(p.sigma(), &n(2));
        let pt = FloorDiagram::point();
        let p = build_poset(&pt, &Distribution::ordinary(&pt));
        assert_eq!(p.len(), 2);
        assert_eq!(p.sigma(), &n(1));
    }

    #[test]
    fn ordering_counts() {
        let p = build_poset(&dg(EXAMPLE), &Distribution::ordinary(&dg(EXAMPLE)));
        assert_eq!(count_orderings(&p), n(72));
        let p = build_poset(&dg(CHAIN), &Distribution::ordinary(&dg(CHAIN)));
        assert_eq!(count_orderings(&p), n(10));
        // A poset that is a total chain: d=2 with one edge and one sink per
        // floor is not a chain, but d=1 is.
        let pt = FloorDiagram::point();
        assert_eq!(count_orderings(&build_poset(&pt, &Distribution::ordinary(&pt))), n(1));
    }

    #[test]
    fn marking_counts() {
        assert_eq!(count_markings(&dg(EXAMPLE)).unwrap(), n(6));
        assert_eq!(count_markings(&dg(FORK)).unwrap(), n(3));
        assert_eq!(count_markings(&dg("d=4; edges=(1,2,1);(2,3,1);(3,4,1)")).unwrap(), n(40));
    }

    #[test]
    fn relative_marking_counts() {
        assert_eq!(count_relative_markings(&dg(CHAIN), &part(""), &part("2,1")).unwrap(), n(4));
        assert_eq!(count_relative_markings(&dg(W12), &part("3"), &part("")).unwrap(), n(1));
        assert_eq!(count_relative_markings(&dg(FORK), &part("1"), &part("2")).unwrap(), n(3));
        assert!(count_relative_markings(&dg(FORK), &part("1"), &part("1")).is_err());
    }

    #[test]
    fn tokens_round_trip() {
        for s in ["F3", "M1-2w1", "S4w2", "L1w3@2"] {
            assert_eq!(s.parse::<Element>().unwrap().to_string(), s);
        }
        assert!("X1".parse::<Element>().is_err());
        assert!("M12w1".parse::<Element>().is_err());
    }

    #[test]
    fn listing_matches_count() {
        let list = list_markings(&dg(EXAMPLE), &part(""), &Partition::ones(4)).unwrap();
        assert_eq!(list.len(), 6);
        for m in &list {
            validate_marking(&dg(EXAMPLE), m).unwrap();
            let back: Marking = m.to_string().parse().unwrap();
            assert_eq!(&back, m);
        }
        let bad: Marking = "F2 F1 M1-2w1 S1w1".parse().unwrap();
        assert!(validate_marking(&dg("d=2; edges=(1,2,1)"), &bad).is_err());
    }

    #[test]
    fn point_tangency_small() {
        assert_eq!(count_point_tangency_markings(&dg(CHAIN), 2).unwrap(), n(3));
        assert_eq!(count_point_tangency_markings(&dg(CHAIN), 1).unwrap(), count_markings(&dg(CHAIN)).unwrap());
    }
}

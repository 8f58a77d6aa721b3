//! Independent checks for marking counts: exhaustive generation of
//! decorated graphs with all their orders, deduplicated by a positional
//! encoding, and an exhaustive automorphism search.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;

use super::{Element, MarkingPoset};
use crate::error::{Error, Result};
use crate::model::{FloorDiagram, Partition};

/// Largest extended graph the brute-force counter accepts.
pub const BRUTE_FORCE_LIMIT: usize = 14;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Floor(u32),
    Mid,
    Sink,
    Lambda(u32),
}

/// Counts (λ,ρ)-markings without using distributions, symmetry factors or
/// gap counting: every labeled decoration, every compatible order, and
/// identification by isomorphism of the ordered decorated graph.
pub fn brute_force_markings(dg: &FloorDiagram, lambda: &Partition, rho: &Partition) -> Result<BigUint> {
    if lambda.size() + rho.size() != dg.d() {
        return Err(Error::Domain("|λ|+|ρ| must equal d".into()));
    }
    let d = dg.d() as usize;
    let size = d + dg.edges().len() + lambda.len() + rho.len();
    if size > BRUTE_FORCE_LIMIT {
        return Err(Error::Refused(format!("extended graph has {size} elements, limit is {BRUTE_FORCE_LIMIT}")));
    }
    let budget: Vec<i64> = dg.divergences().iter().map(|div| 1 - div).collect();
    let lam = lambda.parts();
    let rh = rho.parts();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    // Each λ part and each ρ part picks a floor independently.
    let slots = lam.len() + rh.len();
    let mut choice = vec![0usize; slots];
    loop {
        let mut load = vec![0i64; d];
        for (i, &v) in choice.iter().enumerate() {
            load[v] += if i < lam.len() { lam[i] } else { rh[i - lam.len()] } as i64;
        }
        if load == budget {
            collect_orders(dg, lam, rh, &choice, &mut seen);
        }
        // Odometer step.
        let mut i = 0;
        loop {
            if i == slots {
                return Ok(BigUint::from(seen.len()));
            }
            choice[i] += 1;
            if choice[i] < d {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn collect_orders(dg: &FloorDiagram, lam: &[u32], rh: &[u32], choice: &[usize], seen: &mut HashSet<Vec<u32>>) {
    let d = dg.d() as usize;
    let mut kinds: Vec<Kind> = (1..=d as u32).map(Kind::Floor).collect();
    let mut edges: Vec<(usize, usize, u32)> = Vec::new();
    let mut preds: Vec<Vec<usize>> = (0..d).map(|v| if v > 0 { vec![v - 1] } else { vec![] }).collect();
    for e in dg.edges() {
        let m = kinds.len();
        kinds.push(Kind::Mid);
        preds.push(vec![e.src as usize - 1]);
        preds[e.tgt as usize - 1].push(m);
        edges.push((e.src as usize - 1, m, e.weight));
        edges.push((m, e.tgt as usize - 1, e.weight));
    }
    for (j, &w) in rh.iter().enumerate() {
        let s = kinds.len();
        let v = choice[lam.len() + j];
        kinds.push(Kind::Sink);
        preds.push(vec![v]);
        edges.push((v, s, w));
    }
    let base = kinds.len();
    for (i, &w) in lam.iter().enumerate() {
        let l = kinds.len();
        kinds.push(Kind::Lambda(i as u32 + 1));
        // λ_1 is the top element, λ_2 just below, and so on.
        preds.push(if i + 1 == lam.len() { (0..base).collect() } else { vec![l + 1] });
        edges.push((choice[i], l, w));
    }
    let n = kinds.len();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    extend(&preds, &mut placed, &mut order, &mut |ord| {
        let mut pos = vec![0usize; n];
        for (p, &x) in ord.iter().enumerate() {
            pos[x] = p;
        }
        let mut key: Vec<u32> = Vec::with_capacity(2 * n + 3 * edges.len());
        for &x in ord {
            key.extend(match kinds[x] {
                Kind::Floor(v) => [0, v],
                Kind::Mid => [1, 0],
                Kind::Sink => [2, 0],
                Kind::Lambda(i) => [3, i],
            });
        }
        let mut es: Vec<[u32; 3]> = edges.iter().map(|&(a, b, w)| [pos[a] as u32, pos[b] as u32, w]).collect();
        es.sort_unstable();
        key.extend(es.into_iter().flatten());
        seen.insert(key);
    });
}

fn extend(preds: &[Vec<usize>], placed: &mut [bool], order: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if order.len() == preds.len() {
        f(order);
        return;
    }
    for i in 0..preds.len() {
        if !placed[i] && preds[i].iter().all(|&j| placed[j]) {
            placed[i] = true;
            order.push(i);
            extend(preds, placed, order, f);
            order.pop();
            placed[i] = false;
        }
    }
}

/// Number of automorphisms of the extended graph fixing every floor and
/// every tangency point, by exhaustive search.
pub fn automorphism_count(p: &MarkingPoset) -> BigUint {
    let els = p.elements();
    let n = els.len();
    let fixed: Vec<bool> = els.iter().map(|e| matches!(e, Element::Floor(_) | Element::Lambda { .. })).collect();
    let edges = p.graph_edges();
    let mut mult: HashMap<(usize, usize, u32), usize> = HashMap::new();
    for &(a, b, w) in &edges {
        *mult.entry((a, b, w)).or_default() += 1;
    }
    let mut image: Vec<Option<usize>> = (0..n).map(|i| fixed[i].then_some(i)).collect();
    let movable: Vec<usize> = (0..n).filter(|&i| !fixed[i]).collect();
    let mut used = vec![false; n];
    let mut count = 0u64;
    auto_rec(&movable, 0, &edges, &mult, &mut image, &mut used, &mut count);
    BigUint::from(count)
}

fn auto_rec(
    movable: &[usize],
    k: usize,
    edges: &[(usize, usize, u32)],
    mult: &HashMap<(usize, usize, u32), usize>,
    image: &mut Vec<Option<usize>>,
    used: &mut [bool],
    count: &mut u64,
) {
    if k == movable.len() {
        *count += 1;
        return;
    }
    let x = movable[k];
    for &y in movable {
        if used[y] {
            continue;
        }
        image[x] = Some(y);
        // Every edge with both ends mapped must land on an edge of equal
        // multiplicity.
        let ok = edges.iter().all(|&(a, b, w)| match (image[a], image[b]) {
            (Some(ia), Some(ib)) => mult.get(&(ia, ib, w)) == mult.get(&(a, b, w)),
            _ => true,
        });
        if ok {
            used[y] = true;
            auto_rec(movable, k + 1, edges, mult, image, used, count);
            used[y] = false;
        }
        image[x] = None;
    }
}

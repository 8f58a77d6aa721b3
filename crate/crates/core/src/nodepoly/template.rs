use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;

use super::polynomial::RatPolynomial;
use crate::arith::factorial;
use crate::error::{Error, Result};

/// Weighted edges `(i, j, w)`, `i < j`, over the vertex chain `v_0 < ⋯ < v_ℓ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Template {
    length: u32,
    edges: Vec<(u32, u32, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemplateStats {
    pub length: u32,
    pub mu: BigUint,
    pub epsilon: u32,
    pub kappa: Vec<u32>,
    pub k_min: i64,
}

impl Template {
    pub fn new(length: u32, mut edges: Vec<(u32, u32, u32)>) -> Result<Self> {
        let bad = |m: String| Err(Error::Domain(format!("invalid template: {m}")));
        if edges.is_empty() {
            return bad("no edges".into());
        }
        for &(i, j, w) in &edges {
            if i >= j || j > length || w == 0 {
                return bad(format!("edge ({i},{j},{w}) out of range"));
            }
            if j - i == 1 && w == 1 {
                return bad(format!("short edge ({i},{j},1)"));
            }
        }
        for v in 1..length {
            if !edges.iter().any(|&(i, j, _)| i < v && v < j) {
                return bad(format!("vertex {v} is not spanned"));
            }
        }
        if !edges.iter().any(|e| e.0 == 0) || !edges.iter().any(|e| e.1 == length) {
            return bad("edges must reach both ends".into());
        }
        edges.sort_unstable();
        Ok(Template { length, edges })
    }

    pub fn length(&self) -> u32 {
        self.length
    }

    pub fn edges(&self) -> &[(u32, u32, u32)] {
        &self.edges
    }

    /// `Σ ((j−i) w − 1)`.
    pub fn cogenus(&self) -> u32 {
        self.edges.iter().map(|&(i, j, w)| (j - i) * w - 1).sum()
    }

    pub fn mu(&self) -> BigUint {
        self.edges.iter().map(|&(_, _, w)| BigUint::from(w * w)).product()
    }

    pub fn epsilon(&self) -> u32 {
        self.edges.iter().filter(|e| e.1 == self.length).all(|e| e.2 == 1) as u32
    }

    /// `κ_j` for `j = 1..=ℓ`: weight of edges `i → k` with `i < j ≤ k`.
    pub fn kappa(&self) -> Vec<u32> {
        (1..=self.length)
            .map(|j| self.edges.iter().filter(|&&(i, k, _)| i < j && j <= k).map(|e| e.2).sum())
            .collect()
    }

    pub fn k_min(&self) -> i64 {
        self.kappa().iter().enumerate().map(|(idx, &kj)| kj as i64 - idx as i64).max().expect("nonempty")
    }

    pub fn stats(&self) -> TemplateStats {
        TemplateStats {
            length: self.length,
            mu: self.mu(),
            epsilon: self.epsilon(),
            kappa: self.kappa(),
            k_min: self.k_min(),
        }
    }

    /// `P(Γ, k)`: summed over placements of the edge midpoints into gaps
    /// (gap `j` lies between `v_{j−1}` and `v_j`), with `b_j!` orders inside
    /// each gap and `∏_j C(k + j − 1 − κ_j + b_j, b_j)` interleavings with
    /// the short edges; divided by the parallel-edge symmetry.
    pub fn extension_polynomial(&self) -> RatPolynomial {
        let kappa = self.kappa();
        let mut counts = vec![0usize; self.length as usize + 1];
        let mut total = RatPolynomial::zero();
        self.place(0, &mut counts, &kappa, &mut total);
        let mut sym = BigUint::one();
        let mut i = 0;
        while i < self.edges.len() {
            let j = (i..self.edges.len()).find(|&j| self.edges[j] != self.edges[i]).unwrap_or(self.edges.len());
            sym *= factorial((j - i) as u64);
            i = j;
        }
        total.scale(&BigRational::new(1.into(), sym.into()))
    }

    fn place(&self, e: usize, counts: &mut Vec<usize>, kappa: &[u32], acc: &mut RatPolynomial) {
        if e == self.edges.len() {
            let mut term = RatPolynomial::one();
            for j in 1..=self.length as usize {
                let b = counts[j];
                let c = j as i64 - 1 - kappa[j - 1] as i64 + b as i64;
                let binom = RatPolynomial::binomial(b).shift(c);
                term = &term * &binom.scale(&BigRational::from_integer(factorial(b as u64).into()));
            }
            *acc = &*acc + &term;
            return;
        }
        let (i, j, _) = self.edges[e];
        for gap in i + 1..=j {
            counts[gap as usize] += 1;
            self.place(e + 1, counts, kappa, acc);
            counts[gap as usize] -= 1;
        }
    }

    /// Short edges `v_{j−1} → v_j` of weight 1 added in gap `j` to realize
    /// `Γ_(k)`: `k + j − 1 − κ_j` of them.
    pub fn short_edges(&self, k: i64) -> Vec<i64> {
        self.kappa().iter().enumerate().map(|(idx, &kj)| k + idx as i64 - kj as i64).collect()
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let es: Vec<String> = self.edges.iter().map(|(i, j, w)| format!("({i},{j},{w})")).collect();
        write!(f, "l={}; edges={}", self.length, es.join(";"))
    }
}

/// Every template of cogenus exactly `delta`, ordered by length then edges.
pub fn enumerate_templates(delta: u32) -> Vec<Template> {
    let mut out = Vec::new();
    if delta == 0 {
        return out;
    }
    // Coverage forces Σ (span − 1) ≥ ℓ − 1 while each edge costs at least
    // span − 1, so ℓ ≤ δ + 1.
    for length in 1..=delta + 1 {
        let mut cands = Vec::new();
        for i in 0..length {
            for j in i + 1..=length {
                for w in 1..=delta + 1 {
                    let c = (j - i) * w;
                    if c >= 2 && c - 1 <= delta {
                        cands.push((i, j, w));
                    }
                }
            }
        }
        let mut pick = Vec::new();
        pick_edges(&cands, 0, delta, &mut pick, &mut |es| {
            if let Ok(t) = Template::new(length, es.to_vec()) {
                out.push(t);
            }
        });
    }
    out.sort();
    out
}

fn pick_edges(
    cands: &[(u32, u32, u32)],
    from: usize,
    left: u32,
    pick: &mut Vec<(u32, u32, u32)>,
    f: &mut dyn FnMut(&[(u32, u32, u32)]),
) {
    if left == 0 {
        f(pick);
        return;
    }
    for c in from..cands.len() {
        let (i, j, w) = cands[c];
        let cost = (j - i) * w - 1;
        if cost <= left {
            pick.push(cands[c]);
            pick_edges(cands, c, left - cost, pick, f);
            pick.pop();
        }
    }
}

/// Independent generator: edge sets on a fixed window of `δ + 2` vertices,
/// shifted so the leftmost used vertex is 0, then filtered and deduplicated.
pub fn brute_force_templates(delta: u32) -> Vec<Template> {
    let window = delta + 1;
    let mut universe = Vec::new();
    for i in 0..=window {
        for j in i + 1..=window {
            for w in 1..=delta + 1 {
                if (j - i) * w >= 2 && (j - i) * w - 1 <= delta {
                    universe.push((i, j, w));
                }
            }
        }
    }
    let mut seen = BTreeSet::new();
    let mut pick = Vec::new();
    pick_edges(&universe, 0, delta, &mut pick, &mut |es| {
        let lo = es.iter().map(|e| e.0).min().unwrap();
        let hi = es.iter().map(|e| e.1).max().unwrap();
        let shifted: Vec<_> = es.iter().map(|&(i, j, w)| (i - lo, j - lo, w)).collect();
        if let Ok(t) = Template::new(hi - lo, shifted) {
            seen.insert(t);
        }
    });
    seen.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(len: u32, es: &[(u32, u32, u32)]) -> Template {
        Template::new(len, es.to_vec()).unwrap()
    }

    #[test]
    fn census() {
        assert_eq!(enumerate_templates(0).len(), 0);
        assert_eq!(enumerate_templates(1).len(), 2);
        assert_eq!(enumerate_templates(2).len(), 7);
        for delta in 1..=4 {
            assert_eq!(enumerate_templates(delta), brute_force_templates(delta));
            assert!(enumerate_templates(delta).iter().all(|t| t.cogenus() == delta));
        }
    }

    #[test]
    fn stats_examples() {
        let s = t(1, &[(0, 1, 2)]).stats();
        assert_eq!((s.length, s.mu.clone(), s.epsilon, s.kappa.clone(), s.k_min), (1, BigUint::from(4u32), 0, vec![2], 2));
        let s = t(2, &[(0, 2, 1)]).stats();
        assert_eq!((s.length, s.epsilon, s.kappa.clone(), s.k_min), (2, 1, vec![1, 1], 1));
        let s = t(3, &[(0, 2, 1), (1, 3, 1)]).stats();
        assert_eq!((s.length, s.epsilon, s.kappa.clone(), s.k_min), (3, 1, vec![1, 2, 1], 1));
    }

    #[test]
    fn extension_polynomial_examples() {
        assert_eq!(t(1, &[(0, 1, 2)]).extension_polynomial(), RatPolynomial::from_ints(&[-1, 1]));
        assert_eq!(t(2, &[(0, 2, 1)]).extension_polynomial(), RatPolynomial::from_ints(&[1, 2]));
        assert_eq!(t(3, &[(0, 2, 1), (1, 3, 1)]).extension_polynomial(), RatPolynomial::from_ints(&[0, 5, 4]));
    }

    #[test]
    fn small_template_table() {
        // (edges, ℓ, μ, ε, κ, k_min, P in k)
        let rows: Vec<(Vec<(u32, u32, u32)>, u32, u32, u32, Vec<u32>, i64, Vec<i64>, i64)> = vec![
            (vec![(0, 1, 2)], 1, 4, 0, vec![2], 2, vec![-1, 1], 1),
            (vec![(0, 2, 1)], 2, 1, 1, vec![1, 1], 1, vec![1, 2], 1),
            (vec![(0, 1, 3)], 1, 9, 0, vec![3], 3, vec![-2, 1], 1),
            (vec![(0, 1, 2), (0, 1, 2)], 1, 16, 0, vec![4], 4, vec![6, -5, 1], 2),
            (vec![(0, 2, 1), (0, 2, 1)], 2, 1, 1, vec![2, 2], 2, vec![0, -1, 2], 1),
            (vec![(0, 1, 2), (0, 2, 1)], 2, 4, 1, vec![3, 1], 3, vec![0, -4, 2], 1),
            (vec![(0, 2, 1), (1, 2, 2)], 2, 4, 0, vec![1, 3], 2, vec![0, -2, 2], 1),
            (vec![(0, 3, 1)], 3, 1, 1, vec![1, 1, 1], 1, vec![3, 3], 1),
            (vec![(0, 2, 1), (1, 3, 1)], 3, 1, 1, vec![1, 2, 1], 1, vec![0, 5, 4], 1),
        ];
        let all: Vec<Template> = enumerate_templates(1).into_iter().chain(enumerate_templates(2)).collect();
        assert_eq!(all.len(), rows.len());
        for (es, len, mu, eps, kappa, kmin, p, den) in rows {
            let tpl = t(len, &es);
            assert!(all.contains(&tpl));
            let s = tpl.stats();
            assert_eq!((s.length, s.mu, s.epsilon, s.kappa, s.k_min), (len, BigUint::from(mu), eps, kappa, kmin));
            let expect = RatPolynomial::from_ints(&p).scale(&BigRational::new(1.into(), den.into()));
            assert_eq!(tpl.extension_polynomial(), expect, "{tpl}");
        }
    }

    #[test]
    fn rejects_bad_templates() {
        assert!(Template::new(1, vec![(0, 1, 1)]).is_err());
        assert!(Template::new(2, vec![(0, 1, 2), (1, 2, 2)]).is_err());
        assert!(Template::new(1, vec![]).is_err());
        assert!(Template::new(3, vec![(0, 2, 1)]).is_err());
    }
}

use std::sync::OnceLock;

use floor_diagrams::enumeration::{genus_range, DiagramQuery};
use floor_diagrams::markings::{
    brute_force_markings, build_poset, count_markings, count_orderings, count_orderings_downset,
    count_relative_markings, enumerate_distributions, list_markings, BRUTE_FORCE_LIMIT,
};
use floor_diagrams::nodepoly::{discrete_sum, RatPolynomial};
use floor_diagrams::sequences::{diagram_to_tree, tree_to_diagram};
use floor_diagrams::tropical::{extract, reconstruct, verify_curve, StretchedConfig};
use floor_diagrams::{Edge, Engine, FloorDiagram, Partition};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::sample::Index;

/// Every diagram of degree <= 5: connected ones of each genus, plus the
/// disconnected ones reached through cogenus queries.
fn pool() -> &'static [FloorDiagram] {
    static POOL: OnceLock<Vec<FloorDiagram>> = OnceLock::new();
    POOL.get_or_init(|| {
        let engine = Engine::new();
        let mut all = Vec::new();
        for d in 1..=5 {
            for g in genus_range(d) {
                all.extend(engine.diagrams(&DiagramQuery::genus(d, g)).unwrap().iter().cloned());
            }
            for delta in 0..=d * (d - 1) / 2 {
                all.extend(engine.diagrams(&DiagramQuery::cogenus(d, delta)).unwrap().iter().cloned());
            }
        }
        all.sort();
        all.dedup();
        all
    })
}

fn diagram() -> impl Strategy<Value = FloorDiagram> {
    any::<Index>().prop_map(|i| pool()[i.index(pool().len())].clone())
}

fn small_diagram(max_d: u32) -> impl Strategy<Value = FloorDiagram> {
    diagram().prop_filter("degree bound", move |g| g.d() <= max_d)
}

/// A random split `(λ, ρ)` of `d`.
fn split(d: u32) -> impl Strategy<Value = (Partition, Partition)> {
    let all: Vec<(Partition, Partition)> = (0..=d)
        .flat_map(|k| {
            let rs = Partition::all_of(d - k);
            Partition::all_of(k).into_iter().flat_map(move |l| rs.clone().into_iter().map(move |r| (l.clone(), r)))
        })
        .collect();
    proptest::sample::select(all)
}

fn with_split(max_d: u32) -> impl Strategy<Value = (FloorDiagram, Partition, Partition)> {
    small_diagram(max_d).prop_flat_map(|g| {
        let d = g.d();
        (Just(g), split(d)).prop_map(|(g, (l, r))| (g, l, r))
    })
}

fn poly() -> impl Strategy<Value = RatPolynomial> {
    prop::collection::vec(-20i64..=20, 0..6).prop_map(|c| RatPolynomial::from_ints(&c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn divergences_balance(g in diagram()) {
        let div = g.divergences();
        prop_assert_eq!(div.iter().sum::<i64>(), 0);
        prop_assert_eq!(div.iter().map(|x| 1 - x).sum::<i64>(), g.d() as i64);
        prop_assert!(div.iter().all(|&x| x <= 1));
    }

    #[test]
    fn text_and_json_round_trip(g in diagram()) {
        prop_assert_eq!(FloorDiagram::parse_any(&g.to_text()).unwrap(), g.clone());
        prop_assert_eq!(FloorDiagram::from_json(&g.to_json()).unwrap(), g.clone());
        prop_assert_eq!(FloorDiagram::new(g.d(), g.edges().to_vec()).unwrap(), g);
    }

    #[test]
    fn cogenus_from_components(g in diagram()) {
        let c = g.classify();
        prop_assert_eq!(c.cogenus, g.cogenus());
        // Relabeling-free: only the (degree, cogenus) multiset matters.
        let mut parts: Vec<(u32, u32)> = c.parts.iter().map(|p| (p.degree, p.cogenus)).collect();
        parts.sort();
        let mut expect: i64 = parts.iter().map(|p| p.1 as i64).sum();
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                expect += (parts[i].0 * parts[j].0) as i64;
            }
        }
        prop_assert_eq!(c.cogenus, expect);
    }

    #[test]
    fn rejects_loops_and_backward_edges(g in diagram(), s in 1u32..=5, w in 1u32..=3, back in any::<bool>()) {
        let s = s.min(g.d());
        let bad = if back && s > 1 { Edge::new(s, s - 1, w) } else { Edge::new(s, s, w) };
        let mut edges = g.edges().to_vec();
        edges.push(bad);
        prop_assert!(FloorDiagram::new(g.d(), edges).is_err());
    }

    #[test]
    fn rejects_divergence_two(g in diagram(), v in 1u32..=5) {
        // Adding weight to an outgoing edge pushes the source's divergence up.
        let v = v.min(g.d());
        if let Some(i) = g.edges().iter().position(|e| e.src == v) {
            let mut edges = g.edges().to_vec();
            let div = g.divergences()[v as usize - 1];
            edges[i].weight += (2 - div) as u32;
            prop_assert!(FloorDiagram::new(g.d(), edges).is_err());
        }
    }

    #[test]
    fn ordinary_is_relative_with_unit_sinks(g in diagram()) {
        let nu = count_markings(&g).unwrap();
        prop_assert_eq!(count_relative_markings(&g, &Partition::empty(), &Partition::ones(g.d())).unwrap(), nu.clone());
        if g.is_connected() {
            prop_assert!(nu >= 1u32.into());
        }
    }

    #[test]
    fn sigma_divides_and_counters_agree((g, l, r) in with_split(4)) {
        for dist in enumerate_distributions(&g, &l, &r).unwrap() {
            let p = build_poset(&g, &dist);
            let gap = count_orderings(&p);
            prop_assert!((&gap % p.sigma()).is_zero());
            if p.len() <= 16 {
                prop_assert_eq!(count_orderings_downset(&p).unwrap(), gap);
            }
        }
    }

    #[test]
    fn brute_force_agrees((g, l, r) in with_split(4)) {
        let size = (g.d() as usize) + g.edges().len() + l.len() + r.len();
        prop_assume!(size <= 12.min(BRUTE_FORCE_LIMIT));
        prop_assert_eq!(brute_force_markings(&g, &l, &r).unwrap(), count_relative_markings(&g, &l, &r).unwrap());
    }

    #[test]
    fn listing_matches_count((g, l, r) in with_split(3)) {
        let n = count_relative_markings(&g, &l, &r).unwrap();
        let list = list_markings(&g, &l, &r).unwrap();
        let mut dedup = list.clone();
        dedup.sort();
        dedup.dedup();
        prop_assert_eq!(dedup.len(), list.len());
        prop_assert_eq!(n, list.len().into());
    }

    #[test]
    fn tree_bijection_round_trip(g in diagram()) {
        if g.genus() == 0 && g.is_connected() {
            let t = diagram_to_tree(&g).unwrap();
            prop_assert_eq!(t.edges().count() as u32 + 1, g.d());
            prop_assert_eq!(tree_to_diagram(&t).unwrap(), g);
        } else {
            prop_assert!(g.genus() > 0 || !g.is_connected());
        }
    }

    #[test]
    fn binomial_basis_round_trip(p in poly()) {
        prop_assert_eq!(RatPolynomial::from_binomial_basis(&p.to_binomial_basis()), p);
    }

    #[test]
    fn discrete_sum_matches_direct(p in poly(), a in -4i64..4, shift in 0i64..3, extra in 0i64..6) {
        let q = discrete_sum(&p, a, shift);
        let n = a + shift - 1 + extra;
        let mut direct = BigRational::zero();
        for k in a..=n - shift {
            direct += p.eval(&BigRational::from_integer(BigInt::from(k)));
        }
        prop_assert_eq!(q.eval(&BigRational::from_integer(BigInt::from(n))), direct);
    }

    #[test]
    fn shift_is_translation(p in poly(), c in -5i64..5, x in -6i64..6) {
        let at = |q: &RatPolynomial, v: i64| q.eval(&BigRational::from_integer(BigInt::from(v)));
        prop_assert_eq!(at(&p.shift(c), x), at(&p, x + c));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reconstruction_round_trip(g in small_diagram(3), pick in any::<Index>(), seed in 0u64..1000) {
        prop_assume!(g.is_connected());
        let ms = list_markings(&g, &Partition::empty(), &Partition::ones(g.d())).unwrap();
        let m = &ms[pick.index(ms.len())];
        let cfg = StretchedConfig::new(g.d(), g.genus(), seed).unwrap();
        prop_assert!(cfg.is_stretched());
        let sketch = reconstruct(&g, m, &cfg).unwrap();
        let report = verify_curve(&sketch, g.d(), g.genus());
        prop_assert!(report.ok(), "{}", report);
        prop_assert_eq!(extract(&sketch).unwrap(), (g.clone(), m.clone()));
    }
}

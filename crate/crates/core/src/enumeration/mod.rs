//! Exhaustive generation of labeled floor diagrams.
//!
//! Vertices are processed left to right. When vertex `v` is reached its
//! incoming weight is already fixed, so the outgoing edges can be chosen
//! as any multiset of `(t, w)` with total weight at most `1 + in(v)`.
//! The edge count is pinned by the target: `d - 1 + g` for connected
//! genus-`g` diagrams, `d(d-1)/2 - δ` for cogenus `δ`.

mod cache;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Edge, FloorDiagram};

pub use cache::DiagramCache;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    /// Connected diagrams of this genus.
    Genus(u32),
    /// Possibly disconnected diagrams of this cogenus.
    Cogenus(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Filter {
    OddWeights,
    UnitWeights,
    /// Multiset containment of the given edges.
    ContainsEdges(Vec<Edge>),
    /// The last `k` vertices have no outgoing edges.
    LastSinks(u32),
    MaxWeight(u32),
}

impl Filter {
    fn weight_ok(&self, w: u32) -> bool {
        match self {
            Filter::OddWeights => w % 2 == 1,
            Filter::UnitWeights => w == 1,
            Filter::MaxWeight(m) => w <= *m,
            _ => true,
        }
    }

    pub fn accepts(&self, dg: &FloorDiagram) -> bool {
        match self {
            Filter::OddWeights | Filter::UnitWeights | Filter::MaxWeight(_) => {
                dg.edges().iter().all(|e| self.weight_ok(e.weight))
            }
            Filter::LastSinks(k) => {
                let first = dg.d().saturating_sub(*k) + 1;
                dg.edges().iter().all(|e| e.src < first)
            }
            Filter::ContainsEdges(want) => {
                let mut want = want.clone();
                want.sort_unstable();
                let have = dg.edges();
                let (mut i, mut j) = (0, 0);
                while i < want.len() && j < have.len() {
                    match want[i].cmp(&have[j]) {
                        std::cmp::Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Less => return false,
                    }
                }
                i == want.len()
            }
        }
    }

    /// The chain `a -> a+1 -> ... -> a+b`, all of weight 1.
    pub fn chain(a: u32, b: u32) -> Filter {
        Filter::ContainsEdges((a..a + b).map(|i| Edge::new(i, i + 1, 1)).collect())
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Filter::OddWeights => f.write_str("odd"),
            Filter::UnitWeights => f.write_str("simple"),
            Filter::MaxWeight(m) => write!(f, "max-weight={m}"),
            Filter::LastSinks(k) => write!(f, "last-sinks={k}"),
            Filter::ContainsEdges(es) => {
                let mut es = es.clone();
                es.sort_unstable();
                let s: Vec<String> = es.iter().map(|e| e.to_string()).collect();
                write!(f, "contains={}", s.join(";"))
            }
        }
    }
}

impl FromStr for Filter {
    type Err = Error;

    /// `odd`, `simple`, `max-weight=N`, `last-sinks=K`, `contains=(s,t,w);...`,
    /// `chain=A,B`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown filter {s:?}"));
        let (name, arg) = match s.split_once('=') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let num = |a: Option<&str>| -> Result<u32> { a.ok_or_else(bad)?.parse().map_err(|_| bad()) };
        match name {
            "odd" => Ok(Filter::OddWeights),
            "simple" | "unit" => Ok(Filter::UnitWeights),
            "max-weight" => Ok(Filter::MaxWeight(num(arg)?)),
            "last-sinks" => Ok(Filter::LastSinks(num(arg)?)),
            "contains" => Ok(Filter::ContainsEdges(parse_edge_list(arg.ok_or_else(bad)?)?)),
            "chain" => {
                let (a, b) = arg.and_then(|x| x.split_once(',')).ok_or_else(bad)?;
                Ok(Filter::chain(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
            }
            _ => Err(bad()),
        }
    }
}

// Edge lists that would not form a valid diagram on their own (for example
// two edges into a vertex) still make sense as containment filters.
fn parse_edge_list(s: &str) -> Result<Vec<Edge>> {
    let mut edges = Vec::new();
    for tok in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let inner = tok.trim_start_matches('(').trim_end_matches(')');
        let n: Vec<u32> = inner
            .split(',')
            .map(|x| x.trim().parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("bad edge {tok:?}")))?;
        if n.len() != 3 || n[0] == 0 || n[0] >= n[1] || n[2] == 0 {
            return Err(Error::Parse(format!("bad edge {tok:?}")));
        }
        edges.push(Edge::new(n[0], n[1], n[2]));
    }
    edges.sort_unstable();
    Ok(edges)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiagramQuery {
    pub d: u32,
    pub target: Target,
    pub filters: Vec<Filter>,
}

impl DiagramQuery {
    pub fn genus(d: u32, g: u32) -> Self {
        DiagramQuery { d, target: Target::Genus(g), filters: Vec::new() }
    }

    pub fn cogenus(d: u32, delta: u32) -> Self {
        DiagramQuery { d, target: Target::Cogenus(delta), filters: Vec::new() }
    }

    pub fn with_filter(mut self, f: Filter) -> Self {
        self.filters.push(f);
        self
    }

    /// Stable key used for caching.
    pub fn key(&self) -> String {
        let t = match self.target {
            Target::Genus(g) => format!("g{g}"),
            Target::Cogenus(c) => format!("delta{c}"),
        };
        let mut fs: Vec<String> = self.filters.iter().map(|f| f.to_string()).collect();
        fs.sort();
        format!("d{}-{}-[{}]", self.d, t, fs.join("|"))
    }

    fn edge_count(&self) -> Option<usize> {
        let d = self.d as i64;
        let n = match self.target {
            Target::Genus(g) => d - 1 + g as i64,
            Target::Cogenus(c) => d * (d - 1) / 2 - c as i64,
        };
        (n >= 0).then_some(n as usize)
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Domain("degree must be at least 1".into()));
        }
        Ok(())
    }
}

struct Search<'a> {
    d: usize,
    edges_wanted: usize,
    connected: bool,
    filters: &'a [Filter],
    /// `max_future[v]`: upper bound on edges emitted by vertices after `v`.
    max_future: Vec<usize>,
}

#[derive(Clone)]
struct State {
    v: usize,
    in_w: Vec<u32>,
    edges: Vec<Edge>,
}

impl<'a> Search<'a> {
    fn new(q: &'a DiagramQuery, edges_wanted: usize) -> Self {
        let d = q.d as usize;
        // Vertex u emits at most u edges: its out-weight is bounded by the
        // crossing weight at cut u+1, which is at most u.
        let mut max_future = vec![0usize; d + 2];
        for v in (1..=d).rev() {
            max_future[v - 1] = max_future[v] + if v < d { v } else { 0 };
        }
        Search { d, edges_wanted, connected: matches!(q.target, Target::Genus(_)), filters: &q.filters, max_future }
    }

    fn weight_ok(&self, w: u32) -> bool {
        self.filters.iter().all(|f| f.weight_ok(w))
    }

    fn sink_locked(&self, v: usize) -> bool {
        self.filters.iter().any(|f| matches!(f, Filter::LastSinks(k) if v + (*k as usize) > self.d))
    }

    /// Every way to choose the outgoing edges of `st.v`.
    fn children(&self, st: &State) -> Vec<State> {
        let v = st.v;
        let budget = if self.sink_locked(v) { 0 } else { 1 + st.in_w[v] };
        let mut cands = Vec::new();
        for t in v + 1..=self.d {
            for w in 1..=budget {
                if self.weight_ok(w) {
                    cands.push((t, w));
                }
            }
        }
        let mut out = Vec::new();
        let mut pick = Vec::new();
        self.choose(st, &cands, 0, budget, &mut pick, &mut out);
        out
    }

    fn choose(
        &self,
        st: &State,
        cands: &[(usize, u32)],
        from: usize,
        budget: u32,
        pick: &mut Vec<(usize, u32)>,
        out: &mut Vec<State>,
    ) {
        let n = st.edges.len() + pick.len();
        if n + self.max_future[st.v] >= self.edges_wanted {
            let mut next = st.clone();
            for &(t, w) in pick.iter() {
                next.in_w[t] += w;
                next.edges.push(Edge::new(st.v as u32, t as u32, w));
            }
            next.v += 1;
            out.push(next);
        }
        if n >= self.edges_wanted {
            return;
        }
        for i in from..cands.len() {
            let (t, w) = cands[i];
            if w <= budget {
                pick.push((t, w));
                self.choose(st, cands, i, budget - w, pick, out);
                pick.pop();
            }
        }
    }

    fn run(&self, st: State, out: &mut Vec<FloorDiagram>) {
        if st.v == self.d {
            if st.edges.len() != self.edges_wanted {
                return;
            }
            let mut edges = st.edges;
            edges.sort_unstable();
            let dg = FloorDiagram::from_sorted_unchecked(self.d as u32, edges);
            if self.connected && !dg.is_connected() {
                return;
            }
            if self.filters.iter().all(|f| f.accepts(&dg)) {
                out.push(dg);
            }
            return;
        }
        for child in self.children(&st) {
            self.run(child, out);
        }
    }
}

/// All diagrams matching the query, each once, in canonical order
/// (lexicographic on the sorted edge triples).
pub fn enumerate(q: &DiagramQuery) -> Result<Vec<FloorDiagram>> {
    q.validate()?;
    let Some(wanted) = q.edge_count() else {
        return Ok(Vec::new());
    };
    let search = Search::new(q, wanted);
    let d = q.d as usize;
    let root = State { v: 1, in_w: vec![0; d + 1], edges: Vec::new() };
    // Expand a few levels sequentially, then fan out.
    let mut frontier = vec![root];
    while frontier.len() < 64 && frontier.first().is_some_and(|s| s.v + 1 < d) {
        frontier = frontier.iter().flat_map(|s| search.children(s)).collect();
    }
    let mut out: Vec<FloorDiagram> = frontier
        .into_par_iter()
        .flat_map_iter(|st| {
            let mut local = Vec::new();
            search.run(st, &mut local);
            local
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Number of connected diagrams of degree `d` and genus `g`.
pub fn count_connected(d: u32, g: u32) -> Result<BigUint> {
    Ok(BigUint::from(enumerate(&DiagramQuery::genus(d, g))?.len()))
}

/// Number of connected diagrams of degree `d`, genus `g` passing all filters.
pub fn count_filtered(d: u32, g: u32, filters: &[Filter]) -> Result<BigUint> {
    let q = DiagramQuery { d, target: Target::Genus(g), filters: filters.to_vec() };
    Ok(BigUint::from(enumerate(&q)?.len()))
}

/// Genera for which connected degree-`d` diagrams exist.
pub fn genus_range(d: u32) -> std::ops::RangeInclusive<u32> {
    0..=crate::model::max_genus(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn texts(v: &[FloorDiagram]) -> Vec<String> {
        v.iter().map(|d| d.to_text()).collect()
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate(&DiagramQuery::genus(3, 0)).unwrap().len(), 3);
        assert_eq!(enumerate(&DiagramQuery::genus(4, 0)).unwrap().len(), 16);
        assert_eq!(texts(&enumerate(&DiagramQuery::genus(1, 0)).unwrap()), vec!["d=1; edges="]);
        assert_eq!(count_connected(4, 1).unwrap(), BigUint::from(13u32));
        assert_eq!(count_connected(4, 2).unwrap(), BigUint::from(5u32));
        assert_eq!(count_connected(4, 3).unwrap(), BigUint::from(1u32));
        assert_eq!(count_connected(3, 1).unwrap(), BigUint::from(1u32));
        assert_eq!(count_connected(4, 4).unwrap(), BigUint::from(0u32));
    }

    #[test]
    fn d3_genus0_in_order() {
        let got = texts(&enumerate(&DiagramQuery::genus(3, 0)).unwrap());
        assert_eq!(got, vec!["d=3; edges=(1,2,1);(2,3,1)", "d=3; edges=(1,2,1);(2,3,2)", "d=3; edges=(1,3,1);(2,3,1)"]);
    }

    #[test]
    fn zero_degree_rejected() {
        assert!(enumerate(&DiagramQuery::genus(0, 0)).is_err());
    }

    #[test]
    fn cogenus_includes_disconnected() {
        let v = enumerate(&DiagramQuery::cogenus(2, 1)).unwrap();
        assert_eq!(texts(&v), vec!["d=2; edges="]);
        assert!(enumerate(&DiagramQuery::cogenus(1, 1)).unwrap().is_empty());
    }

    #[test]
    fn no_duplicates_and_valid() {
        for d in 1..=5 {
            for g in 0..=6 {
                let v = enumerate(&DiagramQuery::genus(d, g)).unwrap();
                let set: HashSet<_> = v.iter().collect();
                assert_eq!(set.len(), v.len());
                for dg in &v {
                    let again = FloorDiagram::new(dg.d(), dg.edges().to_vec()).unwrap();
                    assert_eq!(&again, dg);
                    assert!(dg.is_connected());
                    assert_eq!(dg.genus(), g);
                }
            }
        }
    }

    #[test]
    fn filter_parsing() {
        assert_eq!("odd".parse::<Filter>().unwrap(), Filter::OddWeights);
        assert_eq!("max-weight=2".parse::<Filter>().unwrap(), Filter::MaxWeight(2));
        assert_eq!("chain=1,2".parse::<Filter>().unwrap(), Filter::chain(1, 2));
        let c: Filter = "contains=(2,3,1);(1,3,1)".parse().unwrap();
        assert_eq!(c.to_string(), "contains=(1,3,1);(2,3,1)");
        assert!("bogus".parse::<Filter>().is_err());
    }

    #[test]
    fn filtered_examples() {
        let odd: Vec<u32> = (1..=6)
            .map(|d| enumerate(&DiagramQuery::genus(d, 0).with_filter(Filter::OddWeights)).unwrap().len() as u32)
            .collect();
        assert_eq!(odd, vec![1, 1, 2, 8, 46, 352]);
        let simple: Vec<u32> = (1..=6)
            .map(|d| enumerate(&DiagramQuery::genus(d, 0).with_filter(Filter::UnitWeights)).unwrap().len() as u32)
            .collect();
        assert_eq!(simple, vec![1, 1, 2, 7, 36, 245]);
    }

    #[test]
    fn last_sinks_filter() {
        // Vertices 3 and 4 emit nothing; only vertex 4 can be the sink of 3.
        let q = DiagramQuery::genus(4, 0).with_filter(Filter::LastSinks(1));
        let all = enumerate(&DiagramQuery::genus(4, 0)).unwrap();
        assert_eq!(enumerate(&q).unwrap().len(), all.len());
        let q2 = DiagramQuery::genus(4, 0).with_filter(Filter::LastSinks(2));
        let got = enumerate(&q2).unwrap();
        assert_eq!(got.len(), all.iter().filter(|d| d.edges().iter().all(|e| e.src < 3)).count());
    }
}

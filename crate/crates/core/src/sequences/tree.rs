use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{Edge, FloorDiagram};

/// A tree on vertices `1..=d`, edges stored as `(a, b)` with `a < b`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabeledTree {
    d: u32,
    edges: BTreeSet<(u32, u32)>,
}

impl LabeledTree {
    pub fn new(d: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            let (a, b) = (a.min(b), a.max(b));
            if a == b || a == 0 || b > d {
                return Err(Error::Parse(format!("bad tree edge ({a},{b}) for d={d}")));
            }
            if !set.insert((a, b)) {
                return Err(Error::Parse(format!("repeated tree edge ({a},{b})")));
            }
        }
        if d == 0 || set.len() != d as usize - 1 {
            return Err(Error::Parse(format!("a tree on {d} vertices needs {} edges", d.saturating_sub(1))));
        }
        let t = LabeledTree { d, edges: set };
        if t.components(&(1..=d).collect::<Vec<_>>()).len() != 1 {
            return Err(Error::Parse("tree edges do not connect all vertices".into()));
        }
        Ok(t)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    pub fn contains(&self, a: u32, b: u32) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// No path `a − b − c` with `a < b < c`.
    pub fn is_alternating(&self) -> bool {
        (1..=self.d).all(|v| {
            let nb: Vec<u32> = self.neighbors(v).collect();
            nb.iter().all(|&u| u < v) || nb.iter().all(|&u| u > v)
        })
    }

    fn neighbors(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
    }

    /// Connected components of the forest induced on `verts`, each sorted.
    fn components(&self, verts: &[u32]) -> Vec<Vec<u32>> {
        components(verts, self.edges.iter().copied())
    }
}

fn components(verts: &[u32], edges: impl Iterator<Item = (u32, u32)>) -> Vec<Vec<u32>> {
    let idx = |v: u32| verts.binary_search(&v).ok();
    let mut parent: Vec<usize> = (0..verts.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (a, b) in edges {
        if let (Some(i), Some(j)) = (idx(a), idx(b)) {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            parent[ri] = rj;
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<u32>> = Default::default();
    for i in 0..verts.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(verts[i]);
    }
    let mut out: Vec<Vec<u32>> = groups.into_values().collect();
    out.sort();
    out
}

impl fmt::Display for LabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let es: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        write!(f, "d={}; edges={}", self.d, es.join(","))
    }
}

/// `d=4; edges=1-2,2-3,1-4` (the `edges=` prefix is optional).
impl FromStr for LabeledTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, body) = s.split_once(';').unwrap_or((s, ""));
        let d = head
            .trim()
            .strip_prefix("d=")
            .and_then(|x| x.trim().parse::<u32>().ok())
            .ok_or_else(|| Error::Parse(format!("expected 'd=<n>; a-b,...', got {s:?}")))?;
        let body = body.trim();
        let body = body.strip_prefix("edges=").unwrap_or(body);
        let mut edges = Vec::new();
        for tok in body.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (a, b) = tok.split_once('-').ok_or_else(|| Error::Parse(format!("bad tree edge {tok:?}")))?;
            let p = |x: &str| x.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad vertex {x:?}")));
            edges.push((p(a)?, p(b)?));
        }
        LabeledTree::new(d, edges)
    }
}

/// All `d^{d−2}` trees, via Prüfer sequences.
pub fn all_trees(d: u32) -> Vec<LabeledTree> {
    if d <= 2 {
        return vec![LabeledTree::new(d.max(1), (d == 2).then_some((1, 2))).expect("valid")];
    }
    let n = d as usize;
    let len = n - 2;
    let total = n.pow(len as u32);
    let mut out = Vec::with_capacity(total);
    let mut seq = vec![0usize; len];
    for mut code in 0..total {
        for s in seq.iter_mut() {
            *s = code % n + 1;
            code /= n;
        }
        let mut degree = vec![1usize; n + 1];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut edges = Vec::with_capacity(n - 1);
        for &s in &seq {
            let leaf = (1..=n).find(|&v| degree[v] == 1).expect("leaf exists");
            edges.push((leaf as u32, s as u32));
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (1..=n).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0] as u32, rest[1] as u32));
        out.push(LabeledTree::new(d, edges).expect("Prüfer decoding yields a tree"));
    }
    out.sort();
    out
}

/// `(vertex, weight)` choices for attaching a subdiagram to a new top
/// vertex: vertices left to right, weights from `1 − div` down to 1.
fn choice_list(verts: &[u32], edges: &[Edge]) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for &v in verts {
        let div: i64 = edges
            .iter()
            .map(|e| if e.src == v { e.weight as i64 } else if e.tgt == v { -(e.weight as i64) } else { 0 })
            .sum();
        for w in (1..=1 - div).rev() {
            out.push((v, w as u32));
        }
    }
    out
}

pub fn diagram_to_tree(dg: &FloorDiagram) -> Result<LabeledTree> {
    if !dg.is_connected() || dg.genus() != 0 {
        return Err(Error::Domain(format!("diagram {} is not a connected genus-0 diagram", dg.to_text())));
    }
    let verts: Vec<u32> = (1..=dg.d()).collect();
    let mut tree = Vec::new();
    to_tree_rec(&verts, dg.edges(), &mut tree)?;
    LabeledTree::new(dg.d(), tree)
}

fn to_tree_rec(verts: &[u32], edges: &[Edge], tree: &mut Vec<(u32, u32)>) -> Result<()> {
    let Some((&root, rest)) = verts.split_last() else { return Ok(()) };
    let inner: Vec<Edge> = edges.iter().filter(|e| e.tgt != root).copied().collect();
    for comp in components(rest, inner.iter().map(|e| (e.src, e.tgt))) {
        let sub: Vec<Edge> = inner.iter().filter(|e| comp.binary_search(&e.src).is_ok()).copied().collect();
        let link = edges
            .iter()
            .find(|e| e.tgt == root && comp.binary_search(&e.src).is_ok())
            .ok_or_else(|| Error::Internal("component not linked to root".into()))?;
        let idx = choice_list(&comp, &sub)
            .iter()
            .position(|&c| c == (link.src, link.weight))
            .ok_or_else(|| Error::Internal("root edge missing from choice list".into()))?;
        tree.push((comp[idx], root));
        to_tree_rec(&comp, &sub, tree)?;
    }
    Ok(())
}

pub fn tree_to_diagram(t: &LabeledTree) -> Result<FloorDiagram> {
    let verts: Vec<u32> = (1..=t.d()).collect();
    let tree: Vec<(u32, u32)> = t.edges().collect();
    let edges = to_diagram_rec(&verts, &tree);
    FloorDiagram::new(t.d(), edges)
}

fn to_diagram_rec(verts: &[u32], tree: &[(u32, u32)]) -> Vec<Edge> {
    let Some((&root, rest)) = verts.split_last() else { return Vec::new() };
    let inner: Vec<(u32, u32)> = tree.iter().filter(|e| e.1 != root).copied().collect();
    let mut out = Vec::new();
    for comp in components(rest, inner.iter().copied()) {
        let sub_tree: Vec<(u32, u32)> = inner.iter().filter(|e| comp.binary_search(&e.0).is_ok()).copied().collect();
        let sub = to_diagram_rec(&comp, &sub_tree);
        let attach = tree.iter().find(|e| e.1 == root && comp.binary_search(&e.0).is_ok()).expect("tree is connected").0;
        let idx = comp.binary_search(&attach).expect("in component");
        let (v, w) = choice_list(&comp, &sub)[idx];
        out.extend(sub);
        out.push(Edge::new(v, root, w));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{enumerate, DiagramQuery};

    fn dg(s: &str) -> FloorDiagram {
        s.parse().unwrap()
    }

    fn tr(s: &str) -> LabeledTree {
        s.parse().unwrap()
    }

    #[test]
    fn augmenting_a_four_vertex_diagram() {
        let rows = [
            ("d=5; edges=(1,3,1);(2,3,1);(3,4,2);(3,5,1)", "d=5; 1-3,2-3,2-4,1-5"),
            ("d=5; edges=(1,3,1);(2,3,1);(3,4,2);(4,5,3)", "d=5; 1-3,2-3,2-4,2-5"),
            ("d=5; edges=(1,3,1);(2,3,1);(3,4,2);(4,5,2)", "d=5; 1-3,2-3,2-4,3-5"),
            ("d=5; edges=(1,3,1);(2,3,1);(3,4,2);(4,5,1)", "d=5; 1-3,2-3,2-4,4-5"),
        ];
        for (d, t) in rows {
            assert_eq!(diagram_to_tree(&dg(d)).unwrap(), tr(t), "{d}");
            assert_eq!(tree_to_diagram(&tr(t)).unwrap(), dg(d));
        }
    }

    #[test]
    fn round_trip_and_short_edges() {
        for d in 1..=6u32 {
            let trees = all_trees(d);
            assert_eq!(trees.len() as u64, if d == 1 { 1 } else { (d as u64).pow(d - 2) });
            let diagrams = enumerate(&DiagramQuery::genus(d, 0)).unwrap();
            assert_eq!(diagrams.len(), trees.len());
            let mut images = BTreeSet::new();
            for g in &diagrams {
                let t = diagram_to_tree(g).unwrap();
                assert_eq!(&tree_to_diagram(&t).unwrap(), g);
                for i in 1..d {
                    let short = g.edges().iter().any(|e| (e.src, e.tgt, e.weight) == (i, i + 1, 1));
                    assert_eq!(short, t.contains(i, i + 1), "{} at {i}", g.to_text());
                }
                images.insert(t);
            }
            assert_eq!(images.len(), trees.len());
        }
    }

    #[test]
    fn rejects_positive_genus() {
        let g = dg("d=3; edges=(1,2,1);(2,3,1);(2,3,1)");
        assert!(matches!(diagram_to_tree(&g), Err(Error::Domain(_))));
    }

    #[test]
    fn tree_parsing() {
        assert!("d=3; 1-2".parse::<LabeledTree>().is_err());
        assert!("d=3; 1-2,1-2".parse::<LabeledTree>().is_err());
        assert!("d=4; 1-2,1-4,3-4".parse::<LabeledTree>().unwrap().is_alternating());
        assert!(!"d=3; 1-2,2-3".parse::<LabeledTree>().unwrap().is_alternating());
        let t = tr("d=4; 1-2,2-3,1-4");
        assert_eq!(t.to_string().parse::<LabeledTree>().unwrap(), t);
    }
}

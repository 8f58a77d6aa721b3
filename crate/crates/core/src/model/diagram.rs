use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Directed weighted edge `src -> tgt` with `src < tgt`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: u32,
    pub tgt: u32,
    pub weight: u32,
}

impl Edge {
    pub const fn new(src: u32, tgt: u32, weight: u32) -> Self {
        Edge { src, tgt, weight }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.src, self.tgt, self.weight)
    }
}

/// A labeled floor diagram on vertices `1..=d`. Edges are kept as a sorted
/// multiset, so structural equality is diagram equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FloorDiagram {
    d: u32,
    edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentInfo {
    pub vertices: Vec<u32>,
    pub degree: u32,
    pub genus: u32,
    pub cogenus: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub components: usize,
    pub degree: u32,
    /// First Betti number of the whole diagram.
    pub genus: u32,
    pub cogenus: i64,
    pub connected: bool,
    pub parts: Vec<ComponentInfo>,
}

/// `(d-1)(d-2)/2`, the genus of a smooth plane curve of degree `d`.
pub fn max_genus(d: u32) -> u32 {
    if d < 2 {
        0
    } else {
        (d - 1) * (d - 2) / 2
    }
}

impl FloorDiagram {
    /// Validates and canonicalizes.
    pub fn new(d: u32, mut edges: Vec<Edge>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDiagram("degree must be at least 1".into()));
        }
        for e in &edges {
            if e.src < 1 || e.tgt > d || e.src > d || e.tgt < 1 {
                return Err(Error::InvalidDiagram(format!("edge {e} leaves vertex range 1..{d}")));
            }
            if e.src == e.tgt {
                return Err(Error::InvalidDiagram(format!("edge {e} is a loop")));
            }
            if e.src > e.tgt {
                return Err(Error::InvalidDiagram(format!("edge {e} points backward")));
            }
            if e.weight == 0 {
                return Err(Error::InvalidDiagram(format!("edge {e} has weight 0")));
            }
        }
        edges.sort_unstable();
        let dg = FloorDiagram { d, edges };
        for v in 1..=d {
            let div = dg.div_unchecked(v);
            if div > 1 {
                return Err(Error::InvalidDiagram(format!("divergence {div} at vertex {v} exceeds 1")));
            }
        }
        Ok(dg)
    }

    /// Builds without validation; callers guarantee a sorted, valid edge list.
    pub(crate) fn from_sorted_unchecked(d: u32, edges: Vec<Edge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] <= w[1]));
        FloorDiagram { d, edges }
    }

    /// The single-vertex diagram.
    pub fn point() -> Self {
        FloorDiagram { d: 1, edges: Vec::new() }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    fn div_unchecked(&self, v: u32) -> i64 {
        let mut div = 0i64;
        for e in &self.edges {
            if e.src == v {
                div += e.weight as i64;
            }
            if e.tgt == v {
                div -= e.weight as i64;
            }
        }
        div
    }

    pub fn divergence(&self, v: u32) -> Result<i64> {
        if v < 1 || v > self.d {
            return Err(Error::Domain(format!("vertex {v} out of range 1..{}", self.d)));
        }
        Ok(self.div_unchecked(v))
    }

    /// Divergences of vertices `1..=d`, index 0 is vertex 1.
    pub fn divergences(&self) -> Vec<i64> {
        let mut out = vec![0i64; self.d as usize];
        for e in &self.edges {
            out[e.src as usize - 1] += e.weight as i64;
            out[e.tgt as usize - 1] -= e.weight as i64;
        }
        out
    }

    /// Total weight of edges `p -> r` with `p < q <= r`.
    pub fn crossing_weight(&self, q: u32) -> u32 {
        self.edges.iter().filter(|e| e.src < q && q <= e.tgt).map(|e| e.weight).sum()
    }

    pub fn multiplicity(&self) -> BigUint {
        self.edges.iter().fold(BigUint::one(), |acc, e| acc * (e.weight as u64 * e.weight as u64))
    }

    pub fn is_odd(&self) -> bool {
        self.edges.iter().all(|e| e.weight % 2 == 1)
    }

    pub fn max_weight(&self) -> u32 {
        self.edges.iter().map(|e| e.weight).max().unwrap_or(0)
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let n = self.d as usize;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let nx = p[c];
                p[c] = r;
                c = nx;
            }
            r
        }
        for e in &self.edges {
            let a = find(&mut parent, e.src as usize - 1);
            let b = find(&mut parent, e.tgt as usize - 1);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: Vec<Vec<u32>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for v in 0..n {
            let r = find(&mut parent, v);
            if slot[r] == usize::MAX {
                slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[r]].push(v as u32 + 1);
        }
        groups
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// First Betti number `|E| - d + #components`.
    pub fn genus(&self) -> u32 {
        (self.edges.len() + self.components().len() - self.d as usize) as u32
    }

    /// `(d-1)(d-2)/2 - (|E| - d + 1)`; equal to the component formula for
    /// disconnected diagrams as well.
    pub fn cogenus(&self) -> i64 {
        max_genus(self.d) as i64 - (self.edges.len() as i64 - self.d as i64 + 1)
    }

    pub fn classify(&self) -> Classification {
        let comps = self.components();
        let mut parts = Vec::with_capacity(comps.len());
        for vs in &comps {
            let ne = self.edges.iter().filter(|e| vs.binary_search(&e.src).is_ok()).count();
            let dj = vs.len() as u32;
            let gj = (ne + 1 - vs.len()) as u32;
            parts.push(ComponentInfo { vertices: vs.clone(), degree: dj, genus: gj, cogenus: max_genus(dj) - gj });
        }
        let mut cogenus: i64 = parts.iter().map(|c| c.cogenus as i64).sum();
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                cogenus += parts[i].degree as i64 * parts[j].degree as i64;
            }
        }
        Classification {
            components: comps.len(),
            degree: self.d,
            genus: self.genus(),
            cogenus,
            connected: comps.len() == 1,
            parts,
        }
    }

    /// Sub-diagram induced on an increasing vertex list, relabeled `1..=k`.
    /// Not revalidated: dropping incoming edges can raise a divergence.
    pub fn induced(&self, vertices: &[u32]) -> FloorDiagram {
        let idx = |v: u32| vertices.binary_search(&v).ok().map(|i| i as u32 + 1);
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .filter_map(|e| Some(Edge::new(idx(e.src)?, idx(e.tgt)?, e.weight)))
            .collect();
        edges.sort_unstable();
        FloorDiagram { d: vertices.len() as u32, edges }
    }

    /// Canonical text form `d=<n>; edges=(s,t,w);...`.
    pub fn to_text(&self) -> String {
        let es: Vec<String> = self.edges.iter().map(|e| e.to_string()).collect();
        format!("d={}; edges={}", self.d, es.join(";"))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(DiagramJson::from(self)).expect("diagram json")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: DiagramJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        j.try_into()
    }

    /// Parses either the text or the JSON form.
    pub fn parse_any(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('{') {
            let v: serde_json::Value = serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()))?;
            Self::from_json(&v)
        } else {
            t.parse()
        }
    }
}

#[derive(Serialize, Deserialize)]
struct DiagramJson {
    d: u32,
    edges: Vec<[u32; 3]>,
}

impl From<&FloorDiagram> for DiagramJson {
    fn from(dg: &FloorDiagram) -> Self {
        DiagramJson { d: dg.d, edges: dg.edges.iter().map(|e| [e.src, e.tgt, e.weight]).collect() }
    }
}

impl TryFrom<DiagramJson> for FloorDiagram {
    type Error = Error;
    fn try_from(j: DiagramJson) -> Result<Self> {
        FloorDiagram::new(j.d, j.edges.into_iter().map(|[s, t, w]| Edge::new(s, t, w)).collect())
    }
}

impl Serialize for FloorDiagram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DiagramJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FloorDiagram {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = DiagramJson::deserialize(d)?;
        j.try_into().map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for FloorDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for FloorDiagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("{m} in {s:?}"));
        let (dpart, epart) = s.split_once(';').ok_or_else(|| bad("missing ';'"))?;
        let d: u32 = dpart
            .trim()
            .strip_prefix("d=")
            .ok_or_else(|| bad("expected d=<n>"))?
            .trim()
            .parse()
            .map_err(|_| bad("bad degree"))?;
        let elist = epart.trim().strip_prefix("edges=").ok_or_else(|| bad("expected edges="))?.trim();
        let mut edges = Vec::new();
        for tok in elist.split(';').map(str::trim).filter(|t| !t.is_empty()) {
            let inner = tok
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| bad("edge must look like (s,t,w)"))?;
            let nums: Vec<u32> = inner
                .split(',')
                .map(|x| x.trim().parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad("bad edge number"))?;
            if nums.len() != 3 {
                return Err(bad("edge must have three entries"));
            }
            edges.push(Edge::new(nums[0], nums[1], nums[2]));
        }
        FloorDiagram::new(d, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn example_d4() -> FloorDiagram {
        "d=4; edges=(1,2,1);(2,3,1);(2,3,1);(3,4,2)".parse().unwrap()
    }

    #[test]
    fn divergences_of_example() {
        let dg = example_d4();
        let divs: Vec<i64> = (1..=4).map(|v| dg.divergence(v).unwrap()).collect();
        assert_eq!(divs, vec![1, 1, 0, -2]);
        assert!(dg.divergence(0).is_err());
        assert!(dg.divergence(5).is_err());
    }

    #[test]
    fn point_and_chain() {
        assert_eq!(FloorDiagram::point().divergence(1).unwrap(), 0);
        let chain: FloorDiagram = "d=3; edges=(1,2,1);(2,3,2)".parse().unwrap();
        assert_eq!(chain.divergence(2).unwrap(), 1);
    }

    #[test]
    fn classify_examples() {
        let c = example_d4().classify();
        assert_eq!((c.components, c.degree, c.genus, c.cogenus, c.connected), (1, 4, 1, 2, true));
        let c = FloorDiagram::point().classify();
        assert_eq!((c.components, c.degree, c.genus, c.cogenus, c.connected), (1, 1, 0, 0, true));
        let two = FloorDiagram::new(2, vec![]).unwrap().classify();
        assert_eq!((two.components, two.degree, two.cogenus, two.connected), (2, 2, 1, false));
        assert!(two.parts.iter().all(|p| p.genus == 0));
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(example_d4().multiplicity(), BigUint::from(4u32));
        let w12: FloorDiagram = "d=3; edges=(1,2,1);(2,3,2)".parse().unwrap();
        assert_eq!(w12.multiplicity(), BigUint::from(4u32));
        let ones: FloorDiagram = "d=3; edges=(1,3,1);(2,3,1)".parse().unwrap();
        assert_eq!(ones.multiplicity(), BigUint::one());
    }

    #[test]
    fn validation_rejects() {
        assert!(FloorDiagram::new(0, vec![]).is_err());
        assert!(FloorDiagram::new(2, vec![Edge::new(1, 1, 1)]).is_err());
        assert!(FloorDiagram::new(2, vec![Edge::new(2, 1, 1)]).is_err());
        assert!(FloorDiagram::new(3, vec![Edge::new(1, 2, 2)]).is_err());
        assert!(FloorDiagram::new(2, vec![Edge::new(1, 2, 0)]).is_err());
        assert!(FloorDiagram::new(2, vec![Edge::new(1, 3, 1)]).is_err());
    }

    #[test]
    fn text_and_json_round_trip() {
        let dg = example_d4();
        let text = dg.to_text();
        assert_eq!(text, "d=4; edges=(1,2,1);(2,3,1);(2,3,1);(3,4,2)");
        assert_eq!(text.parse::<FloorDiagram>().unwrap(), dg);
        let json = dg.to_json();
        assert_eq!(json.to_string(), r#"{"d":4,"edges":[[1,2,1],[2,3,1],[2,3,1],[3,4,2]]}"#);
        assert_eq!(FloorDiagram::from_json(&json).unwrap(), dg);
        assert_eq!(FloorDiagram::parse_any(&json.to_string()).unwrap(), dg);
        assert_eq!("d=1; edges=".parse::<FloorDiagram>().unwrap(), FloorDiagram::point());
    }

    #[test]
    fn induced_relabels() {
        let dg = example_d4();
        let sub = dg.induced(&[2, 3]);
        assert_eq!(sub.to_text(), "d=2; edges=(1,2,1);(1,2,1)");
    }
}

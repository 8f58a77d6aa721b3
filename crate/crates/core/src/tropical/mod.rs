//! Vertically stretched configurations and the tropical curve through one,
//! rebuilt floor by floor from a marked floor diagram.

mod svg;

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{rat, rat_int};
use crate::error::{Error, Result};
use crate::markings::{validate_marking, Element, Marking};
use crate::model::{Edge, FloorDiagram};

pub use svg::{render_diagram, render_marked, render_sketch, write_svg, SvgLayout};

pub type Point = (BigRational, BigRational);

/// Points listed bottom to top; both coordinates strictly increase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StretchedConfig {
    pub d: u32,
    pub points: Vec<Point>,
}

impl StretchedConfig {
    /// `3d − 1 + g` points. Seed 0 is the fixed grid `x_i = i/100`,
    /// `y_i = (d³+d+1) i`; other seeds jitter both coordinates.
    pub fn new(d: u32, g: u32, seed: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("degree must be positive".into()));
        }
        let n = 3 * d as i64 - 1 + g as i64;
        let c = d as i64 * d as i64 * d as i64 + d as i64;
        let points = if seed == 0 {
            let den = if n < 100 { 100 } else { n + 1 };
            (1..=n).map(|i| (rat(i, den), rat_int(i * (c + 1)))).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (1..=n)
                .map(|i| {
                    let r: i64 = rng.gen_range(0..100);
                    let s: i64 = rng.gen_range(0..=c);
                    (rat(100 * i + r, 100 * (n + 1)), rat_int(2 * (c + 1) * i + s))
                })
                .collect()
        };
        let cfg = StretchedConfig { d, points };
        debug_assert!(cfg.is_stretched());
        Ok(cfg)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Strictly increasing coordinates and
    /// `min |y_i − y_j| > (d³+d) · max |x_i − x_j|`.
    pub fn is_stretched(&self) -> bool {
        let p = &self.points;
        if p.windows(2).any(|w| w[0].0 >= w[1].0 || w[0].1 >= w[1].1) {
            return false;
        }
        if p.len() < 2 {
            return true;
        }
        let d = self.d as i64;
        let min_gap = p.windows(2).map(|w| &w[1].1 - &w[0].1).min().expect("two points");
        let spread = &p[p.len() - 1].0 - &p[0].0;
        min_gap > spread * rat_int(d * d * d + d)
    }

    /// Point matched to marking position `k` (0-based; position 0 is the top).
    pub fn for_position(&self, k: usize) -> &Point {
        &self.points[self.points.len() - 1 - k]
    }
}

/// One floor: the graph of a piecewise-linear function with a breakpoint
/// under or over every elevator attached to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Floor {
    pub vertex: u32,
    /// Marking position of the floor's own point.
    pub white: usize,
    /// Left to right.
    pub breakpoints: Vec<Point>,
    /// Index into the sketch's elevators, per breakpoint.
    pub attachments: Vec<usize>,
    /// `breakpoints.len() + 1` slopes, left ray first.
    pub slopes: Vec<i64>,
}

impl Floor {
    pub fn value_at(&self, x: &BigRational) -> BigRational {
        let bp = &self.breakpoints;
        let i = bp.iter().position(|b| &b.0 > x).unwrap_or(bp.len());
        let (anchor, slope) = if i == 0 { (&bp[0], self.slopes[0]) } else { (&bp[i - 1], self.slopes[i]) };
        &anchor.1 + (x - &anchor.0) * rat_int(slope)
    }
}

/// A vertical edge through a black point; `bottom` is `None` for a ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elevator {
    pub weight: u32,
    /// Marking position of its point.
    pub position: usize,
    pub x: BigRational,
    pub top: (u32, BigRational),
    pub bottom: Option<(u32, BigRational)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalCurveSketch {
    pub d: u32,
    pub config: StretchedConfig,
    pub floors: Vec<Floor>,
    pub elevators: Vec<Elevator>,
}

impl TropicalCurveSketch {
    /// Copy with elevator `idx` one heavier; used to exercise the verifier.
    pub fn with_weight_fault(&self, idx: usize) -> Self {
        let mut s = self.clone();
        s.elevators[idx].weight += 1;
        s
    }

    pub fn bounded_elevators(&self) -> usize {
        self.elevators.iter().filter(|e| e.bottom.is_some()).count()
    }
}

/// The curve through `config` whose floor diagram and marking are the given ones.
pub fn reconstruct(dg: &FloorDiagram, marking: &Marking, config: &StretchedConfig) -> Result<TropicalCurveSketch> {
    validate_marking(dg, marking)?;
    if marking.0.len() != config.len() || config.d != dg.d() {
        return Err(Error::Domain(format!(
            "marking has {} points for degree {}, configuration has {} for degree {}",
            marking.0.len(),
            dg.d(),
            config.len(),
            config.d
        )));
    }
    let d = dg.d();
    let mut elevators = Vec::new();
    let mut white = vec![usize::MAX; d as usize + 1];
    // (elevator, floor, enters from above) in marking order per floor
    let mut attached: Vec<Vec<(usize, bool)>> = vec![Vec::new(); d as usize + 1];
    for (k, el) in marking.0.iter().enumerate() {
        let (x, _) = config.for_position(k);
        match *el {
            Element::Floor(v) => white[v as usize] = k,
            Element::Midpoint(e) => {
                attached[e.src as usize].push((elevators.len(), false));
                attached[e.tgt as usize].push((elevators.len(), true));
                elevators.push(Elevator {
                    weight: e.weight,
                    position: k,
                    x: x.clone(),
                    top: (e.src, BigRational::zero()),
                    bottom: Some((e.tgt, BigRational::zero())),
                });
            }
            Element::Sink { floor, weight } => {
                attached[floor as usize].push((elevators.len(), false));
                elevators.push(Elevator { weight, position: k, x: x.clone(), top: (floor, BigRational::zero()), bottom: None });
            }
            Element::Lambda { .. } => return Err(Error::Domain("tangency points are not reconstructed".into())),
        }
    }
    let mut floors = Vec::with_capacity(d as usize);
    for v in 1..=d {
        // Marking order is top-down, which is right to left along the floor.
        let mut slope = 1i64;
        let mut slopes_rl = vec![slope];
        let mut att_rl = Vec::new();
        for &(ei, from_above) in &attached[v as usize] {
            let w = elevators[ei].weight as i64;
            slope += if from_above { w } else { -w };
            slopes_rl.push(slope);
            att_rl.push(ei);
        }
        slopes_rl.reverse();
        att_rl.reverse();
        let xs: Vec<BigRational> = att_rl.iter().map(|&ei| elevators[ei].x.clone()).collect();
        let mut ys = vec![BigRational::zero()];
        for i in 1..xs.len() {
            let y = &ys[i - 1] + (&xs[i] - &xs[i - 1]) * rat_int(slopes_rl[i]);
            ys.push(y);
        }
        let mut floor = Floor {
            vertex: v,
            white: white[v as usize],
            breakpoints: xs.into_iter().zip(ys).collect(),
            attachments: att_rl,
            slopes: slopes_rl,
        };
        let (wx, wy) = config.for_position(floor.white);
        let shift = wy - floor.value_at(wx);
        for b in &mut floor.breakpoints {
            b.1 += &shift;
        }
        for (b, &ei) in floor.breakpoints.iter().zip(&floor.attachments) {
            let el = &mut elevators[ei];
            if el.top.0 == v {
                el.top.1 = b.1.clone();
            } else if let Some(bot) = el.bottom.as_mut() {
                bot.1 = b.1.clone();
            }
        }
        floors.push(floor);
    }
    Ok(TropicalCurveSketch { d, config: config.clone(), floors, elevators })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.ok)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.ok { "ok  " } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Balancing, end slopes, unbounded directions, genus and incidence with
/// the configuration, each reported separately.
pub fn verify_curve(s: &TropicalCurveSketch, d: u32, g: u32) -> VerificationReport {
    let mut checks = Vec::new();
    let mut push = |name, problems: Vec<String>, fine: String| {
        let ok = problems.is_empty();
        checks.push(Check { name, ok, detail: if ok { fine } else { problems.join("; ") } });
    };

    // end slopes and slope bound
    let mut bad = Vec::new();
    for f in &s.floors {
        if f.slopes.first() != Some(&0) || f.slopes.last() != Some(&1) {
            bad.push(format!("floor {} has end slopes {:?}", f.vertex, (f.slopes.first(), f.slopes.last())));
        }
        if let Some(m) = f.slopes.iter().find(|m| m.unsigned_abs() > d as u64) {
            bad.push(format!("floor {} has slope {m}", f.vertex));
        }
    }
    push("floor slopes", bad, format!("all floors run from slope 0 to slope 1 within |s| <= {d}"));

    // balancing, and elevator ends sitting on their floors
    let mut bad = Vec::new();
    let mut vertices = 0;
    for f in &s.floors {
        for (i, (b, &ei)) in f.breakpoints.iter().zip(&f.attachments).enumerate() {
            vertices += 1;
            let el = &s.elevators[ei];
            let up = el.bottom.as_ref().is_some_and(|bt| bt.0 == f.vertex && el.top.0 != f.vertex);
            let end_y = if up { &el.bottom.as_ref().expect("bounded").1 } else { &el.top.1 };
            if el.x != b.0 || end_y != &b.1 {
                bad.push(format!("elevator at position {} misses floor {}", el.position + 1, f.vertex));
            }
            let w = el.weight as i64;
            let sum = f.slopes[i + 1] - f.slopes[i] + if up { w } else { -w };
            if sum != 0 {
                bad.push(format!("floor {} unbalanced by {sum} at position {}", f.vertex, el.position + 1));
            }
        }
    }
    push("balancing", bad, format!("{vertices} trivalent vertices balanced"));

    // unbounded directions, weighted
    let mut census: BTreeMap<(i64, i64), u64> = BTreeMap::new();
    for f in &s.floors {
        *census.entry((-1, -f.slopes[0])).or_default() += 1;
        *census.entry((1, *f.slopes.last().expect("nonempty"))).or_default() += 1;
    }
    for e in s.elevators.iter().filter(|e| e.bottom.is_none()) {
        *census.entry((0, -1)).or_default() += e.weight as u64;
    }
    let want: BTreeMap<(i64, i64), u64> = [((-1, 0), d as u64), ((0, -1), d as u64), ((1, 1), d as u64)].into();
    let bad = if census == want { vec![] } else { vec![format!("ends {census:?}, expected {want:?}")] };
    push("degree", bad, format!("{d} ends in each of the directions (-1,0), (0,-1), (1,1)"));

    // first Betti number of the embedded graph
    let bounded = s.bounded_elevators();
    let segments: usize = s.floors.iter().map(|f| f.breakpoints.len().saturating_sub(1)).sum();
    let mut parent: Vec<usize> = (0..=s.d as usize).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for e in &s.elevators {
        if let Some(b) = &e.bottom {
            let (a, c) = (find(&mut parent, e.top.0 as usize), find(&mut parent, b.0 as usize));
            parent[a] = c;
        }
    }
    let comps = (1..=s.d as usize).filter(|&v| find(&mut parent, v) == v).count();
    let betti = (segments + bounded + comps) as i64 - vertices as i64;
    let bad = if betti == g as i64 && comps == 1 {
        vec![]
    } else {
        vec![format!("{comps} component(s), first Betti number {betti}, expected connected genus {g}")]
    };
    push("genus", bad, format!("connected, first Betti number {g}"));

    // every configuration point on the curve
    let mut bad = Vec::new();
    for f in &s.floors {
        let (x, y) = s.config.for_position(f.white);
        if &f.value_at(x) != y {
            bad.push(format!("point {} is off floor {}", f.white + 1, f.vertex));
        }
    }
    for e in &s.elevators {
        let (x, y) = s.config.for_position(e.position);
        let below_top = y < &e.top.1;
        let above_bottom = e.bottom.as_ref().is_none_or(|b| y > &b.1);
        if &e.x != x || !below_top || !above_bottom {
            bad.push(format!("point {} is off its elevator", e.position + 1));
        }
    }
    let n = s.floors.len() + s.elevators.len();
    let bad = if n == s.config.len() { bad } else { [bad, vec![format!("{n} features for {} points", s.config.len())]].concat() };
    push("incidence", bad, format!("all {} points lie on the curve", s.config.len()));

    VerificationReport { checks }
}

/// Floor diagram and marking read back from the geometry: floors become
/// vertices, bounded elevators edges, and the points are listed top-down.
pub fn extract(s: &TropicalCurveSketch) -> Result<(FloorDiagram, Marking)> {
    let n = s.config.len();
    let mut slots: Vec<Option<Element>> = vec![None; n];
    let mut edges = Vec::new();
    for f in &s.floors {
        slots[f.white] = Some(Element::Floor(f.vertex));
    }
    for e in &s.elevators {
        slots[e.position] = Some(match &e.bottom {
            Some(b) => {
                let edge = Edge::new(e.top.0, b.0, e.weight);
                edges.push(edge);
                Element::Midpoint(edge)
            }
            None => Element::Sink { floor: e.top.0, weight: e.weight },
        });
    }
    let tokens = slots
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Internal("configuration point not on any floor or elevator".into()))?;
    Ok((FloorDiagram::new(s.d, edges)?, Marking(tokens)))
}

/// Per floor, left to right: the marking position of each breakpoint's
/// elevator (or of the floor's own point), with the slopes in between.
pub type Skeleton = Vec<(u32, Vec<(usize, bool)>, Vec<i64>)>;

pub fn skeleton(s: &TropicalCurveSketch) -> Skeleton {
    s.floors
        .iter()
        .map(|f| {
            let (wx, _) = s.config.for_position(f.white);
            let mut items: Vec<(&BigRational, usize, bool)> =
                f.attachments.iter().map(|&ei| (&s.elevators[ei].x, s.elevators[ei].position, false)).collect();
            items.push((wx, f.white, true));
            items.sort();
            (f.vertex, items.into_iter().map(|(_, p, w)| (p, w)).collect(), f.slopes.clone())
        })
        .collect()
}

/// Bounding box `(x_min, x_max, y_min, y_max)` of points and breakpoints.
pub(crate) fn bounds(s: &TropicalCurveSketch) -> (BigRational, BigRational, BigRational, BigRational) {
    let mut xs: Vec<&BigRational> = s.config.points.iter().map(|p| &p.0).collect();
    let mut ys: Vec<&BigRational> = s.config.points.iter().map(|p| &p.1).collect();
    for f in &s.floors {
        xs.extend(f.breakpoints.iter().map(|b| &b.0));
        ys.extend(f.breakpoints.iter().map(|b| &b.1));
    }
    let min = |v: &[&BigRational]| (*v.iter().min().expect("points")).clone();
    let max = |v: &[&BigRational]| (*v.iter().max().expect("points")).clone();
    (min(&xs), max(&xs), min(&ys), max(&ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{enumerate, DiagramQuery};
    use crate::markings::list_markings;
    use crate::model::Partition;
    use std::collections::BTreeSet;

    fn dg(s: &str) -> FloorDiagram {
        s.parse().unwrap()
    }

    #[test]
    fn configurations() {
        let c = StretchedConfig::new(1, 0, 0).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.is_stretched());
        let c = StretchedConfig::new(3, 0, 0).unwrap();
        assert_eq!(c.len(), 8);
        assert_eq!(c.points[0], (rat(1, 100), rat_int(31)));
        assert!(c.is_stretched());
        assert_eq!(StretchedConfig::new(4, 1, 0).unwrap().len(), 12);
        for seed in 1..20 {
            let c = StretchedConfig::new(4, 2, seed).unwrap();
            assert!(c.is_stretched());
            assert_eq!(c, StretchedConfig::new(4, 2, seed).unwrap());
        }
        let mut bad = StretchedConfig::new(3, 0, 0).unwrap();
        bad.points[7].1 = rat_int(218);
        assert!(!bad.is_stretched());
        assert_eq!(StretchedConfig::new(40, 5, 0).unwrap().len(), 124);
        assert!(StretchedConfig::new(40, 5, 0).unwrap().is_stretched());
    }

    #[test]
    fn line() {
        let g = FloorDiagram::point();
        let m: Marking = "F1 S1w1".parse().unwrap();
        let s = reconstruct(&g, &m, &StretchedConfig::new(1, 0, 0).unwrap()).unwrap();
        assert_eq!(s.floors.len(), 1);
        assert_eq!(s.bounded_elevators(), 0);
        assert!(verify_curve(&s, 1, 0).ok());
    }

    #[test]
    fn cubics() {
        let cfg = StretchedConfig::new(3, 0, 0).unwrap();
        let mut skeletons = BTreeSet::new();
        let mut count = 0;
        for g in enumerate(&DiagramQuery::genus(3, 0)).unwrap() {
            for m in list_markings(&g, &Partition::empty(), &Partition::ones(3)).unwrap() {
                let s = reconstruct(&g, &m, &cfg).unwrap();
                let r = verify_curve(&s, 3, 0);
                assert!(r.ok(), "{r}");
                assert_eq!(extract(&s).unwrap(), (g.clone(), m.clone()));
                skeletons.insert(skeleton(&s));
                count += 1;
                let bad = verify_curve(&s.with_weight_fault(0), 3, 0);
                assert!(bad.failures().any(|c| c.name == "balancing"));
            }
        }
        assert_eq!(count, 9);
        assert_eq!(skeletons.len(), 9);
    }

    #[test]
    fn running_example() {
        let g = dg("d=4; edges=(1,2,1);(2,3,1);(2,3,1);(3,4,2)");
        let m: Marking = "F1 M1-2w1 F2 M2-3w1 M2-3w1 F3 M3-4w2 F4 S4w1 S3w1 S4w1 S4w1".parse().unwrap();
        for seed in [0, 7] {
            let s = reconstruct(&g, &m, &StretchedConfig::new(4, 1, seed).unwrap()).unwrap();
            assert_eq!(s.floors.len(), 4);
            assert!(s.elevators.iter().any(|e| e.bottom.is_some() && e.weight == 2));
            let r = verify_curve(&s, 4, 1);
            assert!(r.ok(), "{r}");
            assert!(r.to_string().contains("4 ends in each"));
            assert!(!verify_curve(&s, 4, 0).ok());
            assert_eq!(extract(&s).unwrap(), (g.clone(), m.clone()));
        }
    }

    #[test]
    fn mismatches_are_rejected() {
        let g = dg("d=2; edges=(1,2,1)");
        let m: Marking = "F1 M1-2w1 F2 S2w1 S2w1".parse().unwrap();
        assert!(reconstruct(&g, &m, &StretchedConfig::new(2, 1, 0).unwrap()).is_err());
        let wrong: Marking = "M1-2w1 F1 F2 S2w1 S2w1".parse().unwrap();
        assert!(reconstruct(&g, &wrong, &StretchedConfig::new(2, 0, 0).unwrap()).is_err());
    }
}

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{bounds, TropicalCurveSketch};
use crate::error::Result;
use crate::markings::{validate_marking, Element, Marking};
use crate::model::FloorDiagram;

/// Every size used when drawing, in SVG user units.
#[derive(Clone, Debug, PartialEq)]
pub struct SvgLayout {
    pub spacing: f64,
    pub radius: f64,
    pub margin: f64,
    pub arc_rise: f64,
    pub font_size: f64,
    pub stroke: f64,
    /// Canvas used for tropical sketches.
    pub width: f64,
    pub height: f64,
}

impl Default for SvgLayout {
    fn default() -> Self {
        SvgLayout {
            spacing: 40.0,
            radius: 5.0,
            margin: 24.0,
            arc_rise: 12.0,
            font_size: 11.0,
            stroke: 1.5,
            width: 640.0,
            height: 480.0,
        }
    }
}

fn header(out: &mut String, w: f64, h: f64, l: &SvgLayout) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
    );
    let _ = writeln!(
        out,
        r#"<g fill="none" stroke="black" stroke-width="{:.1}" font-family="sans-serif" font-size="{:.0}">"#,
        l.stroke, l.font_size
    );
}

fn footer(out: &mut String) {
    out.push_str("</g>\n</svg>\n");
}

fn node(out: &mut String, x: f64, y: f64, r: f64, filled: bool) {
    let fill = if filled { "black" } else { "white" };
    let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="{fill}"/>"#);
}

fn label(out: &mut String, x: f64, y: f64, text: &str) {
    let _ = writeln!(out, r#"<text x="{x:.2}" y="{y:.2}" fill="black" stroke="none" text-anchor="middle">{text}</text>"#);
}

/// Edge between row positions `a < b`; `lift` separates parallel copies.
fn arc(out: &mut String, l: &SvgLayout, base: f64, a: usize, b: usize, lift: usize, weight: u32) {
    let x0 = l.margin + a as f64 * l.spacing;
    let x1 = l.margin + b as f64 * l.spacing;
    let mid = (x0 + x1) / 2.0;
    let rise = l.arc_rise * ((b - a - 1) as f64 + lift as f64);
    if rise == 0.0 {
        let _ = writeln!(out, r#"<path d="M {:.2} {base:.2} L {:.2} {base:.2}"/>"#, x0 + l.radius, x1 - l.radius);
    } else {
        let _ = writeln!(out, r#"<path d="M {x0:.2} {:.2} Q {mid:.2} {:.2} {x1:.2} {:.2}"/>"#, base - l.radius, base - 2.0 * rise, base - l.radius);
    }
    if weight > 1 {
        label(out, mid, base - rise - l.radius - 2.0, &weight.to_string());
    }
}

fn row_height(l: &SvgLayout, max_span: usize) -> (f64, f64) {
    let base = l.margin + l.arc_rise * (max_span as f64 + 1.0) + l.font_size;
    (base, base + l.margin)
}

pub fn render_diagram(dg: &FloorDiagram, l: &SvgLayout) -> String {
    let mut seen: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    let mut arcs = Vec::new();
    for e in dg.edges() {
        let k = seen.entry((e.src, e.tgt)).or_default();
        // a lone unit-span edge is drawn straight
        arcs.push((e.src as usize - 1, e.tgt as usize - 1, *k, e.weight));
        *k += 1;
    }
    let max_span = arcs.iter().map(|a| a.1 - a.0 + a.2).max().unwrap_or(0);
    let (base, h) = row_height(l, max_span);
    let w = 2.0 * l.margin + (dg.d() as f64 - 1.0) * l.spacing;
    let mut out = String::new();
    header(&mut out, w, h, l);
    for (a, b, k, wt) in arcs {
        arc(&mut out, l, base, a, b, k, wt);
    }
    for v in 0..dg.d() as usize {
        node(&mut out, l.margin + v as f64 * l.spacing, base, l.radius, false);
    }
    footer(&mut out);
    out
}

/// Marked diagram: one node per marking position, floors hollow.
pub fn render_marked(dg: &FloorDiagram, m: &Marking, l: &SvgLayout) -> Result<String> {
    validate_marking(dg, m)?;
    let floor_pos: BTreeMap<u32, usize> =
        m.0.iter().enumerate().filter_map(|(k, e)| if let Element::Floor(v) = e { Some((*v, k)) } else { None }).collect();
    let mut arcs = Vec::new();
    for (k, el) in m.0.iter().enumerate() {
        match el {
            Element::Midpoint(e) => {
                arcs.push((floor_pos[&e.src], k, e.weight));
                arcs.push((k, floor_pos[&e.tgt], e.weight));
            }
            Element::Sink { floor, weight } => arcs.push((floor_pos[floor], k, *weight)),
            Element::Lambda { .. } | Element::Floor(_) => {}
        }
    }
    let max_span = arcs.iter().map(|a| a.1 - a.0).max().unwrap_or(0);
    let (base, h) = row_height(l, max_span);
    let w = 2.0 * l.margin + (m.0.len().max(1) as f64 - 1.0) * l.spacing;
    let mut out = String::new();
    header(&mut out, w, h, l);
    for (a, b, wt) in arcs {
        arc(&mut out, l, base, a, b, 0, wt);
    }
    for (k, el) in m.0.iter().enumerate() {
        node(&mut out, l.margin + k as f64 * l.spacing, base, l.radius, !matches!(el, Element::Floor(_)));
    }
    footer(&mut out);
    Ok(out)
}

pub fn render_sketch(s: &TropicalCurveSketch, l: &SvgLayout) -> String {
    let (x0, x1, y0, y1) = bounds(s);
    let f = |q: &BigRational| q.to_f64().expect("finite");
    let (x0, x1, y0, y1) = (f(&x0), f(&x1), f(&y0), f(&y1));
    let pad_x = (x1 - x0).max(1e-9) * 0.1;
    let pad_y = (y1 - y0).max(1e-9) * 0.1;
    let (lo_x, hi_x, lo_y, hi_y) = (x0 - pad_x, x1 + pad_x, y0 - pad_y, y1 + pad_y);
    let sx = |x: f64| l.margin + (x - lo_x) / (hi_x - lo_x) * (l.width - 2.0 * l.margin);
    let sy = |y: f64| l.height - l.margin - (y - lo_y) / (hi_y - lo_y) * (l.height - 2.0 * l.margin);
    let mut out = String::new();
    header(&mut out, l.width, l.height, l);
    let left = BigRational::from_float(lo_x).expect("finite");
    let right = BigRational::from_float(hi_x).expect("finite");
    for fl in &s.floors {
        let mut pts = vec![(lo_x, f(&fl.value_at(&left)))];
        pts.extend(fl.breakpoints.iter().map(|b| (f(&b.0), f(&b.1))));
        pts.push((hi_x, f(&fl.value_at(&right))));
        let d: Vec<String> = pts.iter().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
        let _ = writeln!(out, r#"<polyline points="{}"/>"#, d.join(" "));
    }
    for e in &s.elevators {
        let x = sx(f(&e.x));
        let top = sy(f(&e.top.1));
        let bottom = e.bottom.as_ref().map_or(l.height, |b| sy(f(&b.1)));
        let width = l.stroke * e.weight as f64;
        let _ = writeln!(out, r#"<path d="M {x:.2} {top:.2} L {x:.2} {bottom:.2}" stroke-width="{width:.1}"/>"#);
        if e.weight > 1 {
            label(&mut out, x + l.font_size, (top + bottom.min(l.height - l.margin)) / 2.0, &e.weight.to_string());
        }
    }
    for fl in &s.floors {
        let (x, y) = s.config.for_position(fl.white);
        node(&mut out, sx(f(x)), sy(f(y)), l.radius, false);
    }
    for e in &s.elevators {
        let (x, y) = s.config.for_position(e.position);
        node(&mut out, sx(f(x)), sy(f(y)), l.radius, true);
    }
    footer(&mut out);
    out
}

pub fn write_svg(path: &Path, svg: &str) -> Result<()> {
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tropical::{reconstruct, StretchedConfig};

    const EXAMPLE: &str = "d=4; edges=(1,2,1);(2,3,1);(2,3,1);(3,4,2)";
    const MARKING: &str = "F1 M1-2w1 F2 M2-3w1 M2-3w1 F3 M3-4w2 F4 S4w1 S3w1 S4w1 S4w1";

    #[test]
    fn diagram_picture() {
        let dg: FloorDiagram = EXAMPLE.parse().unwrap();
        let svg = render_diagram(&dg, &SvgLayout::default());
        assert_eq!(svg.matches("<circle").count(), 4);
        assert_eq!(svg.matches(">2</text>").count(), 1);
        assert_eq!(svg, render_diagram(&dg, &SvgLayout::default()));
    }

    #[test]
    fn marked_picture() {
        let dg: FloorDiagram = EXAMPLE.parse().unwrap();
        let m: Marking = MARKING.parse().unwrap();
        let svg = render_marked(&dg, &m, &SvgLayout::default()).unwrap();
        assert!(render_marked(&dg, &"F1".parse().unwrap(), &SvgLayout::default()).is_err());
        assert_eq!(svg.matches("<circle").count(), 12);
        assert_eq!(svg.matches(r#"fill="white""#).count(), 4);
    }

    #[test]
    fn sketch_picture() {
        let dg: FloorDiagram = EXAMPLE.parse().unwrap();
        let m: Marking = MARKING.parse().unwrap();
        let s = reconstruct(&dg, &m, &StretchedConfig::new(4, 1, 0).unwrap()).unwrap();
        let svg = render_sketch(&s, &SvgLayout::default());
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert_eq!(svg.matches("<circle").count(), 12);
        assert_eq!(svg, render_sketch(&s, &SvgLayout::default()));
        let dir = tempfile::tempdir().unwrap();
        write_svg(&dir.path().join("a.svg"), &svg).unwrap();
        assert!(write_svg(&dir.path().join("missing/a.svg"), &svg).is_err());
    }
}

//! Published reference values, shipped as CSV, and the recomputation that
//! checks them.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::engine::Engine;
use crate::enumeration::DiagramQuery;
use crate::error::{Error, Result};
use crate::invariants::{gw, relative_gw, severi};
use crate::markings::{count_markings, count_relative_markings};
use crate::model::{FloorDiagram, Partition};
use crate::nodepoly::{RatPolynomial, Template};
use crate::sequences::{diagram_to_tree, max_tangency_sequence, LabeledTree};

const GW: &str = include_str!("../data/gw.csv");
const SEVERI: &str = include_str!("../data/severi.csv");
const RELATIVE: &str = include_str!("../data/relative.csv");
const RELATIVE_CELLS: &str = include_str!("../data/relative_cells.csv");
const MAX_TANGENCY: &str = include_str!("../data/max_tangency.csv");
const CATALOG: &str = include_str!("../data/catalog.csv");
const TEMPLATES: &str = include_str!("../data/templates.csv");

fn load<T: DeserializeOwned>(text: &str) -> Vec<T> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .expect("bundled table parses")
}

fn big<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

fn parsed<'de, D, T>(d: D) -> std::result::Result<T, D::Error>
where
    D: serde::Deserializer<'de>,
    T: FromStr,
    T::Err: fmt::Display,
{
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

#[derive(Clone, Debug, Deserialize)]
pub struct GwRow {
    pub d: u32,
    pub g: u32,
    #[serde(deserialize_with = "big")]
    pub value: BigUint,
}

#[derive(Clone, Debug, Deserialize)]
pub struct SeveriRow {
    pub d: u32,
    pub delta: u32,
    #[serde(deserialize_with = "big")]
    pub value: BigUint,
    /// Printed in italics: the count includes reducible curves.
    pub reducible: bool,
}

#[derive(Clone, Debug, Deserialize)]
pub struct RelativeRow {
    pub d: u32,
    pub g: u32,
    #[serde(deserialize_with = "parsed")]
    pub lambda: Partition,
    #[serde(deserialize_with = "parsed")]
    pub rho: Partition,
    #[serde(deserialize_with = "big")]
    pub value: BigUint,
}

/// One cell `μ_ρ · ν_{λ,ρ}` of the degree-3 relative figure.
#[derive(Clone, Debug, Deserialize)]
pub struct RelativeCell {
    #[serde(deserialize_with = "parsed")]
    pub diagram: FloorDiagram,
    #[serde(deserialize_with = "parsed")]
    pub lambda: Partition,
    #[serde(deserialize_with = "parsed")]
    pub rho: Partition,
    #[serde(deserialize_with = "big")]
    pub mu_rho: BigUint,
    #[serde(deserialize_with = "big")]
    pub nu: BigUint,
}

#[derive(Clone, Debug, Deserialize)]
pub struct TangencyRow {
    pub d: u32,
    #[serde(deserialize_with = "big")]
    pub fixed: BigUint,
    #[serde(deserialize_with = "big")]
    pub free: BigUint,
}

#[derive(Clone, Debug, Deserialize)]
pub struct CatalogRow {
    pub d: u32,
    pub g: u32,
    #[serde(deserialize_with = "parsed")]
    pub diagram: FloorDiagram,
    /// Companion tree, listed for genus 0 only.
    pub tree: String,
    #[serde(deserialize_with = "big")]
    pub mu: BigUint,
    #[serde(deserialize_with = "big")]
    pub nu: BigUint,
}

impl CatalogRow {
    pub fn tree(&self) -> Option<LabeledTree> {
        (!self.tree.is_empty()).then(|| self.tree.parse().expect("bundled tree parses"))
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct TemplateRow {
    pub edges: String,
    pub delta: u32,
    pub length: u32,
    pub mu: u32,
    pub epsilon: u32,
    pub kappa: String,
    pub k_min: i64,
    pub p_coeffs: String,
    pub p_den: i64,
}

impl TemplateRow {
    pub fn template(&self) -> Template {
        let edges = self
            .edges
            .split(';')
            .map(|t| {
                let n: Vec<u32> = t.trim_matches(|c| c == '(' || c == ')').split(',').map(|x| x.parse().expect("number")).collect();
                (n[0], n[1], n[2])
            })
            .collect();
        Template::new(self.length, edges).expect("bundled template is valid")
    }

    pub fn kappa(&self) -> Vec<u32> {
        self.kappa.split_whitespace().map(|x| x.parse().expect("number")).collect()
    }

    pub fn polynomial(&self) -> RatPolynomial {
        let c: Vec<i64> = self.p_coeffs.split_whitespace().map(|x| x.parse().expect("number")).collect();
        RatPolynomial::from_ints(&c).scale(&BigRational::new(1.into(), self.p_den.into()))
    }
}

pub fn gw_table() -> Vec<GwRow> {
    load(GW)
}

pub fn severi_table() -> Vec<SeveriRow> {
    load(SEVERI)
}

pub fn relative_table() -> Vec<RelativeRow> {
    load(RELATIVE)
}

pub fn relative_cells() -> Vec<RelativeCell> {
    load(RELATIVE_CELLS)
}

pub fn max_tangency_table() -> Vec<TangencyRow> {
    load(MAX_TANGENCY)
}

pub fn catalog_table() -> Vec<CatalogRow> {
    load(CATALOG)
}

pub fn template_table() -> Vec<TemplateRow> {
    load(TEMPLATES)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Gw,
    Severi,
    Relative,
    Tangency,
    Catalog,
    Templates,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Gw, Suite::Severi, Suite::Relative, Suite::Tangency, Suite::Catalog, Suite::Templates];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Gw => "gw",
            Suite::Severi => "severi",
            Suite::Relative => "relative",
            Suite::Tangency => "tangency",
            Suite::Catalog => "catalog",
            Suite::Templates => "templates",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}; expected one of gw, severi, relative, tangency, catalog, templates")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowCheck {
    pub label: String,
    pub expected: String,
    pub actual: String,
}

impl RowCheck {
    pub fn ok(&self) -> bool {
        self.expected == self.actual
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub rows: Vec<RowCheck>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.rows.iter().all(RowCheck::ok)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &RowCheck> {
        self.rows.iter().filter(|r| !r.ok())
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bad: Vec<&RowCheck> = self.mismatches().collect();
        if bad.is_empty() {
            return writeln!(f, "{}: OK ({} values)", self.suite, self.rows.len());
        }
        writeln!(f, "{}: {} of {} values differ", self.suite, bad.len(), self.rows.len())?;
        for r in bad {
            writeln!(f, "  {}: expected {}, got {}", r.label, r.expected, r.actual)?;
        }
        Ok(())
    }
}

fn row(label: String, expected: impl fmt::Display, actual: impl fmt::Display) -> RowCheck {
    RowCheck { label, expected: expected.to_string(), actual: actual.to_string() }
}

/// Recomputes one table, restricted to degrees `<= max_d` when given.
pub fn verify_suite(engine: &Engine, suite: Suite, max_d: Option<u32>) -> Result<SuiteReport> {
    let keep = |d: u32| max_d.is_none_or(|m| d <= m);
    let mut rows = Vec::new();
    match suite {
        Suite::Gw => {
            for r in gw_table().into_iter().filter(|r| keep(r.d)) {
                rows.push(row(format!("N_{{{},{}}}", r.d, r.g), &r.value, gw(engine, r.d, r.g)?));
            }
        }
        Suite::Severi => {
            for r in severi_table().into_iter().filter(|r| keep(r.d)) {
                rows.push(row(format!("N^{{{},{}}}", r.d, r.delta), &r.value, severi(engine, r.d, r.delta)?));
            }
        }
        Suite::Relative => {
            for c in relative_cells().into_iter().filter(|c| keep(c.diagram.d())) {
                let rho_prod: BigUint = c.rho.parts().iter().map(|&p| BigUint::from(p)).product();
                let label = format!("{} λ={} ρ={}", c.diagram.to_text(), c.lambda, c.rho);
                let mu = c.diagram.multiplicity() * rho_prod;
                let nu = count_relative_markings(&c.diagram, &c.lambda, &c.rho)?;
                rows.push(row(label, format!("{}·{}", c.mu_rho, c.nu), format!("{mu}·{nu}")));
            }
            for r in relative_table().into_iter().filter(|r| keep(r.d)) {
                let label = format!("N_{{{},{}}}({},{})", r.d, r.g, r.lambda, r.rho);
                rows.push(row(label, &r.value, relative_gw(engine, r.d, r.g, &r.lambda, &r.rho)?));
            }
        }
        Suite::Tangency => {
            let rows_in: Vec<TangencyRow> = max_tangency_table().into_iter().filter(|r| keep(r.d)).collect();
            let z = max_tangency_sequence(rows_in.iter().map(|r| r.d).max().unwrap_or(1));
            for r in rows_in {
                let zd = &z[r.d as usize - 1];
                rows.push(row(format!("z({})", r.d), &r.fixed, zd));
                rows.push(row(format!("{}·z({})", r.d, r.d), &r.free, zd * r.d));
            }
        }
        Suite::Catalog => {
            let table: Vec<CatalogRow> = catalog_table().into_iter().filter(|r| keep(r.d)).collect();
            for r in &table {
                let nu = count_markings(&r.diagram)?;
                rows.push(row(r.diagram.to_text(), format!("μ={} ν={}", r.mu, r.nu), format!("μ={} ν={}", r.diagram.multiplicity(), nu)));
                if let Some(t) = r.tree() {
                    rows.push(row(format!("tree of {}", r.diagram.to_text()), &t, diagram_to_tree(&r.diagram)?));
                }
            }
            let mut keys: Vec<(u32, u32)> = table.iter().map(|r| (r.d, r.g)).collect();
            keys.dedup();
            for (d, g) in keys {
                let listed = table.iter().filter(|r| (r.d, r.g) == (d, g)).count();
                let found = engine.diagrams(&DiagramQuery::genus(d, g))?.len();
                rows.push(row(format!("diagrams with d={d} g={g}"), listed, found));
            }
        }
        Suite::Templates => {
            for r in template_table() {
                let t = r.template();
                let s = t.stats();
                let expected = format!(
                    "δ={} ℓ={} μ={} ε={} κ={:?} k_min={} P={}",
                    r.delta,
                    r.length,
                    r.mu,
                    r.epsilon,
                    r.kappa(),
                    r.k_min,
                    r.polynomial().format_in("k")
                );
                let actual = format!(
                    "δ={} ℓ={} μ={} ε={} κ={:?} k_min={} P={}",
                    t.cogenus(),
                    s.length,
                    s.mu,
                    s.epsilon,
                    s.kappa,
                    s.k_min,
                    t.extension_polynomial().format_in("k")
                );
                rows.push(row(t.to_string(), expected, actual));
            }
            for delta in 1..=2 {
                let listed = template_table().iter().filter(|r| r.delta == delta).count();
                rows.push(row(format!("templates with δ={delta}"), listed, crate::nodepoly::enumerate_templates(delta).len()));
            }
        }
    }
    Ok(SuiteReport { suite, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_load() {
        assert_eq!(gw_table().len(), 42);
        assert_eq!(severi_table().iter().filter(|r| r.reducible).count(), 12);
        assert_eq!(relative_cells().len(), 21);
        assert_eq!(max_tangency_table().len(), 16);
        assert_eq!(catalog_table().len(), 41);
        assert_eq!(template_table().len(), 9);
    }

    #[test]
    fn small_suites_pass() {
        let engine = Engine::new();
        for suite in [Suite::Relative, Suite::Tangency, Suite::Catalog, Suite::Templates] {
            let r = verify_suite(&engine, suite, None).unwrap();
            assert!(r.ok(), "{r}");
        }
        let r = verify_suite(&engine, Suite::Gw, Some(4)).unwrap();
        assert!(r.ok(), "{r}");
        assert_eq!(r.rows.len(), 28);
        assert!(verify_suite(&engine, Suite::Severi, Some(4)).unwrap().ok());
    }

    #[test]
    fn suite_names() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}

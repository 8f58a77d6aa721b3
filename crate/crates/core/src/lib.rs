//! Exact enumeration of labeled floor diagrams and the plane-curve
//! invariants they compute: Gromov–Witten numbers, Severi degrees,
//! relative invariants, Welschinger invariants and node polynomials.
//!
//! Everything is exact. Counts are [`num_bigint::BigUint`], polynomial
//! coefficients and tropical coordinates are [`num_rational::BigRational`].

pub mod arith;
pub mod engine;
pub mod enumeration;
pub mod error;
pub mod invariants;
pub mod markings;
pub mod model;
pub mod nodepoly;
pub mod sequences;
pub mod tables;
pub mod tropical;

pub use engine::Engine;
pub use error::{Error, Result};
pub use model::{Classification, Edge, FloorDiagram, Partition};

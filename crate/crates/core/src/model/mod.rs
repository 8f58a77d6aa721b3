//! Partitions and labeled floor diagrams.

mod diagram;
mod partition;

pub use diagram::{max_genus, Classification, ComponentInfo, Edge, FloorDiagram};
pub use partition::Partition;

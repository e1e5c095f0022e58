//! Finite instances of extremal hypergraph theory: Turán numbers of blowup-invariant
//! families, Zykov symmetrization, hypergraph Lagrangians and stability checks.

pub mod constructions;
pub mod error;
pub mod graph;
pub mod io;
pub mod lagrangian;
pub mod morphism;
pub mod rational;
pub mod stability;
pub mod symmetrizer;

pub use error::{Error, Result};
pub use graph::{DegreeProfile, RGraph, Subgraph, VertexPartition};
pub use morphism::FamilySpec;

//! Weighted clique complexes over graphs, their Gauss–Bonnet and Hodge
//! operators, cut-off diagnostics for essential self-adjointness, and
//! spectral tools.

pub mod chi;
pub mod complex;
pub mod divergence;
pub mod eigen;
pub mod error;
pub mod generators;
pub mod io;
pub mod linalg;
pub mod operators;
pub mod spectral;

pub use complex::{
    build_clique_complex, canonical_sign, Coface, Sign, Simplex, VertexId, WeightRule, WeightedComplex,
    WeightedGraph,
};
pub use error::{HodgeError, Result};
pub use operators::{
    adjointness_check, assemble_block, coboundary_apply, codifferential_apply, gauss_bonnet_apply, inner,
    Cochain, OperatorBlock, OperatorKind,
};

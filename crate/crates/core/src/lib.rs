//! Entanglement criteria built from operator moments, with the tensor-product
//! machinery and light-matter models needed to evaluate them.

pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod models;
pub mod optics;
pub mod witness;

pub use error::{Error, Result};
pub use hilbert::{
    embed, embed_multi, evolve, evolve_passive, DensityMatrix, Factor, FactorKind, LabeledOperator, Propagator,
    SpaceSignature, State, StateVector,
};
pub use linalg::{ComplexMatrix, ComplexVector, C64};

/// Library version, recorded in experiment sidecars.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

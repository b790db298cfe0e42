//! Exact-arithmetic computations on totally nonnegative Grassmannians,
//! positroid cells and amplituhedra.

pub mod amplituhedron;
pub mod campaign;
pub mod embeddings;
pub mod equivalence;
pub mod fiber;
pub mod linalg;
pub mod sampling;
pub mod tnn;

pub use linalg::{IndexSubset, LinalgError, Rational, RationalMatrix};

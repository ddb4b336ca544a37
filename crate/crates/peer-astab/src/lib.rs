//! Construction and exact A-stability certification of peer two-step
//! methods.
//!
//! The library certifies A-stability of stiffly accurate s-stage peer
//! methods of order s-1 by exhibiting a pair of weight matrices whose
//! associated 2s x 2s test matrix is positive semidefinite - a condition
//! checked bit-exactly over the rationals or a real quadratic field with a
//! pivoted LDL^T decomposition. On top of the certification core sit:
//!
//! - assembly of order-(s-1) methods from nodes and a coefficient matrix;
//! - the operator calculus connecting the two weight matrices, with exact
//!   kernel bases and pre-images;
//! - an explicit constructor producing certified A-stable methods for any
//!   stage count from a positive definite seed;
//! - reconstruction of diagonally implicit methods from compact seeds via a
//!   triangular canonical form;
//! - design conditions for parallel (diagonal-coefficient) methods;
//! - a floating cross-validation layer (spectral-radius sampling, weighted
//!   norm bounds, numerical radius, zero stability).
//!
//! Start with the runnable examples: `cargo run --example certify_parallel3`.

pub mod catalog;
pub mod cli;
pub mod criterion;
pub mod designer;
pub mod error;
pub mod linalg;
pub mod maps;
pub mod peer;
pub mod scalar;
pub mod validate;

pub use error::{Error, Result};
pub use linalg::{Mat, PsdCertificate, Verdict};
pub use peer::{NodeSet, PeerMethod, Representation, WeightPair};
pub use scalar::{FieldSpec, QuadExt, Rational, Scalar};

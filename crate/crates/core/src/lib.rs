//! Dirichlet eigenvalues of the weighted divergence-form operator
//! div(T grad u) - <grad eta, T grad u> on immersed chart domains, together
//! with the universal eigenvalue inequalities evaluated on the result.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod bounds;
pub mod eigensolve;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod mesh;
pub mod quadrature;
pub mod report;
pub mod sparse;

pub use error::{Result, SpectraError};

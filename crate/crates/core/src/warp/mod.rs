//! Ambient warped-product models, fiber grids, sampled fields and the
//! finite-difference calculus built on them.

mod calculus;
mod conformal;
mod field;
mod grid;
mod model;

pub use calculus::{flat_laplacian, gradient, laplace_beltrami_oracle, partial_derivative};
pub use conformal::{conformality_residual, conformality_residual_of};
pub use field::{ScalarField, SymTensorField, TensorField, VectorField};
pub use grid::{Boundary, Grid};
pub use model::{Christoffel, WarpFamily, WarpKind, WarpedModel};

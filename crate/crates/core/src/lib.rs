//! Numerical geometry of vertical graphs in semi-Riemannian warped products
//! `ε I ×_f ℝⁿ`, with emphasis on the Hyperbolic space `ℝ ×_{e^t} ℝⁿ` and the
//! Steady State space `−ℝ ×_{e^t} ℝⁿ`.
//!
//! The crate is split along the lines of the computation:
//!
//! * [`warp`] holds the ambient models, uniform fiber grids, sampled fields,
//!   finite-difference calculus and the discrete Laplace–Beltrami oracle.
//! * [`geometry`] turns a height function `u` into the full pointwise
//!   geometry of the graph `x ↦ (u(x), x)` and evaluates the closed-form
//!   Laplacian identities on it.
//! * [`solver`] produces constant mean curvature graphs by damped Newton.
//! * [`audit`] checks the hypotheses and differential inequalities of the
//!   Bernstein-type rigidity statements on a computed geometry.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
// `!(x > y)` comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod audit;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod solver;
pub mod tolerance;
pub mod warp;

pub use error::{Error, Result};
pub use geometry::{build_bundle, GeometryBundle, GraphSurface, Orientation};
pub use tolerance::GridTolerance;
pub use warp::{Boundary, Grid, ScalarField, SymTensorField, VectorField, WarpFamily, WarpKind, WarpedModel};

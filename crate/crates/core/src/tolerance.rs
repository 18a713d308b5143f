//! Grid-scaled tolerances `C·Δx²`.

use crate::warp::Grid;

/// Relative tolerance for identities that hold exactly in floating point
/// up to rounding.
pub const MACHINE_TOL: f64 = 1e-12;

/// `C·Δx²` with `Δx` the coarsest spacing of a grid.
///
/// The default constant comes from the convergence studies in the test
/// suites: the height Laplacian discrepancy stays below `0.4·Δx²` on periodic
/// graphs of amplitude ≤ 0.05 and below `2·Δx²` on exact CMC caps over the
/// unit square. The support function Laplacian differentiates the graph once
/// more and reaches `10·Δx²` on the same periodic graphs, so its oracle
/// comparisons use [`GridTolerance::support`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridTolerance {
    pub constant: f64,
    pub spacing: f64,
}

impl GridTolerance {
    pub const DEFAULT_CONSTANT: f64 = 4.0;
    pub const SUPPORT_CONSTANT: f64 = 20.0;

    pub fn for_grid(grid: &Grid) -> Self {
        Self { constant: Self::DEFAULT_CONSTANT, spacing: grid.max_spacing() }
    }

    pub fn with_constant(self, constant: f64) -> Self {
        Self { constant, ..self }
    }

    /// `tol_grid`.
    pub fn value(&self) -> f64 {
        self.constant * self.spacing * self.spacing
    }

    /// Oracle tolerance for the support function Laplacian.
    pub fn support(&self) -> f64 {
        Self::SUPPORT_CONSTANT * self.spacing * self.spacing
    }

    /// Admission tolerance for "H is constant": `10·tol_grid`.
    pub fn cmc(&self) -> f64 {
        10.0 * self.value()
    }
}

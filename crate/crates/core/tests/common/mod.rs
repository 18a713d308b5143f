//! Shared fixtures: exact CMC graphs from the half-space pictures of the two
//! models.
//!
//! With `y = e^{−t}` the Hyperbolic metric becomes `(dy² + |dx|²)/y²` and the
//! Steady State metric `(|dx|² − dy²)/y²`. Euclidean spheres (resp.
//! Minkowski hyperboloids) of radius `ρ` centred at depth `y = −d` are
//! totally umbilic with constant mean curvature `d/ρ`.

#![allow(dead_code)]

use std::sync::Arc;

use warpgeom_core::{Grid, ScalarField, WarpedModel};

pub struct Cap {
    pub model: WarpedModel,
    pub rho: f64,
    pub depth: f64,
    pub centre: [f64; 2],
}

impl Cap {
    /// `H = 0.9` sphere cap in `ℍ³` over the unit square.
    pub fn hyperbolic() -> Self {
        Self { model: WarpedModel::hyperbolic(2), rho: 4.0, depth: 3.6, centre: [0.5, 0.5] }
    }

    /// `H = 1.2` hyperboloid cap in `ℋ³` over the unit square.
    pub fn steady_state() -> Self {
        Self { model: WarpedModel::steady_state(2), rho: 5.0, depth: 6.0, centre: [-3.0, -3.0] }
    }

    pub fn mean_curvature(&self) -> f64 {
        self.depth / self.rho
    }

    pub fn height(&self, grid: &Arc<Grid>) -> ScalarField {
        let s = if self.model.is_lorentzian() { 1.0 } else { -1.0 };
        ScalarField::from_fn(grid.clone(), |x| {
            let r2 = (x[0] - self.centre[0]).powi(2) + (x[1] - self.centre[1]).powi(2);
            -(-self.depth + (self.rho * self.rho + s * r2).sqrt()).ln()
        })
        .unwrap()
    }
}

pub fn unit_square(extent: usize) -> Arc<Grid> {
    Arc::new(Grid::dirichlet_box(2, extent, 1.0).unwrap())
}

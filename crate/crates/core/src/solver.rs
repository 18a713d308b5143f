//! Constant mean curvature graphs: the Dirichlet problem `H[u] = H₀` solved
//! by damped Newton, plus closed-form slices and perturbed fixtures.
//!
//! The Jacobian of `u ↦ H[u]` is never derived by hand. Central
//! finite-difference directional derivatives along `3ⁿ` colour classes of
//! interior points recover every entry of the (3×…×3 stencil) sparse
//! Jacobian, which is then factored as a band matrix.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{mean_curvature, GraphSurface, Orientation};
use crate::linalg::BandMatrix;
use crate::warp::{Boundary, Grid, ScalarField, WarpedModel};

/// Smallest damping factor tried by the line search (`2⁻¹⁰`).
pub const DAMPING_FLOOR: f64 = 1.0 / 1024.0;

/// Step for the finite-difference Jacobian columns.
const JACOBIAN_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub h_target: f64,
    /// Only the samples on the grid boundary are read.
    pub boundary_data: ScalarField,
    pub max_iters: usize,
    /// Sup-norm bound on `H[u] − H₀` over interior points.
    pub newton_tol: f64,
    /// Initial damping factor in `(0, 1]`.
    pub damping: f64,
    /// Defaults to [`Orientation::canonical`].
    pub orientation: Option<Orientation>,
}

impl SolveConfig {
    pub fn new(h_target: f64, boundary_data: ScalarField) -> Self {
        Self { h_target, boundary_data, max_iters: 25, newton_tol: 1e-11, damping: 1.0, orientation: None }
    }

    fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.newton_tol > 0.0) {
            return Err(Error::InvalidConfig("newton_tol must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidConfig("damping must lie in (0, 1]".into()));
        }
        if !self.h_target.is_finite() {
            return Err(Error::InvalidConfig("H target must be finite".into()));
        }
        if grid.boundary() != Boundary::Dirichlet {
            return Err(Error::InvalidConfig("the CMC solver needs a Dirichlet grid".into()));
        }
        if !self.boundary_data.grid().same_shape(grid) {
            return Err(Error::InvalidConfig("boundary data lives on a different grid".into()));
        }
        Ok(())
    }
}

/// Iteration record of a solve.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_residual: f64,
    /// Residual before the first step and after every accepted step.
    pub residual_history: Vec<f64>,
    /// Damping factor of every accepted step.
    pub damping_history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub surface: GraphSurface,
    pub report: SolveReport,
}

/// Numbering of the interior points of a Dirichlet grid.
struct Interior {
    /// Flat grid index of each unknown.
    points: Vec<usize>,
    /// Unknown number of each grid point, `usize::MAX` on the boundary.
    slot: Vec<usize>,
    bandwidth: usize,
}

impl Interior {
    fn new(grid: &Grid) -> Self {
        let points: Vec<usize> = (0..grid.len()).filter(|&p| grid.is_interior(p, 1)).collect();
        let mut slot = vec![usize::MAX; grid.len()];
        for (k, &p) in points.iter().enumerate() {
            slot[p] = k;
        }
        // Largest unknown-number offset reached by a ±1 step on every axis.
        let mut stride = 1;
        let mut bandwidth = 0;
        for a in (0..grid.dim()).rev() {
            bandwidth += stride;
            stride *= grid.extents()[a] - 2;
        }
        Self { points, slot, bandwidth }
    }

    fn len(&self) -> usize {
        self.points.len()
    }
}

/// All offsets in `{−1, 0, 1}ⁿ`.
fn stencil_offsets(dim: usize) -> Vec<Vec<isize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|o| {
                [-1isize, 0, 1].into_iter().map(move |d| {
                    let mut v = o.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
    }
    out
}

fn offset_point(grid: &Grid, p: usize, offset: &[isize]) -> Option<usize> {
    let mut q = p;
    for (a, &d) in offset.iter().enumerate() {
        if d != 0 {
            q = grid.neighbor(q, a, d)?;
        }
    }
    Some(q)
}

fn colour(grid: &Grid, p: usize) -> usize {
    (0..grid.dim()).fold(0, |c, a| 3 * c + grid.axis_index(p, a) % 3)
}

/// Solution of the flat Laplace equation with the boundary samples of
/// `boundary` as Dirichlet data.
pub fn harmonic_extension(boundary: &ScalarField) -> Result<ScalarField> {
    let grid = boundary.grid();
    if grid.boundary() != Boundary::Dirichlet {
        return Err(Error::InvalidConfig("harmonic extension needs a Dirichlet grid".into()));
    }
    let interior = Interior::new(grid);
    let mut matrix = BandMatrix::zeros(interior.len(), interior.bandwidth, interior.bandwidth);
    let mut rhs = vec![0.0; interior.len()];
    for (row, &p) in interior.points.iter().enumerate() {
        for a in 0..grid.dim() {
            let w = 1.0 / (grid.spacing()[a] * grid.spacing()[a]);
            matrix.add(row, row, -2.0 * w);
            for d in [-1, 1] {
                let q = grid.neighbor(p, a, d).expect("interior point has both neighbours");
                match interior.slot[q] {
                    usize::MAX => rhs[row] -= w * boundary.get(q),
                    col => matrix.add(row, col, w),
                }
            }
        }
    }
    let x = matrix.solve(&rhs)?;
    let mut values = boundary.values().to_vec();
    for (k, &p) in interior.points.iter().enumerate() {
        values[p] = x[k];
    }
    ScalarField::new(grid.clone(), values)
}

/// Sup-norm of `H[u] − H₀` over interior points, or `None` if `u` is not a
/// valid graph.
fn residual(model: &WarpedModel, u: &ScalarField, cfg: &SolveConfig, orientation: Orientation, interior: &Interior)
    -> Result<Option<(Vec<f64>, f64)>> {
    let h = match mean_curvature(model, u, orientation) {
        Ok(h) => h,
        Err(Error::InvalidSurface { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let r: Vec<f64> = interior.points.iter().map(|&p| h.get(p) - cfg.h_target).collect();
    let sup = r.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    Ok(Some((r, sup)))
}

fn with_interior(u: &ScalarField, interior: &Interior, f: impl Fn(usize, f64) -> f64) -> Result<ScalarField> {
    let mut values = u.values().to_vec();
    for (k, &p) in interior.points.iter().enumerate() {
        values[p] = f(k, values[p]);
    }
    ScalarField::new(u.grid().clone(), values)
}

fn jacobian(
    model: &WarpedModel,
    u: &ScalarField,
    orientation: Orientation,
    interior: &Interior,
    iteration: usize,
) -> Result<BandMatrix> {
    let grid = u.grid();
    let offsets = stencil_offsets(grid.dim());
    let colours = 3usize.pow(grid.dim() as u32);
    let mut jac = BandMatrix::zeros(interior.len(), interior.bandwidth, interior.bandwidth);
    for c in 0..colours {
        let shift = |sign: f64| {
            with_interior(u, interior, |k, v| {
                if colour(grid, interior.points[k]) == c {
                    v + sign * JACOBIAN_STEP
                } else {
                    v
                }
            })
        };
        let plus = mean_curvature(model, &shift(1.0)?, orientation);
        let minus = mean_curvature(model, &shift(-1.0)?, orientation);
        let (plus, minus) = match (plus, minus) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(Error::InvalidSurface { .. }), _) | (_, Err(Error::InvalidSurface { .. })) => {
                return Err(Error::LeftSpacelikeCone { iteration });
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        for (row, &p) in interior.points.iter().enumerate() {
            let d = (plus.get(p) - minus.get(p)) / (2.0 * JACOBIAN_STEP);
            for o in &offsets {
                if let Some(q) = offset_point(grid, p, o) {
                    let col = interior.slot[q];
                    if col != usize::MAX && colour(grid, q) == c {
                        jac.set(row, col, d);
                    }
                }
            }
        }
    }
    Ok(jac)
}

/// Solves `H[u] = H₀` in the interior of a Dirichlet grid.
///
/// Starts from the harmonic extension of the boundary data. Each Newton step
/// is damped: the factor starts at `cfg.damping` and halves whenever the
/// trial iterate is not a valid graph or does not lower the residual, down
/// to [`DAMPING_FLOOR`].
pub fn solve_cmc(model: &WarpedModel, grid: &Arc<Grid>, cfg: &SolveConfig) -> Result<Solution> {
    cfg.validate(grid)?;
    if grid.dim() != model.fiber_dim() {
        return Err(Error::ShapeMismatch("grid dimension differs from the fiber dimension".into()));
    }
    let orientation = cfg.orientation.unwrap_or_else(|| Orientation::canonical(model));
    let interior = Interior::new(grid);
    let mut u = harmonic_extension(&cfg.boundary_data)?;
    let (mut r, mut res) = residual(model, &u, cfg, orientation, &interior)?.ok_or(Error::LeftSpacelikeCone { iteration: 0 })?;

    let mut report = SolveReport { residual_history: vec![res], ..SolveReport::default() };
    let mut iteration = 0;
    while res > cfg.newton_tol {
        if iteration == cfg.max_iters {
            return Err(Error::NonConvergence { iterations: iteration, residual: res });
        }
        iteration += 1;
        let jac = jacobian(model, &u, orientation, &interior, iteration)?;
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let step = jac.solve(&neg)?;

        let mut lambda = cfg.damping;
        let mut only_invalid = true;
        let accepted = loop {
            let trial = with_interior(&u, &interior, |k, v| v + lambda * step[k])?;
            match residual(model, &trial, cfg, orientation, &interior)? {
                Some((tr, tres)) if tres < res || tres <= cfg.newton_tol => break Some((trial, tr, tres)),
                Some(_) => only_invalid = false,
                None => {}
            }
            lambda *= 0.5;
            if lambda < DAMPING_FLOOR {
                break None;
            }
        };
        match accepted {
            Some((trial, tr, tres)) => {
                u = trial;
                r = tr;
                res = tres;
                report.damping_history.push(lambda);
                report.residual_history.push(res);
            }
            None if only_invalid => return Err(Error::LeftSpacelikeCone { iteration }),
            None => return Err(Error::NonConvergence { iterations: iteration, residual: res }),
        }
    }
    report.iterations = iteration;
    report.final_residual = res;
    let surface = GraphSurface::new(*model, u)?;
    Ok(Solution { surface, report })
}

/// The slice `u ≡ t₀`.
pub fn make_slice(model: &WarpedModel, grid: &Arc<Grid>, t0: f64) -> Result<GraphSurface> {
    GraphSurface::new(*model, ScalarField::constant(grid.clone(), t0)?)
}

/// `u = t₀ + amplitude·∏ sin(k_a x_a)`, the product running over the axes
/// with nonzero wave number `k_a`.
pub fn make_perturbed(
    model: &WarpedModel,
    grid: &Arc<Grid>,
    t0: f64,
    amplitude: f64,
    mode: &[f64],
) -> Result<GraphSurface> {
    if mode.len() != grid.dim() {
        return Err(Error::ShapeMismatch(alloc::format!("{} wave numbers for a {}-dimensional grid", mode.len(), grid.dim())));
    }
    if mode.iter().all(|&k| k == 0.0) {
        return Err(Error::InvalidConfig("perturbation needs at least one nonzero wave number".into()));
    }
    let u = ScalarField::from_fn(grid.clone(), |x| {
        let wave: f64 = mode.iter().zip(x).filter(|(k, _)| **k != 0.0).map(|(k, xa)| (k * xa).sin()).product();
        t0 + amplitude * wave
    })?;
    let surface = GraphSurface::new(*model, u)?;
    match surface.first_invalid() {
        Some(index) => Err(Error::AmplitudeTooLarge { amplitude, index }),
        None => Ok(surface),
    }
}

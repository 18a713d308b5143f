//! Mean curvature against the first variation of area along the normal.
//!
//! For `ψ_s = ψ + sN`, `d/ds log √det g_s = −tr A = −εnH`. The test builds the
//! unit normal itself from the conormal `(1, −Du)`, offsets the sampled graph
//! map along it and differentiates the pulled-back area density in `s`.
#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;
use std::sync::Arc;

use warpgeom_core::warp::partial_derivative;
use warpgeom_core::{build_bundle, GraphSurface, Grid, GridTolerance, Orientation, ScalarField, WarpedModel};

fn log_area_density(model: &WarpedModel, components: &[ScalarField], p: usize) -> f64 {
    // components[0] = t, components[1..] = fiber coordinates of ψ_s.
    let n = model.fiber_dim();
    let dims = n + 1;
    let metric = model.ambient_metric(components[0].get(p));
    let jac: Vec<Vec<f64>> = components
        .iter()
        .map(|c| (0..n).map(|i| partial_derivative(c, i, 1).unwrap().get(p)).collect())
        .collect();
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for a in 0..dims {
                for b in 0..dims {
                    s += metric[a * dims + b] * jac[a][i] * jac[b][j];
                }
            }
            g[i * n + j] = s;
        }
    }
    assert_eq!(n, 2);
    0.5 * (g[0] * g[3] - g[1] * g[2]).ln()
}

fn offset(model: &WarpedModel, u: &ScalarField, normal: &[ScalarField], s: f64) -> Vec<ScalarField> {
    let grid = u.grid();
    let mut out = vec![u.zip_map(&normal[0], |t, nt| t + s * nt).unwrap()];
    for k in 0..model.fiber_dim() {
        let shifted: Vec<f64> = (0..grid.len())
            .map(|p| grid.coordinate(p, k) + s * normal[k + 1].get(p))
            .collect();
        out.push(ScalarField::new(grid.clone(), shifted).unwrap());
    }
    out
}

fn unit_normal(model: &WarpedModel, u: &ScalarField, time_sign: f64) -> Vec<ScalarField> {
    let grid = u.grid();
    let n = model.fiber_dim();
    let du: Vec<ScalarField> = (0..n).map(|i| partial_derivative(u, i, 1).unwrap()).collect();
    let eps = model.epsilon();
    let mut comps = vec![vec![0.0; grid.len()]; n + 1];
    for p in 0..grid.len() {
        let f2 = model.warp().f(u.get(p)).powi(2);
        // Raised conormal ḡ⁻¹(1, −Du) = (ε, −Du/f²).
        let mut v = vec![eps];
        v.extend((0..n).map(|i| -du[i].get(p) / f2));
        let norm2 = eps * v[0] * v[0] + f2 * v[1..].iter().map(|x| x * x).sum::<f64>();
        let scale = time_sign * v[0].signum() / norm2.abs().sqrt();
        for a in 0..=n {
            comps[a][p] = scale * v[a];
        }
    }
    comps.into_iter().map(|c| ScalarField::new(grid.clone(), c).unwrap()).collect()
}

#[test]
fn mean_curvature_matches_area_variation() {
    let grid = Arc::new(Grid::periodic_box(2, 64, 2.0 * PI).unwrap());
    let u = ScalarField::from_fn(grid.clone(), |x| 0.05 * x[0].sin() * x[1].sin()).unwrap();
    for model in [WarpedModel::hyperbolic(2), WarpedModel::steady_state(2)] {
        let orientation = Orientation::canonical(&model);
        let bundle = build_bundle(&GraphSurface::new(model, u.clone()).unwrap(), orientation).unwrap();
        let normal = unit_normal(&model, &u, orientation.time_sign(&model));
        let ds = 1e-4;
        let plus = offset(&model, &u, &normal, ds);
        let minus = offset(&model, &u, &normal, -ds);
        let n = model.fiber_dim() as f64;
        let tol = GridTolerance::for_grid(&grid).value();
        let mut worst: f64 = 0.0;
        for p in (0..grid.len()).step_by(7) {
            let d = (log_area_density(&model, &plus, p) - log_area_density(&model, &minus, p)) / (2.0 * ds);
            let h = -model.epsilon() * d / n;
            worst = worst.max((h - bundle.mean_curvature.get(p)).abs());
        }
        assert!(worst <= tol, "{worst:e} > {tol:e}");
    }
}

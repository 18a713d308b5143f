use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::field::{ScalarField, SymTensorField};
use super::grid::{Boundary, Grid};
use crate::error::{Error, Result};
use crate::linalg::spd_inverse;

fn check_axis(grid: &Grid, axis: usize, required: usize) -> Result<()> {
    if axis >= grid.dim() {
        return Err(Error::AxisOutOfRange { axis, dim: grid.dim() });
    }
    let extent = grid.extents()[axis];
    if extent < required {
        return Err(Error::GridTooSmall { axis, extent, required });
    }
    Ok(())
}

/// Second-order accurate finite difference of `order` 1 or 2 along `axis`.
///
/// Interior points use central stencils. Periodic grids wrap; Dirichlet grids
/// switch to one-sided second-order stencils on the two boundary layers
/// (`(−3f₀+4f₁−f₂)/2h` and `(2f₀−5f₁+4f₂−f₃)/h²`).
pub fn partial_derivative(field: &ScalarField, axis: usize, order: u8) -> Result<ScalarField> {
    let grid = field.grid();
    let required = match order {
        1 => 3,
        2 => 4,
        _ => return Err(Error::Unsupported(alloc::format!("derivative order {order}"))),
    };
    check_axis(grid, axis, required)?;
    let h = grid.spacing()[axis];
    let e = grid.extents()[axis];
    let s = grid.stride(axis);
    let v = field.values();
    let periodic = grid.boundary() == Boundary::Periodic;
    let mut out = vec![0.0; v.len()];
    for (p, o) in out.iter_mut().enumerate() {
        let k = grid.axis_index(p, axis);
        let at = |j: isize| -> f64 {
            let jj = if periodic { (k as isize + j).rem_euclid(e as isize) } else { k as isize + j };
            v[(p as isize + (jj - k as isize) * s as isize) as usize]
        };
        *o = if periodic || (k > 0 && k + 1 < e) {
            match order {
                1 => (at(1) - at(-1)) / (2.0 * h),
                _ => (at(1) - 2.0 * at(0) + at(-1)) / (h * h),
            }
        } else if k == 0 {
            match order {
                1 => (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h),
                _ => (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / (h * h),
            }
        } else {
            match order {
                1 => (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h),
                _ => (2.0 * at(0) - 5.0 * at(-1) + 4.0 * at(-2) - at(-3)) / (h * h),
            }
        };
    }
    ScalarField::from_vec(grid, out)
}

/// First derivatives along every axis.
pub fn gradient(field: &ScalarField) -> Result<Vec<ScalarField>> {
    (0..field.grid().dim()).map(|a| partial_derivative(field, a, 1)).collect()
}

/// Ordinary finite-difference Laplacian `Σ_a ∂²_a φ`.
pub fn flat_laplacian(field: &ScalarField) -> Result<ScalarField> {
    let mut acc = partial_derivative(field, 0, 2)?;
    for a in 1..field.grid().dim() {
        acc = acc.axpby(1.0, &partial_derivative(field, a, 2)?, 1.0)?;
    }
    Ok(acc)
}

/// Laplace–Beltrami operator `(1/√det g) ∂_i(√det g gⁱʲ ∂_j φ)` computed
/// from the metric samples alone.
///
/// The divergence is taken in conservative form: fluxes live on the half
/// points between neighbours, with coefficients and transverse derivatives
/// averaged from the two adjacent nodes. On a Dirichlet boundary layer the
/// nodal flux is differentiated with the one-sided stencil instead. With
/// `g = δ` this reduces to the compact `(φ₊ − 2φ + φ₋)/h²` stencil.
pub fn laplace_beltrami_oracle(metric: &SymTensorField, phi: &ScalarField) -> Result<ScalarField> {
    let grid: Arc<Grid> = phi.grid().clone();
    let n = grid.dim();
    if metric.dim() != n || !metric.grid().same_shape(&grid) {
        return Err(Error::ShapeMismatch("metric and field must share a grid of matching dimension".into()));
    }
    for a in 0..n {
        check_axis(&grid, a, 3)?;
    }
    let len = grid.len();

    // a^{ij} = √det g · g^{ij}, packed row-major per point.
    let mut sqrt_det = vec![0.0; len];
    let mut coeff = vec![0.0; len * n * n];
    let mut m = vec![0.0; n * n];
    for p in 0..len {
        metric.fill_matrix(p, &mut m);
        let (inv, det) = spd_inverse(&m, n).ok_or_else(|| Error::NotPositiveDefinite { index: grid.multi_index(p) })?;
        let sd = det.sqrt();
        sqrt_det[p] = sd;
        for (c, i) in coeff[p * n * n..(p + 1) * n * n].iter_mut().zip(&inv) {
            *c = sd * i;
        }
    }
    let a = |p: usize, i: usize, j: usize| coeff[(p * n + i) * n + j];

    let grad = gradient(phi)?;
    let v = phi.values();

    // Nodal fluxes, only needed for the Dirichlet boundary layers.
    let nodal_flux_derivative: Vec<Option<ScalarField>> = if grid.boundary() == Boundary::Dirichlet {
        (0..n)
            .map(|i| {
                let flux: Vec<f64> =
                    (0..len).map(|p| (0..n).map(|j| a(p, i, j) * grad[j].get(p)).sum()).collect();
                let f = ScalarField::from_vec(&grid, flux)?;
                partial_derivative(&f, i, 1).map(Some)
            })
            .collect::<Result<_>>()?
    } else {
        vec![None; n]
    };

    let half_flux = |p: usize, q: usize, i: usize, h: f64| -> f64 {
        // Flux along axis i across the face between p and q = p + e_i.
        let mut flux = 0.5 * (a(p, i, i) + a(q, i, i)) * (v[q] - v[p]) / h;
        for j in 0..n {
            if j != i {
                flux += 0.5 * (a(p, i, j) + a(q, i, j)) * 0.5 * (grad[j].get(p) + grad[j].get(q));
            }
        }
        flux
    };

    let mut out = vec![0.0; len];
    for (p, o) in out.iter_mut().enumerate() {
        let mut div = 0.0;
        for i in 0..n {
            let h = grid.spacing()[i];
            match (grid.neighbor(p, i, 1), grid.neighbor(p, i, -1)) {
                (Some(up), Some(down)) => {
                    div += (half_flux(p, up, i, h) - half_flux(down, p, i, h)) / h;
                }
                _ => {
                    div += nodal_flux_derivative[i].as_ref().expect("boundary layer on a Dirichlet grid").get(p);
                }
            }
        }
        *o = div / sqrt_det[p];
    }
    ScalarField::from_vec(&grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn periodic_1d(e: usize) -> Arc<Grid> {
        Arc::new(Grid::periodic_box(1, e, 2.0 * PI).unwrap())
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        for boundary in [Boundary::Periodic, Boundary::Dirichlet] {
            let g = Arc::new(Grid::uniform(2, 7, 0.3, boundary).unwrap());
            let f = ScalarField::constant(g, 2.5).unwrap();
            for axis in 0..2 {
                for order in [1, 2] {
                    assert_eq!(partial_derivative(&f, axis, order).unwrap().max_abs(), 0.0);
                }
            }
        }
    }

    #[test]
    fn second_derivative_of_quadratic_is_exact_on_dirichlet_grid() {
        let g = Arc::new(Grid::uniform(1, 9, 0.25, Boundary::Dirichlet).unwrap());
        let f = ScalarField::from_fn(g, |x| x[0] * x[0]).unwrap();
        let d2 = partial_derivative(&f, 0, 2).unwrap();
        for v in d2.values() {
            assert!((v - 2.0).abs() < 1e-12, "{v}");
        }
        let d1 = partial_derivative(&f, 0, 1).unwrap();
        for (p, v) in d1.values().iter().enumerate() {
            assert!((v - 2.0 * 0.25 * p as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn sine_derivative_converges_at_second_order() {
        let err = |e: usize| {
            let g = periodic_1d(e);
            let f = ScalarField::from_fn(g.clone(), |x| x[0].sin()).unwrap();
            let exact = ScalarField::from_fn(g, |x| x[0].cos()).unwrap();
            partial_derivative(&f, 0, 1).unwrap().axpby(1.0, &exact, -1.0).unwrap().max_abs()
        };
        let (e1, e2) = (err(32), err(64));
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.1, "order {order}");
        // Error constant: |sin'''|/6 · Δx² bounds the truncation term.
        let h = 2.0 * PI / 32.0;
        assert!(e1 <= h * h / 6.0 * 1.01);
    }

    #[test]
    fn errors_on_bad_axis_and_order() {
        let g = periodic_1d(8);
        let f = ScalarField::constant(g, 1.0).unwrap();
        assert_eq!(partial_derivative(&f, 1, 1), Err(Error::AxisOutOfRange { axis: 1, dim: 1 }));
        assert!(matches!(partial_derivative(&f, 0, 3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn euclidean_oracle_on_paraboloid_and_harmonic() {
        let g = Arc::new(Grid::uniform(2, 21, 0.1, Boundary::Dirichlet).unwrap());
        let delta = SymTensorField::identity(&g, 2).unwrap();
        let phi = ScalarField::from_fn(g.clone(), |x| x[0] * x[0] + x[1] * x[1]).unwrap();
        let lap = laplace_beltrami_oracle(&delta, &phi).unwrap();
        for v in lap.values() {
            assert!((v - 4.0).abs() < 1e-10, "{v}");
        }
        let harmonic = ScalarField::from_fn(g, |x| x[0] * x[0] - x[1] * x[1]).unwrap();
        let lap = laplace_beltrami_oracle(&delta, &harmonic).unwrap();
        assert!(lap.max_abs() < 1e-10);
    }

    #[test]
    fn oracle_rejects_indefinite_metric_with_point() {
        let g = Arc::new(Grid::uniform(2, 6, 0.1, Boundary::Periodic).unwrap());
        let metric = SymTensorField::from_pointwise(&g, 2, |p, m| {
            m.copy_from_slice(&[1.0, 0.0, 0.0, if p == 8 { -1.0 } else { 1.0 }]);
        })
        .unwrap();
        let phi = ScalarField::constant(g, 0.0).unwrap();
        assert_eq!(
            laplace_beltrami_oracle(&metric, &phi),
            Err(Error::NotPositiveDefinite { index: alloc::vec![1, 2] })
        );
    }

    #[test]
    fn flat_metric_reduces_to_compact_laplacian() {
        let g = Arc::new(Grid::periodic_box(2, 24, 2.0 * PI).unwrap());
        let delta = SymTensorField::identity(&g, 2).unwrap();
        let phi = ScalarField::from_fn(g, |x| (x[0]).sin() * (2.0 * x[1]).cos() + 0.3 * (x[1]).sin()).unwrap();
        let a = laplace_beltrami_oracle(&delta, &phi).unwrap();
        let b = flat_laplacian(&phi).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }
    }
}

use alloc::vec;
use alloc::vec::Vec;

use super::calculus::partial_derivative;
use super::field::ScalarField;
use super::model::WarpedModel;
use crate::error::{Error, Result};

/// Max-norm of `L_V ḡ − 2f' ḡ` for `V = f ∂t`, evaluated on the coordinate
/// basis from the ambient Christoffel symbols.
///
/// `t_samples` lives on a grid whose axis 0 is the `t` direction and whose
/// remaining axes (at most `n`) are fiber coordinates; its values are the
/// `t` coordinate of each sample. Derivatives of `V` are finite differences
/// of the sampled components.
pub fn conformality_residual(model: &WarpedModel, t_samples: &ScalarField) -> Result<f64> {
    let warp = *model.warp();
    conformality_residual_of(model, t_samples, move |t| warp.f(t))
}

/// As [`conformality_residual`] for the field `V = v_t(t) ∂t`, measured
/// against the conformal factor `f'` of the warped model.
pub fn conformality_residual_of(
    model: &WarpedModel,
    t_samples: &ScalarField,
    v_t: impl Fn(f64) -> f64,
) -> Result<f64> {
    let grid = t_samples.grid();
    let m = model.fiber_dim() + 1;
    if grid.dim() > m {
        return Err(Error::ShapeMismatch(alloc::format!(
            "{}-dimensional sample grid for a {m}-dimensional ambient space",
            grid.dim()
        )));
    }
    // Axis 0 must advance t at unit rate and the fiber axes must not move it.
    for axis in 0..grid.dim() {
        let dt = partial_derivative(t_samples, axis, 1)?;
        let expected = if axis == 0 { 1.0 } else { 0.0 };
        if dt.values().iter().any(|d| (d - expected).abs() > 1e-9) {
            return Err(Error::InvalidGrid(alloc::format!("t samples are not the axis-0 coordinate (axis {axis})")));
        }
    }

    let vt = t_samples.map(&v_t)?;
    let dvt: Vec<ScalarField> = (0..grid.dim()).map(|a| partial_derivative(&vt, a, 1)).collect::<Result<_>>()?;

    let mut worst: f64 = 0.0;
    let mut cov = vec![0.0; m * m]; // cov[a*m + c] = (∇̄_a V)^c
    for p in 0..grid.len() {
        let t = t_samples.get(p);
        let gam = model.christoffel(t);
        let g = model.ambient_metric(t);
        let phi = model.warp().df(t);
        let v0 = vt.get(p);
        for a in 0..m {
            for c in 0..m {
                let partial = if c == 0 && a < grid.dim() { dvt[a].get(p) } else { 0.0 };
                cov[a * m + c] = partial + gam.get(c, a, 0) * v0;
            }
        }
        for a in 0..m {
            for b in 0..m {
                let mut lie = 0.0;
                for c in 0..m {
                    lie += g[b * m + c] * cov[a * m + c] + g[a * m + c] * cov[b * m + c];
                }
                worst = worst.max((lie - 2.0 * phi * g[a * m + b]).abs());
            }
        }
    }
    Ok(worst)
}

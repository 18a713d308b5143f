//! Closed-form Laplacian and curvature identities evaluated on a bundle.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::bundle::GeometryBundle;
use crate::error::{Error, Result};
use crate::tolerance::{GridTolerance, MACHINE_TOL};
use crate::warp::{ScalarField, WarpKind};

fn pointwise(bundle: &GeometryBundle, f: impl Fn(usize) -> f64) -> Result<ScalarField> {
    ScalarField::new(bundle.grid().clone(), (0..bundle.grid().len()).map(f).collect())
}

/// `Δh = (log f)'(h){εn − |∇h|²} + εnH⟨N,∂t⟩`.
pub fn laplacian_h_formula(bundle: &GeometryBundle) -> Result<ScalarField> {
    let eps = bundle.epsilon();
    let n = bundle.n() as f64;
    let warp = bundle.model.warp();
    pointwise(bundle, |p| {
        let h = bundle.h.get(p);
        warp.log_derivative(h) * (eps * n - bundle.grad_h_norm2.get(p))
            + eps * n * bundle.mean_curvature.get(p) * bundle.normal_t.get(p)
    })
}

/// Warped-product form of `Δη` for constant mean curvature:
/// `−εη{Ric(N^⊤,N^⊤) + (n−1)(log f)''(1 − ⟨N,∂t⟩²) + |A|²} − εnHf'`,
/// with the flat-fiber Ricci term passed as an explicit zero.
///
/// Fails with [`Error::NotCmc`] unless `H` is constant within the default
/// admission tolerance `10·tol_grid` on the comparison points.
pub fn laplacian_eta_warped(bundle: &GeometryBundle) -> Result<ScalarField> {
    laplacian_eta_warped_with(bundle, GridTolerance::for_grid(bundle.grid()).cmc())
}

pub fn laplacian_eta_warped_with(bundle: &GeometryBundle, tol_h: f64) -> Result<ScalarField> {
    let mask = bundle.comparison_mask();
    let (mut sum, mut count) = (0.0, 0usize);
    for (p, &m) in mask.iter().enumerate() {
        if m {
            sum += bundle.mean_curvature.get(p);
            count += 1;
        }
    }
    let mean = sum / count.max(1) as f64;
    let deviation = mask
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(p, _)| (bundle.mean_curvature.get(p) - mean).abs())
        .fold(0.0, f64::max);
    if deviation > tol_h {
        return Err(Error::NotCmc { deviation, tolerance: tol_h });
    }

    let eps = bundle.epsilon();
    let n = bundle.n() as f64;
    let warp = bundle.model.warp();
    let fiber_ricci = 0.0;
    pointwise(bundle, |p| {
        let h = bundle.h.get(p);
        let c = bundle.normal_t.get(p);
        let eta = bundle.eta.get(p);
        -eps * eta * (fiber_ricci + (n - 1.0) * warp.log_second_derivative(h) * (1.0 - c * c) + bundle.a_norm2.get(p))
            - eps * n * bundle.mean_curvature.get(p) * warp.df(h)
    })
}

/// General conformal-field form of `Δη` for `V = f∂t`, `φ = f'`:
/// `−εn⟨V,∇H⟩ − εη{Ric̄(N,N) + |A|²} − n{εHφ + N(φ)}`.
///
/// `∇H` is the finite-difference gradient of the mean curvature field, so
/// `H` may vary.
pub fn laplacian_eta_conformal(bundle: &GeometryBundle) -> Result<ScalarField> {
    let eps = bundle.epsilon();
    let n = bundle.n() as f64;
    let model = bundle.model;
    let warp = model.warp();
    let dh_dmean = bundle.gradient_inner(&bundle.h, &bundle.mean_curvature)?;
    pointwise(bundle, |p| {
        let h = bundle.h.get(p);
        let c = bundle.normal_t.get(p);
        let eta = bundle.eta.get(p);
        let f = warp.f(h);
        // ⟨V, ∇H⟩ = f⟨∂t^⊤, ∇H⟩ = εf⟨∇h, ∇H⟩
        let v_dot_grad_h = eps * f * dh_dmean.get(p);
        let ricci = model.ambient_ricci_normal(h, c, 0.0);
        let phi = warp.df(h);
        // N(φ) = N^t f'' with N^t = ε⟨N,∂t⟩
        let n_phi = eps * c * warp.d2f(h);
        -eps * n * v_dot_grad_h
            - eps * eta * (ricci + bundle.a_norm2.get(p))
            - n * (eps * bundle.mean_curvature.get(p) * phi + n_phi)
    })
}

/// Scalar curvature by the Gauss equation and, for `n = 2`, the Gaussian
/// curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarCurvature {
    pub r: ScalarField,
    pub k: Option<ScalarField>,
    /// Max of `|K − (2H² − 1 − |A|²/2)|` (Hyperbolic model, `n = 2`).
    pub remark_residual: Option<f64>,
}

/// `R = n(n−1)(c̄ + εH₂)` in an ambient space of constant curvature `c̄`:
/// Steady State `R = n(n−1)(1 − H₂)`, Hyperbolic `R = n(n−1)(H₂ − 1)`,
/// flat models `R = εn(n−1)H₂`.
pub fn scalar_curvature(bundle: &GeometryBundle) -> Result<ScalarCurvature> {
    let n = bundle.n();
    let h2 = match (&bundle.h2, n) {
        (Some(h2), n) if n >= 2 => h2,
        _ => return Err(Error::Unsupported("scalar curvature requires n >= 2".into())),
    };
    let eps = bundle.epsilon();
    let ambient = match bundle.model.warp().kind() {
        WarpKind::Exponential => -eps,
        WarpKind::Constant => 0.0,
        WarpKind::Cosh => {
            return Err(Error::Unsupported("Gauss equation needs a constant-curvature ambient space".into()));
        }
    };
    let nn = (n * (n - 1)) as f64;
    let r = h2.map(|x| nn * (ambient + eps * x))?;
    if n != 2 {
        return Ok(ScalarCurvature { r, k: None, remark_residual: None });
    }
    let k = r.map(|x| 0.5 * x)?;
    let mut remark_residual = None;
    if bundle.model.warp().kind() == WarpKind::Exponential && !bundle.model.is_lorentzian() {
        let mut worst: f64 = 0.0;
        for p in 0..k.values().len() {
            let hm = bundle.mean_curvature.get(p);
            let remark = 2.0 * hm * hm - 1.0 - 0.5 * bundle.a_norm2.get(p);
            let d = (k.get(p) - remark).abs();
            let scale = 1.0 + k.get(p).abs() + 2.0 * hm * hm + 0.5 * bundle.a_norm2.get(p);
            if d > MACHINE_TOL * scale {
                return Err(Error::InternalConsistency {
                    index: bundle.grid().multi_index(p),
                    detail: format!("Gauss-equation K disagrees with 2H^2-1-|A|^2/2 by {d:e}"),
                });
            }
            worst = worst.max(d);
        }
        remark_residual = Some(worst);
    }
    Ok(ScalarCurvature { r, k: Some(k), remark_residual })
}

/// Ricci lower bound `(n−1) − n²H²/4` against the intrinsic curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct RicciBound {
    /// `(n−1) − n²·max(H)²/4`.
    pub bound: f64,
    /// `min (K − bound/(n−1))` over the comparison points.
    pub min_margin: f64,
    pub worst_point: Vec<usize>,
}

/// Margin of `Ric = K g ≥ (n−1) − n²H²/4` for surfaces (`n = 2`), from a
/// Gaussian curvature field and a mean curvature field.
pub fn ricci_margin(k: &ScalarField, mean_curvature: &ScalarField, mask: &[bool]) -> RicciBound {
    let n = 2.0;
    let hmax = mask
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(p, _)| mean_curvature.get(p).abs())
        .fold(0.0, f64::max);
    let bound = (n - 1.0) - n * n * hmax * hmax / 4.0;
    let mut worst = (f64::INFINITY, 0);
    for (p, &m) in mask.iter().enumerate() {
        if m {
            let margin = k.get(p) - bound / (n - 1.0);
            if margin < worst.0 {
                worst = (margin, p);
            }
        }
    }
    RicciBound { bound, min_margin: worst.0, worst_point: k.grid().multi_index(worst.1) }
}

/// Checks the Ricci estimate of spacelike surfaces in the Steady State space.
pub fn ricci_lower_bound_check(bundle: &GeometryBundle) -> Result<RicciBound> {
    if !bundle.model.is_lorentzian() {
        return Err(Error::Unsupported("Ricci estimate applies to Lorentzian models".into()));
    }
    if bundle.n() != 2 {
        return Err(Error::Unsupported("n=2 required for the Ricci estimate".into()));
    }
    let k = bundle
        .gaussian_curvature
        .as_ref()
        .ok_or_else(|| Error::Unsupported("Gaussian curvature unavailable for this warp".into()))?;
    Ok(ricci_margin(k, &bundle.mean_curvature, &bundle.comparison_mask()))
}

/// `θ = arccosh(−⟨N,∂t⟩)`.
pub fn hyperbolic_angle(bundle: &GeometryBundle) -> Result<ScalarField> {
    if !bundle.model.is_lorentzian() {
        return Err(Error::Unsupported("hyperbolic angle is defined for Lorentzian models".into()));
    }
    for (p, c) in bundle.normal_t.values().iter().enumerate() {
        if -c < 1.0 - MACHINE_TOL {
            return Err(Error::InternalConsistency {
                index: bundle.grid().multi_index(p),
                detail: format!("-<N,dt> = {} < 1", -c),
            });
        }
    }
    bundle.normal_t.map(|c| (-c).max(1.0).acosh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_bundle, GraphSurface, Orientation};
    use crate::warp::{Grid, WarpedModel};
    use alloc::sync::Arc;
    use core::f64::consts::PI;

    fn periodic(n: usize, extent: usize) -> Arc<Grid> {
        Arc::new(Grid::periodic_box(n, extent, 2.0 * PI).unwrap())
    }

    fn bundle(model: WarpedModel, u: ScalarField) -> GeometryBundle {
        build_bundle(&GraphSurface::new(model, u).unwrap(), Orientation::canonical(&model)).unwrap()
    }

    fn slice(model: WarpedModel, t0: f64) -> GeometryBundle {
        bundle(model, ScalarField::constant(periodic(model.fiber_dim(), 8), t0).unwrap())
    }

    #[test]
    fn slice_laplacians_vanish() {
        for model in [WarpedModel::hyperbolic(2), WarpedModel::steady_state(2), WarpedModel::steady_state(3)] {
            let b = slice(model, 0.6);
            assert!(laplacian_h_formula(&b).unwrap().max_abs() < 1e-13);
            assert!(laplacian_eta_warped(&b).unwrap().max_abs() < 1e-13);
            assert!(laplacian_eta_conformal(&b).unwrap().max_abs() < 1e-13);
            assert!(b.oracle_laplacian(&b.eta).unwrap().max_abs() < 1e-13);
        }
    }

    #[test]
    fn flat_minimal_graph_has_zero_height_laplacian() {
        let model = WarpedModel::new(1, WarpKind::Constant, 2).unwrap();
        let b = bundle(model, ScalarField::constant(periodic(2, 8), 0.3).unwrap());
        assert_eq!(laplacian_h_formula(&b).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn warped_form_requires_constant_mean_curvature() {
        let u = ScalarField::from_fn(periodic(2, 128), |x| 0.3 * x[0].sin()).unwrap();
        let b = bundle(WarpedModel::hyperbolic(2), u);
        match laplacian_eta_warped(&b) {
            Err(Error::NotCmc { deviation, tolerance }) => assert!(deviation > tolerance),
            other => panic!("{other:?}"),
        }
        assert!(laplacian_eta_warped_with(&b, 1.0).is_ok());
        assert!(laplacian_eta_conformal(&b).is_ok());
    }

    #[test]
    fn scalar_curvature_support() {
        let b = slice(WarpedModel::steady_state(2), 0.0);
        let sc = scalar_curvature(&b).unwrap();
        assert!(sc.r.max_abs() < 1e-14);
        assert!(sc.k.unwrap().max_abs() < 1e-14);
        assert!(sc.remark_residual.is_none());

        let b = slice(WarpedModel::hyperbolic(2), 0.0);
        assert!(scalar_curvature(&b).unwrap().remark_residual.unwrap() < 1e-14);

        let b = slice(WarpedModel::steady_state(1), 0.0);
        assert!(matches!(scalar_curvature(&b), Err(Error::Unsupported(_))));

        let cosh = WarpedModel::new(1, WarpKind::Cosh, 2).unwrap();
        let b = build_bundle(
            &GraphSurface::new(cosh, ScalarField::constant(periodic(2, 8), 0.2).unwrap()).unwrap(),
            Orientation::EtaNegative,
        )
        .unwrap();
        assert!(matches!(scalar_curvature(&b), Err(Error::Unsupported(_))));
        assert!(b.scalar_curvature.is_none());
    }

    #[test]
    fn ricci_estimate_on_slices_and_negative_control() {
        let b = slice(WarpedModel::steady_state(2), 0.0);
        let r = ricci_lower_bound_check(&b).unwrap();
        assert!(r.bound.abs() < 1e-14 && r.min_margin.abs() < 1e-14);

        let u = ScalarField::from_fn(periodic(2, 32), |x| 0.05 * x[0].sin() * x[1].sin()).unwrap();
        let b = bundle(WarpedModel::steady_state(2), u);
        let k = b.gaussian_curvature.as_ref().unwrap();
        let actual = ricci_margin(k, &b.mean_curvature, &b.comparison_mask());
        let lowered = k.map(|v| v - 0.1).unwrap();
        let control = ricci_margin(&lowered, &b.mean_curvature, &b.comparison_mask());
        assert!((control.min_margin - (actual.min_margin - 0.1)).abs() < 1e-12);
        assert!(control.min_margin < 0.0);

        assert!(matches!(ricci_lower_bound_check(&slice(WarpedModel::hyperbolic(2), 0.0)), Err(Error::Unsupported(_))));
        match ricci_lower_bound_check(&slice(WarpedModel::steady_state(3), 0.0)) {
            Err(Error::Unsupported(m)) => assert!(m.contains("n=2 required")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hyperbolic_angle_guards() {
        let b = slice(WarpedModel::steady_state(2), 0.4);
        assert_eq!(hyperbolic_angle(&b).unwrap().max_abs(), 0.0);
        assert!(matches!(hyperbolic_angle(&slice(WarpedModel::hyperbolic(2), 0.0)), Err(Error::Unsupported(_))));
        let model = WarpedModel::steady_state(2);
        let past = build_bundle(
            &GraphSurface::new(model, ScalarField::constant(periodic(2, 8), 0.0).unwrap()).unwrap(),
            Orientation::PastPointing,
        )
        .unwrap();
        assert!(matches!(hyperbolic_angle(&past), Err(Error::InternalConsistency { .. })));
    }
}

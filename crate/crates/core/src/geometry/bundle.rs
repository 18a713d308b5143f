use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::identities::scalar_curvature;
use super::surface::{GraphSurface, Orientation};
use crate::error::{Error, Result};
use crate::linalg::{generalized_eigenvalues, spd_inverse};
use crate::tolerance::MACHINE_TOL;
use crate::warp::{partial_derivative, Grid, ScalarField, SymTensorField, TensorField, VectorField, WarpedModel};

/// First and second derivatives of the height function, second derivatives
/// stored as a full `n×n` table (`d2u[i*n+j]`).
pub(crate) struct GraphDerivatives {
    pub du: Vec<ScalarField>,
    pub d2u: Vec<ScalarField>,
}

impl GraphDerivatives {
    pub fn new(u: &ScalarField) -> Result<Self> {
        let n = u.grid().dim();
        let du: Vec<ScalarField> = (0..n).map(|a| partial_derivative(u, a, 1)).collect::<Result<_>>()?;
        let mut d2u: Vec<Option<ScalarField>> = vec![None; n * n];
        for i in 0..n {
            d2u[i * n + i] = Some(partial_derivative(u, i, 2)?);
            for j in i + 1..n {
                let mixed = partial_derivative(&du[i], j, 1)?;
                d2u[j * n + i] = Some(mixed.clone());
                d2u[i * n + j] = Some(mixed);
            }
        }
        Ok(Self { du, d2u: d2u.into_iter().map(|d| d.expect("filled above")).collect() })
    }

    fn load(&self, p: usize, du: &mut [f64], d2u: &mut [f64]) {
        for (d, f) in du.iter_mut().zip(&self.du) {
            *d = f.get(p);
        }
        for (d, f) in d2u.iter_mut().zip(&self.d2u) {
            *d = f.get(p);
        }
    }
}

/// Pointwise frame of the graph: induced metric, unit normal and second
/// fundamental form `b_ij = ⟨N, ∇̄_{ψ_i} ψ_j⟩ = ⟨A ψ_i, ψ_j⟩`.
pub(crate) struct PointFrame {
    n: usize,
    pub f: f64,
    pub g: Vec<f64>,
    pub g_inv: Vec<f64>,
    /// Ambient components `N^a`, index 0 is `t`.
    pub normal: Vec<f64>,
    /// `⟨N, ∂t⟩`.
    pub normal_t: f64,
    pub b: Vec<f64>,
    tangent: Vec<f64>,
}

impl PointFrame {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            f: 0.0,
            g: vec![0.0; n * n],
            g_inv: vec![0.0; n * n],
            normal: vec![0.0; n + 1],
            normal_t: 0.0,
            b: vec![0.0; n * n],
            tangent: vec![0.0; n * (n + 1)],
        }
    }

    /// Fills the frame at height `u`; `false` when the induced metric is not
    /// positive definite or the normal has the wrong causal character.
    pub fn compute(&mut self, model: &WarpedModel, time_sign: f64, u: f64, du: &[f64], d2u: &[f64]) -> bool {
        let n = self.n;
        let m = n + 1;
        let eps = model.epsilon();
        let gbar = model.ambient_metric(u);
        let gam = model.christoffel(u);
        self.f = model.warp().f(u);

        // ψ_i = u_i ∂t + ∂_i
        for i in 0..n {
            let row = &mut self.tangent[i * m..(i + 1) * m];
            row.fill(0.0);
            row[0] = du[i];
            row[i + 1] = 1.0;
        }
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for a in 0..m {
                    for b in 0..m {
                        s += gbar[a * m + b] * self.tangent[i * m + a] * self.tangent[j * m + b];
                    }
                }
                self.g[i * n + j] = s;
            }
        }
        match spd_inverse(&self.g, n) {
            Some((inv, _)) => self.g_inv.copy_from_slice(&inv),
            None => return false,
        }

        // Conormal dt − u_k dx^k annihilates every ψ_i; raise it with ḡ⁻¹ (diagonal).
        for a in 0..m {
            let covector = if a == 0 { 1.0 } else { -du[a - 1] };
            self.normal[a] = covector / gbar[a * m + a];
        }
        let norm2: f64 = (0..m).map(|a| gbar[a * m + a] * self.normal[a] * self.normal[a]).sum();
        if !(norm2 * eps > 0.0) {
            return false;
        }
        let mut scale = 1.0 / norm2.abs().sqrt();
        if (self.normal[0] * scale).signum() != time_sign {
            scale = -scale;
        }
        for c in self.normal.iter_mut() {
            *c *= scale;
        }
        self.normal_t = gbar[0] * self.normal[0];

        // Y_ij = ∇̄_{ψ_i} ψ_j = u_ij ∂t + Γ^a_{bc} ψ_i^b ψ_j^c ∂_a
        for i in 0..n {
            for j in i..n {
                let mut bij = 0.0;
                for a in 0..m {
                    let mut y = if a == 0 { d2u[i * n + j] } else { 0.0 };
                    for bb in 0..m {
                        let ti = self.tangent[i * m + bb];
                        if ti == 0.0 {
                            continue;
                        }
                        for c in 0..m {
                            y += gam.get(a, bb, c) * ti * self.tangent[j * m + c];
                        }
                    }
                    bij += gbar[a * m + a] * self.normal[a] * y;
                }
                self.b[i * n + j] = bij;
                self.b[j * n + i] = bij;
            }
        }
        true
    }

    /// `tr(A) = g^{ij} b_ij`.
    pub fn trace_shape(&self) -> f64 {
        self.g_inv.iter().zip(&self.b).map(|(a, b)| a * b).sum()
    }
}

/// Mean curvature `H = ε tr(A)/n` of the graph of `u` under the given
/// orientation, by the trace route only (no eigen-decomposition).
pub fn mean_curvature(model: &WarpedModel, u: &ScalarField, orientation: Orientation) -> Result<ScalarField> {
    let n = model.fiber_dim();
    let derivs = GraphDerivatives::new(u)?;
    let sign = orientation.time_sign(model);
    let mut frame = PointFrame::new(n);
    let (mut du, mut d2u) = (vec![0.0; n], vec![0.0; n * n]);
    let mut out = vec![0.0; u.grid().len()];
    for (p, o) in out.iter_mut().enumerate() {
        derivs.load(p, &mut du, &mut d2u);
        if !frame.compute(model, sign, u.get(p), &du, &d2u) {
            return Err(Error::InvalidSurface { index: u.grid().multi_index(p) });
        }
        *o = model.epsilon() * frame.trace_shape() / n as f64;
    }
    ScalarField::new(u.grid().clone(), out)
}

/// Every pointwise geometric quantity of a valid graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryBundle {
    pub model: WarpedModel,
    pub orientation: Orientation,
    /// Induced metric `g_ij = ε u_i u_j + f(u)² δ_ij`.
    pub g: SymTensorField,
    pub g_inv: SymTensorField,
    /// Second fundamental form `b_ij = ⟨A ψ_i, ψ_j⟩`.
    pub second_fundamental: SymTensorField,
    /// Shape operator `A^i_j = g^{ik} b_kj`, `A(v) = −(∇̄_v N)^⊤`.
    pub shape: TensorField,
    /// Eigenvalues of `A`, ascending, one field per index.
    pub principal: Vec<ScalarField>,
    /// `⟨N, ∂t⟩`.
    pub normal_t: ScalarField,
    /// `H = ε tr(A)/n`, trace route.
    pub mean_curvature: ScalarField,
    /// `H₂ = 2S₂/(n(n−1))` from the principal curvatures (`n ≥ 2`).
    pub h2: Option<ScalarField>,
    /// `|A|² = tr(A²)`, matrix route.
    pub a_norm2: ScalarField,
    /// `η = f(u)·⟨N, ∂t⟩`.
    pub eta: ScalarField,
    /// Height function, equal to `u`.
    pub h: ScalarField,
    /// Graph-coordinate components of `∇h = ε∂t − ⟨N,∂t⟩N`.
    pub grad_h: VectorField,
    pub grad_h_norm2: ScalarField,
    /// Hyperbolic angle, Lorentzian models only.
    pub theta: Option<ScalarField>,
    /// Scalar curvature by the Gauss equation, when the ambient space has
    /// constant curvature.
    pub scalar_curvature: Option<ScalarField>,
    /// Gaussian curvature `R/2`, `n = 2` only.
    pub gaussian_curvature: Option<ScalarField>,
}

impl GeometryBundle {
    pub fn grid(&self) -> &Arc<Grid> {
        self.h.grid()
    }

    pub fn n(&self) -> usize {
        self.model.fiber_dim()
    }

    pub fn epsilon(&self) -> f64 {
        self.model.epsilon()
    }

    /// Laplace–Beltrami oracle of the induced metric applied to `phi`.
    pub fn oracle_laplacian(&self, phi: &ScalarField) -> Result<ScalarField> {
        crate::warp::laplace_beltrami_oracle(&self.g, phi)
    }

    /// Points used for comparisons against the oracle.
    pub fn comparison_mask(&self) -> Vec<bool> {
        self.grid().comparison_mask()
    }

    /// `⟨∇a, ∇b⟩ = g^{ij} ∂_i a ∂_j b` with finite-difference derivatives.
    pub fn gradient_inner(&self, a: &ScalarField, b: &ScalarField) -> Result<ScalarField> {
        let n = self.n();
        let da: Vec<ScalarField> = (0..n).map(|i| partial_derivative(a, i, 1)).collect::<Result<_>>()?;
        let db: Vec<ScalarField> = (0..n).map(|i| partial_derivative(b, i, 1)).collect::<Result<_>>()?;
        let mut gi = vec![0.0; n * n];
        let values = (0..self.grid().len())
            .map(|p| {
                self.g_inv.fill_matrix(p, &mut gi);
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += gi[i * n + j] * da[i].get(p) * db[j].get(p);
                    }
                }
                s
            })
            .collect();
        ScalarField::new(self.grid().clone(), values)
    }
}

/// Computes the [`GeometryBundle`] of a valid graph.
pub fn build_bundle(surface: &GraphSurface, orientation: Orientation) -> Result<GeometryBundle> {
    if let Some(index) = surface.first_invalid() {
        return Err(Error::InvalidSurface { index });
    }
    let model = *surface.model();
    let n = model.fiber_dim();
    let eps = model.epsilon();
    let grid = surface.grid().clone();
    let len = grid.len();
    let u = surface.u();
    let derivs = GraphDerivatives::new(u)?;
    let sign = orientation.time_sign(&model);

    let mut frames_g = vec![0.0; len * n * n];
    let mut frames_ginv = vec![0.0; len * n * n];
    let mut frames_b = vec![0.0; len * n * n];
    let mut shape = vec![0.0; len * n * n];
    let mut principal = vec![vec![0.0; len]; n];
    let mut normal_t = vec![0.0; len];
    let mut mean = vec![0.0; len];
    let mut h2 = vec![0.0; len];
    let mut a_norm2 = vec![0.0; len];
    let mut eta = vec![0.0; len];
    let mut grad = vec![vec![0.0; len]; n];
    let mut grad_norm2 = vec![0.0; len];
    let mut theta = vec![0.0; len];

    let mut frame = PointFrame::new(n);
    let (mut du, mut d2u) = (vec![0.0; n], vec![0.0; n * n]);
    let mut a = vec![0.0; n * n];
    let mut v = vec![0.0; n];
    for p in 0..len {
        derivs.load(p, &mut du, &mut d2u);
        if !frame.compute(&model, sign, u.get(p), &du, &d2u) {
            return Err(Error::InvalidSurface { index: grid.multi_index(p) });
        }
        let block = p * n * n..(p + 1) * n * n;
        frames_g[block.clone()].copy_from_slice(&frame.g);
        frames_ginv[block.clone()].copy_from_slice(&frame.g_inv);
        frames_b[block.clone()].copy_from_slice(&frame.b);

        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = (0..n).map(|k| frame.g_inv[i * n + k] * frame.b[k * n + j]).sum();
            }
        }
        shape[block].copy_from_slice(&a);

        let ev = generalized_eigenvalues(&frame.g, &frame.b, n)
            .ok_or_else(|| Error::InvalidSurface { index: grid.multi_index(p) })?;
        for (k, l) in ev.iter().enumerate() {
            principal[k][p] = *l;
        }
        let trace = frame.trace_shape();
        mean[p] = eps * trace / n as f64;
        if n >= 2 {
            let mut s2 = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    s2 += ev[i] * ev[j];
                }
            }
            h2[p] = 2.0 * s2 / (n * (n - 1)) as f64;
        }
        a_norm2[p] = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| a[i * n + j] * a[j * n + i]).sum();

        let c = frame.normal_t;
        normal_t[p] = c;
        eta[p] = frame.f * c;
        if orientation == Orientation::EtaNegative && !(eta[p] < 0.0) {
            return Err(Error::Orientation(alloc::format!(
                "eta = {} is not negative at {:?}",
                eta[p],
                grid.multi_index(p)
            )));
        }

        // ∇h = ε∂t − ⟨N,∂t⟩N; its ∂_k component is the k-th graph coordinate.
        for k in 0..n {
            v[k] = -c * frame.normal[k + 1];
            grad[k][p] = v[k];
        }
        grad_norm2[p] = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| frame.g[i * n + j] * v[i] * v[j])
            .sum();

        if model.is_lorentzian() {
            let cosh = c.abs();
            if cosh < 1.0 - MACHINE_TOL {
                return Err(Error::InternalConsistency {
                    index: grid.multi_index(p),
                    detail: alloc::format!("|<N,dt>| = {cosh} < 1 on a spacelike graph"),
                });
            }
            theta[p] = cosh.max(1.0).acosh();
        }
    }

    let sym = |data: &[f64]| {
        SymTensorField::from_pointwise(&grid, n, |p, m| m.copy_from_slice(&data[p * n * n..(p + 1) * n * n]))
    };
    let field = |v: Vec<f64>| ScalarField::new(grid.clone(), v);

    let mut bundle = GeometryBundle {
        model,
        orientation,
        g: sym(&frames_g)?,
        g_inv: sym(&frames_ginv)?,
        second_fundamental: sym(&frames_b)?,
        shape: TensorField::from_pointwise(&grid, n, |p, m| m.copy_from_slice(&shape[p * n * n..(p + 1) * n * n]))?,
        principal: principal.into_iter().map(&field).collect::<Result<_>>()?,
        normal_t: field(normal_t)?,
        mean_curvature: field(mean)?,
        h2: if n >= 2 { Some(field(h2)?) } else { None },
        a_norm2: field(a_norm2)?,
        eta: field(eta)?,
        h: u.clone(),
        grad_h: VectorField::new(grad.into_iter().map(&field).collect::<Result<_>>()?)?,
        grad_h_norm2: field(grad_norm2)?,
        theta: if model.is_lorentzian() { Some(field(theta)?) } else { None },
        scalar_curvature: None,
        gaussian_curvature: None,
    };
    match scalar_curvature(&bundle) {
        Ok(sc) => {
            bundle.scalar_curvature = Some(sc.r);
            bundle.gaussian_curvature = sc.k;
        }
        Err(Error::Unsupported(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(bundle)
}

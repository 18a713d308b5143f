use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::linalg::spd_inverse;
use crate::warp::{gradient, Grid, ScalarField, WarpedModel};

/// Sign convention for the unit normal of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// `∂t`-component of `N` positive. In a Lorentzian model this is
    /// `⟨N, ∂t⟩ < 0`.
    FuturePointing,
    /// `∂t`-component of `N` negative.
    PastPointing,
    /// `η = ⟨f ∂t, N⟩ < 0`. Equals `FuturePointing` when `ε = −1` and
    /// `PastPointing` when `ε = +1`.
    EtaNegative,
}

impl Orientation {
    /// Orientation used for each model in the rigidity statements:
    /// `⟨N, ∂t⟩ < 0` in the Lorentzian case, `η < 0` in the Riemannian case.
    pub fn canonical(model: &WarpedModel) -> Self {
        if model.is_lorentzian() {
            Orientation::FuturePointing
        } else {
            Orientation::EtaNegative
        }
    }

    /// Sign of the `∂t`-component of `N`.
    pub fn time_sign(self, model: &WarpedModel) -> f64 {
        match self {
            Orientation::FuturePointing => 1.0,
            Orientation::PastPointing => -1.0,
            // ⟨N,∂t⟩ = ε N^t < 0  ⇔  sign(N^t) = −ε.
            Orientation::EtaNegative => -model.epsilon(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Orientation::FuturePointing => "future-pointing",
            Orientation::PastPointing => "past-pointing",
            Orientation::EtaNegative => "eta-negative",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "future-pointing" | "future" => Some(Orientation::FuturePointing),
            "past-pointing" | "past" => Some(Orientation::PastPointing),
            "eta-negative" => Some(Orientation::EtaNegative),
            _ => None,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Height function `u` of a vertical graph together with the pointwise
/// validity of its induced metric `g_ij = ε u_i u_j + f(u)² δ_ij`.
///
/// In the Lorentzian case validity is the spacelike condition
/// `|Du|_δ < f(u)`, i.e. `|Du| < 1` when the gradient is measured in the
/// metric `f(u)² δ` of the slice through the point.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSurface {
    model: WarpedModel,
    u: ScalarField,
    validity: Vec<bool>,
}

impl GraphSurface {
    pub fn new(model: WarpedModel, u: ScalarField) -> Result<Self> {
        if u.grid().dim() != model.fiber_dim() {
            return Err(Error::ShapeMismatch(alloc::format!(
                "{}-dimensional grid for fiber dimension {}",
                u.grid().dim(),
                model.fiber_dim()
            )));
        }
        let du = gradient(&u)?;
        let n = model.fiber_dim();
        let eps = model.epsilon();
        let mut g = alloc::vec![0.0; n * n];
        let validity = (0..u.grid().len())
            .map(|p| {
                let f = model.warp().f(u.get(p));
                for i in 0..n {
                    for j in 0..n {
                        g[i * n + j] =
                            eps * du[i].get(p) * du[j].get(p) + if i == j { f * f } else { 0.0 };
                    }
                }
                spd_inverse(&g, n).is_some()
            })
            .collect();
        Ok(Self { model, u, validity })
    }

    pub fn model(&self) -> &WarpedModel {
        &self.model
    }

    pub fn u(&self) -> &ScalarField {
        &self.u
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.u.grid()
    }

    pub fn validity(&self) -> &[bool] {
        &self.validity
    }

    pub fn is_valid(&self) -> bool {
        self.validity.iter().all(|&v| v)
    }

    pub fn first_invalid(&self) -> Option<Vec<usize>> {
        self.validity.iter().position(|v| !v).map(|p| self.grid().multi_index(p))
    }

    /// `u + shift`.
    pub fn translated(&self, shift: f64) -> Result<Self> {
        Self::new(self.model, self.u.map(|v| v + shift)?)
    }
}

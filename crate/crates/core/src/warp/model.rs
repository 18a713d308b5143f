use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Closed-form warping functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WarpKind {
    /// `f(t) = e^t`: the Hyperbolic (`ε = +1`) and Steady State (`ε = −1`) models.
    Exponential,
    /// `f ≡ 1`: Euclidean or Lorentz–Minkowski space; `∂t` is Killing.
    Constant,
    /// `f(t) = cosh t`.
    Cosh,
}

impl WarpKind {
    pub fn name(self) -> &'static str {
        match self {
            WarpKind::Exponential => "exponential",
            WarpKind::Constant => "constant",
            WarpKind::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "exponential" | "exp" => Some(WarpKind::Exponential),
            "constant" | "const" => Some(WarpKind::Constant),
            "cosh" => Some(WarpKind::Cosh),
            _ => None,
        }
    }
}

impl fmt::Display for WarpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Warping function `f` together with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WarpFamily {
    kind: WarpKind,
}

impl WarpFamily {
    pub const fn new(kind: WarpKind) -> Self {
        Self { kind }
    }

    pub fn kind(&self) -> WarpKind {
        self.kind
    }

    #[inline]
    pub fn f(&self, t: f64) -> f64 {
        match self.kind {
            WarpKind::Exponential => t.exp(),
            WarpKind::Constant => 1.0,
            WarpKind::Cosh => t.cosh(),
        }
    }

    #[inline]
    pub fn df(&self, t: f64) -> f64 {
        match self.kind {
            WarpKind::Exponential => t.exp(),
            WarpKind::Constant => 0.0,
            WarpKind::Cosh => t.sinh(),
        }
    }

    #[inline]
    pub fn d2f(&self, t: f64) -> f64 {
        match self.kind {
            WarpKind::Exponential => t.exp(),
            WarpKind::Constant => 0.0,
            WarpKind::Cosh => t.cosh(),
        }
    }

    /// `(log f)'(t) = f'/f`.
    #[inline]
    pub fn log_derivative(&self, t: f64) -> f64 {
        match self.kind {
            WarpKind::Exponential => 1.0,
            WarpKind::Constant => 0.0,
            WarpKind::Cosh => t.tanh(),
        }
    }

    /// `(log f)''(t) = f''/f − (f'/f)²`.
    #[inline]
    pub fn log_second_derivative(&self, t: f64) -> f64 {
        match self.kind {
            WarpKind::Exponential | WarpKind::Constant => 0.0,
            WarpKind::Cosh => {
                let c = t.cosh();
                1.0 / (c * c)
            }
        }
    }
}

/// Christoffel symbols `Γ^c_{ab}` of the ambient metric at one point, with
/// index `0` standing for `t` and `1..=n` for the fiber coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    size: usize,
    values: Vec<f64>,
}

impl Christoffel {
    #[inline]
    pub fn get(&self, c: usize, a: usize, b: usize) -> f64 {
        self.values[(c * self.size + a) * self.size + b]
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

/// The warped product `ε I ×_f ℝⁿ` with metric `ε dt² + f(t)² δ`.
///
/// The fiber is flat `ℝⁿ` in its identity chart, so every fiber curvature
/// term is identically zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WarpedModel {
    epsilon: i8,
    warp: WarpFamily,
    fiber_dim: usize,
}

impl WarpedModel {
    pub fn new(epsilon: i32, warp: WarpKind, fiber_dim: usize) -> Result<Self> {
        if epsilon != 1 && epsilon != -1 {
            return Err(Error::InvalidModel(format!("epsilon must be +1 or -1, got {epsilon}")));
        }
        if fiber_dim == 0 {
            return Err(Error::InvalidModel("fiber dimension must be at least 1".into()));
        }
        Ok(Self { epsilon: epsilon as i8, warp: WarpFamily::new(warp), fiber_dim })
    }

    /// `ℍⁿ⁺¹ = ℝ ×_{e^t} ℝⁿ`.
    pub fn hyperbolic(fiber_dim: usize) -> Self {
        Self { epsilon: 1, warp: WarpFamily::new(WarpKind::Exponential), fiber_dim: fiber_dim.max(1) }
    }

    /// Steady State space `−ℝ ×_{e^t} ℝⁿ`.
    pub fn steady_state(fiber_dim: usize) -> Self {
        Self { epsilon: -1, warp: WarpFamily::new(WarpKind::Exponential), fiber_dim: fiber_dim.max(1) }
    }

    pub fn epsilon(&self) -> f64 {
        f64::from(self.epsilon)
    }

    pub fn epsilon_sign(&self) -> i32 {
        i32::from(self.epsilon)
    }

    pub fn is_lorentzian(&self) -> bool {
        self.epsilon < 0
    }

    pub fn warp(&self) -> &WarpFamily {
        &self.warp
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    /// Ambient metric components `ḡ_ab` at height `t`, row-major `(n+1)×(n+1)`.
    pub fn ambient_metric(&self, t: f64) -> Vec<f64> {
        let m = self.fiber_dim + 1;
        let mut g = vec![0.0; m * m];
        g[0] = self.epsilon();
        let f = self.warp.f(t);
        for i in 1..m {
            g[i * m + i] = f * f;
        }
        g
    }

    /// Christoffel symbols of `ε dt² + f(t)² δ`:
    /// `Γ^t_{ij} = −ε f f' δ_ij`, `Γ^i_{tj} = Γ^i_{jt} = (f'/f) δ^i_j`, all
    /// others zero.
    pub fn christoffel(&self, t: f64) -> Christoffel {
        let m = self.fiber_dim + 1;
        let mut values = vec![0.0; m * m * m];
        let f = self.warp.f(t);
        let df = self.warp.df(t);
        let idx = |c: usize, a: usize, b: usize| (c * m + a) * m + b;
        for i in 1..m {
            values[idx(0, i, i)] = -self.epsilon() * f * df;
            values[idx(i, 0, i)] = df / f;
            values[idx(i, i, 0)] = df / f;
        }
        Christoffel { size: m, values }
    }

    /// `Ric̄(N, N)` for a unit normal with `⟨N, ∂t⟩ = normal_t` at height `t`,
    /// using the warped-product Ricci tensor with the given fiber term
    /// `Ric(N^⊤, N^⊤)`.
    pub fn ambient_ricci_normal(&self, t: f64, normal_t: f64, fiber_ricci: f64) -> f64 {
        let n = self.fiber_dim as f64;
        let f = self.warp.f(t);
        let ratio = self.warp.df(t) / f;
        let second = self.warp.d2f(t) / f;
        fiber_ricci
            - (second + (n - 1.0) * ratio * ratio)
            - (n - 1.0) * self.warp.log_second_derivative(t) * normal_t * normal_t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn models() -> Vec<WarpedModel> {
        let mut out = Vec::new();
        for eps in [1, -1] {
            for kind in [WarpKind::Exponential, WarpKind::Constant, WarpKind::Cosh] {
                for n in 1..=3 {
                    out.push(WarpedModel::new(eps, kind, n).unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn rejects_bad_epsilon_and_dimension() {
        assert!(WarpedModel::new(0, WarpKind::Exponential, 2).is_err());
        assert!(WarpedModel::new(2, WarpKind::Exponential, 2).is_err());
        assert!(WarpedModel::new(1, WarpKind::Exponential, 0).is_err());
    }

    #[test]
    fn exponential_evaluators_coincide() {
        let w = WarpFamily::new(WarpKind::Exponential);
        for t in [-3.0, -0.5, 0.0, 0.7, 2.5] {
            assert_eq!(w.f(t), w.df(t));
            assert_eq!(w.f(t), w.d2f(t));
        }
        let c = WarpFamily::new(WarpKind::Constant);
        assert_eq!((c.f(1.3), c.df(1.3), c.d2f(1.3)), (1.0, 0.0, 0.0));
    }

    #[test]
    fn log_derivatives_match_finite_differences() {
        let h = 1e-4;
        for kind in [WarpKind::Exponential, WarpKind::Constant, WarpKind::Cosh] {
            let w = WarpFamily::new(kind);
            for t in [-1.0, 0.0, 0.4, 1.5] {
                let lf = |s: f64| w.f(s).ln();
                let d1 = (lf(t + h) - lf(t - h)) / (2.0 * h);
                let d2 = (lf(t + h) - 2.0 * lf(t) + lf(t - h)) / (h * h);
                assert!((d1 - w.log_derivative(t)).abs() < 1e-7);
                assert!((d2 - w.log_second_derivative(t)).abs() < 1e-5);
            }
        }
    }

    /// Metric compatibility `∂_c ḡ_ab = Γ^d_{ca} ḡ_db + Γ^d_{cb} ḡ_ad`, with
    /// `∂_t ḡ` taken by central differences and fiber derivatives zero.
    #[test]
    fn christoffels_are_metric_compatible() {
        let h = 1e-5;
        for model in models() {
            let m = model.fiber_dim() + 1;
            for t in [-0.8, 0.0, 1.1] {
                let gp = model.ambient_metric(t + h);
                let gm = model.ambient_metric(t - h);
                let g = model.ambient_metric(t);
                let gam = model.christoffel(t);
                for c in 0..m {
                    for a in 0..m {
                        for b in 0..m {
                            let lhs = if c == 0 { (gp[a * m + b] - gm[a * m + b]) / (2.0 * h) } else { 0.0 };
                            let mut rhs = 0.0;
                            for d in 0..m {
                                rhs += gam.get(d, c, a) * g[d * m + b] + gam.get(d, c, b) * g[a * m + d];
                            }
                            assert!((lhs - rhs).abs() < 1e-6 * (1.0 + rhs.abs()), "{model:?} t={t} ({c},{a},{b})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ricci_of_space_forms_along_unit_normals() {
        // ℍⁿ⁺¹ and de Sitter regions: Ric̄(N,N) = −n for any unit normal.
        for n in 1..=4 {
            for model in [WarpedModel::hyperbolic(n), WarpedModel::steady_state(n)] {
                for c in [-1.0, -1.7, 0.3] {
                    let r = model.ambient_ricci_normal(0.4, c, 0.0);
                    assert!((r + n as f64).abs() < 1e-14);
                }
            }
        }
    }
}

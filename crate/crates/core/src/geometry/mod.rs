//! Extrinsic and intrinsic geometry of vertical graphs `ψ(x) = (u(x), x)`.

mod bundle;
mod identities;
mod surface;

pub use bundle::{build_bundle, mean_curvature, GeometryBundle};
pub use identities::{
    hyperbolic_angle, laplacian_eta_conformal, laplacian_eta_warped, laplacian_eta_warped_with, laplacian_h_formula,
    ricci_lower_bound_check, ricci_margin, scalar_curvature, RicciBound, ScalarCurvature,
};
pub use surface::{GraphSurface, Orientation};

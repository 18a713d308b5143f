//! Hypotheses and differential inequalities of the rigidity statements for
//! CMC graphs in the Steady State space `ℋⁿ⁺¹` and the Hyperbolic space
//! `ℍⁿ⁺¹`, evaluated on a computed [`GeometryBundle`].
//!
//! Every check reports the signed slack of its condition at the worst
//! comparison point: the margin is `≥ 0` exactly when the condition holds
//! there, and `holds` accepts margins down to `−tolerance`. Equalities are
//! reported with margin `−max|lhs − rhs|`.
//!
//! The conclusions themselves rest on a maximum principle for complete
//! noncompact manifolds and are not simulated; only their premises are
//! checked.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{ricci_margin, GeometryBundle};
use crate::tolerance::{GridTolerance, MACHINE_TOL};
use crate::warp::{ScalarField, WarpKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremId {
    /// Growth-bounded CMC graphs in `ℋⁿ⁺¹` with `H ≥ 1`.
    SteadyState41,
    /// Gradient-bounded CMC surfaces in `ℋ³`.
    SteadyStateBernstein43,
    /// Growth-bounded CMC graphs in `ℍⁿ⁺¹` with `0 ≤ H ≤ 1`.
    Hyperbolic51,
    /// Gradient-bounded CMC graphs in `ℍ³`.
    HyperbolicBernstein52,
}

impl TheoremId {
    pub const ALL: [TheoremId; 4] =
        [Self::SteadyState41, Self::SteadyStateBernstein43, Self::Hyperbolic51, Self::HyperbolicBernstein52];

    pub fn name(self) -> &'static str {
        match self {
            Self::SteadyState41 => "SteadyState41",
            Self::SteadyStateBernstein43 => "SteadyStateBernstein43",
            Self::Hyperbolic51 => "Hyperbolic51",
            Self::HyperbolicBernstein52 => "HyperbolicBernstein52",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == name)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub holds: bool,
    pub margin: f64,
    pub tolerance: f64,
    pub worst_point: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// All hypotheses and all inequalities hold.
    Pass,
    /// The hypotheses hold but some inequality fails.
    Fail,
    /// Some hypothesis fails, so the inequalities carry no obligation.
    Partial,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Partial => "partial",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub theorem_id: TheoremId,
    pub hypothesis_results: Vec<CheckResult>,
    pub inequality_results: Vec<CheckResult>,
    /// Reported quantities without pass/fail weight.
    pub advisory_results: Vec<CheckResult>,
    pub conclusion_notes: Vec<String>,
}

impl AuditReport {
    pub fn verdict(&self) -> Verdict {
        if self.hypothesis_results.iter().any(|c| !c.holds) {
            Verdict::Partial
        } else if self.inequality_results.iter().any(|c| !c.holds) {
            Verdict::Fail
        } else {
            Verdict::Pass
        }
    }

    pub fn hypothesis(&self, name: &str) -> Option<&CheckResult> {
        self.hypothesis_results.iter().find(|c| c.name == name)
    }

    pub fn inequality(&self, name: &str) -> Option<&CheckResult> {
        self.inequality_results.iter().find(|c| c.name == name)
    }

    pub fn advisory(&self, name: &str) -> Option<&CheckResult> {
        self.advisory_results.iter().find(|c| c.name == name)
    }
}

/// Tolerances used by the auditors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditTolerances {
    /// `tol_grid`, for oracle comparisons and closed inequalities.
    pub grid: f64,
    /// Admission tolerance for "H is constant".
    pub cmc: f64,
    /// Relative tolerance for algebraic identities.
    pub machine: f64,
}

impl AuditTolerances {
    pub fn for_bundle(bundle: &GeometryBundle) -> Self {
        let t = GridTolerance::for_grid(bundle.grid());
        Self { grid: t.value(), cmc: t.cmc(), machine: MACHINE_TOL }
    }
}

/// Pointwise slack evaluation over the comparison points.
struct Checker<'a> {
    bundle: &'a GeometryBundle,
    mask: Vec<bool>,
}

impl<'a> Checker<'a> {
    fn new(bundle: &'a GeometryBundle) -> Self {
        Self { bundle, mask: bundle.comparison_mask() }
    }

    fn points(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &m)| m).map(|(p, _)| p)
    }

    /// Minimum of `slack` with its first minimizer.
    fn check(&self, name: &str, tolerance: f64, slack: impl Fn(usize) -> f64) -> CheckResult {
        let mut worst = (f64::INFINITY, None);
        for p in self.points() {
            let s = slack(p);
            let s = if s.is_nan() { f64::NEG_INFINITY } else { s };
            if worst.1.is_none() || s < worst.0 {
                worst = (s, Some(p));
            }
        }
        let margin = worst.0;
        CheckResult {
            name: name.into(),
            holds: margin >= -tolerance,
            margin,
            tolerance,
            worst_point: self.bundle.grid().multi_index(worst.1.unwrap_or(0)),
        }
    }

    fn equality(&self, name: &str, tolerance: f64, lhs: &ScalarField, rhs: impl Fn(usize) -> f64) -> CheckResult {
        self.check(name, tolerance, |p| -(lhs.get(p) - rhs(p)).abs())
    }

    fn mean_h(&self) -> f64 {
        let (sum, count) = self.points().fold((0.0, 0usize), |(s, c), p| (s + self.bundle.mean_curvature.get(p), c + 1));
        sum / count.max(1) as f64
    }

    fn cmc(&self, tol: &AuditTolerances) -> CheckResult {
        let mean = self.mean_h();
        self.check("constant_mean_curvature", tol.cmc, |p| -(self.bundle.mean_curvature.get(p) - mean).abs())
    }

    fn min_of(&self, field: &ScalarField) -> (f64, usize) {
        self.points().fold((f64::INFINITY, 0), |(m, q), p| if field.get(p) < m { (field.get(p), p) } else { (m, q) })
    }

    fn max_abs_of(&self, field: &ScalarField) -> f64 {
        self.points().map(|p| field.get(p).abs()).fold(0.0, f64::max)
    }
}

fn require_model(bundle: &GeometryBundle, lorentzian: bool, surfaces_only: bool) -> Result<()> {
    let model = &bundle.model;
    let name = if lorentzian { "Steady State" } else { "Hyperbolic" };
    if model.is_lorentzian() != lorentzian || model.warp().kind() != WarpKind::Exponential {
        return Err(Error::Unsupported(format!("this audit needs the {name} model")));
    }
    if surfaces_only && bundle.n() != 2 {
        return Err(Error::Unsupported("n=2 required".into()));
    }
    if bundle.normal_t.values().iter().any(|&c| c >= 0.0) {
        return Err(Error::Orientation("the audit needs the orientation with <N,dt> < 0".into()));
    }
    if bundle.h2.is_none() || bundle.scalar_curvature.is_none() {
        return Err(Error::Unsupported("scalar curvature unavailable; n >= 2 required".into()));
    }
    Ok(())
}

fn exp_field(field: &ScalarField, sign: f64) -> Result<ScalarField> {
    field.map(|v| (sign * v).exp())
}

const OMORI_YAU_NOTE: &str =
    "only the premises of the maximum-principle step are checked; the rigidity conclusion is not simulated";

/// Audit of growth-bounded CMC graphs in the Steady State space with `H ≥ 1`.
pub fn audit_steady_state_41(bundle: &GeometryBundle) -> Result<AuditReport> {
    audit_steady_state_41_with(bundle, &AuditTolerances::for_bundle(bundle))
}

pub fn audit_steady_state_41_with(bundle: &GeometryBundle, tol: &AuditTolerances) -> Result<AuditReport> {
    require_model(bundle, true, false)?;
    let ck = Checker::new(bundle);
    let n = bundle.n() as f64;
    let b = bundle;
    let hm = |p: usize| b.mean_curvature.get(p);
    let h2 = b.h2.as_ref().expect("checked by require_model");
    let r = b.scalar_curvature.as_ref().expect("checked by require_model");

    // g = −e^h − η = e^h(cosh θ − 1)
    let e_h = exp_field(&b.h, 1.0)?;
    let g = e_h.zip_map(&b.eta, |a, eta| -a - eta)?;
    let lap_g = b.oracle_laplacian(&g)?;

    let hypotheses = vec![
        // 1 − |Du|²/f² = 1/⟨N,∂t⟩²
        ck.check("spacelike", 0.0, |p| 1.0 / (b.normal_t.get(p) * b.normal_t.get(p))),
        ck.cmc(tol),
        ck.check("mean_curvature_at_least_one", tol.grid, |p| hm(p) - 1.0),
        ck.check("growth", tol.grid, |p| {
            let x = -b.normal_t.get(p) - 1.0;
            if x <= tol.grid {
                f64::INFINITY
            } else {
                -x.ln() - b.h.get(p)
            }
        }),
        // Used as −η ≥ e^h ≥ 1 in the first lower bound for Δg.
        ck.check("height_nonnegative", tol.machine, |p| b.h.get(p)),
    ];

    let key = |p: usize| {
        let (h, eta, s2) = (hm(p), b.eta.get(p), h2.get(p));
        n * (h - 1.0) * (-e_h.get(p) - h * eta) - n * (n - 1.0) * (h * h - s2) * eta
    };
    let mut inequalities = vec![
        ck.check("g_nonnegative", tol.grid, |p| g.get(p)),
        ck.check("g_at_most_one", tol.grid, |p| 1.0 - g.get(p)),
        ck.equality("laplacian_g_identity", tol.grid, &lap_g, key),
        ck.check("laplacian_g_lower_bound", tol.grid, |p| {
            let h = hm(p);
            lap_g.get(p) - (n * (h - 1.0) * g.get(p) + n * (n - 1.0) * (h * h - h2.get(p)))
        }),
        ck.check("laplacian_g_quadratic_bound", tol.grid, |p| {
            lap_g.get(p) - n * (hm(p) - 1.0) * g.get(p) * g.get(p)
        }),
    ];

    let mut notes = vec![String::from(OMORI_YAU_NOTE)];
    let mean = ck.mean_h();
    if (mean - 1.0).abs() <= tol.cmc {
        inequalities.push(ck.check("laplacian_g_scalar_curvature_bound", tol.grid, |p| lap_g.get(p) - r.get(p)));
        inequalities.push(ck.check("scalar_curvature_nonnegative", tol.grid, |p| r.get(p)));
        let (min_abs, _) = ck.min_of(&r.map(f64::abs)?);
        notes.push(format!("part (b): inf |R| over the grid = {min_abs:e}; global behaviour is not asserted"));
    } else {
        notes.push(format!("part (b) not evaluated: mean H = {mean} differs from 1"));
    }

    let mut advisory = vec![ck.check("gradient_remark", 0.0, |p| {
        (-b.h.get(p)).exp() - b.grad_h_norm2.get(p)
    })];
    if let Some(k) = &b.gaussian_curvature {
        let ricci = ricci_margin(k, &b.mean_curvature, &ck.mask);
        advisory.push(CheckResult {
            name: "ricci_lower_bound".into(),
            holds: ricci.min_margin >= -tol.grid,
            margin: ricci.min_margin,
            tolerance: tol.grid,
            worst_point: ricci.worst_point,
        });
    }

    Ok(AuditReport {
        theorem_id: TheoremId::SteadyState41,
        hypothesis_results: hypotheses,
        inequality_results: inequalities,
        advisory_results: advisory,
        conclusion_notes: notes,
    })
}

/// Audit of gradient-bounded CMC surfaces in `ℋ³`.
pub fn audit_steady_state_bernstein_43(bundle: &GeometryBundle) -> Result<AuditReport> {
    audit_steady_state_bernstein_43_with(bundle, &AuditTolerances::for_bundle(bundle))
}

pub fn audit_steady_state_bernstein_43_with(bundle: &GeometryBundle, tol: &AuditTolerances) -> Result<AuditReport> {
    require_model(bundle, true, true)?;
    let ck = Checker::new(bundle);
    let b = bundle;
    let hm = |p: usize| b.mean_curvature.get(p);
    let c = |p: usize| b.normal_t.get(p);
    let k = b.gaussian_curvature.as_ref().expect("n = 2 with exponential warp");

    let hypotheses = vec![
        ck.check("spacelike", 0.0, |p| 1.0 / (c(p) * c(p))),
        ck.cmc(tol),
        ck.check("mean_curvature_at_least_one", tol.grid, |p| hm(p) - 1.0),
        ck.check("gaussian_curvature_nonnegative", tol.grid, |p| k.get(p)),
        ck.check("gradient_bound", tol.grid, |p| hm(p) * hm(p) - 1.0 - b.grad_h_norm2.get(p)),
    ];

    let e_mh = exp_field(&b.h, -1.0)?;
    let lap = b.oracle_laplacian(&e_mh)?;
    let bracket = |p: usize| b.grad_h_norm2.get(p) + 1.0 + hm(p) * c(p);
    let inequalities = vec![
        ck.equality("gradient_identity", tol.machine, &b.grad_h_norm2, |p| c(p) * c(p) - 1.0),
        ck.check("gradient_bound_equivalent_form", tol.grid, |p| -bracket(p)),
        ck.equality("laplacian_exp_neg_h_identity", tol.grid, &lap, |p| 2.0 * e_mh.get(p) * bracket(p)),
        ck.check("exp_neg_h_superharmonic", tol.grid, |p| -lap.get(p)),
    ];

    Ok(AuditReport {
        theorem_id: TheoremId::SteadyStateBernstein43,
        hypothesis_results: hypotheses,
        inequality_results: inequalities,
        advisory_results: Vec::new(),
        conclusion_notes: vec![String::from(
            "parabolicity of complete surfaces with K >= 0 is assumed, not checked; only superharmonicity of e^-h is verified",
        )],
    })
}

/// Audit of growth-bounded CMC graphs in the Hyperbolic space with
/// `0 ≤ H ≤ 1`.
pub fn audit_hyperbolic_51(bundle: &GeometryBundle) -> Result<AuditReport> {
    audit_hyperbolic_51_with(bundle, &AuditTolerances::for_bundle(bundle))
}

pub fn audit_hyperbolic_51_with(bundle: &GeometryBundle, tol: &AuditTolerances) -> Result<AuditReport> {
    require_model(bundle, false, false)?;
    let ck = Checker::new(bundle);
    let n = bundle.n() as f64;
    let b = bundle;
    let hm = |p: usize| b.mean_curvature.get(p);
    let c = |p: usize| b.normal_t.get(p);
    let h2 = b.h2.as_ref().expect("checked by require_model");
    let r = b.scalar_curvature.as_ref().expect("checked by require_model");

    // g = e^h + η = e^h(1 + ⟨N,∂t⟩)
    let e_h = exp_field(&b.h, 1.0)?;
    let g = e_h.zip_map(&b.eta, |a, eta| a + eta)?;
    let lap_g = b.oracle_laplacian(&g)?;
    let mean = ck.mean_h();
    let part_b = (mean - 1.0).abs() <= tol.cmc;

    let mut hypotheses = vec![
        ck.cmc(tol),
        ck.check("mean_curvature_range", tol.grid, |p| hm(p).min(1.0 - hm(p))),
        ck.check("growth", tol.grid, |p| {
            let x = 1.0 + c(p);
            if x <= tol.grid {
                f64::INFINITY
            } else {
                -x.ln() - b.h.get(p)
            }
        }),
    ];
    if part_b {
        // Used as η ≤ ⟨N,∂t⟩ in the scalar-curvature bound.
        hypotheses.push(ck.check("height_nonnegative", tol.machine, |p| b.h.get(p)));
    }

    let mut inequalities = vec![
        ck.check("g_nonnegative", tol.grid, |p| g.get(p)),
        ck.check("g_at_most_one", tol.grid, |p| 1.0 - g.get(p)),
        ck.equality("laplacian_g_identity", tol.grid, &lap_g, |p| {
            let (h, eta) = (hm(p), b.eta.get(p));
            n * (1.0 - h) * (e_h.get(p) + h * eta) - n * (n - 1.0) * (h * h - h2.get(p)) * eta
        }),
        // e^h + Hη = g + (1 − H)(−η) ≥ g, with equality only for H = 1.
        ck.check("laplacian_g_lower_bound", tol.grid, |p| {
            let h = hm(p);
            lap_g.get(p) - (n * (1.0 - h) * g.get(p) - n * (n - 1.0) * (h * h - h2.get(p)) * b.eta.get(p))
        }),
        ck.check("laplacian_g_quadratic_bound", tol.grid, |p| {
            lap_g.get(p) - n * (1.0 - hm(p)) * g.get(p) * g.get(p)
        }),
    ];

    let mut notes = vec![String::from(OMORI_YAU_NOTE)];
    let (beta, beta_at) = ck.min_of(&b.normal_t.map(|v| -v)?);
    let mut advisory = vec![CheckResult {
        name: "gauss_map_beta".into(),
        holds: beta > 0.0,
        margin: beta,
        tolerance: 0.0,
        worst_point: b.grid().multi_index(beta_at),
    }];
    if let Some(k) = &b.gaussian_curvature {
        let (min_k, at) = ck.min_of(k);
        advisory.push(CheckResult {
            name: "min_gaussian_curvature".into(),
            holds: true,
            margin: min_k,
            tolerance: 0.0,
            worst_point: b.grid().multi_index(at),
        });
        notes.push(String::from("Ricci curvature bounded below is vacuous on a finite grid; min K is advisory"));
    }
    if part_b {
        inequalities.push(ck.equality("laplacian_g_scalar_curvature_identity", tol.grid, &lap_g, |p| {
            r.get(p) * b.eta.get(p)
        }));
        inequalities.push(ck.check("laplacian_g_scalar_curvature_bound", tol.grid, |p| lap_g.get(p) - r.get(p) * c(p)));
        inequalities.push(ck.check("scalar_curvature_nonpositive", tol.grid, |p| -r.get(p)));
        let (min_abs, _) = ck.min_of(&r.map(f64::abs)?);
        notes.push(format!("part (b): beta = inf <-N,dt> = {beta}, inf |R| = {min_abs:e}; global behaviour is not asserted"));
    } else {
        notes.push(format!("part (b) not evaluated: mean H = {mean} differs from 1"));
    }

    Ok(AuditReport {
        theorem_id: TheoremId::Hyperbolic51,
        hypothesis_results: hypotheses,
        inequality_results: inequalities,
        advisory_results: advisory,
        conclusion_notes: notes,
    })
}

/// Audit of gradient-bounded CMC graphs in `ℍ³`.
pub fn audit_hyperbolic_bernstein_52(bundle: &GeometryBundle) -> Result<AuditReport> {
    audit_hyperbolic_bernstein_52_with(bundle, &AuditTolerances::for_bundle(bundle))
}

pub fn audit_hyperbolic_bernstein_52_with(bundle: &GeometryBundle, tol: &AuditTolerances) -> Result<AuditReport> {
    require_model(bundle, false, true)?;
    let ck = Checker::new(bundle);
    let b = bundle;
    let hm = |p: usize| b.mean_curvature.get(p);
    let c = |p: usize| b.normal_t.get(p);
    let k = b.gaussian_curvature.as_ref().expect("n = 2 with exponential warp");

    let lower = core::f64::consts::FRAC_1_SQRT_2;
    let hypotheses = vec![
        ck.cmc(tol),
        ck.check("mean_curvature_range", tol.grid, |p| (hm(p) - lower).min(1.0 - hm(p))),
        ck.check("gaussian_curvature_nonnegative", tol.grid, |p| k.get(p)),
        ck.check("gradient_bound", tol.grid, |p| 1.0 - hm(p) * hm(p) - b.grad_h_norm2.get(p)),
    ];

    let e_mh = exp_field(&b.h, -1.0)?;
    let lap = b.oracle_laplacian(&e_mh)?;
    let bracket = |p: usize| b.grad_h_norm2.get(p) - 1.0 - hm(p) * c(p);
    let remark = |p: usize| 2.0 * hm(p) * hm(p) - 1.0 - 0.5 * b.a_norm2.get(p);
    let scale = 1.0 + ck.max_abs_of(k) + ck.max_abs_of(&b.a_norm2) + 2.0 * ck.max_abs_of(&b.mean_curvature).powi(2);
    let inequalities = vec![
        ck.equality("gradient_identity", tol.machine, &b.grad_h_norm2, |p| 1.0 - c(p) * c(p)),
        ck.check("gradient_bound_equivalent_form", tol.grid, |p| -bracket(p)),
        ck.equality("curvature_remark_identity", tol.machine * scale, k, remark),
        ck.equality("laplacian_exp_neg_h_identity", tol.grid, &lap, |p| 2.0 * e_mh.get(p) * bracket(p)),
        ck.check("exp_neg_h_superharmonic", tol.grid, |p| -lap.get(p)),
    ];

    Ok(AuditReport {
        theorem_id: TheoremId::HyperbolicBernstein52,
        hypothesis_results: hypotheses,
        inequality_results: inequalities,
        advisory_results: Vec::new(),
        conclusion_notes: vec![String::from(
            "parabolicity of complete surfaces with K >= 0 is assumed, not checked; only superharmonicity of e^-h is verified",
        )],
    })
}

/// Runs the auditor of `theorem`.
pub fn audit(theorem: TheoremId, bundle: &GeometryBundle) -> Result<AuditReport> {
    match theorem {
        TheoremId::SteadyState41 => audit_steady_state_41(bundle),
        TheoremId::SteadyStateBernstein43 => audit_steady_state_bernstein_43(bundle),
        TheoremId::Hyperbolic51 => audit_hyperbolic_51(bundle),
        TheoremId::HyperbolicBernstein52 => audit_hyperbolic_bernstein_52(bundle),
    }
}

//! The four subcommands. Each returns the process exit status on success
//! and a [`CliError`] (which carries its own status) otherwise.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use warpgeom_core::audit::{audit, Verdict};
use warpgeom_core::geometry::{laplacian_eta_conformal, laplacian_eta_warped, laplacian_h_formula, scalar_curvature};
use warpgeom_core::solver::{make_perturbed, make_slice, solve_cmc, SolveConfig, SolveReport};
use warpgeom_core::tolerance::MACHINE_TOL;
use warpgeom_core::warp::conformality_residual;
use warpgeom_core::{build_bundle, Boundary, Error as CoreError, GeometryBundle, GraphSurface, Grid, GridTolerance, ScalarField};

use crate::config::{BoundarySpec, GridSpec, RunConfig, SurfaceSource};
use crate::error::{CliError, Result, EXIT_FAILURE};
use crate::fieldio::{read_field, write_field};
use crate::report::{format_audit, format_manifest, format_solver_report, parse_key_values, parse_verdicts};

pub const VERIFY_SUMMARY: &str = "verify_summary.csv";

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub timestamp: bool,
    pub spacing_override: Option<f64>,
}

impl Options {
    fn header(&self) -> Option<String> {
        self.timestamp.then(|| {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            format!("generated_unix={secs}")
        })
    }

    fn out_dir(&self, cfg: Option<&RunConfig>) -> Result<PathBuf> {
        let dir = self
            .out
            .clone()
            .or_else(|| cfg.and_then(|c| c.output_dir.clone()))
            .ok_or_else(|| CliError::Usage("no output directory: pass --out or set output.dir".into()))?;
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(dir)
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| CliError::file(path, e.to_string()))
}

fn csv_error(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::file(path, e.to_string())
}

/// A configured surface and, when it was solved for, the solver record.
pub struct Built {
    pub surface: GraphSurface,
    pub solve: Option<(f64, SolveReport)>,
}

fn grid_spec(cfg: &RunConfig, opts: &Options) -> Result<GridSpec> {
    match opts.spacing_override {
        None => Ok(cfg.grid.clone()),
        Some(_) if matches!(cfg.surface, SurfaceSource::File(_)) => {
            Err(CliError::Usage("--spacing-override cannot resample a surface read from a file".into()))
        }
        Some(s) => cfg.grid.with_spacing(s),
    }
}

fn read_on_grid(path: &Path, grid: &Arc<Grid>) -> Result<ScalarField> {
    let field = read_field(path)?;
    if **field.grid() != **grid {
        return Err(CliError::file(path, "grid in the file header differs from the configured grid"));
    }
    ScalarField::new(grid.clone(), field.into_values()).map_err(CliError::from)
}

fn boundary_data(spec: &BoundarySpec, grid: &Arc<Grid>) -> Result<ScalarField> {
    let field = match spec {
        BoundarySpec::Constant(c) => ScalarField::constant(grid.clone(), *c)?,
        BoundarySpec::Sine(a) => ScalarField::from_fn(grid.clone(), |x| a * x[0].sin())?,
        BoundarySpec::Quadratic(a) => {
            ScalarField::from_fn(grid.clone(), |x| a * (x[0] + x.get(1).map_or(0.0, |y| y * y)))?
        }
        BoundarySpec::File(path) => read_on_grid(path, grid)?,
    };
    Ok(field)
}

pub fn build_surface(cfg: &RunConfig, opts: &Options) -> Result<Built> {
    let grid = grid_spec(cfg, opts)?.build()?;
    let model = &cfg.model;
    let (surface, solve) = match &cfg.surface {
        SurfaceSource::Slice { t0 } => (make_slice(model, &grid, *t0)?, None),
        SurfaceSource::Perturbed { t0, amplitude, mode } => (make_perturbed(model, &grid, *t0, *amplitude, mode)?, None),
        SurfaceSource::File(path) => {
            let u = read_on_grid(path, &grid)?;
            (GraphSurface::new(*model, u).map_err(|e| CliError::file(path, e.to_string()))?, None)
        }
        SurfaceSource::Solve(spec) => {
            let mut sc = SolveConfig::new(spec.h_target, boundary_data(&spec.boundary, &grid)?);
            sc.max_iters = spec.max_iters;
            sc.newton_tol = spec.newton_tol;
            sc.damping = spec.damping;
            sc.orientation = Some(cfg.orientation);
            let solution = solve_cmc(model, &grid, &sc)?;
            (solution.surface, Some((spec.h_target, solution.report)))
        }
    };
    let surface = if cfg.translate != 0.0 { surface.translated(cfg.translate)? } else { surface };
    if let Some(index) = surface.first_invalid() {
        return Err(CoreError::InvalidSurface { index }.into());
    }
    Ok(Built { surface, solve })
}

fn write_solution(dir: &Path, cfg: &RunConfig, built: &Built, opts: &Options) -> Result<()> {
    if let Some((h_target, report)) = &built.solve {
        write_field(&dir.join(format!("{}.solution.csv", cfg.surface_id)), built.surface.u())?;
        let text = format_solver_report(*h_target, report, opts.header().as_deref());
        write_text(&dir.join(format!("{}.solver.txt", cfg.surface_id)), &text)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRow {
    pub identity: &'static str,
    pub max_error: Option<f64>,
    pub tolerance: f64,
}

impl IdentityRow {
    fn new(identity: &'static str, max_error: f64, tolerance: f64) -> Self {
        Self { identity, max_error: Some(max_error), tolerance }
    }

    fn skipped(identity: &'static str, tolerance: f64) -> Self {
        Self { identity, max_error: None, tolerance }
    }

    pub fn status(&self) -> Status {
        match self.max_error {
            None => Status::Skipped,
            Some(e) if e <= self.tolerance => Status::Pass,
            Some(_) => Status::Fail,
        }
    }
}

fn max_pointwise(bundle: &GeometryBundle, err: impl Fn(usize) -> f64) -> f64 {
    (0..bundle.grid().len()).map(err).fold(0.0, f64::max)
}

/// `(t, x₁)` sample box covering the height range of the surface, with the
/// spacing of the first fiber axis.
fn conformality_samples(bundle: &GeometryBundle) -> Result<ScalarField> {
    let s = bundle.grid().spacing()[0];
    let (lo, hi) = (bundle.h.min(), bundle.h.max());
    let extent = (((hi - lo) / s).ceil() as usize + 1).max(5);
    let samples = Arc::new(Grid::new(vec![extent, 5], vec![s, s], Boundary::Dirichlet)?);
    Ok(ScalarField::from_fn(samples, |x| lo + x[0])?)
}

/// Oracle and algebraic identity checks on one bundle.
pub fn identity_rows(bundle: &GeometryBundle) -> Result<Vec<IdentityRow>> {
    let tol = GridTolerance::for_grid(bundle.grid());
    let mask = bundle.comparison_mask();
    let n = bundle.n() as f64;
    let mut rows = Vec::new();

    let oracle_h = bundle.oracle_laplacian(&bundle.h)?;
    rows.push(IdentityRow::new("laplacian_h", oracle_h.max_abs_diff_masked(&laplacian_h_formula(bundle)?, &mask).0, tol.value()));

    let oracle_eta = bundle.oracle_laplacian(&bundle.eta)?;
    let conformal = laplacian_eta_conformal(bundle)?;
    rows.push(IdentityRow::new("laplacian_eta_conformal", oracle_eta.max_abs_diff_masked(&conformal, &mask).0, tol.support()));
    match laplacian_eta_warped(bundle) {
        Ok(warped) => {
            rows.push(IdentityRow::new("laplacian_eta_warped", oracle_eta.max_abs_diff_masked(&warped, &mask).0, tol.support()));
            rows.push(IdentityRow::new("laplacian_eta_forms_agree", conformal.max_abs_diff_masked(&warped, &mask).0, tol.cmc()));
        }
        Err(CoreError::NotCmc { .. }) => {
            rows.push(IdentityRow::skipped("laplacian_eta_warped", tol.support()));
            rows.push(IdentityRow::skipped("laplacian_eta_forms_agree", tol.cmc()));
        }
        Err(e) => return Err(e.into()),
    }

    match &bundle.h2 {
        Some(h2) => rows.push(IdentityRow::new(
            "a_norm2_identity",
            max_pointwise(bundle, |p| {
                let (h, a2) = (bundle.mean_curvature.get(p), bundle.a_norm2.get(p));
                (a2 - (n * n * h * h - n * (n - 1.0) * h2.get(p))).abs() / a2.abs().max(1.0)
            }),
            MACHINE_TOL,
        )),
        None => rows.push(IdentityRow::skipped("a_norm2_identity", MACHINE_TOL)),
    }

    match scalar_curvature(bundle) {
        Ok(sc) if sc.remark_residual.is_some() => {
            rows.push(IdentityRow::new("gaussian_curvature_remark", sc.remark_residual.unwrap(), MACHINE_TOL))
        }
        Ok(_) | Err(CoreError::Unsupported(_)) => rows.push(IdentityRow::skipped("gaussian_curvature_remark", MACHINE_TOL)),
        Err(e) => return Err(e.into()),
    }

    let eps = bundle.epsilon();
    rows.push(IdentityRow::new(
        "gradient_normal",
        max_pointwise(bundle, |p| {
            let c = bundle.normal_t.get(p);
            let g2 = bundle.grad_h_norm2.get(p);
            // Lorentzian |∇h|² = c² − 1, Riemannian |∇h|² = 1 − c².
            let expected = if eps < 0.0 { c * c - 1.0 } else { 1.0 - c * c };
            (g2 - expected).abs() / g2.max(1.0)
        }),
        MACHINE_TOL,
    ));
    let metric_form = bundle.gradient_inner(&bundle.h, &bundle.h)?;
    rows.push(IdentityRow::new(
        "gradient_metric",
        max_pointwise(bundle, |p| {
            let g2 = bundle.grad_h_norm2.get(p);
            (g2 - metric_form.get(p)).abs() / g2.max(1.0)
        }),
        MACHINE_TOL,
    ));

    let samples = conformality_samples(bundle)?;
    let tol_samples = GridTolerance::for_grid(samples.grid()).value();
    rows.push(IdentityRow::new("conformality", conformality_residual(&bundle.model, &samples)?, tol_samples));
    Ok(rows)
}

fn bundle_fields(bundle: &GeometryBundle) -> Vec<(String, &ScalarField)> {
    let mut out: Vec<(String, &ScalarField)> = vec![
        ("h".into(), &bundle.h),
        ("eta".into(), &bundle.eta),
        ("normal_t".into(), &bundle.normal_t),
        ("mean_curvature".into(), &bundle.mean_curvature),
        ("a_norm2".into(), &bundle.a_norm2),
        ("grad_h_norm2".into(), &bundle.grad_h_norm2),
    ];
    for (i, k) in bundle.principal.iter().enumerate() {
        out.push((format!("principal_{i}"), k));
    }
    let optional = [
        ("h2", &bundle.h2),
        ("theta", &bundle.theta),
        ("scalar_curvature", &bundle.scalar_curvature),
        ("gaussian_curvature", &bundle.gaussian_curvature),
    ];
    for (name, field) in optional {
        if let Some(f) = field {
            out.push((name.into(), f));
        }
    }
    out
}

/// Writes one field file per bundle quantity and the manifest.
pub fn export_bundle(dir: &Path, id: &str, bundle: &GeometryBundle, header: Option<&str>) -> Result<()> {
    for (name, field) in bundle_fields(bundle) {
        write_field(&dir.join(format!("{id}.{name}.csv")), field)?;
    }
    write_text(&dir.join(format!("{id}.manifest")), &format_manifest(id, bundle, header))
}

pub fn cmd_verify(cfg: &RunConfig, opts: &Options) -> Result<u8> {
    let dir = opts.out_dir(Some(cfg))?;
    let built = build_surface(cfg, opts)?;
    write_solution(&dir, cfg, &built, opts)?;
    let bundle = build_bundle(&built.surface, cfg.orientation)?;
    let rows = identity_rows(&bundle)?;
    export_bundle(&dir, &cfg.surface_id, &bundle, opts.header().as_deref())?;

    let path = dir.join(VERIFY_SUMMARY);
    let mut w = csv_writer(&path)?;
    w.write_record(["identity", "max_error", "tolerance", "pass"]).map_err(csv_error(&path))?;
    for r in &rows {
        let err = r.max_error.map(|e| format!("{e:.16e}")).unwrap_or_default();
        w.write_record([r.identity, &err, &format!("{:.16e}", r.tolerance), r.status().name()])
            .map_err(csv_error(&path))?;
        println!("{:<28} {:>10} {}", r.identity, r.status().name(), err);
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;
    let failed = rows.iter().filter(|r| r.status() == Status::Fail).count();
    Ok(if failed == 0 { 0 } else { EXIT_FAILURE })
}

pub fn cmd_solve(cfg: &RunConfig, opts: &Options) -> Result<u8> {
    if !matches!(cfg.surface, SurfaceSource::Solve(_)) {
        return Err(CliError::Usage("solve needs surface = solve in the config".into()));
    }
    let dir = opts.out_dir(Some(cfg))?;
    let built = build_surface(cfg, opts)?;
    write_solution(&dir, cfg, &built, opts)?;
    let (_, report) = built.solve.as_ref().expect("solve source");
    println!("converged in {} iterations, residual {:.3e}", report.iterations, report.final_residual);
    Ok(0)
}

pub fn cmd_audit(cfg: &RunConfig, opts: &Options) -> Result<u8> {
    if cfg.audits.is_empty() {
        return Err(CliError::Usage("audit needs audit.theorems in the config".into()));
    }
    let dir = opts.out_dir(Some(cfg))?;
    let built = build_surface(cfg, opts)?;
    write_solution(&dir, cfg, &built, opts)?;
    let bundle = build_bundle(&built.surface, cfg.orientation)?;
    let reports = cfg.audits.iter().map(|&t| audit(t, &bundle)).collect::<std::result::Result<Vec<_>, _>>()?;
    let mut all_pass = true;
    for report in &reports {
        let path = dir.join(format!("{}.{}.audit.txt", cfg.surface_id, report.theorem_id));
        write_text(&path, &format_audit(report, opts.header().as_deref()))?;
        println!("VERDICT {} {}", report.theorem_id, report.verdict());
        all_pass &= report.verdict() == Verdict::Pass;
    }
    Ok(if all_pass { 0 } else { EXIT_FAILURE })
}

fn run_label(dir: &Path) -> String {
    dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| dir.display().to_string())
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut entries = fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| CliError::io(dir, err)))
        .collect::<Result<Vec<_>>>()?;
    entries.sort();
    Ok(entries)
}

fn has_suffix(path: &Path, suffix: &str) -> bool {
    path.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(suffix))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

struct ErrorPoint {
    run: String,
    spacing: f64,
    identity: String,
    max_error: f64,
    tolerance: String,
}

/// Collects prior run directories into `summary.csv`, `convergence.csv`
/// and `error_vs_spacing.csv`. Nothing is recomputed.
pub fn cmd_report(inputs: &[PathBuf], opts: &Options) -> Result<u8> {
    if inputs.is_empty() {
        return Err(CliError::Usage("report needs at least one run directory".into()));
    }
    let dir = opts.out_dir(None)?;
    let summary_path = dir.join("summary.csv");
    let convergence_path = dir.join("convergence.csv");
    let mut summary = csv_writer(&summary_path)?;
    let mut convergence = csv_writer(&convergence_path)?;
    summary.write_record(["run", "check", "status"]).map_err(csv_error(&summary_path))?;
    convergence.write_record(["run", "surface", "iteration", "residual", "damping"]).map_err(csv_error(&convergence_path))?;
    let mut errors = Vec::new();

    for input in inputs {
        let run = run_label(input);
        let entries = sorted_entries(input)?;
        let spacing = entries
            .iter()
            .filter(|p| has_suffix(p, ".manifest"))
            .map(|p| read_text(p).map(|t| (p, t)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .map(|(p, text)| {
                parse_key_values(&text)
                    .into_iter()
                    .find(|(k, _)| k == "spacing")
                    .and_then(|(_, v)| v.split(',').map(|s| s.parse::<f64>().ok()).collect::<Option<Vec<_>>>())
                    .map(|s| s.into_iter().fold(0.0, f64::max))
                    .ok_or_else(|| CliError::file(p, "manifest lacks a readable spacing"))
            })
            .next()
            .transpose()?;

        let verify = input.join(VERIFY_SUMMARY);
        if verify.exists() {
            let mut r = csv::Reader::from_path(&verify).map_err(csv_error(&verify))?;
            for rec in r.records() {
                let rec = rec.map_err(csv_error(&verify))?;
                let field = |i: usize| rec.get(i).unwrap_or("").to_string();
                summary.write_record([run.as_str(), &field(0), &field(3)]).map_err(csv_error(&summary_path))?;
                if let (Some(spacing), Ok(err)) = (spacing, field(1).parse::<f64>()) {
                    errors.push(ErrorPoint { run: run.clone(), spacing, identity: field(0), max_error: err, tolerance: field(2) });
                }
            }
        }

        for path in entries.iter().filter(|p| has_suffix(p, ".audit.txt")) {
            for (theorem, verdict) in parse_verdicts(&read_text(path)?) {
                summary.write_record([run.as_str(), &theorem, &verdict]).map_err(csv_error(&summary_path))?;
            }
        }

        for path in entries.iter().filter(|p| has_suffix(p, ".solver.txt")) {
            let surface = path.file_name().unwrap().to_string_lossy().trim_end_matches(".solver.txt").to_string();
            let kv = parse_key_values(&read_text(path)?);
            let list = |key: &str| -> Vec<String> {
                kv.iter()
                    .find(|(k, _)| k == key)
                    .map(|(_, v)| v.split(',').filter(|s| !s.is_empty()).map(String::from).collect())
                    .unwrap_or_default()
            };
            let (residuals, damping) = (list("residual_history"), list("damping_history"));
            for (i, res) in residuals.iter().enumerate() {
                let d = if i == 0 { "" } else { damping.get(i - 1).map_or("", String::as_str) };
                convergence
                    .write_record([run.as_str(), &surface, &i.to_string(), res, d])
                    .map_err(csv_error(&convergence_path))?;
            }
        }
    }
    summary.flush().map_err(|e| CliError::io(&summary_path, e))?;
    convergence.flush().map_err(|e| CliError::io(&convergence_path, e))?;

    // Rows grouped by identity in first-seen order, finest spacing last.
    let mut order: Vec<String> = Vec::new();
    for e in &errors {
        if !order.contains(&e.identity) {
            order.push(e.identity.clone());
        }
    }
    let path = dir.join("error_vs_spacing.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["identity", "run", "spacing", "max_error", "tolerance", "observed_order"]).map_err(csv_error(&path))?;
    for identity in &order {
        let mut group: Vec<&ErrorPoint> = errors.iter().filter(|e| &e.identity == identity).collect();
        group.sort_by(|a, b| b.spacing.total_cmp(&a.spacing));
        for (i, e) in group.iter().enumerate() {
            let rate = match i.checked_sub(1).map(|j| group[j]) {
                Some(prev) if e.max_error > 0.0 && prev.max_error > 0.0 && prev.spacing != e.spacing => {
                    format!("{:.6}", (prev.max_error / e.max_error).ln() / (prev.spacing / e.spacing).ln())
                }
                _ => String::new(),
            };
            w.write_record([
                identity.as_str(),
                &e.run,
                &format!("{:?}", e.spacing),
                &format!("{:.16e}", e.max_error),
                &e.tolerance,
                &rate,
            ])
            .map_err(csv_error(&path))?;
        }
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;
    Ok(0)
}

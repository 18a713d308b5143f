use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use warpgeom::fieldio::{read_field, write_field};
use warpgeom::report::parse_key_values;
use warpgeom_core::{Grid, ScalarField};

const HYPERBOLIC: &str = "model.epsilon = 1\nmodel.warp = exponential\nmodel.fiber_dim = 2\n";
const STEADY: &str = "model.epsilon = -1\nmodel.warp = exponential\nmodel.fiber_dim = 2\n";
const PERIODIC: &str = "grid.extents = 32\ngrid.spacing = 0.19634954084936207\ngrid.boundary = periodic\n";
const SQUARE: &str = "grid.extents = 33\ngrid.spacing = 0.03125\ngrid.boundary = dirichlet\n";

struct Run {
    dir: TempDir,
}

impl Run {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn config(&self, name: &str, parts: &[&str]) -> PathBuf {
        let path = self.path(name);
        fs::write(&path, parts.concat()).unwrap();
        path
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_warpgeom")).args(args).output().unwrap()
    }

    fn cmd(&self, sub: &str, config: &Path, out: &str) -> Output {
        let out = self.path(out);
        self.run(&["--no-timestamp", "--out", out.to_str().unwrap(), sub, "--config", config.to_str().unwrap()])
    }
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn summary(dir: &Path) -> Vec<(String, Option<f64>, f64, String)> {
    let mut r = csv::Reader::from_path(dir.join("verify_summary.csv")).unwrap();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[0].to_string(), rec[1].parse().ok(), rec[2].parse().unwrap(), rec[3].to_string())
        })
        .collect()
}

#[test]
fn verify_slice_passes_every_identity() {
    let run = Run::new();
    let cfg = run.config("slice.cfg", &[HYPERBOLIC, PERIODIC, "surface = slice\nsurface.t0 = 0.3\n"]);
    let o = run.cmd("verify", &cfg, "out");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = summary(&run.path("out"));
    assert_eq!(rows.len(), 9);
    for (name, err, tol, status) in rows {
        assert_eq!(status, "pass", "{name}");
        assert!(err.unwrap() <= tol);
    }
    let manifest = parse_key_values(&fs::read_to_string(run.path("out/surface.manifest")).unwrap());
    for key in ["epsilon", "warp", "fiber_dim", "orientation"] {
        assert!(manifest.iter().any(|(k, _)| k == key), "{key}");
    }
    let h = read_field(&run.path("out/surface.h.csv")).unwrap();
    assert!(h.values().iter().all(|&v| v == 0.3));
}

#[test]
fn verify_perturbed_converges_at_second_order() {
    let run = Run::new();
    let cfg = run.config(
        "wave.cfg",
        &[STEADY, PERIODIC, "surface = perturbed\nsurface.t0 = 0.1\nsurface.amplitude = 0.05\nsurface.mode = 1,1\n"],
    );
    assert_eq!(code(&run.cmd("verify", &cfg, "coarse")), 0);
    let out = run.path("fine");
    let o = run.run(&[
        "--no-timestamp",
        "--out",
        out.to_str().unwrap(),
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--spacing-override",
        "0.09817477042468103",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let coarse = summary(&run.path("coarse"));
    let fine = summary(&out);
    for name in ["laplacian_h", "laplacian_eta_conformal"] {
        let e = |rows: &[(String, Option<f64>, f64, String)]| rows.iter().find(|r| r.0 == name).unwrap().1.unwrap();
        let ratio = e(&coarse) / e(&fine);
        assert!((3.2..=4.8).contains(&ratio), "{name}: {ratio}");
    }

    let report = run.run(&["--out", run.path("report").to_str().unwrap(), "report", run.path("coarse").to_str().unwrap(), out.to_str().unwrap()]);
    assert_eq!(code(&report), 0, "{}", stderr(&report));
    let table = fs::read_to_string(run.path("report/error_vs_spacing.csv")).unwrap();
    let rows: Vec<&str> = table.lines().filter(|l| l.starts_with("laplacian_h,")).collect();
    assert_eq!(rows.len(), 2);
    let order: f64 = rows[1].rsplit(',').next().unwrap().parse().unwrap();
    assert!((1.7..=2.3).contains(&order), "{order}");
    assert!(run.path("report/summary.csv").exists() && run.path("report/convergence.csv").exists());
}

#[test]
fn corrupted_field_file_is_named() {
    let run = Run::new();
    let grid = std::sync::Arc::new(Grid::dirichlet_box(2, 33, 1.0).unwrap());
    let field = run.path("u.csv");
    write_field(&field, &ScalarField::constant(grid, 0.0).unwrap()).unwrap();
    let text = fs::read_to_string(&field).unwrap().replacen("0.0000000000000000e0", "garbage", 1);
    fs::write(&field, text).unwrap();
    let cfg = run.config("file.cfg", &[STEADY, SQUARE, "surface = file\nsurface.path = u.csv\n"]);
    let o = run.cmd("verify", &cfg, "out");
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("u.csv"), "{}", stderr(&o));
}

#[test]
fn invalid_config_exits_with_usage_status() {
    let run = Run::new();
    let cfg = run.config("bad.cfg", &[HYPERBOLIC, PERIODIC, "surface = slice\nsurface.t0 = 0\nsurface.mode = 1\n"]);
    let o = run.cmd("verify", &cfg, "out");
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bad.cfg") && stderr(&o).contains("line 9"), "{}", stderr(&o));
    assert_eq!(code(&run.cmd("verify", &run.path("missing.cfg"), "out")), 2);
    let cfg = run.config("slice.cfg", &[HYPERBOLIC, PERIODIC, "surface = slice\nsurface.t0 = 0\n"]);
    assert_eq!(code(&run.run(&["verify", "--config", cfg.to_str().unwrap()])), 2);
    assert_eq!(code(&run.run(&["frobnicate"])), 2);
}

fn solve_cfg(run: &Run, model: &str, h: &str, boundary: &str) -> PathBuf {
    run.config("solve.cfg", &[model, SQUARE, "surface = solve\nsolve.h_target = ", h, "\n", boundary])
}

#[test]
fn solve_constant_boundary_recovers_slice() {
    let run = Run::new();
    let cfg = solve_cfg(&run, STEADY, "1", "solve.boundary = constant\nsolve.boundary.value = 0.4\n");
    let o = run.cmd("solve", &cfg, "out");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let u = read_field(&run.path("out/surface.solution.csv")).unwrap();
    assert!(u.values().iter().all(|v| (v - 0.4).abs() <= 1e-10));
    let kv = parse_key_values(&fs::read_to_string(run.path("out/surface.solver.txt")).unwrap());
    let iterations: usize = kv.iter().find(|(k, _)| k == "iterations").unwrap().1.parse().unwrap();
    assert!(iterations <= 3);
}

#[test]
fn solve_small_data_reaches_tolerance() {
    let run = Run::new();
    let cfg = solve_cfg(&run, STEADY, "1.2", "solve.boundary = quadratic\nsolve.boundary.amplitude = 0.05\nsolve.newton_tol = 1e-10\n");
    let o = run.cmd("solve", &cfg, "out");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let kv = parse_key_values(&fs::read_to_string(run.path("out/surface.solver.txt")).unwrap());
    let residual: f64 = kv.iter().find(|(k, _)| k == "final_residual").unwrap().1.parse().unwrap();
    assert!(residual <= 1e-10);
}

#[test]
fn solve_steep_data_leaves_the_cone() {
    let run = Run::new();
    let cfg = solve_cfg(&run, STEADY, "1.2", "solve.boundary = quadratic\nsolve.boundary.amplitude = 3\n");
    let o = run.cmd("solve", &cfg, "out");
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("left the spacelike cone"), "{}", stderr(&o));
}

#[test]
fn audit_slices_pass_in_both_models() {
    let run = Run::new();
    let ss = run.config(
        "ss.cfg",
        &[STEADY, PERIODIC, "surface = slice\nsurface.t0 = 0.5\naudit.theorems = SteadyState41, SteadyStateBernstein43\n"],
    );
    let hy = run.config(
        "hy.cfg",
        &[HYPERBOLIC, PERIODIC, "surface = slice\nsurface.t0 = 0.5\naudit.theorems = Hyperbolic51,HyperbolicBernstein52\n"],
    );
    for (cfg, out) in [(ss, "ss"), (hy, "hy")] {
        let o = run.cmd("audit", &cfg, out);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let stdout = String::from_utf8_lossy(&o.stdout);
        assert_eq!(stdout.lines().filter(|l| l.starts_with("VERDICT") && l.ends_with(" pass")).count(), 2);
    }
    let text = fs::read_to_string(run.path("hy/surface.Hyperbolic51.audit.txt")).unwrap();
    assert!(text.ends_with("VERDICT Hyperbolic51 pass\n"));
    assert!(!text.starts_with("# generated"));
}

#[test]
fn audit_of_translated_cap_is_partial() {
    // H = 1.2 hyperboloid cap over the unit square, lowered towards the cone.
    let run = Run::new();
    let grid = std::sync::Arc::new(Grid::dirichlet_box(2, 33, 1.0).unwrap());
    let cap = ScalarField::from_fn(grid, |x| {
        let r2 = (x[0] + 3.0).powi(2) + (x[1] + 3.0).powi(2);
        -(-6.0 + (25.0 + r2).sqrt()).ln()
    })
    .unwrap();
    let cap = cap.map(|v| v - cap.min()).unwrap();
    write_field(&run.path("cap.csv"), &cap).unwrap();
    let base = [STEADY, SQUARE, "surface = file\nsurface.path = cap.csv\naudit.theorems = SteadyState41\n"];
    let o = run.cmd("audit", &run.config("cap.cfg", &base), "base");
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let lowered = [base.concat(), "surface.translate = -0.7\n".into()].concat();
    let o = run.cmd("audit", &run.config("low.cfg", &[&lowered]), "low");
    assert_eq!(code(&o), 1);
    let text = fs::read_to_string(run.path("low/surface.SteadyState41.audit.txt")).unwrap();
    assert!(text.contains("VERDICT SteadyState41 partial"));
    assert!(text.contains("name=growth\nholds=false"));
}

#[test]
fn audit_guards_exit_with_usage_status() {
    let run = Run::new();
    let three = "model.epsilon = -1\nmodel.warp = exponential\nmodel.fiber_dim = 3\n\
        grid.extents = 8\ngrid.spacing = 0.5\ngrid.boundary = periodic\nsurface = slice\nsurface.t0 = 0\n";
    let cfg = run.config("n3.cfg", &[three, "audit.theorems = SteadyStateBernstein43\n"]);
    let o = run.cmd("audit", &cfg, "out");
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("n=2 required"), "{}", stderr(&o));

    let cfg = run.config("mismatch.cfg", &[HYPERBOLIC, PERIODIC, "surface = slice\nsurface.t0 = 0\naudit.theorems = SteadyState41\n"]);
    assert_eq!(code(&run.cmd("audit", &cfg, "out")), 2);
    let cfg = run.config("none.cfg", &[HYPERBOLIC, PERIODIC, "surface = slice\nsurface.t0 = 0\n"]);
    assert_eq!(code(&run.cmd("audit", &cfg, "out")), 2);
}

#[test]
fn timestamp_header_is_optional() {
    let run = Run::new();
    let cfg = run.config("slice.cfg", &[HYPERBOLIC, PERIODIC, "surface = slice\nsurface.t0 = 0\naudit.theorems = Hyperbolic51\n"]);
    let out = run.path("stamped");
    let o = run.run(&["--out", out.to_str().unwrap(), "audit", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(out.join("surface.Hyperbolic51.audit.txt")).unwrap();
    assert!(text.starts_with("# generated_unix="));
}

//! Run configuration: flat `key = value` lines with dotted keys and `#`
//! comments.
//!
//! ```text
//! model.epsilon = -1
//! model.warp = exponential
//! model.fiber_dim = 2
//! grid.extents = 64
//! grid.spacing = 0.09817477042468103
//! grid.boundary = periodic
//! surface = perturbed
//! surface.t0 = 0.2
//! surface.amplitude = 0.05
//! surface.mode = 1,1
//! audit.theorems = SteadyState41, SteadyStateBernstein43
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use warpgeom_core::audit::TheoremId;
use warpgeom_core::{Boundary, Grid, Orientation, WarpKind, WarpedModel};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub extents: Vec<usize>,
    pub spacing: Vec<f64>,
    pub boundary: Boundary,
}

impl GridSpec {
    pub fn build(&self) -> Result<Arc<Grid>> {
        Ok(Arc::new(Grid::new(self.extents.clone(), self.spacing.clone(), self.boundary)?))
    }

    /// Same domain sampled at spacing `s` on every axis.
    pub fn with_spacing(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(CliError::Usage(format!("spacing override must be positive, got {s}")));
        }
        let mut extents = Vec::with_capacity(self.extents.len());
        for (&e, &h) in self.extents.iter().zip(&self.spacing) {
            let cells = match self.boundary {
                Boundary::Periodic => e as f64,
                Boundary::Dirichlet => (e - 1) as f64,
            };
            let new_cells = cells * h / s;
            let rounded = new_cells.round();
            if (new_cells - rounded).abs() > 1e-6 * new_cells.max(1.0) {
                return Err(CliError::Usage(format!(
                    "spacing {s} does not divide the domain length {} evenly",
                    cells * h
                )));
            }
            extents.push(match self.boundary {
                Boundary::Periodic => rounded as usize,
                Boundary::Dirichlet => rounded as usize + 1,
            });
        }
        Ok(Self { extents, spacing: vec![s; self.spacing.len()], boundary: self.boundary })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundarySpec {
    Constant(f64),
    /// `amplitude·sin x₁`.
    Sine(f64),
    /// `amplitude·(x₁ + x₂²)`.
    Quadratic(f64),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveSpec {
    pub h_target: f64,
    pub boundary: BoundarySpec,
    pub max_iters: usize,
    pub newton_tol: f64,
    pub damping: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceSource {
    Slice { t0: f64 },
    Perturbed { t0: f64, amplitude: f64, mode: Vec<f64> },
    File(PathBuf),
    Solve(SolveSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: WarpedModel,
    pub grid: GridSpec,
    pub surface: SurfaceSource,
    /// Constant added to the height after the surface is built.
    pub translate: f64,
    pub orientation: Orientation,
    pub surface_id: String,
    pub output_dir: Option<PathBuf>,
    pub audits: Vec<TheoremId>,
}

const KEYS: &[&str] = &[
    "model.epsilon",
    "model.warp",
    "model.fiber_dim",
    "grid.extents",
    "grid.spacing",
    "grid.boundary",
    "surface",
    "surface.id",
    "surface.t0",
    "surface.amplitude",
    "surface.mode",
    "surface.path",
    "surface.translate",
    "solve.h_target",
    "solve.boundary",
    "solve.boundary.value",
    "solve.boundary.amplitude",
    "solve.boundary.path",
    "solve.max_iters",
    "solve.newton_tol",
    "solve.damping",
    "orientation",
    "output.dir",
    "audit.theorems",
];

/// Keys owned by each surface kind; any other kind rejects them.
const SURFACE_KEYS: &[(&str, &[&str])] = &[
    ("slice", &["surface.t0"]),
    ("perturbed", &["surface.t0", "surface.amplitude", "surface.mode"]),
    ("file", &["surface.path"]),
    (
        "solve",
        &[
            "solve.h_target",
            "solve.boundary",
            "solve.boundary.value",
            "solve.boundary.amplitude",
            "solve.boundary.path",
            "solve.max_iters",
            "solve.newton_tol",
            "solve.damping",
        ],
    ),
];

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.map.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn required(&self, key: &str) -> Result<(usize, &str)> {
        self.raw(key).ok_or_else(|| CliError::Usage(format!("config: missing required key '{key}'")))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Config { line, message: format!("{key}: cannot parse '{v}'") }),
        }
    }

    fn parse_required<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.required(key)?;
        Ok(self.parse(key)?.expect("checked"))
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<(usize, Vec<T>)>> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v
                .split(',')
                .map(|s| s.trim().parse::<T>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(|list| Some((line, list)))
                .map_err(|_| CliError::Config { line, message: format!("{key}: cannot parse list '{v}'") }),
        }
    }
}

fn tokenize(text: &str) -> Result<Entries> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| CliError::Config { line, message: format!("expected key = value, got '{content}'") })?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(CliError::Config { line, message: format!("unknown key '{key}'") });
        }
        if value.is_empty() {
            return Err(CliError::Config { line, message: format!("{key}: empty value") });
        }
        if let Some((first, _)) = map.insert(key.to_string(), (line, value.to_string())) {
            return Err(CliError::Config { line, message: format!("duplicate key '{key}' (first on line {first})") });
        }
    }
    Ok(Entries { map })
}

fn broadcast<T: Clone>(key: &str, line: usize, list: Vec<T>, dim: usize) -> Result<Vec<T>> {
    match list.len() {
        1 => Ok(vec![list[0].clone(); dim]),
        l if l == dim => Ok(list),
        l => Err(CliError::Config { line, message: format!("{key}: {l} values for fiber dimension {dim}") }),
    }
}

impl RunConfig {
    /// Parses a configuration; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let e = tokenize(text)?;

        let epsilon: i32 = e.parse_required("model.epsilon")?;
        let (warp_line, warp_name) = e.required("model.warp")?;
        let warp = WarpKind::from_name(warp_name)
            .ok_or_else(|| CliError::Config { line: warp_line, message: format!("unknown warp '{warp_name}'") })?;
        let dim: usize = e.parse_required("model.fiber_dim")?;
        let model = WarpedModel::new(epsilon, warp, dim)?;

        let (line, extents) = e.list::<usize>("grid.extents")?.ok_or_else(|| CliError::Usage("config: missing required key 'grid.extents'".into()))?;
        let extents = broadcast("grid.extents", line, extents, dim)?;
        let (line, spacing) = e.list::<f64>("grid.spacing")?.ok_or_else(|| CliError::Usage("config: missing required key 'grid.spacing'".into()))?;
        let spacing = broadcast("grid.spacing", line, spacing, dim)?;
        let (line, name) = e.required("grid.boundary")?;
        let boundary = Boundary::from_code(name)
            .ok_or_else(|| CliError::Config { line, message: format!("unknown boundary '{name}'") })?;
        let grid = GridSpec { extents, spacing, boundary };

        let (kind_line, kind) = e.required("surface")?;
        let owned = SURFACE_KEYS
            .iter()
            .find(|(k, _)| *k == kind)
            .map(|(_, keys)| *keys)
            .ok_or_else(|| CliError::Config { line: kind_line, message: format!("unknown surface kind '{kind}'") })?;
        for (other, keys) in SURFACE_KEYS {
            for key in keys.iter().filter(|k| !owned.contains(k)) {
                if let Some((line, _)) = e.raw(key) {
                    return Err(CliError::Config { line, message: format!("{key} does not apply to surface = {kind} (it belongs to {other})") });
                }
            }
        }
        let surface = match kind {
            "slice" => SurfaceSource::Slice { t0: e.parse_required("surface.t0")? },
            "perturbed" => {
                let (line, mode) = e.list::<f64>("surface.mode")?.ok_or_else(|| CliError::Usage("config: missing required key 'surface.mode'".into()))?;
                SurfaceSource::Perturbed {
                    t0: e.parse_required("surface.t0")?,
                    amplitude: e.parse_required("surface.amplitude")?,
                    mode: broadcast("surface.mode", line, mode, dim)?,
                }
            }
            "file" => SurfaceSource::File(base.join(e.required("surface.path")?.1)),
            _ => {
                let (line, bkind) = e.required("solve.boundary")?;
                let boundary = match bkind {
                    "constant" => BoundarySpec::Constant(e.parse_required("solve.boundary.value")?),
                    "sine" => BoundarySpec::Sine(e.parse_required("solve.boundary.amplitude")?),
                    "quadratic" => BoundarySpec::Quadratic(e.parse_required("solve.boundary.amplitude")?),
                    "file" => BoundarySpec::File(base.join(e.required("solve.boundary.path")?.1)),
                    other => return Err(CliError::Config { line, message: format!("unknown boundary data '{other}'") }),
                };
                SurfaceSource::Solve(SolveSpec {
                    h_target: e.parse_required("solve.h_target")?,
                    boundary,
                    max_iters: e.parse("solve.max_iters")?.unwrap_or(25),
                    newton_tol: e.parse("solve.newton_tol")?.unwrap_or(1e-11),
                    damping: e.parse("solve.damping")?.unwrap_or(1.0),
                })
            }
        };

        let orientation = match e.raw("orientation") {
            None | Some((_, "canonical")) => Orientation::canonical(&model),
            Some((line, name)) => Orientation::from_name(name)
                .ok_or_else(|| CliError::Config { line, message: format!("unknown orientation '{name}'") })?,
        };

        let audits = match e.raw("audit.theorems") {
            None => Vec::new(),
            Some((_, "all")) => TheoremId::ALL.to_vec(),
            Some((line, list)) => list
                .split(',')
                .map(|s| {
                    TheoremId::from_name(s.trim())
                        .ok_or_else(|| CliError::Config { line, message: format!("unknown theorem '{}'", s.trim()) })
                })
                .collect::<Result<_>>()?,
        };

        let surface_id = e.raw("surface.id").map(|(_, v)| v.to_string()).unwrap_or_else(|| "surface".into());
        if surface_id.contains(['/', '\\']) || surface_id.starts_with('.') {
            return Err(CliError::Usage(format!("config: surface.id '{surface_id}' is not a plain file stem")));
        }

        Ok(Self {
            model,
            grid,
            surface,
            translate: e.parse("surface.translate")?.unwrap_or(0.0),
            orientation,
            surface_id,
            output_dir: e.raw("output.dir").map(|(_, v)| base.join(v)),
            audits,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            CliError::Config { line, message } => CliError::file(path, format!("line {line}: {message}")),
            CliError::Usage(m) => CliError::file(path, m),
            CliError::Core(c) => CliError::file(path, c.to_string()),
            other => other,
        })
    }
}

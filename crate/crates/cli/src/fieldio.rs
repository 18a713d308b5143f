//! Text format for sampled scalar fields: a header line
//! `# dim=<n> extents=<e1,...> spacing=<s1,...> boundary=<P|D>` followed by
//! the samples in row-major order, one per line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use warpgeom_core::{Boundary, Grid, ScalarField};

use crate::error::{CliError, Result};

pub fn format_header(grid: &Grid) -> String {
    let join = |v: Vec<String>| v.join(",");
    format!(
        "# dim={} extents={} spacing={} boundary={}",
        grid.dim(),
        join(grid.extents().iter().map(|e| e.to_string()).collect()),
        join(grid.spacing().iter().map(|s| format!("{s:?}")).collect()),
        grid.boundary().code()
    )
}

pub fn format_field(field: &ScalarField) -> String {
    let mut out = format_header(field.grid());
    out.push('\n');
    for v in field.values() {
        writeln!(out, "{v:.16e}").expect("writing to a String");
    }
    out
}

fn parse_list<T: std::str::FromStr>(text: &str) -> Option<Vec<T>> {
    text.split(',').map(|s| s.trim().parse().ok()).collect()
}

pub fn parse_header(line: &str) -> std::result::Result<Grid, String> {
    let body = line.strip_prefix('#').ok_or("missing '#' header line")?;
    let (mut dim, mut extents, mut spacing, mut boundary) = (None, None, None, None);
    for item in body.split_whitespace() {
        let (key, value) = item.split_once('=').ok_or_else(|| format!("malformed header item '{item}'"))?;
        match key {
            "dim" => dim = Some(value.parse::<usize>().map_err(|_| format!("bad dim '{value}'"))?),
            "extents" => extents = Some(parse_list::<usize>(value).ok_or_else(|| format!("bad extents '{value}'"))?),
            "spacing" => spacing = Some(parse_list::<f64>(value).ok_or_else(|| format!("bad spacing '{value}'"))?),
            "boundary" => boundary = Some(Boundary::from_code(value).ok_or_else(|| format!("bad boundary '{value}'"))?),
            other => return Err(format!("unknown header key '{other}'")),
        }
    }
    let dim = dim.ok_or("header lacks dim")?;
    let extents = extents.ok_or("header lacks extents")?;
    let spacing = spacing.ok_or("header lacks spacing")?;
    let boundary = boundary.ok_or("header lacks boundary")?;
    if extents.len() != dim || spacing.len() != dim {
        return Err(format!("header lists {} extents and {} spacings for dim={dim}", extents.len(), spacing.len()));
    }
    Grid::new(extents, spacing, boundary).map_err(|e| e.to_string())
}

pub fn parse_field(text: &str) -> std::result::Result<ScalarField, String> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or("empty file")?;
    let grid = Arc::new(parse_header(header.trim())?);
    let mut values = Vec::with_capacity(grid.len());
    for (i, line) in lines {
        let v: f64 = line.trim().parse().map_err(|_| format!("line {}: not a number: '{}'", i + 1, line.trim()))?;
        values.push(v);
    }
    if values.len() != grid.len() {
        return Err(format!("{} samples for a grid of {} points", values.len(), grid.len()));
    }
    ScalarField::new(grid, values).map_err(|e| e.to_string())
}

pub fn read_field(path: &Path) -> Result<ScalarField> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_field(&text).map_err(|m| CliError::file(path, m))
}

pub fn write_field(path: &Path, field: &ScalarField) -> Result<()> {
    fs::write(path, format_field(field)).map_err(|e| CliError::io(path, e))
}

//! CSV serialization of sampled functions and trajectories.
//!
//! Values are written with 17 significant digits (`{:.16e}`), which
//! round-trips every f64 bit-exactly through the reader; singular markers are
//! written as the `NaN` literal. Function files have the header `x,value`,
//! trajectory files `x,y1,...,yN`.

use crate::grid::{Grid, SampledFunction, SampledTrajectory};
use crate::{Error, Result};
use std::fmt::Write as _;

fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn write_function(f: &SampledFunction) -> String {
    let mut out = String::from("x,value\n");
    for (k, &v) in f.values().iter().enumerate() {
        let _ = writeln!(out, "{},{}", format_value(f.grid().node(k)), format_value(v));
    }
    out
}

pub fn write_trajectory(y: &SampledTrajectory) -> String {
    let mut out = String::from("x");
    for i in 0..y.dim() {
        let _ = write!(out, ",y{}", i + 1);
    }
    out.push('\n');
    let grid = y.grid();
    for k in 0..grid.len() {
        let _ = write!(out, "{}", format_value(grid.node(k)));
        for i in 0..y.dim() {
            let _ = write!(out, ",{}", format_value(y.component(i).values()[k]));
        }
        out.push('\n');
    }
    out
}

fn parse_field(text: &str, line: usize, what: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| Error::Input(format!("line {line}: malformed {what} `{}`", text.trim())))
}

struct Rows {
    xs: Vec<f64>,
    columns: Vec<Vec<f64>>,
}

fn parse_rows(text: &str, expected_cols: usize) -> Result<Rows> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Input("empty CSV input".into()))?;
    let header_cols = header.split(',').count();
    if header_cols != expected_cols + 1 {
        return Err(Error::Input(format!(
            "line 1: expected {} columns in header, found {header_cols}",
            expected_cols + 1
        )));
    }
    let mut xs = Vec::new();
    let mut columns = vec![Vec::new(); expected_cols];
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected_cols + 1 {
            return Err(Error::Input(format!(
                "line {line_no}: expected {} fields, found {}",
                expected_cols + 1,
                fields.len()
            )));
        }
        let x = parse_field(fields[0], line_no, "x value")?;
        if x.is_nan() {
            return Err(Error::Input(format!("line {line_no}: x may not be NaN")));
        }
        xs.push(x);
        for (c, field) in fields[1..].iter().enumerate() {
            columns[c].push(parse_field(field, line_no, "value")?);
        }
    }
    if xs.len() < 3 {
        return Err(Error::Input(format!(
            "need at least 3 data rows, found {}",
            xs.len()
        )));
    }
    Ok(Rows { xs, columns })
}

fn grid_from_xs(xs: &[f64]) -> Result<Grid> {
    let n = xs.len();
    let grid = Grid::new(xs[0], xs[n - 1], n)?;
    let tol = 1e-9 * (grid.b() - grid.a()).abs();
    for (k, &x) in xs.iter().enumerate() {
        if (x - grid.node(k)).abs() > tol {
            return Err(Error::Input(format!(
                "line {}: node {x} is not on the uniform grid (expected {})",
                k + 2,
                grid.node(k)
            )));
        }
    }
    Ok(grid)
}

/// Read an `x,value` file; the x column must form a uniform grid.
pub fn read_function(text: &str) -> Result<SampledFunction> {
    let rows = parse_rows(text, 1)?;
    let grid = grid_from_xs(&rows.xs)?;
    SampledFunction::new(grid, rows.columns.into_iter().next().unwrap())
}

/// Read an `x,y1,...,yN` file with the given component count.
pub fn read_trajectory(text: &str, n_components: usize) -> Result<SampledTrajectory> {
    let rows = parse_rows(text, n_components)?;
    let grid = grid_from_xs(&rows.xs)?;
    let components = rows
        .columns
        .into_iter()
        .map(|values| SampledFunction::new(grid, values))
        .collect::<Result<Vec<_>>>()?;
    SampledTrajectory::new(components)
}

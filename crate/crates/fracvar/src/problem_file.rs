//! The flat problem-file format.
//!
//! ```text
//! # comment
//! [problem]
//! a = 0
//! b = 1
//! alpha = 0.99
//! beta = 0.99
//! gamma = 1
//! n_components = 1
//! grid_points = 501
//! lagrangian = "0.5*D[y1]^2"
//! y_a = [0]
//! y_b = [1]              # entries: <real> | free | cap:<real>
//!
//! [constraint]
//! integrand = "y1"
//! mode = eq              # eq | le
//! value = 0.25
//! ```
//!
//! `#` starts a comment except inside a quoted expression; keys are
//! case-sensitive; every diagnostic carries the 1-based line number.

use crate::expr;
use crate::grid::Grid;
use crate::operators::FracOrder;
use crate::problem::{
    BoundaryConditions, Constraint, ConstraintMode, Problem, RightBc,
};
use crate::{Error, Result};
use std::collections::HashMap;

struct Section {
    name: String,
    line: usize,
    keys: HashMap<String, (usize, String)>,
}

fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    for (idx, c) in line.char_indices() {
        match c {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..idx],
            _ => {}
        }
    }
    line
}

fn split_sections(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::Input(format!("line {line_no}: unterminated section header")))?
                .trim()
                .to_string();
            sections.push(Section {
                name,
                line: line_no,
                keys: HashMap::new(),
            });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Input(format!("line {line_no}: expected `key = value` or a section header"))
        })?;
        let section = sections.last_mut().ok_or_else(|| {
            Error::Input(format!("line {line_no}: key outside of any section"))
        })?;
        let key = key.trim().to_string();
        if section.keys.contains_key(&key) {
            return Err(Error::Input(format!(
                "line {line_no}: duplicate key `{key}` in [{}]",
                section.name
            )));
        }
        section
            .keys
            .insert(key, (line_no, value.trim().to_string()));
    }
    Ok(sections)
}

impl Section {
    fn take(&self, key: &str) -> Result<(usize, &str)> {
        self.keys
            .get(key)
            .map(|(line, value)| (*line, value.as_str()))
            .ok_or_else(|| {
                Error::Input(format!(
                    "line {}: missing key `{key}` in [{}] section",
                    self.line, self.name
                ))
            })
    }

    fn real(&self, key: &str) -> Result<f64> {
        let (line, value) = self.take(key)?;
        value
            .parse::<f64>()
            .map_err(|_| Error::Input(format!("line {line}: key `{key}` needs a real number, got `{value}`")))
    }

    fn integer(&self, key: &str) -> Result<usize> {
        let (line, value) = self.take(key)?;
        value
            .parse::<usize>()
            .map_err(|_| Error::Input(format!("line {line}: key `{key}` needs a positive integer, got `{value}`")))
    }

    fn quoted(&self, key: &str) -> Result<(usize, String)> {
        let (line, value) = self.take(key)?;
        let inner = value
            .strip_prefix('"')
            .and_then(|v| v.strip_suffix('"'))
            .ok_or_else(|| {
                Error::Input(format!("line {line}: key `{key}` must be a quoted expression"))
            })?;
        Ok((line, inner.to_string()))
    }

    fn bracketed_list(&self, key: &str) -> Result<(usize, Vec<String>)> {
        let (line, value) = self.take(key)?;
        let inner = value
            .strip_prefix('[')
            .and_then(|v| v.strip_suffix(']'))
            .ok_or_else(|| {
                Error::Input(format!("line {line}: key `{key}` must be a bracketed list"))
            })?;
        let entries = inner
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        Ok((line, entries))
    }
}

/// Parse a problem file into a validated [`Problem`].
pub fn parse_problem(text: &str) -> Result<Problem> {
    let sections = split_sections(text)?;
    let problem_section = sections
        .iter()
        .find(|s| s.name == "problem")
        .ok_or_else(|| Error::Input("line 1: missing [problem] section".into()))?;
    for s in &sections {
        if s.name != "problem" && s.name != "constraint" {
            return Err(Error::Input(format!(
                "line {}: unknown section [{}]",
                s.line, s.name
            )));
        }
    }
    if sections.iter().filter(|s| s.name == "problem").count() > 1 {
        return Err(Error::Input("multiple [problem] sections".into()));
    }

    let a = problem_section.real("a")?;
    let b = problem_section.real("b")?;
    let alpha = FracOrder::new(problem_section.real("alpha")?)?;
    let beta = FracOrder::new(problem_section.real("beta")?)?;
    let gamma = problem_section.real("gamma")?;
    let n_components = problem_section.integer("n_components")?;
    let grid_points = problem_section.integer("grid_points")?;
    let grid = Grid::new(a, b, grid_points)?;

    let (lag_line, lag_text) = problem_section.quoted("lagrangian")?;
    let lagrangian = expr::parse(&lag_text, n_components, 0).map_err(|e| {
        Error::Input(format!("line {lag_line}: in `lagrangian`: {e}"))
    })?;

    let (ya_line, ya_entries) = problem_section.bracketed_list("y_a")?;
    if ya_entries.len() != n_components {
        return Err(Error::Input(format!(
            "line {ya_line}: `y_a` has {} entries for {} components",
            ya_entries.len(),
            n_components
        )));
    }
    let left = ya_entries
        .iter()
        .map(|s| {
            s.parse::<f64>().map_err(|_| {
                Error::Input(format!("line {ya_line}: `y_a` entry `{s}` is not a real number"))
            })
        })
        .collect::<Result<Vec<f64>>>()?;

    let (yb_line, yb_entries) = problem_section.bracketed_list("y_b")?;
    if yb_entries.len() != n_components {
        return Err(Error::Input(format!(
            "line {yb_line}: `y_b` has {} entries for {} components",
            yb_entries.len(),
            n_components
        )));
    }
    let right = yb_entries
        .iter()
        .map(|s| parse_right_bc(s, yb_line))
        .collect::<Result<Vec<RightBc>>>()?;

    let mut constraints = Vec::new();
    for s in sections.iter().filter(|s| s.name == "constraint") {
        let (int_line, int_text) = s.quoted("integrand")?;
        let integrand = expr::parse(&int_text, n_components, 0).map_err(|e| {
            Error::Input(format!("line {int_line}: in `integrand`: {e}"))
        })?;
        let (mode_line, mode_text) = s.take("mode")?;
        let mode = match mode_text {
            "eq" => ConstraintMode::Equality,
            "le" => ConstraintMode::Inequality,
            other => {
                return Err(Error::Input(format!(
                    "line {mode_line}: mode must be `eq` or `le`, got `{other}`"
                )))
            }
        };
        let target = s.real("value")?;
        constraints.push(Constraint {
            integrand,
            target,
            mode,
        });
    }

    Problem::new(
        grid,
        alpha,
        beta,
        gamma,
        n_components,
        lagrangian,
        BoundaryConditions { left, right },
        constraints,
    )
}

fn parse_right_bc(entry: &str, line: usize) -> Result<RightBc> {
    if entry == "free" {
        return Ok(RightBc::Free);
    }
    if let Some(cap) = entry.strip_prefix("cap:") {
        let v = cap.trim().parse::<f64>().map_err(|_| {
            Error::Input(format!("line {line}: cap bound `{cap}` is not a real number"))
        })?;
        return Ok(RightBc::Capped(v));
    }
    entry.parse::<f64>().map(RightBc::Fixed).map_err(|_| {
        Error::Input(format!(
            "line {line}: `y_b` entry `{entry}` must be a real number, `free`, or `cap:<real>`"
        ))
    })
}

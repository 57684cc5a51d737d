//! Variational problem descriptions.

use crate::expr::Expr;
use crate::grid::{Grid, SampledFunction};
use crate::operators::{check_weight, FracOrder};
use crate::{Error, Result};

/// Right-endpoint condition of one trajectory component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RightBc {
    /// `y_l(b)` prescribed.
    Fixed(f64),
    /// `y_l(b)` free; the transversality condition replaces the boundary
    /// condition.
    Free,
    /// `y_l(b) <= bound` (minimization only); the sign-constrained
    /// transversality condition applies when the bound is active.
    Capped(f64),
}

/// Boundary data: all components are prescribed at `a`; at `b` each component
/// is fixed, free, or capped.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryConditions {
    pub left: Vec<f64>,
    pub right: Vec<RightBc>,
}

impl BoundaryConditions {
    pub fn fixed(left: Vec<f64>, right: Vec<f64>) -> Self {
        BoundaryConditions {
            left,
            right: right.into_iter().map(RightBc::Fixed).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintMode {
    /// `∫ G dx = target`
    Equality,
    /// `∫ G dx <= target`
    Inequality,
}

/// One isoperimetric constraint.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub integrand: Expr,
    pub target: f64,
    pub mode: ConstraintMode,
}

/// A complete variational problem: grid, operator orders, Lagrangian,
/// boundary data, and isoperimetric constraints.
#[derive(Debug, Clone)]
pub struct Problem {
    pub grid: Grid,
    pub alpha: FracOrder,
    pub beta: FracOrder,
    pub gamma: f64,
    pub n_components: usize,
    pub lagrangian: Expr,
    pub bcs: BoundaryConditions,
    pub constraints: Vec<Constraint>,
}

impl Problem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        grid: Grid,
        alpha: FracOrder,
        beta: FracOrder,
        gamma: f64,
        n_components: usize,
        lagrangian: Expr,
        bcs: BoundaryConditions,
        constraints: Vec<Constraint>,
    ) -> Result<Self> {
        let gamma = check_weight(gamma)?;
        if n_components == 0 {
            return Err(Error::Input("problem needs at least one component".into()));
        }
        if bcs.left.len() != n_components || bcs.right.len() != n_components {
            return Err(Error::Input(format!(
                "boundary data has {} / {} entries for {} components",
                bcs.left.len(),
                bcs.right.len(),
                n_components
            )));
        }
        if bcs.left.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("left boundary values must be finite".into()));
        }
        for bc in &bcs.right {
            match bc {
                RightBc::Fixed(v) | RightBc::Capped(v) if !v.is_finite() => {
                    return Err(Error::Input("right boundary values must be finite".into()))
                }
                _ => {}
            }
        }
        if lagrangian.max_component_index() > n_components {
            return Err(Error::Input(format!(
                "Lagrangian references component y{} but the problem declares {}",
                lagrangian.max_component_index(),
                n_components
            )));
        }
        if lagrangian.uses_multipliers() {
            return Err(Error::Input(
                "the Lagrangian must not reference multiplier variables".into(),
            ));
        }
        for (j, c) in constraints.iter().enumerate() {
            if c.integrand.max_component_index() > n_components {
                return Err(Error::Input(format!(
                    "constraint {} references an undeclared component",
                    j + 1
                )));
            }
            if c.integrand.uses_multipliers() {
                return Err(Error::Input(format!(
                    "constraint {} must not reference multiplier variables",
                    j + 1
                )));
            }
            if !c.target.is_finite() {
                return Err(Error::Input(format!(
                    "constraint {} target must be finite",
                    j + 1
                )));
            }
        }
        Ok(Problem {
            grid,
            alpha,
            beta,
            gamma,
            n_components,
            lagrangian,
            bcs,
            constraints,
        })
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn has_inequality_constraints(&self) -> bool {
        self.constraints
            .iter()
            .any(|c| c.mode == ConstraintMode::Inequality)
    }
}

/// Isoperimetric multipliers and, for inequality constraints, the slack
/// samples `phi_j` of the squared-slack reformulation.
#[derive(Debug, Clone)]
pub struct MultiplierVector {
    pub lam: Vec<f64>,
    /// One entry per constraint; `None` for equality constraints.
    pub slack: Vec<Option<SampledFunction>>,
}

impl MultiplierVector {
    pub fn equality(lam: Vec<f64>) -> Self {
        let slack = vec![None; lam.len()];
        MultiplierVector { lam, slack }
    }

    pub fn len(&self) -> usize {
        self.lam.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lam.is_empty()
    }
}

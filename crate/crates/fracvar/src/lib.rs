//! Numerical fractional calculus of variations.
//!
//! The library is organized around a single family of fractional derivatives:
//! the convex combination `gamma * (left Caputo of order alpha) +
//! (1 - gamma) * (right Caputo of order beta)` acting on functions sampled on
//! a uniform grid. On top of the operators it provides
//!
//! * an expression language for Lagrangians and constraint integrands with
//!   symbolic partial derivatives ([`expr`]),
//! * evaluation of variational functionals, first variations, and the full
//!   set of first-order optimality residuals: Euler–Lagrange, transversality,
//!   isoperimetric multiplier rules, and complementarity ([`variational`]),
//! * a deterministic direct solver that discretizes trajectories and
//!   minimizes the discretized functional ([`solver`]),
//! * CSV and problem-file I/O plus the `fracvar` command line tool ([`cli`]).
//!
//! Derivative orders are restricted to (0, 1). Riemann–Liouville derivatives
//! of functions with nonzero boundary values blow up at the initiating
//! endpoint; such nodes carry a NaN "singular" marker instead of a large
//! finite value, and grid quadratures skip marked nodes (dropping the
//! trapezoid half-cell they would have contributed).

pub mod cli;
pub mod csvio;
pub mod expr;
pub mod grid;
pub mod operators;
pub mod problem;
pub mod problem_file;
pub mod solver;
pub mod special;
pub mod variational;

pub use grid::{Grid, SampledFunction, SampledTrajectory};
pub use operators::{FracOrder, OperatorKind, OperatorSpec, Side};
pub use problem::{
    BoundaryConditions, Constraint, ConstraintMode, MultiplierVector, Problem, RightBc,
};
pub use solver::{SolveOptions, SolveReport};

/// Crate-wide error type.
///
/// The three variants mirror the CLI failure classes: `Domain` and `Eval`
/// are numeric failures (exit code 1), `Input` covers malformed files,
/// expressions, and dimension mismatches (exit code 2).
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A numeric precondition was violated (order out of range, bad weight,
    /// nonpositive step, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed input: text that failed to parse or inputs whose shapes do
    /// not match the declared problem.
    #[error("input error: {0}")]
    Input(String),
    /// An expression failed to evaluate at a concrete point.
    #[error("evaluation error{}: {source}", at_node(.node))]
    Eval {
        /// Grid node index and coordinate where the failure happened, when known.
        node: Option<(usize, f64)>,
        source: expr::EvalError,
    },
}

fn at_node(node: &Option<(usize, f64)>) -> String {
    match node {
        Some((k, x)) => format!(" at node {k} (x = {x})"),
        None => String::new(),
    }
}

impl From<expr::ParseError> for Error {
    fn from(e: expr::ParseError) -> Self {
        Error::Input(e.to_string())
    }
}

impl From<expr::EvalError> for Error {
    fn from(source: expr::EvalError) -> Self {
        Error::Eval { node: None, source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

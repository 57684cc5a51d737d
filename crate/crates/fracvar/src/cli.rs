//! Command-line interface: `fracvar operator | check | solve`.
//!
//! Data goes to standard output (or `--out`), diagnostics and reports to
//! standard error. Exit codes are a stable contract:
//!
//! * 0 — success / solver converged / check passed
//! * 1 — numeric domain error (orders, weights, expression domains)
//! * 2 — malformed input (flags, files, expressions, dimensions)
//! * 3 — check failed (residual out of tolerance)
//! * 4 — solver did not converge

use crate::csvio;
use crate::expr;
use crate::grid::{SampledFunction, SampledTrajectory, INTERIOR_MARGIN};
use crate::operators::{FracOrder, OperatorKind, OperatorSpec};
use crate::problem::{MultiplierVector, Problem, RightBc};
use crate::problem_file;
use crate::solver::{self, SolveOptions};
use crate::variational::{
    self, EndpointState, TransversalityForm,
};
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

const LONG_ABOUT: &str = "\
Numerical fractional calculus of variations: fractional operators on sampled
functions, optimality-condition residual checks, and a direct
discretize-and-minimize solver.

EXPRESSION GRAMMAR
  expr   := term (('+' | '-') term)*
  term   := unary (('*' | '/') unary)*
  unary  := '-' unary | power
  power  := atom ('^' unary)?            (right-associative)
  atom   := number | variable | function '(' expr ')' | '(' expr ')'

  number   := digits ['.' digits] [('e'|'E') ['+'|'-'] digits]
  variable := x | y<i> | D[y<i>] | lam<j>     (indices are 1-based)
  function := sin | cos | exp | log | sqrt

  Precedence, high to low: ^, unary -, * and /, + and -.
  Whitespace is ignored. `D[y<i>]` is the combined fractional derivative of
  component i.

PROBLEM FILES
  Line-oriented, `#` starts a comment (except inside quotes), keys are
  case-sensitive:

    [problem]
    a = 0                  # interval
    b = 1
    alpha = 0.5            # left order, in (0,1)
    beta = 0.5             # right order, in (0,1)
    gamma = 1              # combination weight, in [0,1]
    n_components = 1
    grid_points = 501
    lagrangian = \"0.5*D[y1]^2\"
    y_a = [0]              # left boundary values
    y_b = [1]              # per entry: <real> | free | cap:<real>

    [constraint]           # zero or more
    integrand = \"y1\"
    mode = eq              # eq | le
    value = 0.25

EXIT CODES
  0 success / converged / check passed
  1 numeric domain error
  2 malformed input
  3 check failed
  4 solver did not converge";

#[derive(Parser)]
#[command(name = "fracvar", version, about = "Fractional calculus of variations", long_about = LONG_ABOUT)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a fractional operator to a sampled function, writing x,value CSV.
    Operator(OperatorArgs),
    /// Evaluate an optimality-condition residual and gate it against --tol.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Solve a variational problem by the direct method.
    Solve(SolveArgs),
}

#[derive(Args)]
struct OperatorArgs {
    /// One of: rlfi-left, rlfi-right, rlfd-left, rlfd-right, cfd-left,
    /// cfd-right, combined-cfd, combined-rlfd.
    #[arg(long)]
    kind: String,
    /// Order of left-anchored parts, in (0,1).
    #[arg(long)]
    alpha: Option<f64>,
    /// Order of right-anchored parts, in (0,1).
    #[arg(long)]
    beta: Option<f64>,
    /// Combination weight in [0,1]; required by the combined kinds.
    #[arg(long)]
    gamma: Option<f64>,
    /// Left endpoint (required with --expr).
    #[arg(long)]
    a: Option<f64>,
    /// Right endpoint (required with --expr).
    #[arg(long)]
    b: Option<f64>,
    /// Input samples as x,value CSV.
    #[arg(long, conflicts_with = "expr")]
    input: Option<PathBuf>,
    /// Sample this expression of x instead of reading a file.
    #[arg(long, requires = "grid")]
    expr: Option<String>,
    /// Node count when sampling --expr.
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Integration-by-parts identity of the combined operator.
    Ibp(IbpArgs),
    /// Euler-Lagrange residual (interior sup-norm over the central window).
    El(TrajectoryCheckArgs),
    /// Natural boundary condition at free / capped right endpoints.
    Transversality(TransversalityArgs),
    /// Determinant of the constraint first-variation matrix. Passes when the
    /// magnitude is at least --tol (a singular determinant is the failure).
    Regularity(RegularityArgs),
    /// Pointwise multiplier-slack complementarity.
    Complementarity(ComplementarityArgs),
}

#[derive(Args)]
struct IbpArgs {
    /// Problem file providing interval, orders, and gamma.
    #[arg(long)]
    problem: PathBuf,
    /// f samples as CSV.
    #[arg(long, conflicts_with = "f_expr")]
    f: Option<PathBuf>,
    /// f as an expression of x, sampled on the problem grid.
    #[arg(long)]
    f_expr: Option<String>,
    /// g samples as CSV.
    #[arg(long, conflicts_with = "g_expr")]
    g: Option<PathBuf>,
    /// g as an expression of x, sampled on the problem grid.
    #[arg(long)]
    g_expr: Option<String>,
    #[arg(long, default_value_t = 1e-2)]
    tol: f64,
}

#[derive(Args)]
struct TrajectoryCheckArgs {
    #[arg(long)]
    problem: PathBuf,
    /// Trajectory as x,y1,...,yN CSV.
    #[arg(long, conflicts_with = "trajectory_expr")]
    trajectory: Option<PathBuf>,
    /// Trajectory components as expressions of x (repeat N times).
    #[arg(long)]
    trajectory_expr: Vec<String>,
    #[arg(long, default_value_t = 1e-2)]
    tol: f64,
}

#[derive(Args)]
struct TransversalityArgs {
    #[command(flatten)]
    base: TrajectoryCheckArgs,
    /// 1-based component index; default: every free or capped component.
    #[arg(long)]
    component: Option<usize>,
    /// Use the literal index pairing (trajectory-partial in the
    /// right-anchored bracket) instead of the bracket-consistent form.
    #[arg(long)]
    literal: bool,
}

#[derive(Args)]
struct RegularityArgs {
    #[command(flatten)]
    base: TrajectoryCheckArgs,
    /// Direction CSVs (x,y1,...,yN), one per constraint; defaults to the
    /// canonical bump directions.
    #[arg(long)]
    direction: Vec<PathBuf>,
}

#[derive(Args)]
struct ComplementarityArgs {
    #[arg(long)]
    problem: PathBuf,
    /// Comma-separated multiplier values, one per constraint.
    #[arg(long)]
    lambda: String,
    /// Slack sample CSVs (x,value), one per inequality constraint in order;
    /// missing entries default to zero slack.
    #[arg(long)]
    slack: Vec<PathBuf>,
    #[arg(long, default_value_t = 1e-2)]
    tol: f64,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    problem: PathBuf,
    /// Write the solution CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Gradient tolerance (sup-norm of the projected discrete gradient).
    #[arg(long)]
    tol: Option<f64>,
    /// Constraint tolerance of the outer multiplier iteration.
    #[arg(long)]
    mult_tol: Option<f64>,
    /// Evaluate this many seeded random feasible trajectories after solving
    /// and report the best objective found (brute-force sanity probe).
    #[arg(long)]
    probe: Option<usize>,
    /// Seed for --probe.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Domain(_) | Error::Eval { .. } => 1,
                Error::Input(_) => 2,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Operator(args) => cmd_operator(args),
        Command::Check(check) => match check {
            CheckCommand::Ibp(args) => cmd_check_ibp(args),
            CheckCommand::El(args) => cmd_check_el(args),
            CheckCommand::Transversality(args) => cmd_check_transversality(args),
            CheckCommand::Regularity(args) => cmd_check_regularity(args),
            CheckCommand::Complementarity(args) => cmd_check_complementarity(args),
        },
        Command::Solve(args) => cmd_solve(args),
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<Problem> {
    let text = read_file(path)?;
    problem_file::parse_problem(&text)
        .map_err(|e| Error::Input(format!("{}: {}", path.display(), strip_prefix(&e))))
}

fn strip_prefix(e: &Error) -> String {
    // Avoid "input error: input error: ..." when re-wrapping with the path.
    match e {
        Error::Input(m) => m.clone(),
        other => other.to_string(),
    }
}

fn require<T>(value: Option<T>, what: &str) -> Result<T> {
    value.ok_or_else(|| Error::Input(format!("missing required flag {what}")))
}

fn residual_line(name: &str, value: f64) {
    println!("{name} = {value:.11e}");
}

// ---------------------------------------------------------------------------
// operator
// ---------------------------------------------------------------------------

fn cmd_operator(args: OperatorArgs) -> Result<i32> {
    let kind: OperatorKind = args.kind.parse()?;
    let (alpha, beta, gamma) = match kind {
        OperatorKind::RlfiLeft | OperatorKind::RlfdLeft | OperatorKind::CfdLeft => {
            let a = require(args.alpha, &format!("--alpha (needed by {})", kind.name()))?;
            (a, a, 1.0)
        }
        OperatorKind::RlfiRight | OperatorKind::RlfdRight | OperatorKind::CfdRight => {
            let b = require(args.beta, &format!("--beta (needed by {})", kind.name()))?;
            (b, b, 0.0)
        }
        OperatorKind::CombinedCfd | OperatorKind::CombinedRlfd => (
            require(args.alpha, "--alpha")?,
            require(args.beta, "--beta")?,
            require(args.gamma, &format!("--gamma (needed by {})", kind.name()))?,
        ),
    };
    let spec = OperatorSpec::new(kind, FracOrder::new(alpha)?, FracOrder::new(beta)?, gamma)?;

    let f = match (&args.input, &args.expr) {
        (Some(path), None) => {
            let f = csvio::read_function(&read_file(path)?)?;
            let tol = 1e-9 * (f.grid().b() - f.grid().a());
            if let Some(a) = args.a {
                if (a - f.grid().a()).abs() > tol {
                    return Err(Error::Input(format!(
                        "--a {a} disagrees with the input grid left endpoint {}",
                        f.grid().a()
                    )));
                }
            }
            if let Some(b) = args.b {
                if (b - f.grid().b()).abs() > tol {
                    return Err(Error::Input(format!(
                        "--b {b} disagrees with the input grid right endpoint {}",
                        f.grid().b()
                    )));
                }
            }
            f
        }
        (None, Some(text)) => {
            let a = require(args.a, "--a (needed with --expr)")?;
            let b = require(args.b, "--b (needed with --expr)")?;
            let n = require(args.grid, "--grid (needed with --expr)")?;
            let grid = crate::grid::Grid::new(a, b, n)?;
            let e = expr::parse_univariate(text)?;
            let mut values = Vec::with_capacity(n);
            for k in 0..n {
                let x = grid.node(k);
                let v = e
                    .eval(&expr::EvalEnv::new(x, &[], &[], &[]))
                    .map_err(|source| Error::Eval {
                        node: Some((k, x)),
                        source,
                    })?;
                values.push(v);
            }
            SampledFunction::new(grid, values)?
        }
        _ => {
            return Err(Error::Input(
                "provide exactly one of --input FILE or --expr EXPR".into(),
            ))
        }
    };

    let out = spec.apply(&f)?;
    print!("{}", csvio::write_function(&out));
    Ok(0)
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

fn function_input(
    p: &Problem,
    file: &Option<PathBuf>,
    text: &Option<String>,
    what: &str,
) -> Result<SampledFunction> {
    match (file, text) {
        (Some(path), None) => {
            let f = csvio::read_function(&read_file(path)?)?;
            if f.grid() != p.grid {
                return Err(Error::Input(format!(
                    "{what}: sample grid does not match the problem grid"
                )));
            }
            Ok(f)
        }
        (None, Some(text)) => {
            let e = expr::parse_univariate(text)?;
            let mut values = Vec::with_capacity(p.grid.len());
            for k in 0..p.grid.len() {
                let x = p.grid.node(k);
                values.push(e.eval(&expr::EvalEnv::new(x, &[], &[], &[])).map_err(
                    |source| Error::Eval {
                        node: Some((k, x)),
                        source,
                    },
                )?);
            }
            SampledFunction::new(p.grid, values)
        }
        _ => Err(Error::Input(format!(
            "{what}: provide exactly one of a CSV file or an expression"
        ))),
    }
}

fn trajectory_input(p: &Problem, args: &TrajectoryCheckArgs) -> Result<SampledTrajectory> {
    match (&args.trajectory, args.trajectory_expr.is_empty()) {
        (Some(path), true) => {
            let y = csvio::read_trajectory(&read_file(path)?, p.n_components)?;
            if y.grid() != p.grid {
                return Err(Error::Input(
                    "trajectory grid does not match the problem grid".into(),
                ));
            }
            Ok(y)
        }
        (None, false) => {
            if args.trajectory_expr.len() != p.n_components {
                return Err(Error::Input(format!(
                    "need {} --trajectory-expr entries, got {}",
                    p.n_components,
                    args.trajectory_expr.len()
                )));
            }
            let components = args
                .trajectory_expr
                .iter()
                .map(|text| {
                    function_input(p, &None, &Some(text.clone()), "trajectory component")
                })
                .collect::<Result<Vec<_>>>()?;
            SampledTrajectory::new(components)
        }
        _ => Err(Error::Input(
            "provide exactly one of --trajectory FILE or --trajectory-expr EXPR (repeated)"
                .into(),
        )),
    }
}

fn gate(pass: bool) -> i32 {
    if pass {
        println!("check: PASS");
        0
    } else {
        println!("check: FAIL");
        3
    }
}

fn cmd_check_ibp(args: IbpArgs) -> Result<i32> {
    let p = load_problem(&args.problem)?;
    let f = function_input(&p, &args.f, &args.f_expr, "--f")?;
    let g = function_input(&p, &args.g, &args.g_expr, "--g")?;
    let residual =
        variational::integration_by_parts_residual(p.alpha, p.beta, p.gamma, &f, &g)?;
    residual_line("ibp_residual", residual);
    Ok(gate(residual <= args.tol))
}

fn cmd_check_el(args: TrajectoryCheckArgs) -> Result<i32> {
    let p = load_problem(&args.problem)?;
    let y = trajectory_input(&p, &args)?;
    let residual = variational::euler_lagrange_residual(&p, &y)?;
    let (lo, hi) = p.grid.interior_window(INTERIOR_MARGIN);
    let mut worst: f64 = 0.0;
    for i in 0..p.n_components {
        let norm = residual.component(i).max_abs_in(lo, hi);
        residual_line(&format!("el_residual[{}]", i + 1), norm);
        worst = worst.max(norm);
    }
    residual_line("el_residual_max", worst);
    Ok(gate(worst <= args.tol))
}

fn cmd_check_transversality(args: TransversalityArgs) -> Result<i32> {
    let p = load_problem(&args.base.problem)?;
    let y = trajectory_input(&p, &args.base)?;
    let form = if args.literal {
        TransversalityForm::Literal
    } else {
        TransversalityForm::BracketConsistent
    };
    let components: Vec<usize> = match args.component {
        Some(l) => {
            if l == 0 || l > p.n_components {
                return Err(Error::Input(format!(
                    "--component must lie in 1..={}",
                    p.n_components
                )));
            }
            vec![l - 1]
        }
        None => (0..p.n_components)
            .filter(|&i| !matches!(p.bcs.right[i], RightBc::Fixed(_)))
            .collect(),
    };
    if components.is_empty() {
        return Err(Error::Input(
            "no free or capped components to check".into(),
        ));
    }
    let mut pass = true;
    for &l in &components {
        let report = variational::transversality_residual(&p, &y, l, form)?;
        residual_line(&format!("transversality[{}]", l + 1), report.value);
        match report.state {
            EndpointState::Free => pass &= report.value.abs() <= args.base.tol,
            EndpointState::CapInterior => {
                println!("endpoint_state[{}] = interior", l + 1);
                pass &= report.value.abs() <= args.base.tol;
            }
            EndpointState::CapActive => {
                println!("endpoint_state[{}] = active", l + 1);
                pass &= report.value <= args.base.tol;
            }
        }
        if let Some(cp) = report.complementary_product {
            residual_line(&format!("complementary_product[{}]", l + 1), cp);
        }
    }
    Ok(gate(pass))
}

fn cmd_check_regularity(args: RegularityArgs) -> Result<i32> {
    let p = load_problem(&args.base.problem)?;
    let y = trajectory_input(&p, &args.base)?;
    let dirs = if args.direction.is_empty() {
        solver::canonical_bump_directions(&p)
    } else {
        if args.direction.len() != p.n_constraints() {
            return Err(Error::Input(format!(
                "need {} direction files, got {}",
                p.n_constraints(),
                args.direction.len()
            )));
        }
        args.direction
            .iter()
            .map(|path| {
                let d = csvio::read_trajectory(&read_file(path)?, p.n_components)?;
                if d.grid() != p.grid {
                    return Err(Error::Input(
                        "direction grid does not match the problem grid".into(),
                    ));
                }
                Ok(d)
            })
            .collect::<Result<Vec<_>>>()?
    };
    let det = variational::regularity_determinant(&p, &y, &dirs)?;
    residual_line("regularity_determinant", det);
    // Regularity wants a determinant bounded AWAY from zero.
    Ok(gate(det.abs() >= args.base.tol))
}

fn cmd_check_complementarity(args: ComplementarityArgs) -> Result<i32> {
    let p = load_problem(&args.problem)?;
    let lam = args
        .lambda
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Input(format!("malformed --lambda entry `{}`", s.trim())))
        })
        .collect::<Result<Vec<f64>>>()?;
    if lam.len() != p.n_constraints() {
        return Err(Error::Input(format!(
            "--lambda has {} entries for {} constraints",
            lam.len(),
            p.n_constraints()
        )));
    }
    let mut slack_files = args.slack.iter();
    let mut slack = Vec::new();
    for c in &p.constraints {
        match c.mode {
            crate::problem::ConstraintMode::Inequality => match slack_files.next() {
                Some(path) => {
                    let s = csvio::read_function(&read_file(path)?)?;
                    if s.grid() != p.grid {
                        return Err(Error::Input(
                            "slack grid does not match the problem grid".into(),
                        ));
                    }
                    slack.push(Some(s));
                }
                None => slack.push(Some(SampledFunction::zeros(p.grid))),
            },
            crate::problem::ConstraintMode::Equality => slack.push(None),
        }
    }
    let m = MultiplierVector { lam, slack };
    let residual = variational::complementarity_residual(&p, &m)?;
    residual_line("complementarity_residual", residual);
    Ok(gate(residual <= args.tol))
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

fn cmd_solve(args: SolveArgs) -> Result<i32> {
    let p = load_problem(&args.problem)?;
    let mut opts = SolveOptions::default();
    if let Some(m) = args.max_iter {
        opts.max_iterations = m;
    }
    if let Some(t) = args.tol {
        opts.gradient_tolerance = t;
    }
    if let Some(t) = args.mult_tol {
        opts.multiplier_tolerance = t;
    }

    let report = if p.n_constraints() == 0 {
        solver::solve(&p, &opts)?
    } else {
        solver::solve_isoperimetric(&p, &opts)?
    };

    let csv = csvio::write_trajectory(&report.trajectory);
    match &args.out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{csv}"),
    }

    let say = |name: &str, v: f64| eprintln!("{name} = {v:.11e}");
    say("objective", report.objective);
    say("gradient_norm", report.gradient_norm);
    eprintln!("iterations = {}", report.iterations);
    say("el_residual_norm", report.el_residual_norm);
    say("el_residual_bound", report.el_residual_bound);
    for (i, t) in &report.transversality {
        say(&format!("transversality[{}]", i + 1), t.value);
        let state = match t.state {
            EndpointState::Free => "free",
            EndpointState::CapInterior => "cap-interior",
            EndpointState::CapActive => "cap-active",
        };
        eprintln!("endpoint_state[{}] = {state}", i + 1);
        if let Some(ok) = t.sign_ok {
            eprintln!("sign_condition[{}] = {}", i + 1, if ok { "ok" } else { "violated" });
        }
    }
    if let Some(m) = &report.multipliers {
        for (j, lam) in m.lam.iter().enumerate() {
            say(&format!("lambda[{}]", j + 1), *lam);
        }
    }
    for (j, c) in report.constraint_residuals.iter().enumerate() {
        say(&format!("constraint_residual[{}]", j + 1), *c);
    }
    if let Some(det) = report.regularity_determinant {
        say("regularity_determinant", det);
    }
    if let Some(c) = report.complementarity_residual {
        say("complementarity_residual", c);
    }
    eprintln!("converged = {}", report.converged);
    eprintln!("termination = {}", report.termination);

    if let Some(count) = args.probe {
        let (best, evaluated) = solver::random_search_objective(&p, count, args.seed)?;
        say("probe_best_objective", best);
        eprintln!("probe_evaluated = {evaluated}");
        say("probe_gap", report.objective - best);
    }

    Ok(if report.converged { 0 } else { 4 })
}

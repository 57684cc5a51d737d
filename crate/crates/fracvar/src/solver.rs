//! Direct method: discretize the trajectory on the grid and minimize the
//! discretized functional.
//!
//! The minimizer is deterministic projected first-order descent with Armijo
//! backtracking: Polak–Ribière conjugate directions (restarted whenever they
//! stop being descent directions or a cap projection becomes active), a
//! trial step from the differenced directional curvature (exact line
//! minimization on quadratic functionals), and backtracking that enforces
//! monotone descent, so the objective sequence over accepted iterations is
//! non-increasing. Identical problems and options produce bit-identical
//! reports: every sum runs in a fixed order and no randomness is involved.
//!
//! Isoperimetric problems run an outer quasi-Newton (secant) iteration on the
//! multipliers: each inner stage minimizes `L - Σ ν_j G_j` unconstrained
//! (warm-started from the previous stage) and the outer iteration drives the
//! constraint residuals `∫ G_j dx - target_j` to zero. Inequality
//! constraints are handled active-set style: solve ignoring them, then
//! promote any violated constraint to an active equality and re-solve.

use crate::expr::{self, Expr, Var};
use crate::grid::{SampledFunction, SampledTrajectory, INTERIOR_MARGIN};
use crate::operators::combined_caputo_transpose;
use crate::problem::{ConstraintMode, MultiplierVector, Problem, RightBc};
use crate::variational::{
    augmented_euler_lagrange_residual, combined_derivatives, complementarity_residual,
    euler_lagrange_residual, evaluate_functional, regularity_determinant,
    sample_expr, transversality_residual, TransversalityForm, TransversalityReport,
};
use crate::{Error, Result};

/// Tuning knobs of the direct solver. All values must be positive and the
/// step shrink factor must lie in (0, 1).
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub max_iterations: usize,
    /// Sup-norm threshold on the projected gradient of the discretized
    /// functional.
    pub gradient_tolerance: f64,
    /// First trial step of the very first line search.
    pub initial_step: f64,
    /// Backtracking shrink factor.
    pub step_shrink: f64,
    /// Armijo slope fraction.
    pub slope_fraction: f64,
    /// Threshold on `|∫ G_j dx - target_j|` for the outer multiplier loop.
    pub multiplier_tolerance: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iterations: 5000,
            gradient_tolerance: 1e-8,
            initial_step: 1.0,
            step_shrink: 0.5,
            slope_fraction: 1e-4,
            multiplier_tolerance: 1e-8,
        }
    }
}

impl SolveOptions {
    fn validate(&self) -> Result<()> {
        let ok = self.max_iterations > 0
            && self.gradient_tolerance > 0.0
            && self.initial_step > 0.0
            && self.step_shrink > 0.0
            && self.step_shrink < 1.0
            && self.slope_fraction > 0.0
            && self.multiplier_tolerance > 0.0;
        if !ok {
            return Err(Error::Domain(
                "solver options must be positive (and 0 < step_shrink < 1)".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of a solve, with the residual certificates of the first-order
/// conditions evaluated at the returned trajectory.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub trajectory: SampledTrajectory,
    /// Multipliers and slack samples; present only for isoperimetric solves.
    pub multipliers: Option<MultiplierVector>,
    pub objective: f64,
    /// Sup-norm of the projected discrete gradient at the final iterate.
    pub gradient_norm: f64,
    /// Accepted descent steps.
    pub iterations: usize,
    /// Interior sup-norm of the (augmented) Euler–Lagrange residual over the
    /// central window of the interval.
    pub el_residual_norm: f64,
    /// A-priori consistency bound the residual norm is certified against:
    /// `10 * (1 + max interior |dL/d(Dy)|) * (h^(1-alpha) + h^(1-beta) + sqrt(h))`.
    pub el_residual_bound: f64,
    /// Transversality data for each free or capped component (0-based index).
    pub transversality: Vec<(usize, TransversalityReport)>,
    /// `∫ G_j dx - target_j` per constraint.
    pub constraint_residuals: Vec<f64>,
    /// Determinant of the constraint first-variation matrix over canonical
    /// bump directions; `None` for unconstrained problems.
    pub regularity_determinant: Option<f64>,
    /// Pointwise complementarity residual; present when inequality
    /// constraints exist.
    pub complementarity_residual: Option<f64>,
    pub converged: bool,
    /// Human-readable termination reason (never silent on failure).
    pub termination: String,
}

// ---------------------------------------------------------------------------
// discrete gradient
// ---------------------------------------------------------------------------

fn trapezoid_weight(n: usize, h: f64, k: usize) -> f64 {
    if k == 0 || k == n - 1 {
        0.5 * h
    } else {
        h
    }
}

/// Exact gradient of the discretized functional with respect to the nodal
/// values, assembled from the trapezoid weights and the transpose of the
/// combined-operator quadrature weights (the discrete adjoint). Entries at
/// fixed nodes are zero.
pub fn discrete_gradient(p: &Problem, y: &SampledTrajectory) -> Result<SampledTrajectory> {
    let dy = combined_derivatives(p, y)?;
    let n = p.grid.len();
    let h = p.grid.h();
    let mut components = Vec::with_capacity(p.n_components);
    for i in 0..p.n_components {
        let py = sample_expr(p, &p.lagrangian.partial(Var::Y(i)), y, &dy, &[])?;
        let q = sample_expr(p, &p.lagrangian.partial(Var::Dy(i)), y, &dy, &[])?;
        // w ∘ q, then the adjoint of the derivative operator.
        let wq = SampledFunction::new(
            p.grid,
            q.values()
                .iter()
                .enumerate()
                .map(|(k, v)| trapezoid_weight(n, h, k) * v)
                .collect(),
        )?;
        let adj = combined_caputo_transpose(p.alpha, p.beta, p.gamma, &wq)?;
        let mut grad: Vec<f64> = (0..n)
            .map(|k| trapezoid_weight(n, h, k) * py.values()[k] + adj.values()[k])
            .collect();
        grad[0] = 0.0;
        if matches!(p.bcs.right[i], RightBc::Fixed(_)) {
            grad[n - 1] = 0.0;
        }
        components.push(SampledFunction::new(p.grid, grad)?);
    }
    SampledTrajectory::new(components)
}

// ---------------------------------------------------------------------------
// unconstrained minimization
// ---------------------------------------------------------------------------

/// Linear interpolant of the boundary data; free and capped endpoints start
/// at the left boundary value.
pub fn initial_trajectory(p: &Problem) -> SampledTrajectory {
    let n = p.grid.len();
    let components = (0..p.n_components)
        .map(|i| {
            let ya = p.bcs.left[i];
            let values: Vec<f64> = match p.bcs.right[i] {
                RightBc::Fixed(yb) => (0..n)
                    .map(|k| {
                        let t = k as f64 / (n - 1) as f64;
                        ya + t * (yb - ya)
                    })
                    .collect(),
                RightBc::Free | RightBc::Capped(_) => vec![ya; n],
            };
            SampledFunction::new(p.grid, values).expect("finite boundary data")
        })
        .collect();
    let mut y = SampledTrajectory::new(components).expect("at least one component");
    project(p, &mut y);
    y
}

/// Clamp capped right endpoints onto their bound.
fn project(p: &Problem, y: &mut SampledTrajectory) {
    let n = p.grid.len();
    for i in 0..p.n_components {
        if let RightBc::Capped(cap) = p.bcs.right[i] {
            let v = &mut y.component_mut(i).values_mut()[n - 1];
            if *v > cap {
                *v = cap;
            }
        }
    }
}

/// Projected gradient: at an active cap only the sign pointing back into the
/// feasible set counts as unrealized descent.
fn projected_gradient(p: &Problem, y: &SampledTrajectory, g: &SampledTrajectory) -> f64 {
    let n = p.grid.len();
    let mut sup: f64 = 0.0;
    for i in 0..p.n_components {
        let gv = g.component(i).values();
        for (k, &val) in gv.iter().enumerate() {
            let eff = match p.bcs.right[i] {
                RightBc::Capped(cap)
                    if k == n - 1 && y.component(i).values()[n - 1] >= cap - 1e-12 =>
                {
                    val.max(0.0)
                }
                _ => val,
            };
            sup = sup.max(eff.abs());
        }
    }
    sup
}

fn dot(a: &SampledTrajectory, b: &SampledTrajectory) -> f64 {
    let mut acc = 0.0;
    for (u, v) in a.components().iter().zip(b.components()) {
        for (x, y) in u.values().iter().zip(v.values()) {
            acc += x * y;
        }
    }
    acc
}

struct MinimizeOutcome {
    y: SampledTrajectory,
    objective: f64,
    gradient_norm: f64,
    iterations: usize,
    converged: bool,
    termination: String,
}

/// Objective evaluation that treats expression-domain failures during the
/// line search as "step too large" rather than hard errors.
fn try_objective(p: &Problem, y: &SampledTrajectory) -> Result<Option<f64>> {
    match evaluate_functional(p, y) {
        Ok(v) => Ok(Some(v)),
        Err(Error::Eval { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn sup_norm(t: &SampledTrajectory) -> f64 {
    t.components()
        .iter()
        .flat_map(|c| c.values().iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Directional curvature `d' H d / |d|^2`-style trial step: the gradient is
/// differenced along the search direction, which on quadratic functionals
/// reproduces the exact line minimizer. Returns `None` when the curvature is
/// not usable (non-convex direction or evaluation failure).
fn curvature_trial_step(
    p: &Problem,
    y: &SampledTrajectory,
    g: &SampledTrajectory,
    d: &SampledTrajectory,
    gd: f64,
) -> Result<Option<f64>> {
    let d_scale = sup_norm(d);
    if d_scale == 0.0 {
        return Ok(None);
    }
    let eps = 1e-6 * (1.0 + sup_norm(y)) / d_scale;
    let probe = y.linear_combination(1.0, eps, d)?;
    let g_probe = match discrete_gradient(p, &probe) {
        Ok(v) => v,
        Err(Error::Eval { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let dhd = (dot(&g_probe, d) - gd) / eps;
    if dhd <= 0.0 || !dhd.is_finite() {
        return Ok(None);
    }
    Ok(Some((-gd / dhd).clamp(1e-12, 1e12)))
}

/// Deterministic first-order descent: Polak–Ribière conjugate directions,
/// a curvature-based trial step, and Armijo backtracking for monotone
/// acceptance. Capped endpoints are handled by projection; any projection
/// activity restarts the conjugate recursion.
fn minimize(p: &Problem, opts: &SolveOptions, y0: SampledTrajectory) -> Result<MinimizeOutcome> {
    let mut y = y0;
    project(p, &mut y);
    let mut objective = evaluate_functional(p, &y)?;
    let mut g = discrete_gradient(p, &y)?;
    let mut direction = g.linear_combination(-1.0, 0.0, &g)?;
    let mut g_norm2 = dot(&g, &g);
    let mut iterations = 0;
    let restart_period = 2 * p.grid.len() * p.n_components;
    let mut since_restart = 0;

    loop {
        let pg = projected_gradient(p, &y, &g);
        if pg <= opts.gradient_tolerance {
            return Ok(MinimizeOutcome {
                objective,
                gradient_norm: pg,
                iterations,
                converged: true,
                termination: "projected gradient below tolerance".into(),
                y,
            });
        }
        if iterations >= opts.max_iterations {
            return Ok(MinimizeOutcome {
                objective,
                gradient_norm: pg,
                iterations,
                converged: false,
                termination: format!(
                    "iteration limit {} reached with projected gradient {:.3e}",
                    opts.max_iterations, pg
                ),
                y,
            });
        }

        let mut gd = dot(&g, &direction);
        if gd >= 0.0 || since_restart >= restart_period {
            direction = g.linear_combination(-1.0, 0.0, &g)?;
            gd = -g_norm2;
            since_restart = 0;
        }

        let mut step = match curvature_trial_step(p, &y, &g, &direction, gd)? {
            Some(t) => t,
            None => opts.initial_step,
        };

        let mut accepted = None;
        for _ in 0..90 {
            let mut trial = y.linear_combination(1.0, step, &direction)?;
            project(p, &mut trial);
            let displacement = trial.linear_combination(1.0, -1.0, &y)?;
            let decrease = dot(&g, &displacement);
            if decrease < 0.0 {
                if let Some(j_trial) = try_objective(p, &trial)? {
                    if j_trial <= objective + opts.slope_fraction * decrease {
                        let projected = displacement
                            .linear_combination(1.0, -step, &direction)
                            .map(|diff| sup_norm(&diff) > 0.0)?;
                        accepted = Some((trial, j_trial, projected));
                        break;
                    }
                }
            }
            step *= opts.step_shrink;
        }

        match accepted {
            Some((trial, j_trial, projection_active)) => {
                let g_new = discrete_gradient(p, &trial)?;
                let g_new_norm2 = dot(&g_new, &g_new);
                if projection_active {
                    // The cap clipped the step; conjugacy no longer holds.
                    direction = g_new.linear_combination(-1.0, 0.0, &g_new)?;
                    since_restart = 0;
                } else {
                    // Polak-Ribière+ update.
                    let g_diff = g_new.linear_combination(1.0, -1.0, &g)?;
                    let beta = (dot(&g_new, &g_diff) / g_norm2).max(0.0);
                    direction = g_new.linear_combination(-1.0, beta, &direction)?;
                    since_restart += 1;
                }
                y = trial;
                objective = j_trial;
                g = g_new;
                g_norm2 = g_new_norm2;
                iterations += 1;
            }
            None => {
                return Ok(MinimizeOutcome {
                    objective,
                    gradient_norm: pg,
                    iterations,
                    converged: false,
                    termination: format!(
                        "line search stalled with projected gradient {pg:.3e}"
                    ),
                    y,
                });
            }
        }
    }
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

fn residual_certificates(
    p: &Problem,
    y: &SampledTrajectory,
    multipliers: Option<&MultiplierVector>,
) -> Result<(f64, f64, Vec<(usize, TransversalityReport)>)> {
    let (lo, hi) = p.grid.interior_window(INTERIOR_MARGIN);
    let residual = match multipliers {
        None => euler_lagrange_residual(p, y)?,
        Some(m) => augmented_euler_lagrange_residual(p, y, m)?,
    };
    let norm = residual.max_abs_in(lo, hi);

    // Certificate bound: consistency of the two dual-operator
    // discretizations, scaled by the size of the momentum samples.
    let dy = combined_derivatives(p, y)?;
    let mut q_scale: f64 = 0.0;
    for i in 0..p.n_components {
        let q = sample_expr(p, &p.lagrangian.partial(Var::Dy(i)), y, &dy, &[])?;
        q_scale = q_scale.max(q.max_abs_in(lo, hi));
    }
    let h = p.grid.h();
    let bound = 10.0
        * (1.0 + q_scale)
        * (h.powf(1.0 - p.alpha.value()) + h.powf(1.0 - p.beta.value()) + h.sqrt());

    let mut transversality = Vec::new();
    for i in 0..p.n_components {
        if !matches!(p.bcs.right[i], RightBc::Fixed(_)) {
            let report = transversality_residual(p, y, i, TransversalityForm::BracketConsistent)?;
            transversality.push((i, report));
        }
    }
    Ok((norm, bound, transversality))
}

/// Minimize an unconstrained problem (`r = 0`).
pub fn solve(p: &Problem, opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    if p.n_constraints() != 0 {
        return Err(Error::Domain(
            "problem has isoperimetric constraints; use solve_isoperimetric".into(),
        ));
    }
    let outcome = minimize(p, opts, initial_trajectory(p))?;
    let (el_norm, el_bound, transversality) = residual_certificates(p, &outcome.y, None)?;
    Ok(SolveReport {
        objective: outcome.objective,
        gradient_norm: outcome.gradient_norm,
        iterations: outcome.iterations,
        el_residual_norm: el_norm,
        el_residual_bound: el_bound,
        transversality,
        constraint_residuals: Vec::new(),
        regularity_determinant: None,
        complementarity_residual: None,
        converged: outcome.converged,
        termination: outcome.termination,
        trajectory: outcome.y,
        multipliers: None,
    })
}

/// The problem with Lagrangian `L - Σ ν_j G_j` over the active constraints
/// (multipliers folded in as constants) and no constraint list.
fn penalized_problem(p: &Problem, active: &[usize], nu: &[f64]) -> Problem {
    let mut lagrangian = p.lagrangian.clone();
    for (idx, &j) in active.iter().enumerate() {
        lagrangian = expr::sub(
            lagrangian,
            expr::mul(Expr::Const(nu[idx]), p.constraints[j].integrand.clone()),
        );
    }
    Problem {
        lagrangian,
        constraints: Vec::new(),
        ..p.clone()
    }
}

/// Solve an `r x r` linear system in place (partial pivoting); the systems
/// here are the tiny multiplier updates.
fn solve_linear(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let r = rhs.len();
    for col in 0..r {
        let (pivot_row, pivot) = (col..r)
            .map(|row| (row, a[row][col]))
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))?;
        if pivot.abs() < 1e-300 {
            return None;
        }
        a.swap(pivot_row, col);
        rhs.swap(pivot_row, col);
        for row in col + 1..r {
            let f = a[row][col] / a[col][col];
            for k in col..r {
                a[row][k] -= f * a[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; r];
    for col in (0..r).rev() {
        let mut acc = rhs[col];
        for k in col + 1..r {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Some(x)
}

/// Canonical bump directions for the regularity certificate:
/// direction `j` has every component equal to `s^(j+1) (1 - s)` with
/// `s = (x-a)/(b-a)`.
pub fn canonical_bump_directions(p: &Problem) -> Vec<SampledTrajectory> {
    let width = p.grid.b() - p.grid.a();
    (0..p.n_constraints())
        .map(|j| {
            let comps = (0..p.n_components)
                .map(|_| {
                    SampledFunction::from_fn(p.grid, |x| {
                        let s = (x - p.grid.a()) / width;
                        s.powi(j as i32 + 1) * (1.0 - s)
                    })
                    .expect("bump is finite")
                })
                .collect();
            SampledTrajectory::new(comps).expect("components share the grid")
        })
        .collect()
}

/// Solve an isoperimetric problem (`r >= 1`).
pub fn solve_isoperimetric(p: &Problem, opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    let r = p.n_constraints();
    if r == 0 {
        return Err(Error::Domain(
            "problem has no isoperimetric constraints; use solve".into(),
        ));
    }

    let mut active: Vec<usize> = (0..r)
        .filter(|&j| p.constraints[j].mode == ConstraintMode::Equality)
        .collect();
    let mut warm = initial_trajectory(p);
    let mut total_inner_iterations = 0;

    // Active-set loop: at most r promotions, so at most r + 1 passes.
    let (mut nu, mut outcome, mut converged, mut termination);
    loop {
        let (stage_nu, stage_outcome, stage_converged, stage_note, inner_iters) =
            solve_with_active_set(p, opts, &active, warm)?;
        nu = stage_nu;
        converged = stage_converged;
        termination = stage_note;
        total_inner_iterations += inner_iters;
        warm = stage_outcome.y.clone();
        outcome = stage_outcome;

        // Promote violated inactive inequality constraints.
        let mut promoted = false;
        for j in 0..r {
            if active.contains(&j) || p.constraints[j].mode != ConstraintMode::Inequality {
                continue;
            }
            let value = crate::variational::constraint_value(p, j, &outcome.y)?;
            if value > p.constraints[j].target + opts.multiplier_tolerance {
                active.push(j);
                promoted = true;
            }
        }
        if !promoted {
            break;
        }
        if active.len() > r {
            converged = false;
            termination = "active-set loop failed to stabilize".into();
            break;
        }
    }

    // Assemble multipliers in the reporting convention: equality constraints
    // use `F = L - λ G`, inequality constraints the slack form
    // `F = L + λ (G - target/(b-a) + φ²)`, so active inequality multipliers
    // flip sign relative to the inner penalty.
    let width = p.grid.b() - p.grid.a();
    let mut lam = vec![0.0; r];
    let mut slack: Vec<Option<SampledFunction>> = vec![None; r];
    let mut constraint_residuals = vec![0.0; r];
    for j in 0..r {
        let value = crate::variational::constraint_value(p, j, &outcome.y)?;
        match p.constraints[j].mode {
            ConstraintMode::Equality => {
                constraint_residuals[j] = value - p.constraints[j].target;
                if let Some(idx) = active.iter().position(|&a| a == j) {
                    lam[j] = nu[idx];
                }
            }
            ConstraintMode::Inequality => {
                if let Some(idx) = active.iter().position(|&a| a == j) {
                    lam[j] = -nu[idx];
                    slack[j] = Some(SampledFunction::zeros(p.grid));
                    constraint_residuals[j] = value - p.constraints[j].target;
                } else {
                    lam[j] = 0.0;
                    let margin = (p.constraints[j].target - value).max(0.0);
                    slack[j] =
                        Some(SampledFunction::from_fn(p.grid, |_| (margin / width).sqrt())?);
                    // Inactive inequality: feasible, no residual to drive.
                    constraint_residuals[j] = (value - p.constraints[j].target).min(0.0);
                }
            }
        }
    }
    let multipliers = MultiplierVector { lam, slack };

    let (el_norm, el_bound, transversality) =
        residual_certificates(p, &outcome.y, Some(&multipliers))?;
    let regularity = regularity_determinant(p, &outcome.y, &canonical_bump_directions(p))?;
    if regularity.abs() <= 1e-12 {
        converged = false;
        termination = format!(
            "{termination}; regularity determinant is numerically singular ({regularity:.3e})"
        );
    }
    let complementarity = if p.has_inequality_constraints() {
        Some(complementarity_residual(p, &multipliers)?)
    } else {
        None
    };

    Ok(SolveReport {
        objective: outcome.objective,
        gradient_norm: outcome.gradient_norm,
        iterations: total_inner_iterations,
        el_residual_norm: el_norm,
        el_residual_bound: el_bound,
        transversality,
        constraint_residuals,
        regularity_determinant: Some(regularity),
        complementarity_residual: complementarity,
        converged,
        termination,
        trajectory: outcome.y,
        multipliers: Some(multipliers),
    })
}

type StageResult = (Vec<f64>, MinimizeOutcome, bool, String, usize);

/// Drive the constraint residuals of the active set to zero with a secant /
/// Broyden iteration on the penalty multipliers; every inner minimization is
/// warm-started from the previous stage's trajectory.
fn solve_with_active_set(
    p: &Problem,
    opts: &SolveOptions,
    active: &[usize],
    warm: SampledTrajectory,
) -> Result<StageResult> {
    let ra = active.len();
    let mut warm = warm;

    let mut inner_total = 0;
    let evaluate = |nu: &[f64], warm: &mut SampledTrajectory| -> Result<(MinimizeOutcome, Vec<f64>, bool)> {
        let sub = penalized_problem(p, active, nu);
        let outcome = minimize(&sub, opts, warm.clone())?;
        *warm = outcome.y.clone();
        let mut c = vec![0.0; ra];
        for (idx, &j) in active.iter().enumerate() {
            c[idx] =
                crate::variational::constraint_value(p, j, &outcome.y)? - p.constraints[j].target;
        }
        let ok = outcome.converged;
        Ok((outcome, c, ok))
    };

    let mut nu = vec![0.0; ra];
    let (mut outcome, mut c, mut inner_ok) = evaluate(&nu, &mut warm)?;
    inner_total += outcome.iterations;
    if ra == 0 {
        let note = outcome.termination.clone();
        let ok = inner_ok;
        return Ok((nu, outcome, ok, note, inner_total));
    }

    let sup = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if sup(&c) <= opts.multiplier_tolerance {
        let note = format!("constraints satisfied at zero multipliers; {}", outcome.termination);
        let ok = inner_ok;
        return Ok((nu, outcome, ok, note, inner_total));
    }

    // Finite-difference Jacobian of the constraint map (one inner solve per
    // active constraint), then Broyden updates.
    let mut jac = vec![vec![0.0; ra]; ra];
    for idx in 0..ra {
        let mut probe = nu.clone();
        probe[idx] += 1.0;
        let (probe_outcome, c_probe, _) = evaluate(&probe, &mut warm)?;
        inner_total += probe_outcome.iterations;
        for row in 0..ra {
            jac[row][idx] = c_probe[row] - c[row];
        }
    }

    let max_outer = 60;
    for _ in 0..max_outer {
        let delta = match solve_linear(jac.clone(), c.iter().map(|v| -v).collect()) {
            Some(d) => d,
            None => {
                let note = "multiplier update matrix is singular".to_string();
                return Ok((nu, outcome, false, note, inner_total));
            }
        };
        for idx in 0..ra {
            nu[idx] += delta[idx];
        }
        let (new_outcome, new_c, new_ok) = evaluate(&nu, &mut warm)?;
        inner_total += new_outcome.iterations;

        // Broyden rank-one update: (Δc - J Δν) Δνᵀ / (Δνᵀ Δν).
        let dnu = delta;
        let dn2: f64 = dnu.iter().map(|v| v * v).sum();
        if dn2 > 0.0 {
            for row in 0..ra {
                let jd: f64 = (0..ra).map(|k| jac[row][k] * dnu[k]).sum();
                let corr = (new_c[row] - c[row] - jd) / dn2;
                for k in 0..ra {
                    jac[row][k] += corr * dnu[k];
                }
            }
        }
        outcome = new_outcome;
        c = new_c;
        inner_ok = new_ok;
        if sup(&c) <= opts.multiplier_tolerance {
            let note = format!(
                "constraint residual {:.3e} below multiplier tolerance; {}",
                sup(&c),
                outcome.termination
            );
            let ok = inner_ok;
            return Ok((nu, outcome, ok, note, inner_total));
        }
    }
    let note = format!(
        "multiplier iteration hit the outer limit with constraint residual {:.3e}",
        sup(&c)
    );
    Ok((nu, outcome, false, note, inner_total))
}

/// Best objective among `count` random feasible trajectories (free nodes
/// uniform in a box spanning the boundary data plus one unit on each side).
/// Used by the brute-force optimality probe; fully determined by `seed`.
pub fn random_search_objective(p: &Problem, count: usize, seed: u64) -> Result<(f64, usize)> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);

    let mut anchors: Vec<f64> = p.bcs.left.clone();
    for bc in &p.bcs.right {
        match bc {
            RightBc::Fixed(v) | RightBc::Capped(v) => anchors.push(*v),
            RightBc::Free => {}
        }
    }
    let lo = anchors.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let hi = anchors.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1.0;

    let n = p.grid.len();
    let mut best = f64::INFINITY;
    let mut evaluated = 0;
    let mut y = initial_trajectory(p);
    for _ in 0..count {
        for i in 0..p.n_components {
            let cap = match p.bcs.right[i] {
                RightBc::Capped(c) => Some(c),
                _ => None,
            };
            let fixed_right = matches!(p.bcs.right[i], RightBc::Fixed(_));
            let values = y.component_mut(i).values_mut();
            for (k, slot) in values.iter_mut().enumerate() {
                if k == 0 || (k == n - 1 && fixed_right) {
                    continue; // keep boundary data
                }
                let mut v = rng.random_range(lo..hi);
                if k == n - 1 {
                    if let Some(c) = cap {
                        v = v.min(c);
                    }
                }
                *slot = v;
            }
        }
        if let Some(j) = try_objective(p, &y)? {
            best = best.min(j);
            evaluated += 1;
        }
    }
    Ok((best, evaluated))
}

//! Cost functionals, first variations, and first-order optimality residuals.
//!
//! Everything here evaluates *residuals*: quantities that vanish (up to
//! discretization error) exactly when the corresponding necessary condition
//! holds. The Euler–Lagrange residual of component `i` is
//!
//! ```text
//! dL/dy_i [y](x)  +  D_dual( dL/d(Dy_i) [y] )(x)
//! ```
//!
//! where `D_dual` is the dual Riemann–Liouville combination
//! `(1-gamma) * left RL(beta) + gamma * right RL(alpha)`. The sampled partial
//! generally has nonzero boundary values, so the dual derivative is singular
//! at the endpoints; those nodes carry NaN markers and residual norms are
//! taken over a central window of the interval (see
//! [`Grid::interior_window`]).
//!
//! All definite integrals use the trapezoidal rule on the problem grid,
//! skipping marked nodes.

use crate::expr::{self, EvalEnv, Expr, Var};
use crate::grid::{trapezoid, trapezoid_product, SampledFunction, SampledTrajectory};
use crate::operators::{
    combined_caputo, combined_riemann_liouville, check_weight, fractional_integral, FracOrder,
    Side,
};
use crate::problem::{ConstraintMode, MultiplierVector, Problem, RightBc};
use crate::{Error, Result};

/// How a first variation is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VariationMode {
    /// Integrate the sampled partial derivatives against the direction and
    /// its combined derivative.
    Analytic,
    /// Central difference `(J(y + eps h) - J(y - eps h)) / (2 eps)`.
    FiniteDifference { step: f64 },
}

impl VariationMode {
    pub fn finite_difference_default() -> Self {
        VariationMode::FiniteDifference { step: 1e-5 }
    }
}

/// Combined Caputo derivative of every component of a trajectory.
pub fn combined_derivatives(p: &Problem, y: &SampledTrajectory) -> Result<Vec<SampledFunction>> {
    check_trajectory(p, y)?;
    y.components()
        .iter()
        .map(|c| combined_caputo(p.alpha, p.beta, p.gamma, c))
        .collect()
}

fn check_trajectory(p: &Problem, y: &SampledTrajectory) -> Result<()> {
    if y.grid() != p.grid {
        return Err(Error::Input("trajectory grid differs from problem grid".into()));
    }
    if y.dim() != p.n_components {
        return Err(Error::Input(format!(
            "trajectory has {} components, problem declares {}",
            y.dim(),
            p.n_components
        )));
    }
    Ok(())
}

/// Evaluate `e` at every grid node, with `dy` the precomputed combined
/// derivatives. Evaluation failures carry the node where they happened.
pub(crate) fn sample_expr(
    p: &Problem,
    e: &Expr,
    y: &SampledTrajectory,
    dy: &[SampledFunction],
    lam: &[f64],
) -> Result<SampledFunction> {
    let n = p.grid.len();
    let dim = p.n_components;
    let mut yv = vec![0.0; dim];
    let mut dyv = vec![0.0; dim];
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let x = p.grid.node(k);
        for i in 0..dim {
            yv[i] = y.component(i).values()[k];
            dyv[i] = dy[i].values()[k];
        }
        let v = e
            .eval(&EvalEnv::new(x, &yv, &dyv, lam))
            .map_err(|source| Error::Eval {
                node: Some((k, x)),
                source,
            })?;
        out.push(v);
    }
    SampledFunction::new(p.grid, out)
}

pub(crate) fn integral_of_expr(
    p: &Problem,
    e: &Expr,
    y: &SampledTrajectory,
    dy: &[SampledFunction],
    lam: &[f64],
) -> Result<f64> {
    Ok(trapezoid(&sample_expr(p, e, y, dy, lam)?))
}

/// The cost functional `J(y) = ∫ L[y](x) dx` by trapezoidal quadrature, with
/// the derivative argument supplied by the combined Caputo operator.
pub fn evaluate_functional(p: &Problem, y: &SampledTrajectory) -> Result<f64> {
    let dy = combined_derivatives(p, y)?;
    integral_of_expr(p, &p.lagrangian, y, &dy, &[])
}

/// Value of one isoperimetric integral `∫ G_j [y](x) dx`.
pub fn constraint_value(p: &Problem, j: usize, y: &SampledTrajectory) -> Result<f64> {
    let dy = combined_derivatives(p, y)?;
    integral_of_expr(p, &p.constraints[j].integrand, y, &dy, &[])
}

/// Directional (Gateaux) derivative of `∫ integrand dx` at `y` in direction
/// `h`, computed from the sampled partials:
/// `∫ Σ_i [ dI/dy_i · h_i + dI/d(Dy_i) · D h_i ] dx`.
pub fn gateaux_derivative(
    p: &Problem,
    integrand: &Expr,
    y: &SampledTrajectory,
    h: &SampledTrajectory,
) -> Result<f64> {
    check_trajectory(p, y)?;
    check_trajectory(p, h)?;
    require_nonzero_direction(h)?;
    let dy = combined_derivatives(p, y)?;
    let mut total = 0.0;
    for i in 0..p.n_components {
        let dy_part = integrand.partial(Var::Y(i));
        let ddy_part = integrand.partial(Var::Dy(i));
        let py = sample_expr(p, &dy_part, y, &dy, &[])?;
        let q = sample_expr(p, &ddy_part, y, &dy, &[])?;
        let dh = combined_caputo(p.alpha, p.beta, p.gamma, h.component(i))?;
        total += trapezoid_product(&py, h.component(i))?;
        total += trapezoid_product(&q, &dh)?;
    }
    Ok(total)
}

fn require_nonzero_direction(h: &SampledTrajectory) -> Result<()> {
    if h.is_zero() {
        return Err(Error::Domain(
            "variation direction must be nonzero (h != 0)".into(),
        ));
    }
    Ok(())
}

/// First variation of the cost functional at `y` in direction `h`.
pub fn first_variation(
    p: &Problem,
    y: &SampledTrajectory,
    h: &SampledTrajectory,
    mode: VariationMode,
) -> Result<f64> {
    match mode {
        VariationMode::Analytic => gateaux_derivative(p, &p.lagrangian, y, h),
        VariationMode::FiniteDifference { step } => {
            if !step.is_finite() || step <= 0.0 {
                return Err(Error::Domain(format!(
                    "finite-difference step must be positive, got {step}"
                )));
            }
            check_trajectory(p, y)?;
            check_trajectory(p, h)?;
            require_nonzero_direction(h)?;
            let plus = evaluate_functional(p, &y.linear_combination(1.0, step, h)?)?;
            let minus = evaluate_functional(p, &y.linear_combination(1.0, -step, h)?)?;
            Ok((plus - minus) / (2.0 * step))
        }
    }
}

fn residual_of_integrand(
    p: &Problem,
    integrand: &Expr,
    y: &SampledTrajectory,
    lam: &[f64],
) -> Result<SampledTrajectory> {
    let dy = combined_derivatives(p, y)?;
    let mut components = Vec::with_capacity(p.n_components);
    for i in 0..p.n_components {
        let py = sample_expr(p, &integrand.partial(Var::Y(i)), y, &dy, lam)?;
        let q = sample_expr(p, &integrand.partial(Var::Dy(i)), y, &dy, lam)?;
        let dual = combined_riemann_liouville(p.alpha, p.beta, p.gamma, &q)?;
        components.push(py.linear_combination(1.0, 1.0, &dual)?);
    }
    SampledTrajectory::new(components)
}

/// Euler–Lagrange residual of the unconstrained problem. Singular markers of
/// the dual derivative propagate; use an interior window for norms.
pub fn euler_lagrange_residual(p: &Problem, y: &SampledTrajectory) -> Result<SampledTrajectory> {
    if p.n_constraints() != 0 {
        return Err(Error::Domain(
            "problem has isoperimetric constraints; use the augmented residual".into(),
        ));
    }
    check_trajectory(p, y)?;
    residual_of_integrand(p, &p.lagrangian, y, &[])
}

/// Euler–Lagrange residual of the multiplier-augmented integrand.
///
/// Equality constraints enter as `F = L - Σ λ_j G_j`; inequality constraints
/// through the squared-slack reformulation as
/// `F = L + Σ λ_j (G_j - target_j / (b-a) + φ_j²)`. The `φ_j²` term has no
/// dependence on the trajectory, so it drops out of these equations; it is
/// accounted for by [`complementarity_residual`] and constraint feasibility.
pub fn augmented_euler_lagrange_residual(
    p: &Problem,
    y: &SampledTrajectory,
    m: &MultiplierVector,
) -> Result<SampledTrajectory> {
    let r = p.n_constraints();
    if r == 0 {
        return Err(Error::Domain(
            "augmented residual requires at least one constraint".into(),
        ));
    }
    if m.len() != r || m.slack.len() != r {
        return Err(Error::Input(format!(
            "multiplier vector has {} entries for {} constraints",
            m.len(),
            r
        )));
    }
    check_trajectory(p, y)?;
    let width = p.grid.b() - p.grid.a();
    let mut f = p.lagrangian.clone();
    for (j, c) in p.constraints.iter().enumerate() {
        let lam = Expr::Var(Var::Lam(j));
        match c.mode {
            ConstraintMode::Equality => {
                f = expr::sub(f, expr::mul(lam, c.integrand.clone()));
            }
            ConstraintMode::Inequality => {
                if m.slack[j].is_none() {
                    return Err(Error::Input(format!(
                        "inequality constraint {} needs slack samples",
                        j + 1
                    )));
                }
                let shifted = expr::sub(
                    c.integrand.clone(),
                    Expr::Const(c.target / width),
                );
                f = expr::add(f, expr::mul(lam, shifted));
            }
        }
    }
    residual_of_integrand(p, &f, y, &m.lam)
}

/// Pointwise complementarity `max_{j,x} |λ_j φ_j(x)|` over inequality
/// constraints.
pub fn complementarity_residual(p: &Problem, m: &MultiplierVector) -> Result<f64> {
    if !p.has_inequality_constraints() {
        return Err(Error::Domain(
            "complementarity requires inequality constraints".into(),
        ));
    }
    if m.len() != p.n_constraints() {
        return Err(Error::Input("multiplier count mismatch".into()));
    }
    let mut worst: f64 = 0.0;
    for (j, c) in p.constraints.iter().enumerate() {
        if c.mode != ConstraintMode::Inequality {
            continue;
        }
        let lam = m.lam[j];
        if let Some(phi) = &m.slack[j] {
            for &v in phi.values() {
                if !v.is_nan() {
                    worst = worst.max((lam * v).abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Residual of the integration-by-parts identity for the combined operator:
/// left side `∫ g · D_combined f dx`, right side the two boundary brackets
/// plus `∫ f · D_dual g dx`.
pub fn integration_by_parts_residual(
    alpha: FracOrder,
    beta: FracOrder,
    gamma: f64,
    f: &SampledFunction,
    g: &SampledFunction,
) -> Result<f64> {
    let gamma = check_weight(gamma)?;
    if f.grid() != g.grid() {
        return Err(Error::Input("f and g must share a grid".into()));
    }
    let n = f.grid().len();
    let lhs = trapezoid_product(g, &combined_caputo(alpha, beta, gamma, f)?)?;

    let one_minus_alpha = FracOrder::new(1.0 - alpha.value())?;
    let one_minus_beta = FracOrder::new(1.0 - beta.value())?;
    let f_a = f.values()[0];
    let f_b = f.values()[n - 1];
    // gamma * [f(x) * I_right^{1-alpha} g(x)] from a to b
    let v = fractional_integral(Side::Right, one_minus_alpha, g);
    let bracket_right = gamma * (f_b * v.values()[n - 1] - f_a * v.values()[0]);
    // (1-gamma) * [-f(x) * I_left^{1-beta} g(x)] from a to b
    let u = fractional_integral(Side::Left, one_minus_beta, g);
    let bracket_left = (1.0 - gamma) * (-f_b * u.values()[n - 1] + f_a * u.values()[0]);

    let rhs_integral = trapezoid_product(f, &combined_riemann_liouville(alpha, beta, gamma, g)?)?;
    Ok((lhs - (bracket_right + bracket_left + rhs_integral)).abs())
}

/// Which index pairing the transversality bracket uses for the
/// right-anchored integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransversalityForm {
    /// Both brackets act on the derivative-partial `dL/d(Dy_l)` — the form
    /// the boundary terms of the first-variation expansion produce.
    #[default]
    BracketConsistent,
    /// The right-anchored integral acts on the trajectory-partial `dL/dy_l`
    /// instead (the condition as displayed in the source material).
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointState {
    /// The component's right endpoint is free: the equality condition applies.
    Free,
    /// Capped endpoint, strictly below the cap: the equality condition applies.
    CapInterior,
    /// Capped endpoint sitting at the cap: the sign condition applies.
    CapActive,
}

/// Transversality data for one free or capped component.
#[derive(Debug, Clone, Copy)]
pub struct TransversalityReport {
    /// Value of the combined boundary bracket; its magnitude is the residual
    /// of the equality form.
    pub value: f64,
    pub state: EndpointState,
    /// For `CapActive`: whether the bracket satisfies the `<= 0` sign
    /// condition (up to 1e-8).
    pub sign_ok: Option<bool>,
    /// For capped components: `(y_l(b) - cap) * value`, the complementary
    /// product of the combined condition block.
    pub complementary_product: Option<f64>,
}

/// Evaluate the natural boundary condition of component `l` at the right
/// endpoint.
///
/// The bracket is the x -> b limit of
/// `gamma * I_right^{1-alpha}(w) - (1-gamma) * I_left^{1-beta}(q)`, with
/// `q = dL/d(Dy_l)` and `w` chosen by `form`. The right-anchored integral
/// collapses through a boundary layer at `b` itself (the quadrature value at
/// the initiating node is identically zero), so the bracket is evaluated at
/// the penultimate node as the numerical stand-in for the limit.
pub fn transversality_residual(
    p: &Problem,
    y: &SampledTrajectory,
    component: usize,
    form: TransversalityForm,
) -> Result<TransversalityReport> {
    check_trajectory(p, y)?;
    if component >= p.n_components {
        return Err(Error::Input(format!(
            "component index {} out of range for {} components",
            component + 1,
            p.n_components
        )));
    }
    let bc = p.bcs.right[component];
    if matches!(bc, RightBc::Fixed(_)) {
        return Err(Error::Domain(format!(
            "component {} is fixed at both endpoints; transversality does not apply",
            component + 1
        )));
    }

    let dy = combined_derivatives(p, y)?;
    let q = sample_expr(
        p,
        &p.lagrangian.partial(Var::Dy(component)),
        y,
        &dy,
        &[],
    )?;
    let w = match form {
        TransversalityForm::BracketConsistent => q.clone(),
        TransversalityForm::Literal => sample_expr(
            p,
            &p.lagrangian.partial(Var::Y(component)),
            y,
            &dy,
            &[],
        )?,
    };

    let n = p.grid.len();
    let one_minus_alpha = FracOrder::new(1.0 - p.alpha.value())?;
    let one_minus_beta = FracOrder::new(1.0 - p.beta.value())?;
    let right_part = fractional_integral(Side::Right, one_minus_alpha, &w);
    let left_part = fractional_integral(Side::Left, one_minus_beta, &q);
    let value =
        p.gamma * right_part.values()[n - 2] - (1.0 - p.gamma) * left_part.values()[n - 2];

    let report = match bc {
        RightBc::Free => TransversalityReport {
            value,
            state: EndpointState::Free,
            sign_ok: None,
            complementary_product: None,
        },
        RightBc::Capped(cap) => {
            let yb = y.component(component).values()[n - 1];
            let active = yb >= cap - 1e-9 * (1.0 + cap.abs());
            TransversalityReport {
                value,
                state: if active {
                    EndpointState::CapActive
                } else {
                    EndpointState::CapInterior
                },
                sign_ok: active.then(|| value <= 1e-8),
                complementary_product: Some((yb - cap) * value),
            }
        }
        RightBc::Fixed(_) => unreachable!(),
    };
    Ok(report)
}

/// Determinant of the r x r matrix of constraint first variations
/// `δG_i(y; h_j)`; a nonzero value witnesses the regularity (normality) of
/// the constraint set at `y`.
pub fn regularity_determinant(
    p: &Problem,
    y: &SampledTrajectory,
    dirs: &[SampledTrajectory],
) -> Result<f64> {
    let r = p.n_constraints();
    if r == 0 {
        return Err(Error::Domain("problem has no constraints".into()));
    }
    if dirs.len() != r {
        return Err(Error::Input(format!(
            "need {} directions, got {}",
            r,
            dirs.len()
        )));
    }
    let n = p.grid.len();
    for (j, h) in dirs.iter().enumerate() {
        check_trajectory(p, h)?;
        require_nonzero_direction(h)?;
        for c in h.components() {
            if c.values()[0].abs() > 1e-12 || c.values()[n - 1].abs() > 1e-12 {
                return Err(Error::Domain(format!(
                    "direction {} must vanish at both endpoints",
                    j + 1
                )));
            }
        }
    }
    let mut m = vec![vec![0.0; r]; r];
    for (i, c) in p.constraints.iter().enumerate() {
        for (j, h) in dirs.iter().enumerate() {
            m[i][j] = gateaux_derivative(p, &c.integrand, y, h)?;
        }
    }
    Ok(determinant(m))
}

/// Gaussian elimination with partial pivoting; the matrices here are tiny
/// (r x r with r the number of constraints).
fn determinant(mut m: Vec<Vec<f64>>) -> f64 {
    let r = m.len();
    let mut det = 1.0;
    for col in 0..r {
        let (pivot_row, pivot) = (col..r)
            .map(|row| (row, m[row][col]))
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .unwrap();
        if pivot == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            m.swap(pivot_row, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..r {
            let factor = m[row][col] / m[col][col];
            for k in col..r {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    det
}

/// The trajectory norm `max_x ||y(x)|| + max_x ||D_combined y(x)||`
/// (Euclidean norm across components at each node).
#[derive(Debug, Clone, Copy)]
pub struct Norm1Inf {
    pub value: f64,
    /// Nodes skipped because a component carried a singular marker.
    pub excluded_nodes: usize,
}

pub fn norm_1inf(p: &Problem, y: &SampledTrajectory) -> Result<Norm1Inf> {
    check_trajectory(p, y)?;
    let dy = combined_derivatives(p, y)?;
    let n = p.grid.len();
    let mut excluded = 0;
    let mut max_y: f64 = 0.0;
    let mut max_dy: f64 = 0.0;
    for k in 0..n {
        let mut sy = 0.0;
        let mut sdy = 0.0;
        let mut skip = false;
        for i in 0..p.n_components {
            let a = y.component(i).values()[k];
            let b = dy[i].values()[k];
            if a.is_nan() || b.is_nan() {
                skip = true;
                break;
            }
            sy += a * a;
            sdy += b * b;
        }
        if skip {
            excluded += 1;
            continue;
        }
        max_y = max_y.max(sy.sqrt());
        max_dy = max_dy.max(sdy.sqrt());
    }
    Ok(Norm1Inf {
        value: max_y + max_dy,
        excluded_nodes: excluded,
    })
}

//! Fractional integrals and derivatives on uniformly sampled functions.
//!
//! All operators take a [`SampledFunction`] and return the node-wise values
//! of the corresponding fractional operator applied to the piecewise-linear
//! interpolant of the samples:
//!
//! * [`fractional_integral`] — Riemann–Liouville integral, product
//!   trapezoidal rule: the interpolant is integrated against the weakly
//!   singular kernel exactly, so there is no quadrature error from the
//!   kernel singularity.
//! * [`caputo_derivative`] — L1 scheme: the interpolant's piecewise-constant
//!   slope convolved with the kernel, again integrated exactly.
//! * [`riemann_liouville_derivative`] — computed through the identity
//!   `RL = Caputo + f(endpoint) * (distance)^(-order) / Gamma(1 - order)`
//!   rather than by differentiating a quadrature, which would amplify noise.
//!   When the boundary value is nonzero the initiating endpoint diverges and
//!   the node carries a NaN singular marker.
//! * [`combined_caputo`] — the convex combination
//!   `gamma * left Caputo(alpha) + (1 - gamma) * right Caputo(beta)`.
//! * [`combined_riemann_liouville`] — its dual
//!   `(1 - gamma) * left RL(beta) + gamma * right RL(alpha)`, the operator
//!   that integration by parts produces.
//!
//! Right-sided operators are evaluated by reflection: reverse the samples,
//! apply the left operator, reverse back. For the integral, the Caputo
//! derivative, and the Riemann–Liouville derivative this is an identity of
//! the defining formulas (the sign conventions of the right-sided
//! definitions are absorbed exactly), not an approximation.
//!
//! Orders are restricted to (0, 1). Callers are responsible for sampling
//! from absolutely continuous functions where the derivative definitions
//! require it; the code itself is total on finite samples. Every kernel sum
//! runs in ascending node order, and `gamma = 0` / `gamma = 1` short-circuit
//! to the single-sided operator so degenerate combinations are bit-identical
//! to the one-sided code path.

use crate::grid::SampledFunction;
use crate::special::gamma as gamma_fn;
use crate::{Error, Result};

/// A fractional order in the open interval (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 || value >= 1.0 {
            return Err(Error::Domain(format!(
                "order must lie in (0,1), got {value}"
            )));
        }
        Ok(FracOrder(value))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Which endpoint anchors the operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Validate a convex-combination weight.
pub fn check_weight(gamma: f64) -> Result<f64> {
    if !gamma.is_finite() || !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain(format!(
            "combination weight gamma must lie in [0,1], got {gamma}"
        )));
    }
    Ok(gamma)
}

/// Riemann–Liouville fractional integral of the given order and side.
///
/// The value at the initiating endpoint (left node for `Side::Left`, right
/// node for `Side::Right`) is 0.
pub fn fractional_integral(side: Side, order: FracOrder, f: &SampledFunction) -> SampledFunction {
    match side {
        Side::Left => rlfi_left(order.value(), f),
        Side::Right => rlfi_left(order.value(), &f.reversed()).reversed(),
    }
}

/// Caputo fractional derivative (L1 scheme). Annihilates constants exactly;
/// the value at the initiating endpoint is 0. The sign convention of the
/// right-sided definition (leading minus) is included.
pub fn caputo_derivative(side: Side, order: FracOrder, f: &SampledFunction) -> SampledFunction {
    match side {
        Side::Left => cfd_left(order.value(), f),
        Side::Right => cfd_left(order.value(), &f.reversed()).reversed(),
    }
}

/// Riemann–Liouville fractional derivative.
///
/// At the initiating endpoint the derivative diverges whenever the boundary
/// value is nonzero; that node is returned as a NaN singular marker.
pub fn riemann_liouville_derivative(
    side: Side,
    order: FracOrder,
    f: &SampledFunction,
) -> SampledFunction {
    match side {
        Side::Left => rlfd_left(order.value(), f),
        Side::Right => rlfd_left(order.value(), &f.reversed()).reversed(),
    }
}

/// The combined Caputo derivative
/// `gamma * left Caputo(alpha) + (1 - gamma) * right Caputo(beta)`.
pub fn combined_caputo(
    alpha: FracOrder,
    beta: FracOrder,
    gamma: f64,
    f: &SampledFunction,
) -> Result<SampledFunction> {
    let gamma = check_weight(gamma)?;
    if gamma == 1.0 {
        return Ok(caputo_derivative(Side::Left, alpha, f));
    }
    if gamma == 0.0 {
        return Ok(caputo_derivative(Side::Right, beta, f));
    }
    let left = caputo_derivative(Side::Left, alpha, f);
    let right = caputo_derivative(Side::Right, beta, f);
    left.linear_combination(gamma, 1.0 - gamma, &right)
}

/// The dual Riemann–Liouville combination
/// `(1 - gamma) * left RL(beta) + gamma * right RL(alpha)`.
///
/// Singular markers of the one-sided derivatives propagate into the
/// combination whenever their weight is nonzero.
pub fn combined_riemann_liouville(
    alpha: FracOrder,
    beta: FracOrder,
    gamma: f64,
    g: &SampledFunction,
) -> Result<SampledFunction> {
    let gamma = check_weight(gamma)?;
    if gamma == 1.0 {
        return Ok(riemann_liouville_derivative(Side::Right, alpha, g));
    }
    if gamma == 0.0 {
        return Ok(riemann_liouville_derivative(Side::Left, beta, g));
    }
    let left = riemann_liouville_derivative(Side::Left, beta, g);
    let right = riemann_liouville_derivative(Side::Right, alpha, g);
    left.linear_combination(1.0 - gamma, gamma, &right)
}

/// Operator selector used by the CLI and the C interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    RlfiLeft,
    RlfiRight,
    RlfdLeft,
    RlfdRight,
    CfdLeft,
    CfdRight,
    CombinedCfd,
    CombinedRlfd,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 8] = [
        OperatorKind::RlfiLeft,
        OperatorKind::RlfiRight,
        OperatorKind::RlfdLeft,
        OperatorKind::RlfdRight,
        OperatorKind::CfdLeft,
        OperatorKind::CfdRight,
        OperatorKind::CombinedCfd,
        OperatorKind::CombinedRlfd,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            OperatorKind::RlfiLeft => "rlfi-left",
            OperatorKind::RlfiRight => "rlfi-right",
            OperatorKind::RlfdLeft => "rlfd-left",
            OperatorKind::RlfdRight => "rlfd-right",
            OperatorKind::CfdLeft => "cfd-left",
            OperatorKind::CfdRight => "cfd-right",
            OperatorKind::CombinedCfd => "combined-cfd",
            OperatorKind::CombinedRlfd => "combined-rlfd",
        }
    }

    /// True for the two convex-combination operators, which need `beta` and
    /// `gamma` in addition to `alpha`.
    pub fn is_combined(&self) -> bool {
        matches!(self, OperatorKind::CombinedCfd | OperatorKind::CombinedRlfd)
    }
}

impl std::str::FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OperatorKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown operator kind `{s}`")))
    }
}

/// A fully specified operator: kind plus orders and combination weight.
/// `alpha` is used by left-anchored parts, `beta` by right-anchored parts.
#[derive(Debug, Clone, Copy)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub alpha: FracOrder,
    pub beta: FracOrder,
    pub gamma: f64,
}

impl OperatorSpec {
    pub fn new(kind: OperatorKind, alpha: FracOrder, beta: FracOrder, gamma: f64) -> Result<Self> {
        let gamma = check_weight(gamma)?;
        Ok(OperatorSpec {
            kind,
            alpha,
            beta,
            gamma,
        })
    }

    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        Ok(match self.kind {
            OperatorKind::RlfiLeft => fractional_integral(Side::Left, self.alpha, f),
            OperatorKind::RlfiRight => fractional_integral(Side::Right, self.beta, f),
            OperatorKind::RlfdLeft => riemann_liouville_derivative(Side::Left, self.alpha, f),
            OperatorKind::RlfdRight => riemann_liouville_derivative(Side::Right, self.beta, f),
            OperatorKind::CfdLeft => caputo_derivative(Side::Left, self.alpha, f),
            OperatorKind::CfdRight => caputo_derivative(Side::Right, self.beta, f),
            OperatorKind::CombinedCfd => combined_caputo(self.alpha, self.beta, self.gamma, f)?,
            OperatorKind::CombinedRlfd => {
                combined_riemann_liouville(self.alpha, self.beta, self.gamma, f)?
            }
        })
    }
}

// ----------------------------------------------------------------------------
// left-sided kernels
// ----------------------------------------------------------------------------

/// Product-trapezoidal weights for the left Riemann–Liouville integral.
///
/// With `p1[m] = m^(alpha+1)` the contribution of interior node `j` to the
/// value at node `k` is the second difference `d[k-j]`, the first node gets
/// `w0(k) = (k-1)^(alpha+1) - (k-1-alpha) k^alpha`, and the target node gets
/// weight 1, all scaled by `h^alpha / Gamma(alpha+2)`.
fn rlfi_left(alpha: f64, f: &SampledFunction) -> SampledFunction {
    let grid = f.grid();
    let n = grid.len();
    let h = grid.h();
    let fv = f.values();
    let scale = h.powf(alpha) / gamma_fn(alpha + 2.0).expect("alpha+2 > 0");

    let p1: Vec<f64> = (0..n).map(|m| (m as f64).powf(alpha + 1.0)).collect();
    let pa: Vec<f64> = (0..n).map(|m| (m as f64).powf(alpha)).collect();
    let d: Vec<f64> = (0..n)
        .map(|m| {
            if m == 0 || m + 1 >= n {
                0.0
            } else {
                p1[m + 1] - 2.0 * p1[m] + p1[m - 1]
            }
        })
        .collect();

    let mut out = vec![0.0; n];
    for k in 1..n {
        let w0 = p1[k - 1] - (k as f64 - 1.0 - alpha) * pa[k];
        let mut acc = w0 * fv[0];
        for j in 1..k {
            acc += d[k - j] * fv[j];
        }
        acc += fv[k];
        out[k] = scale * acc;
    }
    SampledFunction::new(grid, out).expect("finite input yields finite integral")
}

/// L1 scheme for the left Caputo derivative.
fn cfd_left(alpha: f64, f: &SampledFunction) -> SampledFunction {
    let grid = f.grid();
    let n = grid.len();
    let h = grid.h();
    let fv = f.values();
    let scale = h.powf(-alpha) / gamma_fn(2.0 - alpha).expect("2-alpha > 0");

    // b[m] = (m+1)^(1-alpha) - m^(1-alpha)
    let b: Vec<f64> = (0..n)
        .map(|m| ((m + 1) as f64).powf(1.0 - alpha) - (m as f64).powf(1.0 - alpha))
        .collect();

    let mut out = vec![0.0; n];
    for k in 1..n {
        let mut acc = 0.0;
        for j in 0..k {
            acc += (fv[j + 1] - fv[j]) * b[k - 1 - j];
        }
        out[k] = scale * acc;
    }
    SampledFunction::new(grid, out).expect("finite input yields finite derivative")
}

/// Transpose of the discrete left-Caputo (L1) operator, as a matrix acting
/// on nodal values. This is the exact adjoint of [`cfd_left`]: with
/// `S(v, f) = Σ_k v_k (A f)_k`, entry `m` is `dS/df_m`.
fn cfd_left_transpose(alpha: f64, v: &SampledFunction) -> SampledFunction {
    let grid = v.grid();
    let n = grid.len();
    let h = grid.h();
    let vv = v.values();
    let scale = h.powf(-alpha) / gamma_fn(2.0 - alpha).expect("2-alpha > 0");
    let b: Vec<f64> = (0..n)
        .map(|m| ((m + 1) as f64).powf(1.0 - alpha) - (m as f64).powf(1.0 - alpha))
        .collect();

    let mut out = vec![0.0; n];
    for (m, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        if m >= 1 {
            for k in m..n {
                acc += vv[k] * b[k - m];
            }
        }
        for k in m + 1..n {
            acc -= vv[k] * b[k - 1 - m];
        }
        *slot = scale * acc;
    }
    SampledFunction::new(grid, out).expect("finite input yields finite transpose")
}

/// Transpose of the discrete combined Caputo operator; mirrors the
/// `gamma = 0` / `gamma = 1` short-circuits of the forward operator so it is
/// the exact adjoint of whatever [`combined_caputo`] applies.
pub(crate) fn combined_caputo_transpose(
    alpha: FracOrder,
    beta: FracOrder,
    gamma: f64,
    v: &SampledFunction,
) -> Result<SampledFunction> {
    let gamma = check_weight(gamma)?;
    let left_t = |w: &SampledFunction| cfd_left_transpose(alpha.value(), w);
    let right_t =
        |w: &SampledFunction| cfd_left_transpose(beta.value(), &w.reversed()).reversed();
    if gamma == 1.0 {
        return Ok(left_t(v));
    }
    if gamma == 0.0 {
        return Ok(right_t(v));
    }
    left_t(v).linear_combination(gamma, 1.0 - gamma, &right_t(v))
}

/// Left Riemann–Liouville derivative via the Caputo identity.
fn rlfd_left(alpha: f64, f: &SampledFunction) -> SampledFunction {
    let grid = f.grid();
    let h = grid.h();
    let f0 = f.values()[0];
    let mut out = cfd_left(alpha, f).into_values();
    if f0 != 0.0 {
        let c = f0 / gamma_fn(1.0 - alpha).expect("1-alpha > 0");
        out[0] = f64::NAN;
        for (k, v) in out.iter_mut().enumerate().skip(1) {
            *v += c * (k as f64 * h).powf(-alpha);
        }
    }
    SampledFunction::new(grid, out).expect("values finite away from the marker")
}

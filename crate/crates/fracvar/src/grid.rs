//! Uniform grids and functions sampled on them.

use crate::{Error, Result};

/// A uniform partition of `[a, b]` with `n` nodes.
///
/// Node coordinates are computed on demand as `a + k * h` with
/// `h = (b - a) / (n - 1)`; the last node is pinned to `b` exactly so that
/// both endpoints are representable without rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || b <= a {
            return Err(Error::Domain(format!(
                "grid endpoints must be finite with b > a, got [{a}, {b}]"
            )));
        }
        if n < 3 {
            return Err(Error::Domain(format!("grid needs at least 3 nodes, got {n}")));
        }
        Ok(Grid { a, b, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node spacing.
    pub fn h(&self) -> f64 {
        (self.b - self.a) / (self.n - 1) as f64
    }

    /// Coordinate of node `k`.
    pub fn node(&self, k: usize) -> f64 {
        debug_assert!(k < self.n);
        if k == self.n - 1 {
            self.b
        } else {
            self.a + k as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.node(k))
    }

    /// Index range `[lo, hi]` of nodes inside the central window
    /// `[a + margin*(b-a), b - margin*(b-a)]`.
    ///
    /// Residual certificates are measured over this window: fractional
    /// Euler–Lagrange residuals of near-classical reference solutions grow
    /// without bound toward the endpoints (the one-sided derivatives of the
    /// mismatch between classical and fractional stationarity blow up like a
    /// negative power of the distance to the endpoint), so a sup-norm over
    /// all interior nodes is not a meaningful certificate.
    pub fn interior_window(&self, margin: f64) -> (usize, usize) {
        let lo_x = self.a + margin * (self.b - self.a);
        let hi_x = self.b - margin * (self.b - self.a);
        let mut lo = self.n - 1;
        let mut hi = 0;
        for k in 0..self.n {
            let x = self.node(k);
            if x >= lo_x && lo == self.n - 1 {
                lo = k;
            }
            if x <= hi_x {
                hi = k;
            }
        }
        (lo, hi)
    }
}

/// Default margin for interior residual norms: the central 60% of the interval.
pub const INTERIOR_MARGIN: f64 = 0.2;

/// Real values sampled at the nodes of a [`Grid`].
///
/// A NaN entry is a *singular marker*: it records that the underlying
/// quantity diverges at that node (a Riemann–Liouville derivative at the
/// initiating endpoint of a function with nonzero boundary value). Markers
/// are preserved by arithmetic and serialized as the `NaN` literal in CSV.
/// All non-marker entries must be finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Input(format!(
                "value count {} does not match grid node count {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| v.is_infinite()) {
            return Err(Error::Input(
                "sampled values must be finite (NaN marks a singular node)".into(),
            ));
        }
        Ok(SampledFunction { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().map(f).collect();
        SampledFunction::new(grid, values)
    }

    pub fn zeros(grid: Grid) -> Self {
        SampledFunction {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_singular(&self, k: usize) -> bool {
        self.values[k].is_nan()
    }

    pub fn singular_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_nan()).count()
    }

    /// Node-wise reversal: the sample of `x -> f(a + b - x)`.
    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        SampledFunction {
            grid: self.grid,
            values,
        }
    }

    /// Node-wise `c1 * self + c2 * other`. NaN markers propagate.
    pub fn linear_combination(&self, c1: f64, c2: f64, other: &SampledFunction) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Input("grid mismatch in linear combination".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| c1 * u + c2 * v)
            .collect();
        Ok(SampledFunction {
            grid: self.grid,
            values,
        })
    }

    /// Maximum of |f| over nodes `lo..=hi`, skipping singular markers.
    pub fn max_abs_in(&self, lo: usize, hi: usize) -> f64 {
        let mut m: f64 = 0.0;
        for k in lo..=hi.min(self.values.len() - 1) {
            let v = self.values[k];
            if !v.is_nan() {
                m = m.max(v.abs());
            }
        }
        m
    }
}

/// Composite trapezoidal rule on the sample's own grid.
///
/// Singular (NaN) nodes are skipped: the half-cells a marked node would
/// contribute are dropped from the quadrature rather than poisoning it.
/// Summation runs in ascending node order.
pub fn trapezoid(f: &SampledFunction) -> f64 {
    let n = f.grid.len();
    let h = f.grid.h();
    let mut acc = 0.0;
    for (k, &v) in f.values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        let w = if k == 0 || k == n - 1 { 0.5 * h } else { h };
        acc += w * v;
    }
    acc
}

/// Trapezoidal inner product `∫ u v dx`; NaN in either factor skips the node.
pub fn trapezoid_product(u: &SampledFunction, v: &SampledFunction) -> Result<f64> {
    if u.grid != v.grid {
        return Err(Error::Input("grid mismatch in trapezoid product".into()));
    }
    let n = u.grid.len();
    let h = u.grid.h();
    let mut acc = 0.0;
    for k in 0..n {
        let p = u.values[k] * v.values[k];
        if p.is_nan() {
            continue;
        }
        let w = if k == 0 || k == n - 1 { 0.5 * h } else { h };
        acc += w * p;
    }
    Ok(acc)
}

/// An `N`-component trajectory sampled on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTrajectory {
    components: Vec<SampledFunction>,
}

impl SampledTrajectory {
    pub fn new(components: Vec<SampledFunction>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Input("trajectory needs at least one component".into()));
        }
        let grid = components[0].grid();
        if components.iter().any(|c| c.grid() != grid) {
            return Err(Error::Input(
                "all trajectory components must share one grid".into(),
            ));
        }
        Ok(SampledTrajectory { components })
    }

    pub fn from_fns(grid: Grid, fns: &[&dyn Fn(f64) -> f64]) -> Result<Self> {
        let components = fns
            .iter()
            .map(|f| SampledFunction::from_fn(grid, f))
            .collect::<Result<Vec<_>>>()?;
        SampledTrajectory::new(components)
    }

    pub fn zeros(grid: Grid, n_components: usize) -> Self {
        SampledTrajectory {
            components: (0..n_components)
                .map(|_| SampledFunction::zeros(grid))
                .collect(),
        }
    }

    pub fn grid(&self) -> Grid {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &SampledFunction {
        &self.components[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut SampledFunction {
        &mut self.components[i]
    }

    pub fn components(&self) -> &[SampledFunction] {
        &self.components
    }

    /// True when every entry of every component is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.values().iter().all(|&v| v == 0.0))
    }

    /// Node-wise `c1 * self + c2 * other` per component.
    pub fn linear_combination(
        &self,
        c1: f64,
        c2: f64,
        other: &SampledTrajectory,
    ) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Input("component count mismatch".into()));
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(u, v)| u.linear_combination(c1, c2, v))
            .collect::<Result<Vec<_>>>()?;
        SampledTrajectory::new(components)
    }

    /// Max over components of |·| on nodes `lo..=hi`, skipping markers.
    pub fn max_abs_in(&self, lo: usize, hi: usize) -> f64 {
        self.components
            .iter()
            .map(|c| c.max_abs_in(lo, hi))
            .fold(0.0, f64::max)
    }
}

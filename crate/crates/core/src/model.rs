//! Domain types shared by every other module: physical parameters, grids,
//! scheme/boundary/problem selectors and the piecewise fields they produce.
//!
//! All types are immutable value types and safe to share between workers.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("alpha required for Robin problems")]
    AlphaRequired,
    #[error("n must be at least 2, got {0}")]
    GridTooCoarse(usize),
    #[error("singular tridiagonal system: pivot magnitude {0:e} below 1e-14")]
    SingularSystem(f64),
    #[error("fields are defined on different domains")]
    DomainMismatch,
    #[error("order fit needs at least 3 records with positive errors and distinct h")]
    BadFitInput,
    #[error("cost samples are not strictly convex")]
    NotConvex,
    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Physical data of the conduction problem. Temperatures, fluxes and
/// energies are dimensionless doubles; units are documentation only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    /// Domain extent in x.
    pub x0: f64,
    /// Domain extent in y.
    pub y0: f64,
    /// Source energy density, constant over the domain.
    pub g: f64,
    /// Heat flux on the right boundary.
    pub q: f64,
    /// Ambient temperature on the left boundary.
    pub b: f64,
    /// Convective coefficient; required only for Robin problems.
    pub alpha: Option<f64>,
    /// Target temperature for the tracking functionals.
    pub z_d: f64,
    /// Regularization weight for the source-control problem.
    pub m1: f64,
    /// Regularization weight for the flux-control problem.
    pub m2: f64,
    /// Regularization weight for the ambient-control problem.
    pub m3: f64,
}

impl Default for ProblemParams {
    /// The benchmark parameter set used throughout the study harnesses.
    fn default() -> Self {
        ProblemParams {
            x0: 1.0,
            y0: 1.0,
            g: 10.0,
            q: 12.0,
            b: 30.0,
            alpha: None,
            z_d: 40.0,
            m1: 1.0,
            m2: 1.0,
            m3: 1.0,
        }
    }
}

impl ProblemParams {
    /// The convective coefficient, validated at Robin use-sites.
    pub fn robin_alpha(&self) -> Result<f64> {
        match self.alpha {
            Some(a) if a > 0.0 => Ok(a),
            Some(_) => Err(Error::NonPositive("alpha")),
            None => Err(Error::AlphaRequired),
        }
    }

    /// Copy of the parameters with the selected control replaced.
    pub fn with_control(&self, problem: ControlProblem, control: f64) -> Self {
        let mut p = *self;
        match problem {
            ControlProblem::SourceG => p.g = control,
            ControlProblem::FluxQ => p.q = control,
            ControlProblem::AmbientB => p.b = control,
        }
        p
    }

    /// Current value of the selected control.
    pub fn control_value(&self, problem: ControlProblem) -> f64 {
        match problem {
            ControlProblem::SourceG => self.g,
            ControlProblem::FluxQ => self.q,
            ControlProblem::AmbientB => self.b,
        }
    }

    /// Regularization weight of the selected control.
    pub fn weight(&self, problem: ControlProblem) -> f64 {
        match problem {
            ControlProblem::SourceG => self.m1,
            ControlProblem::FluxQ => self.m2,
            ControlProblem::AmbientB => self.m3,
        }
    }
}

/// Boundary discretization at the flux/convective ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    /// Two-point boundary differences, first-order accurate.
    Classical,
    /// Three-point boundary differences, second-order accurate.
    Improved,
}

/// Condition imposed on the left boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    /// Prescribed temperature.
    Dirichlet,
    /// Convective flux proportional to the temperature gap.
    Robin,
}

/// Which scalar is optimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ControlProblem {
    /// Distributed control in the source energy.
    #[serde(rename = "g")]
    #[value(name = "g")]
    SourceG,
    /// Boundary control in the heat flux.
    #[serde(rename = "q")]
    #[value(name = "q")]
    FluxQ,
    /// Boundary control in the ambient temperature.
    #[serde(rename = "b")]
    #[value(name = "b")]
    AmbientB,
}

/// Uniform grid of `n` subintervals on `[0, x0]`, nodes `x_i = (i-1) h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
    pub h: f64,
    pub x0: f64,
}

impl Grid {
    /// Node position for 1-based index `i` in `1..=n+1`.
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!((1..=self.n + 1).contains(&i));
        (i - 1) as f64 * self.h
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.n + 1).map(|i| self.node(i))
    }
}

/// Build a uniform grid; `n >= 2` so three-point boundary stencils always
/// have an interior neighbor.
pub fn make_grid(x0: f64, n: usize) -> Result<Grid> {
    if x0 <= 0.0 {
        return Err(Error::NonPositive("x0"));
    }
    if n < 2 {
        return Err(Error::GridTooCoarse(n));
    }
    Ok(Grid { n, h: x0 / n as f64, x0 })
}

/// Nodal values interpolated linearly in x, constant in y.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl PiecewiseLinearField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.n + 1);
        PiecewiseLinearField { grid, values }
    }

    /// Index of the subinterval containing `x`, clamped to `0..n`.
    fn segment(&self, x: f64) -> usize {
        let i = (x / self.grid.h).floor() as isize;
        i.clamp(0, self.grid.n as isize - 1) as usize
    }

    pub fn eval(&self, x: f64) -> f64 {
        let s = self.segment(x);
        let xl = self.grid.node(s + 1);
        let t = (x - xl) / self.grid.h;
        self.values[s] * (1.0 - t) + self.values[s + 1] * t
    }

    /// x-derivative; piecewise constant, left-continuous at breakpoints.
    pub fn eval_dx(&self, x: f64) -> f64 {
        let s = self.segment(x);
        (self.values[s + 1] - self.values[s]) / self.grid.h
    }
}

/// A y-independent quadratic state `u(x) = c2 x^2 + c1 x + c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticState {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl QuadraticState {
    pub fn eval(&self, x: f64) -> f64 {
        (self.c2 * x + self.c1) * x + self.c0
    }

    pub fn eval_dx(&self, x: f64) -> f64 {
        2.0 * self.c2 * x + self.c1
    }
}

/// Parameters that passed [`validate`] for a given boundary kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidatedParams(ProblemParams);

impl std::ops::Deref for ValidatedParams {
    type Target = ProblemParams;
    fn deref(&self) -> &ProblemParams {
        &self.0
    }
}

/// Check every parameter invariant, reporting the first violation.
pub fn validate(params: &ProblemParams, bc: BoundaryKind) -> Result<ValidatedParams> {
    if params.x0 <= 0.0 {
        return Err(Error::NonPositive("x0"));
    }
    if params.y0 <= 0.0 {
        return Err(Error::NonPositive("y0"));
    }
    if params.m1 <= 0.0 {
        return Err(Error::NonPositive("m1"));
    }
    if params.m2 <= 0.0 {
        return Err(Error::NonPositive("m2"));
    }
    if params.m3 <= 0.0 {
        return Err(Error::NonPositive("m3"));
    }
    if bc == BoundaryKind::Robin {
        params.robin_alpha()?;
    }
    Ok(ValidatedParams(*params))
}

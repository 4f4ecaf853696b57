//! Closed-form continuous states, cost functionals and optimal controls for
//! the six scalar control problems. These are the exact references that the
//! discrete quantities are measured against.

use crate::model::{BoundaryKind, ControlProblem, ProblemParams, QuadraticState, Result};

/// A continuous optimum: the minimizing control, the cost there, and the
/// associated state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousOptimum {
    pub control_star: f64,
    pub cost_star: f64,
    pub state_star: QuadraticState,
}

/// Exact temperature field for the given data.
///
/// Dirichlet: `u(x) = -g/2 x^2 + (g x0 - q) x + b`. The Robin state adds the
/// constant `(g x0 - q)/alpha`.
pub fn continuous_state(p: &ProblemParams, bc: BoundaryKind) -> Result<QuadraticState> {
    let c2 = -0.5 * p.g;
    let c1 = p.g * p.x0 - p.q;
    let c0 = match bc {
        BoundaryKind::Dirichlet => p.b,
        BoundaryKind::Robin => p.b + (p.g * p.x0 - p.q) / p.robin_alpha()?,
    };
    Ok(QuadraticState { c2, c1, c0 })
}

/// Continuous cost of the selected problem, with `control` substituted for
/// the corresponding parameter field.
pub fn continuous_cost(
    problem: ControlProblem,
    bc: BoundaryKind,
    p: &ProblemParams,
    control: f64,
) -> Result<f64> {
    let pc = p.with_control(problem, control);
    match (problem, bc) {
        (ControlProblem::SourceG, BoundaryKind::Dirichlet) => Ok(j1(&pc)),
        (ControlProblem::SourceG, BoundaryKind::Robin) => Ok(j1_robin(&pc, pc.robin_alpha()?)),
        (ControlProblem::FluxQ, BoundaryKind::Dirichlet) => Ok(j2(&pc)),
        (ControlProblem::FluxQ, BoundaryKind::Robin) => Ok(j2_robin(&pc, pc.robin_alpha()?)),
        (ControlProblem::AmbientB, BoundaryKind::Dirichlet) => Ok(j3(&pc)),
        (ControlProblem::AmbientB, BoundaryKind::Robin) => Ok(j3_robin(&pc, pc.robin_alpha()?)),
    }
}

/// Closed-form minimizer, its cost and the optimal state.
pub fn continuous_optimum(
    problem: ControlProblem,
    bc: BoundaryKind,
    p: &ProblemParams,
) -> Result<ContinuousOptimum> {
    let control_star = optimal_control(problem, bc, p)?;
    let cost_star = continuous_cost(problem, bc, p, control_star)?;
    let state_star = continuous_state(&p.with_control(problem, control_star), bc)?;
    Ok(ContinuousOptimum { control_star, cost_star, state_star })
}

/// Closed-form minimizer of the selected continuous cost.
pub fn optimal_control(problem: ControlProblem, bc: BoundaryKind, p: &ProblemParams) -> Result<f64> {
    let (x, g, q, zd) = (p.x0, p.g, p.q, p.z_d);
    let d = p.b - zd;
    match (problem, bc) {
        (ControlProblem::SourceG, BoundaryKind::Dirichlet) => {
            Ok((5.0 * q / 8.0 - d / x) / (3.0 * x * (2.0 / 15.0 + p.m1 / x.powi(4))))
        }
        (ControlProblem::SourceG, BoundaryKind::Robin) => {
            let a = p.robin_alpha()?;
            let num = 5.0 * q / 8.0 - d / x
                + 5.0 * q / (2.0 * a * x)
                + 3.0 * q / (a * a * x * x)
                - 3.0 * d / (a * x * x);
            let den = 2.0 / 15.0 + p.m1 / x.powi(4) + 2.0 / (3.0 * a * x) + 1.0 / (a * a * x * x);
            Ok(num / (3.0 * x * den))
        }
        (ControlProblem::FluxQ, BoundaryKind::Dirichlet) => {
            Ok((5.0 / 12.0 * g * x * x + d) / (2.0 * x * (1.0 / 3.0 + p.m2 / x.powi(3))))
        }
        (ControlProblem::FluxQ, BoundaryKind::Robin) => {
            let a = p.robin_alpha()?;
            let dc = robin_cost_coeffs(x, a);
            Ok(-(dc.d2 * g * x * x + dc.d3 * d) / (2.0 * x * (dc.d1 + p.m2 / x.powi(3))))
        }
        (ControlProblem::AmbientB, BoundaryKind::Dirichlet) => {
            Ok((-g * x * x / 3.0 + q * x / 2.0 + zd) / (1.0 + p.m3 / x))
        }
        (ControlProblem::AmbientB, BoundaryKind::Robin) => {
            let a = p.robin_alpha()?;
            let b_op = (-g * x * x / 3.0 + q * x / 2.0 + zd) / (1.0 + p.m3 / x);
            Ok(b_op - (g * x - q) / (a * (1.0 + p.m3 / x)))
        }
    }
}

fn j1(p: &ProblemParams) -> f64 {
    let (x, y, g, q) = (p.x0, p.y0, p.g, p.q);
    let d = p.b - p.z_d;
    0.5 * x.powi(3)
        * y
        * (g * g * x * x * (2.0 / 15.0 + p.m1 / x.powi(4))
            + g * (-5.0 / 12.0 * x * q + 2.0 / 3.0 * d)
            + q * q / 3.0
            - q * d / x
            + d * d / (x * x))
}

fn j1_robin(p: &ProblemParams, a: f64) -> f64 {
    let (x, y, g, q) = (p.x0, p.y0, p.g, p.q);
    let d = p.b - p.z_d;
    j1(p)
        + x * x * y / (2.0 * a)
            * (g * g * x * x * (2.0 / 3.0 + 1.0 / (a * x))
                + g * (-5.0 * q * x / 3.0 - 2.0 * q / a + 2.0 * d)
                + q * q * (1.0 + 1.0 / (a * x))
                - 2.0 * q * d / x)
}

fn j2(p: &ProblemParams) -> f64 {
    let (x, y, g, q) = (p.x0, p.y0, p.g, p.q);
    let d = p.b - p.z_d;
    x * y / 2.0
        * (q * q * x * x * (1.0 / 3.0 + p.m2 / x.powi(3))
            + q * x * (-5.0 / 12.0 * g * x * x - d)
            + 2.0 / 15.0 * g * g * x.powi(4)
            + d * d
            + 2.0 / 3.0 * g * x * x * d)
}

/// Robin-side coefficients of the explicit flux-control cost.
pub(crate) struct RobinCostCoeffs {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub d5: f64,
    pub d6: f64,
}

pub(crate) fn robin_cost_coeffs(x: f64, a: f64) -> RobinCostCoeffs {
    let r1 = 1.0 / (a * x);
    let r2 = r1 * r1;
    RobinCostCoeffs {
        d1: 1.0 / 3.0 + r1 + r2,
        d2: -5.0 / 12.0 - 5.0 / 3.0 * r1 - 2.0 * r2,
        d3: -1.0 - 2.0 * r1,
        d4: 2.0 / 15.0 + 2.0 / 3.0 * r1 + r2,
        d5: 1.0,
        d6: 2.0 / 3.0 + 2.0 * r1,
    }
}

fn j2_robin(p: &ProblemParams, a: f64) -> f64 {
    let (x, y, g, q) = (p.x0, p.y0, p.g, p.q);
    let d = p.b - p.z_d;
    let c = robin_cost_coeffs(x, a);
    x * y / 2.0
        * (q * q * x * x * (c.d1 + p.m2 / x.powi(3))
            + q * x * (c.d2 * g * x * x + c.d3 * d)
            + c.d4 * g * g * x.powi(4)
            + c.d5 * d * d
            + c.d6 * g * x * x * d)
}

fn j3(p: &ProblemParams) -> f64 {
    let (x, y, g, q, b, zd) = (p.x0, p.y0, p.g, p.q, p.b, p.z_d);
    x * y / 2.0
        * (b * b * (1.0 + p.m3 / x)
            + b * (2.0 * g * x * x / 3.0 - q * x - 2.0 * zd)
            + 2.0 * g * g * x.powi(4) / 15.0
            - 5.0 * g * q * x.powi(3) / 12.0
            + x * x / 3.0 * (q * q - 2.0 * g * zd)
            + zd * (zd + q * x))
}

fn j3_robin(p: &ProblemParams, a: f64) -> f64 {
    let (x, y, g, q, b, zd) = (p.x0, p.y0, p.g, p.q, p.b, p.z_d);
    let w = q - g * x;
    j3(p)
        + x * y / 2.0
            * (w / (3.0 * a) * (-6.0 * b + 3.0 * q * x - 2.0 * g * x * x + 6.0 * zd)
                + w * w / (a * a))
}

//! Discrete cost functionals in explicit polynomial form, closed-form
//! discrete optimal controls with their coefficient ledgers, and a
//! parabola-vertex minimizer used as an independent oracle.

use crate::analytic::{self, robin_cost_coeffs};
use crate::fdm;
use crate::model::{
    BoundaryKind, ControlProblem, Error, Grid, PiecewiseLinearField, ProblemParams, Result,
    SchemeKind, validate,
};

/// Coefficients of the explicit source-control optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffLedgerG {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    x0: f64,
    /// `1/(alpha x0)`; zero for Dirichlet.
    inv_ax: f64,
}

impl CoeffLedgerG {
    /// Mesh-dependent tail coefficient; vanishes as `h -> 0`.
    pub fn a5_of_h(&self, h: f64) -> f64 {
        let r = h / self.x0;
        let s = self.inv_ax;
        r / 12.0 * (r * r * r / 15.0 + r * r / 2.0 + r / 3.0 - 5.0 / 2.0)
            + r * s * (-7.0 / 6.0 + r / 3.0 + r * r / 6.0 + s * (-2.0 + r))
    }
}

/// Coefficients of the explicit flux-control optimum and cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffLedgerQ {
    pub b1: f64,
    pub b2: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub d5: f64,
    pub d6: f64,
}

/// Coefficient of the explicit ambient-control optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffLedgerB {
    pub e1: f64,
}

/// A discrete optimum: minimizing control, its cost, and the discrete state.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOptimum {
    pub control_star: f64,
    pub cost_star: f64,
    pub state_star: PiecewiseLinearField,
    pub grid: Grid,
}

/// Source-control coefficient ledger.
pub fn ledger_g(params: &ProblemParams, bc: BoundaryKind) -> Result<CoeffLedgerG> {
    let x = params.x0;
    let q = params.q;
    let d = params.b - params.z_d;
    let mut l = CoeffLedgerG {
        a1: 5.0 / 8.0 - d / (q * x),
        a2: 3.0 / 4.0 * d / (q * x) - 0.5,
        a3: d / (4.0 * q * x) - 1.0 / 8.0,
        a4: 2.0 / 15.0 + params.m1 / x.powi(4),
        x0: x,
        inv_ax: 0.0,
    };
    if bc == BoundaryKind::Robin {
        let s = 1.0 / (params.robin_alpha()? * x);
        l.a1 += s * (5.0 / 2.0 + 3.0 * s - 3.0 * d / (q * x));
        l.a2 += s * (-9.0 / 4.0 - 3.0 * s + 3.0 * d / (q * x));
        l.a3 += -s / 4.0;
        l.a4 += s * (2.0 / 3.0 + s);
        l.inv_ax = s;
    }
    Ok(l)
}

/// Flux-control coefficient ledger.
pub fn ledger_q(params: &ProblemParams, bc: BoundaryKind) -> Result<CoeffLedgerQ> {
    let x = params.x0;
    match bc {
        BoundaryKind::Dirichlet => {
            let b = 1.0 / (1.0 / 3.0 + params.m2 / x.powi(3));
            Ok(CoeffLedgerQ {
                b1: b,
                b2: b,
                d1: 1.0 / 3.0,
                d2: -5.0 / 12.0,
                d3: -1.0,
                d4: 2.0 / 15.0,
                d5: 1.0,
                d6: 2.0 / 3.0,
            })
        }
        BoundaryKind::Robin => {
            let a = params.robin_alpha()?;
            let s = 1.0 / (a * x);
            let dc = robin_cost_coeffs(x, a);
            let den = dc.d1 + params.m2 / x.powi(3);
            Ok(CoeffLedgerQ {
                b1: (1.0 + 9.0 / 2.0 * s + 6.0 * s * s) / den,
                b2: (1.0 + 2.0 * s) / den,
                d1: dc.d1,
                d2: dc.d2,
                d3: dc.d3,
                d4: dc.d4,
                d5: dc.d5,
                d6: dc.d6,
            })
        }
    }
}

/// Ambient-control coefficient ledger.
pub fn ledger_b(params: &ProblemParams) -> CoeffLedgerB {
    CoeffLedgerB { e1: 1.0 / (4.0 * (1.0 + params.m3 / params.x0)) }
}

/// Leading-order correction turning the continuous cost into the discrete
/// one: `J^h(c) = J(c) + correction`.
fn cost_correction(
    problem: ControlProblem,
    bc: BoundaryKind,
    p: &ProblemParams,
    h: f64,
) -> Result<f64> {
    let (x, y, g, q, zd) = (p.x0, p.y0, p.g, p.q, p.z_d);
    let d = p.b - zd;
    let s = match bc {
        BoundaryKind::Dirichlet => 0.0,
        BoundaryKind::Robin => 1.0 / p.robin_alpha()?,
    };
    match problem {
        ControlProblem::SourceG => {
            let r = h / x;
            let sx = s / x;
            Ok(0.5
                * x.powi(3)
                * y
                * g
                * h
                * (g * x
                    * (-5.0 / 24.0
                        + r / 36.0
                        + r * r / 24.0
                        + r * r * r / 180.0
                        + sx * (-7.0 / 6.0 + r / 3.0 + r * r / 6.0)
                        + sx * sx * (-2.0 + r))
                    + q * (1.0 / 3.0 + r / 12.0 + sx * (3.0 / 2.0 + r / 6.0) + 2.0 * sx * sx)
                    + d / x * (-0.5 - r / 6.0 - 2.0 * sx)))
        }
        ControlProblem::FluxQ => Ok(0.5
            * x
            * y
            * g
            * h
            * (q * x * x / 3.0 - 5.0 * g * x.powi(3) / 24.0 - d * x / 2.0
                + 3.0 * x * q * s / 2.0
                - 7.0 * g * x * x * s / 6.0
                - 2.0 * d * s
                + 2.0 * (q - g * x) * s * s
                + h * (x * x * g / 36.0 - d / 6.0
                    + q * x / 12.0
                    + (2.0 * g * x + q) * s / 6.0
                    + g * s * s)
                + h * h * g * (x / 24.0 + s / 6.0)
                + g * h * h * h / 180.0)),
        ControlProblem::AmbientB => Ok(0.5
            * x
            * y
            * g
            * h
            * (-p.b * (x / 2.0 + 2.0 * s + h / 6.0)
                + g * (-5.0 * x.powi(3) / 24.0 - 7.0 * x * x * s / 6.0 - 2.0 * x * s * s)
                + q * (x * x / 3.0 + 3.0 * x * s / 2.0 + 2.0 * s * s)
                + zd * (x / 2.0 + 2.0 * s)
                + h * (g * (x * x / 36.0 + x * s / 3.0 + s * s)
                    + q * (x / 12.0 + s / 6.0)
                    + zd / 6.0)
                + h * h * g * (x / 24.0 + s / 6.0)
                + h * h * h * g / 180.0)),
    }
}

/// Explicit discrete cost of the selected problem at the given control.
pub fn discrete_cost(
    problem: ControlProblem,
    bc: BoundaryKind,
    params: &ProblemParams,
    grid: Grid,
    control: f64,
) -> Result<f64> {
    let pc = params.with_control(problem, control);
    Ok(analytic::continuous_cost(problem, bc, params, control)?
        + cost_correction(problem, bc, &pc, grid.h)?)
}

/// Closed-form minimizer of the discrete cost.
pub fn discrete_optimal_control(
    problem: ControlProblem,
    bc: BoundaryKind,
    params: &ProblemParams,
    grid: Grid,
) -> Result<f64> {
    let x = params.x0;
    let h = grid.h;
    match problem {
        ControlProblem::SourceG => {
            let l = ledger_g(params, bc)?;
            let r = h / x;
            Ok(params.q / (3.0 * x) * (l.a1 + r * l.a2 + r * r * l.a3) / (l.a4 + l.a5_of_h(h)))
        }
        ControlProblem::FluxQ => {
            let l = ledger_q(params, bc)?;
            let q_op = analytic::optimal_control(problem, bc, params)?;
            Ok(q_op - l.b1 * params.g * h / 6.0 - l.b2 * params.g * h * h / (24.0 * x))
        }
        ControlProblem::AmbientB => {
            let e1 = ledger_b(params).e1;
            let b_op = analytic::optimal_control(problem, bc, params)?;
            let robin_term = match bc {
                BoundaryKind::Dirichlet => 0.0,
                BoundaryKind::Robin => 4.0 / (params.robin_alpha()? * x),
            };
            Ok(b_op + e1 * params.g * x * h * (1.0 + robin_term + h / (3.0 * x)))
        }
    }
}

/// Discrete optimum: closed-form control, its cost, and the discrete state
/// solved with the optimal control substituted.
pub fn discrete_optimum(
    problem: ControlProblem,
    bc: BoundaryKind,
    params: &ProblemParams,
    grid: Grid,
) -> Result<DiscreteOptimum> {
    let control_star = discrete_optimal_control(problem, bc, params, grid)?;
    let cost_star = discrete_cost(problem, bc, params, grid, control_star)?;
    let pc = validate(&params.with_control(problem, control_star), bc)?;
    let nodal = fdm::explicit_nodal_solution(&pc, grid, SchemeKind::Classical, bc)?;
    Ok(DiscreteOptimum { control_star, cost_star, state_star: fdm::interpolate(&nodal), grid })
}

/// Minimizer of a strictly convex quadratic from three samples on the
/// bracket; exact for quadratics up to roundoff.
pub fn numeric_argmin(costfn: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
    let mid = 0.5 * (lo + hi);
    let step = 0.25 * (hi - lo);
    let (f0, f1, f2) = (costfn(mid - step), costfn(mid), costfn(mid + step));
    let second = f2 - 2.0 * f1 + f0;
    if second <= 0.0 {
        return Err(Error::NotConvex);
    }
    Ok(mid - step * (f2 - f0) / (2.0 * second))
}

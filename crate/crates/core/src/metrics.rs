//! Exact L2 norms of piecewise-polynomial differences, the audited table of
//! error-bound constants, convergence-order fitting, and the study harnesses
//! behind the error tables and (h, alpha) sweeps.

use crate::analytic;
use crate::fdm;
use crate::model::{
    BoundaryKind, ControlProblem, Error, PiecewiseLinearField, ProblemParams, QuadraticState,
    Result, SchemeKind, validate,
};
use crate::optim;

/// A y-independent field on `[0, x0] x [0, y0]`, either an exact quadratic
/// state or a piecewise-linear interpolant.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Quadratic { state: QuadraticState, x0: f64 },
    Linear(PiecewiseLinearField),
}

impl Field {
    pub fn x_extent(&self) -> f64 {
        match self {
            Field::Quadratic { x0, .. } => *x0,
            Field::Linear(f) => f.grid.x0,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        match self {
            Field::Quadratic { state, .. } => state.eval(x),
            Field::Linear(f) => f.eval(x),
        }
    }

    fn eval_dx(&self, x: f64) -> f64 {
        match self {
            Field::Quadratic { state, .. } => state.eval_dx(x),
            Field::Linear(f) => f.eval_dx(x),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Field::Quadratic { x0, .. } => vec![0.0, *x0],
            Field::Linear(f) => f.grid.nodes().collect(),
        }
    }
}

const GAUSS3_NODE: f64 = 0.7745966692414834; // sqrt(3/5)
const GAUSS3_W_OUTER: f64 = 5.0 / 9.0;
const GAUSS3_W_CENTER: f64 = 8.0 / 9.0;

fn merged_breakpoints(a: &Field, b: &Field) -> Vec<f64> {
    let mut pts = a.breakpoints();
    pts.extend(b.breakpoints());
    pts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let tol = 1e-14 * a.x_extent().max(1.0);
    pts.dedup_by(|p, q| (*p - *q).abs() <= tol);
    pts
}

fn check_domains(a: &Field, b: &Field) -> Result<()> {
    let (xa, xb) = (a.x_extent(), b.x_extent());
    if (xa - xb).abs() > 1e-9 * xa.max(xb).max(1.0) {
        return Err(Error::DomainMismatch);
    }
    Ok(())
}

fn l2_of(a: &Field, b: &Field, y0: f64, f: impl Fn(&Field, f64) -> f64) -> f64 {
    // 3-point Gauss per subinterval of the merged breakpoints: exact through
    // degree 5, covering the quartic squared differences arising here.
    let pts = merged_breakpoints(a, b);
    let mut total = 0.0;
    for w in pts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let half = 0.5 * (w[1] - w[0]);
        for (node, weight) in [
            (mid - half * GAUSS3_NODE, GAUSS3_W_OUTER),
            (mid, GAUSS3_W_CENTER),
            (mid + half * GAUSS3_NODE, GAUSS3_W_OUTER),
        ] {
            let diff = f(a, node) - f(b, node);
            total += weight * half * diff * diff;
        }
    }
    (total * y0).sqrt()
}

/// `sqrt(iint (a - b)^2 dx dy)` over the rectangle.
pub fn l2_diff(a: &Field, b: &Field, y0: f64) -> Result<f64> {
    check_domains(a, b)?;
    Ok(l2_of(a, b, y0, |f, x| f.eval(x)))
}

/// L2 norm of the difference of x-derivatives.
pub fn l2_diff_derivative(a: &Field, b: &Field, y0: f64) -> Result<f64> {
    check_domains(a, b)?;
    Ok(l2_of(a, b, y0, |f, x| f.eval_dx(x)))
}

/// Identifier for an error-bound constant. The Robin variant of each
/// constant is selected by passing the Robin boundary kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstantId {
    C1,
    C1Tilde,
    C2,
    C3,
    C3Star,
    C4,
    C5,
    C6,
    C7,
    C8,
    C9,
    C10,
    C11,
    C12,
    C13,
    C14,
    C15,
    C16,
    D1,
    D1Tilde,
    D2,
    D2Tilde,
}

impl ConstantId {
    /// Every identifier with a distinct Robin variant.
    pub const ALPHA_FAMILIES: [ConstantId; 17] = [
        ConstantId::C1,
        ConstantId::C2,
        ConstantId::C3,
        ConstantId::C3Star,
        ConstantId::C4,
        ConstantId::C5,
        ConstantId::C6,
        ConstantId::C7,
        ConstantId::C8,
        ConstantId::C9,
        ConstantId::C10,
        ConstantId::C11,
        ConstantId::C12,
        ConstantId::C13,
        ConstantId::C14,
        ConstantId::C15,
        ConstantId::C16,
    ];
}

/// Evaluate the closed-form error constant for the given data.
///
/// For each `Cx` identifier the Dirichlet and Robin formulas share one
/// expression: the Robin-only terms carry factors of `1/alpha` that are set
/// to zero for Dirichlet data.
pub fn lemma_constant(
    id: ConstantId,
    params: &ProblemParams,
    bc: BoundaryKind,
    _scheme: SchemeKind,
) -> Result<f64> {
    let p = params;
    let (x, y, g, q, zd) = (p.x0, p.y0, p.g, p.q, p.z_d);
    let d = p.b - zd;
    // s = 1/(alpha x0) and ia = 1/alpha; both zero in the Dirichlet limit.
    let (s, ia) = match bc {
        BoundaryKind::Dirichlet => (0.0, 0.0),
        BoundaryKind::Robin => {
            let a = p.robin_alpha()?;
            (1.0 / (a * x), 1.0 / a)
        }
    };
    let c3_star = |p: &ProblemParams| -> Result<f64> {
        let l = optim::ledger_g(p, bc)?;
        Ok(q / (3.0 * x * x) * (l.a2 * l.a4 + (5.0 / 24.0 + 7.0 / 6.0 * s) * l.a1) / (l.a4 * l.a4))
    };
    match id {
        ConstantId::C1 => {
            Ok(g.abs() * x * (x * y * (2.0 / 15.0 + 2.0 / 3.0 * s + s * s)).sqrt())
        }
        ConstantId::C1Tilde => Ok(g.abs() * (x * y / 3.0).sqrt()),
        ConstantId::C2 => Ok(0.5
            * x.powi(3)
            * y
            * (g * q).abs()
            * (g * x / q * (-5.0 / 24.0 - 7.0 / 6.0 * s - 2.0 * s * s)
                + 1.0 / 3.0
                + 3.0 / 2.0 * s
                + 2.0 * s * s
                + d / (q * x) * (-0.5 - 2.0 * s))
                .abs()),
        ConstantId::C3 => Ok(c3_star(p)?.abs()),
        ConstantId::C3Star => c3_star(p),
        ConstantId::C4 => {
            let l = optim::ledger_g(p, bc)?;
            let cs = c3_star(p)?;
            let g_op = analytic::optimal_control(ControlProblem::SourceG, bc, p)?;
            Ok(0.5
                * x
                * x
                * y
                * q
                * q
                * (-2.0 * l.a4 * cs * g_op * x.powi(3) / (q * q)
                    + 5.0 / 24.0 * g_op * g_op * x * x / (q * q)
                    + 7.0 / 6.0 * g_op * g_op * x * ia / (q * q)
                    + 2.0 / 3.0 * l.a1 * cs * x * x / q
                    + 2.0 / 3.0 * l.a2 * g_op * x / q)
                    .abs())
        }
        ConstantId::C5 => {
            let cs = c3_star(p)?;
            let g_op = analytic::optimal_control(ControlProblem::SourceG, bc, p)?;
            let t = x * cs / g_op;
            let extra = s
                * (60.0 + 120.0 * s - 240.0 * cs * ia / g_op
                    + 120.0 * cs * x * ia / (g_op * g_op)
                    - 140.0 * cs * x / g_op
                    + 80.0 * cs * x * x / (g_op * g_op));
            Ok(g_op.abs()
                * (x.powi(3) * y / 120.0 * (10.0 - 25.0 * t + 16.0 * t * t + extra)).sqrt())
        }
        ConstantId::C6 => {
            let cs = c3_star(p)?;
            let g_op = analytic::optimal_control(ControlProblem::SourceG, bc, p)?;
            let t = x * cs / g_op;
            Ok(g_op.abs() * (x * y / 6.0 * (2.0 - 3.0 * t + 2.0 * t * t)).sqrt())
        }
        ConstantId::C7 => Ok(0.5
            * x
            * x
            * y
            * (g * (q * x / 3.0 - 5.0 * g * x * x / 24.0 - d / 2.0
                + 3.0 * q * ia / 2.0
                - 7.0 * g * x * ia / 6.0
                - 2.0 * d * ia / x
                + 2.0 * (q - g * x) * ia * ia / x))
                .abs()),
        ConstantId::C8 => Ok((g * optim::ledger_q(p, bc)?.b1 / 6.0).abs()),
        ConstantId::C9 => {
            let l = optim::ledger_q(p, bc)?;
            let q_op = analytic::optimal_control(ControlProblem::FluxQ, bc, p)?;
            Ok(0.5
                * x
                * x
                * y
                * g.abs()
                * (-l.b1 / 6.0
                    * (2.0 * q_op * x * (l.d1 + p.m2 / x.powi(3)) + l.d2 * g * x * x + l.d3 * d)
                    + q_op * x / 3.0
                    - 5.0 * g * x * x / 24.0
                    - d / 2.0
                    + 3.0 * q_op * ia / 2.0
                    - 7.0 * g * x * ia / 6.0
                    - 2.0 * d * ia / x
                    + 2.0 * (q_op - g * x) * ia * ia / x)
                    .abs())
        }
        ConstantId::C10 => {
            let b1 = optim::ledger_q(p, bc)?.b1;
            Ok(g.abs()
                * x
                * (x * y / 108.0).sqrt()
                * (b1 * b1 * (3.0 * s * s + 3.0 * s + 1.0)
                    + 9.0 * (12.0 * s * s + 6.0 * s + 1.0)
                    - 3.0 * b1 * (12.0 * s * s + 9.0 * s + 2.0))
                    .sqrt())
        }
        ConstantId::C11 => {
            let b1 = optim::ledger_q(p, bc)?.b1;
            Ok(g.abs() / 6.0 * (x * y * (12.0 - 6.0 * b1 + b1 * b1)).sqrt())
        }
        ConstantId::C12 => Ok(0.5
            * x
            * y
            * g.abs()
            * (-p.b * (x / 2.0 + 2.0 * ia)
                + g * (-5.0 * x.powi(3) / 24.0 - 7.0 * x * x * ia / 6.0 - 2.0 * x * ia * ia)
                + q * (x * x / 3.0 + 3.0 * x * ia / 2.0 + 2.0 * ia * ia)
                + zd * (x / 2.0 + 2.0 * ia))
                .abs()),
        ConstantId::C13 => {
            Ok((optim::ledger_b(p).e1 * g * x).abs() * (1.0 + 4.0 * s).abs())
        }
        ConstantId::C14 => {
            let e1 = optim::ledger_b(p).e1;
            let b_op = analytic::optimal_control(ControlProblem::AmbientB, bc, p)?;
            let f1 = 0.5
                * x
                * x
                * y
                * g
                * (-(b_op - zd) * (0.5 + 2.0 * s)
                    + g * x * x * (-5.0 / 24.0 - 7.0 / 6.0 * s - 2.0 * s * s)
                    + q * x * (1.0 / 3.0 + 3.0 / 2.0 * s + 2.0 * s * s));
            let f2 = x * x * y * g * e1 * (-q + g * x) * (1.0 + 4.0 * s) * ia;
            let f3 = 0.5
                * x
                * x
                * y
                * g
                * e1
                * (1.0 + 4.0 * s)
                * (2.0 * b_op * (1.0 + p.m3 / x) + 2.0 * g * x * x / 3.0 - q * x - 2.0 * zd);
            Ok((f1 + f2 + f3).abs())
        }
        ConstantId::C15 => {
            let e1 = optim::ledger_b(p).e1;
            Ok(x * g.abs()
                * (x * y / 2.0).sqrt()
                * (e1 * e1 * (2.0 + 16.0 * s + 32.0 * s * s)
                    + e1 * (-1.0 - 8.0 * s - 16.0 * s * s)
                    + 1.0 / 6.0
                    + s
                    + 2.0 * s * s)
                    .sqrt())
        }
        ConstantId::C16 => Ok(g.abs() * (x * y / 2.0).sqrt()),
        ConstantId::D1 | ConstantId::D2 => Ok(g.abs() * (x * y / 120.0).sqrt()),
        ConstantId::D1Tilde | ConstantId::D2Tilde => Ok(g.abs() * (x * y / 12.0).sqrt()),
    }
}

/// Which difference an [`ErrorRecord`] measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    State,
    Derivative,
    Control,
    Cost,
}

/// One measured error with its lemma bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    pub h: f64,
    pub alpha: Option<f64>,
    pub err: f64,
    pub bound: f64,
    pub kind: ErrorKind,
}

/// Least-squares fit of log(err) against log(h).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

/// Observed convergence order from a global log-log least-squares fit.
/// Zero errors are excluded; at least three positive-error records with
/// distinct h are required.
pub fn fit_order(records: &[ErrorRecord]) -> Result<OrderFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.err > 0.0 && r.h > 0.0)
        .map(|r| (r.h.ln(), r.err.ln()))
        .collect();
    let mut hs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    hs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    hs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if hs.len() < 3 {
        return Err(Error::BadFitInput);
    }
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let intercept = (sy - slope * sx) / m;
    let residual = pts
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).abs())
        .fold(0.0f64, f64::max);
    Ok(OrderFit { slope, intercept, residual })
}

/// State-error grid study: one record per n, comparing the exact state with
/// the interpolated discrete one, with the matching lemma bound.
pub fn state_error_study(
    params: &ProblemParams,
    scheme: SchemeKind,
    bc: BoundaryKind,
    n_list: &[usize],
) -> Result<Vec<ErrorRecord>> {
    let vp = validate(params, bc)?;
    let exact = Field::Quadratic { state: analytic::continuous_state(params, bc)?, x0: params.x0 };
    let constant = match scheme {
        SchemeKind::Classical => lemma_constant(ConstantId::C1, params, bc, scheme)?,
        SchemeKind::Improved => match bc {
            BoundaryKind::Dirichlet => lemma_constant(ConstantId::D1, params, bc, scheme)?,
            BoundaryKind::Robin => lemma_constant(ConstantId::D2, params, bc, scheme)?,
        },
    };
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let grid = crate::model::make_grid(params.x0, n)?;
        let nodal = fdm::explicit_nodal_solution(&vp, grid, scheme, bc)?;
        let field = Field::Linear(fdm::interpolate(&nodal));
        let err = l2_diff(&exact, &field, params.y0)?;
        let bound = match scheme {
            SchemeKind::Classical => constant * grid.h,
            SchemeKind::Improved => constant * grid.h * grid.h,
        };
        out.push(ErrorRecord {
            h: grid.h,
            alpha: if bc == BoundaryKind::Robin { params.alpha } else { None },
            err,
            bound,
            kind: ErrorKind::State,
        });
    }
    Ok(out)
}

/// One cell of a double-limit sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub n: usize,
    pub h: f64,
    pub alpha: f64,
    pub err_state: f64,
    pub err_control: Option<f64>,
}

/// Errors of the Robin discrete problem against the Dirichlet continuous
/// reference over a grid of (n, alpha) pairs, ordered by (n, alpha).
pub fn double_limit_sweep(
    params: &ProblemParams,
    n_list: &[usize],
    alpha_list: &[f64],
    problem: Option<ControlProblem>,
) -> Result<Vec<SweepRecord>> {
    if n_list.is_empty() || alpha_list.is_empty() {
        return Err(Error::Config("sweep needs non-empty n and alpha lists".into()));
    }
    let dirichlet = ProblemParams { alpha: None, ..*params };
    let exact = Field::Quadratic {
        state: analytic::continuous_state(&dirichlet, BoundaryKind::Dirichlet)?,
        x0: params.x0,
    };
    let control_ref = match problem {
        Some(pr) => Some(analytic::optimal_control(pr, BoundaryKind::Dirichlet, &dirichlet)?),
        None => None,
    };
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    let mut alphas = alpha_list.to_vec();
    alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out = Vec::with_capacity(ns.len() * alphas.len());
    for &n in &ns {
        let grid = crate::model::make_grid(params.x0, n)?;
        for &alpha in &alphas {
            let pa = ProblemParams { alpha: Some(alpha), ..*params };
            let vp = validate(&pa, BoundaryKind::Robin)?;
            let nodal =
                fdm::explicit_nodal_solution(&vp, grid, SchemeKind::Classical, BoundaryKind::Robin)?;
            let err_state = l2_diff(&exact, &Field::Linear(fdm::interpolate(&nodal)), params.y0)?;
            let err_control = match (problem, control_ref) {
                (Some(pr), Some(cref)) => Some(
                    (optim::discrete_optimal_control(pr, BoundaryKind::Robin, &pa, grid)? - cref)
                        .abs(),
                ),
                _ => None,
            };
            out.push(SweepRecord { n, h: grid.h, alpha, err_state, err_control });
        }
    }
    Ok(out)
}

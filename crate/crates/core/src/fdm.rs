//! Assembly and solution of the discrete conduction systems, explicit nodal
//! formulas and explicit inverses used as solver oracles, and piecewise-linear
//! interpolation of nodal values.

use crate::model::{
    BoundaryKind, Error, Grid, PiecewiseLinearField, Result, SchemeKind, ValidatedParams,
};

const PIVOT_FLOOR: f64 = 1e-14;

/// A tridiagonal linear system stored by bands.
///
/// Size is `n` for Dirichlet problems (the left node is known) and `n + 1`
/// for Robin problems.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Matrix-vector product with the band matrix.
    pub fn mul(&self, v: &[f64]) -> Vec<f64> {
        let m = self.size();
        assert_eq!(v.len(), m);
        (0..m)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.sub[i - 1] * v[i - 1];
                }
                if i + 1 < m {
                    s += self.sup[i] * v[i + 1];
                }
                s
            })
            .collect()
    }
}

/// Nodal solution values `v_1..v_{n+1}`, including the known Dirichlet node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalSolution {
    pub grid: Grid,
    pub values: Vec<f64>,
}

/// Build the tridiagonal system for the given boundary condition and scheme.
///
/// The improved scheme changes only the right-hand side: the flux row gets
/// `+gh^2/2` and, for Robin, the convective row gets `-gh^2/2`.
pub fn assemble(
    params: &ValidatedParams,
    grid: Grid,
    scheme: SchemeKind,
    bc: BoundaryKind,
) -> Result<TridiagonalSystem> {
    let n = grid.n;
    let h = grid.h;
    let (g, q, b) = (params.g, params.q, params.b);
    let gh2 = g * h * h;
    match bc {
        BoundaryKind::Dirichlet => {
            let mut diag = vec![-2.0; n];
            diag[n - 1] = 1.0;
            let mut sub = vec![1.0; n - 1];
            sub[n - 2] = -1.0;
            let sup = vec![1.0; n - 1];
            let mut rhs = vec![-gh2; n];
            rhs[0] = -gh2 - b;
            rhs[n - 1] = -q * h;
            if scheme == SchemeKind::Improved {
                rhs[n - 1] = -q * h + gh2 / 2.0;
            }
            Ok(TridiagonalSystem { sub, diag, sup, rhs })
        }
        BoundaryKind::Robin => {
            let a = params.robin_alpha()?;
            let m = n + 1;
            let mut diag = vec![-2.0; m];
            diag[0] = -(1.0 + a * h);
            diag[m - 1] = 1.0;
            let mut sub = vec![1.0; m - 1];
            sub[m - 2] = -1.0;
            let sup = vec![1.0; m - 1];
            let mut rhs = vec![-gh2; m];
            rhs[0] = -a * b * h;
            rhs[m - 1] = -q * h;
            if scheme == SchemeKind::Improved {
                rhs[m - 1] = -q * h + gh2 / 2.0;
                rhs[0] = -a * b * h - gh2 / 2.0;
            }
            Ok(TridiagonalSystem { sub, diag, sup, rhs })
        }
    }
}

/// Direct tridiagonal elimination (forward sweep, back substitution).
pub fn solve_tridiagonal(system: &TridiagonalSystem) -> Result<Vec<f64>> {
    let m = system.size();
    let mut diag = system.diag.clone();
    let mut rhs = system.rhs.clone();
    for i in 1..m {
        let pivot = diag[i - 1];
        if pivot.abs() < PIVOT_FLOOR {
            return Err(Error::SingularSystem(pivot.abs()));
        }
        let w = system.sub[i - 1] / pivot;
        diag[i] -= w * system.sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let last = diag[m - 1];
    if last.abs() < PIVOT_FLOOR {
        return Err(Error::SingularSystem(last.abs()));
    }
    let mut v = vec![0.0; m];
    v[m - 1] = rhs[m - 1] / last;
    for i in (0..m - 1).rev() {
        v[i] = (rhs[i] - system.sup[i] * v[i + 1]) / diag[i];
    }
    Ok(v)
}

/// Assemble, solve, and extend to the full node set (prepending the known
/// Dirichlet node).
pub fn solve(
    params: &ValidatedParams,
    grid: Grid,
    scheme: SchemeKind,
    bc: BoundaryKind,
) -> Result<NodalSolution> {
    let system = assemble(params, grid, scheme, bc)?;
    let unknowns = solve_tridiagonal(&system)?;
    let values = match bc {
        BoundaryKind::Dirichlet => {
            let mut v = Vec::with_capacity(grid.n + 1);
            v.push(params.b);
            v.extend(unknowns);
            v
        }
        BoundaryKind::Robin => unknowns,
    };
    Ok(NodalSolution { grid, values })
}

/// Closed-form nodal values; the independent oracle for [`solve`].
///
/// Classical Dirichlet: `v_i = b + (i-1)h(g x0 - q) - h^2 g i(i-1)/2`.
/// The improved scheme replaces `i(i-1)` by `(i-1)^2`; Robin shifts every
/// node by `(g x0 - q)/alpha` minus, classically, `g h/alpha`.
pub fn explicit_nodal_solution(
    params: &ValidatedParams,
    grid: Grid,
    scheme: SchemeKind,
    bc: BoundaryKind,
) -> Result<NodalSolution> {
    let (g, q, b) = (params.g, params.q, params.b);
    let h = grid.h;
    let slope0 = g * grid.x0 - q;
    let shift = match bc {
        BoundaryKind::Dirichlet => 0.0,
        BoundaryKind::Robin => {
            let a = params.robin_alpha()?;
            match scheme {
                SchemeKind::Classical => slope0 / a - g * h / a,
                SchemeKind::Improved => slope0 / a,
            }
        }
    };
    let values = (1..=grid.n + 1)
        .map(|i| {
            let k = (i - 1) as f64;
            let curvature = match scheme {
                SchemeKind::Classical => i as f64 * k / 2.0,
                SchemeKind::Improved => k * k / 2.0,
            };
            b + shift + k * h * slope0 - h * h * g * curvature
        })
        .collect();
    Ok(NodalSolution { grid, values })
}

/// Piecewise-linear interpolant of the nodal values, constant in y.
pub fn interpolate(nodal: &NodalSolution) -> PiecewiseLinearField {
    PiecewiseLinearField::new(nodal.grid, nodal.values.clone())
}

/// Dense explicit inverse of the system matrix, used as a test fixture for
/// small sizes.
///
/// Dirichlet: entry `(i, j)` is `-min(i, j)` except the last column, which
/// is `+i`. Robin: entry `(i, j)` is `-(1 + (min(i, j) - 1) alpha h)/(alpha h)`
/// except the last column, `+(1 + (i - 1) alpha h)/(alpha h)`.
pub fn explicit_inverse(
    n: usize,
    bc: BoundaryKind,
    alpha: Option<f64>,
    h: f64,
) -> Result<Vec<Vec<f64>>> {
    if n < 2 {
        return Err(Error::GridTooCoarse(n));
    }
    match bc {
        BoundaryKind::Dirichlet => Ok((1..=n)
            .map(|i| {
                (1..=n)
                    .map(|j| if j == n { i as f64 } else { -(i.min(j) as f64) })
                    .collect()
            })
            .collect()),
        BoundaryKind::Robin => {
            let a = match alpha {
                Some(a) if a > 0.0 => a,
                Some(_) => return Err(Error::NonPositive("alpha")),
                None => return Err(Error::AlphaRequired),
            };
            if h <= 0.0 {
                return Err(Error::NonPositive("h"));
            }
            let m = n + 1;
            let ah = a * h;
            Ok((1..=m)
                .map(|i| {
                    (1..=m)
                        .map(|j| {
                            if j == m {
                                (1.0 + (i - 1) as f64 * ah) / ah
                            } else {
                                -(1.0 + (i.min(j) - 1) as f64 * ah) / ah
                            }
                        })
                        .collect()
                })
                .collect())
        }
    }
}

/// Right-hand side of the improved flux row obtained by eliminating a ghost
/// node beyond the flux boundary, term by term.
pub fn improved_flux_rhs_via_ghost(g: f64, q: f64, h: f64) -> f64 {
    // interior row at the boundary node: rhs -g h^2, band (1, -2, 1);
    // ghost value u_ghost = u_inner - 2 h q; scale the row by -1/2 termwise.
    let interior_rhs = -g * h * h;
    let ghost_offset = 2.0 * h * q;
    interior_rhs * -0.5 + ghost_offset * -0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_grid, validate, ProblemParams};
    use proptest::prelude::*;

    fn p_star() -> ValidatedParams {
        validate(&ProblemParams::default(), BoundaryKind::Dirichlet).unwrap()
    }

    fn p_robin(alpha: f64) -> ValidatedParams {
        let p = ProblemParams { alpha: Some(alpha), ..ProblemParams::default() };
        validate(&p, BoundaryKind::Robin).unwrap()
    }

    #[test]
    fn assemble_dirichlet_rhs_quarter_grid() {
        let grid = make_grid(1.0, 4).unwrap();
        let sys = assemble(&p_star(), grid, SchemeKind::Classical, BoundaryKind::Dirichlet).unwrap();
        assert_eq!(sys.rhs, vec![-30.625, -0.625, -0.625, -3.0]);
        assert_eq!(sys.diag, vec![-2.0, -2.0, -2.0, 1.0]);
        assert_eq!(sys.sub, vec![1.0, 1.0, -1.0]);
        assert_eq!(sys.sup, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn assemble_improved_changes_only_flux_row() {
        let grid = make_grid(1.0, 4).unwrap();
        let classical =
            assemble(&p_star(), grid, SchemeKind::Classical, BoundaryKind::Dirichlet).unwrap();
        let improved =
            assemble(&p_star(), grid, SchemeKind::Improved, BoundaryKind::Dirichlet).unwrap();
        assert_eq!(improved.rhs[3], -2.6875);
        assert_eq!(&improved.rhs[..3], &classical.rhs[..3]);
        assert_eq!(improved.diag, classical.diag);
    }

    #[test]
    fn assemble_robin_first_row() {
        let grid = make_grid(1.0, 4).unwrap();
        let p = p_robin(50.0);
        let sys = assemble(&p, grid, SchemeKind::Classical, BoundaryKind::Robin).unwrap();
        assert_eq!(sys.size(), 5);
        assert_eq!(sys.diag[0], -(1.0 + 50.0 * 0.25));
        assert_eq!(sys.rhs[0], -50.0 * 30.0 * 0.25);
        let imp = assemble(&p, grid, SchemeKind::Improved, BoundaryKind::Robin).unwrap();
        assert_eq!(imp.rhs[0], -50.0 * 30.0 * 0.25 - 10.0 * 0.25 * 0.25 / 2.0);
        assert_eq!(imp.rhs[4], -12.0 * 0.25 + 10.0 * 0.25 * 0.25 / 2.0);
    }

    #[test]
    fn zero_data_gives_constant_solution() {
        let p = validate(
            &ProblemParams { g: 0.0, q: 0.0, ..ProblemParams::default() },
            BoundaryKind::Dirichlet,
        )
        .unwrap();
        let grid = make_grid(1.0, 8).unwrap();
        let sol = solve(&p, grid, SchemeKind::Classical, BoundaryKind::Dirichlet).unwrap();
        for v in &sol.values {
            assert!((v - 30.0).abs() < 1e-12);
        }
    }

    #[test]
    fn explicit_nodal_quarter_grid() {
        let grid = make_grid(1.0, 4).unwrap();
        let sol =
            explicit_nodal_solution(&p_star(), grid, SchemeKind::Classical, BoundaryKind::Dirichlet)
                .unwrap();
        assert_eq!(sol.values, vec![30.0, 28.875, 27.125, 24.75, 21.75]);
    }

    #[test]
    fn improved_nodal_is_exact_at_right_boundary() {
        let grid = make_grid(1.0, 4).unwrap();
        let sol =
            explicit_nodal_solution(&p_star(), grid, SchemeKind::Improved, BoundaryKind::Dirichlet)
                .unwrap();
        assert!((sol.values[4] - 23.0).abs() < 1e-12);
    }

    #[test]
    fn robin_nodes_are_shifted_classical_nodes() {
        let grid = make_grid(1.0, 4).unwrap();
        let d = explicit_nodal_solution(&p_star(), grid, SchemeKind::Classical, BoundaryKind::Dirichlet)
            .unwrap();
        let r = explicit_nodal_solution(&p_robin(50.0), grid, SchemeKind::Classical, BoundaryKind::Robin)
            .unwrap();
        for (dv, rv) in d.values.iter().zip(&r.values) {
            assert!((rv - dv + 0.09).abs() < 1e-12);
        }
    }

    #[test]
    fn improved_equals_classical_without_source() {
        let p = validate(
            &ProblemParams { g: 0.0, ..ProblemParams::default() },
            BoundaryKind::Dirichlet,
        )
        .unwrap();
        let grid = make_grid(1.0, 8).unwrap();
        let a = explicit_nodal_solution(&p, grid, SchemeKind::Classical, BoundaryKind::Dirichlet)
            .unwrap();
        let b = explicit_nodal_solution(&p, grid, SchemeKind::Improved, BoundaryKind::Dirichlet)
            .unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn solver_matches_explicit_formula() {
        for bc in [BoundaryKind::Dirichlet, BoundaryKind::Robin] {
            let p = match bc {
                BoundaryKind::Dirichlet => p_star(),
                BoundaryKind::Robin => p_robin(50.0),
            };
            for scheme in [SchemeKind::Classical, SchemeKind::Improved] {
                for n in [2usize, 4, 16, 128, 1024] {
                    let grid = make_grid(1.0, n).unwrap();
                    let solved = solve(&p, grid, scheme, bc).unwrap();
                    let formula = explicit_nodal_solution(&p, grid, scheme, bc).unwrap();
                    let vmax = formula.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    for (a, b) in solved.values.iter().zip(&formula.values) {
                        assert!((a - b).abs() <= 1e-9 * (1.0 + vmax), "{bc:?} {scheme:?} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn all_ones_consistency() {
        let grid = make_grid(1.0, 16).unwrap();
        for (bc, p) in [(BoundaryKind::Dirichlet, p_star()), (BoundaryKind::Robin, p_robin(50.0))] {
            let mut sys = assemble(&p, grid, SchemeKind::Classical, bc).unwrap();
            sys.rhs = sys.mul(&vec![1.0; sys.size()]);
            let v = solve_tridiagonal(&sys).unwrap();
            for x in v {
                assert!((x - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_system_is_reported() {
        let sys = TridiagonalSystem {
            sub: vec![1.0],
            diag: vec![0.0, 1.0],
            sup: vec![1.0],
            rhs: vec![1.0, 1.0],
        };
        assert!(matches!(solve_tridiagonal(&sys), Err(Error::SingularSystem(_))));
    }

    #[test]
    fn inverse_first_row_small() {
        let inv = explicit_inverse(3, BoundaryKind::Dirichlet, None, 0.25).unwrap();
        assert_eq!(inv[0], vec![-1.0, -1.0, 1.0]);
    }

    #[test]
    fn inverse_matches_matrix() {
        for n in [2usize, 3, 8, 16, 64] {
            let grid = make_grid(1.0, n).unwrap();
            for (bc, p, alpha) in [
                (BoundaryKind::Dirichlet, p_star(), None),
                (BoundaryKind::Robin, p_robin(50.0), Some(50.0)),
            ] {
                let sys = assemble(&p, grid, SchemeKind::Classical, bc).unwrap();
                let inv = explicit_inverse(n, bc, alpha, grid.h).unwrap();
                let m = sys.size();
                for j in 0..m {
                    let col: Vec<f64> = (0..m).map(|i| inv[i][j]).collect();
                    let prod = sys.mul(&col);
                    for (i, v) in prod.iter().enumerate() {
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((v - want).abs() < 1e-12, "{bc:?} n={n} ({i},{j}): {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn ghost_point_row_is_bit_identical() {
        for (g, q, h) in [(10.0, 12.0, 0.25), (3.7, -1.2, 0.125), (-4.4, 0.3, 0.01)] {
            let direct = -q * h + g * h * h / 2.0;
            assert_eq!(improved_flux_rhs_via_ghost(g, q, h), direct);
        }
    }

    #[test]
    fn improved_interpolant_slopes() {
        let grid = make_grid(1.0, 4).unwrap();
        let sol =
            explicit_nodal_solution(&p_star(), grid, SchemeKind::Improved, BoundaryKind::Dirichlet)
                .unwrap();
        let field = interpolate(&sol);
        let p = p_star();
        for i in 1..=grid.n {
            let x_mid = (grid.node(i) + grid.node(i + 1)) / 2.0;
            let want = p.g * p.x0 - p.q - (2.0 * i as f64 - 1.0) * p.g * grid.h / 2.0;
            assert!((field.eval_dx(x_mid) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn nodal_solution_brackets_exact_state() {
        let grid = make_grid(1.0, 8).unwrap();
        for g in [10.0, -7.5, 0.0] {
            let p = validate(
                &ProblemParams { g, ..ProblemParams::default() },
                BoundaryKind::Dirichlet,
            )
            .unwrap();
            let sol =
                explicit_nodal_solution(&p, grid, SchemeKind::Classical, BoundaryKind::Dirichlet)
                    .unwrap();
            let u = crate::analytic::continuous_state(&p, BoundaryKind::Dirichlet).unwrap();
            for (i, x) in grid.nodes().enumerate() {
                let gap = u.eval(x) - sol.values[i];
                if g > 0.0 {
                    assert!(gap >= -1e-12);
                } else if g < 0.0 {
                    assert!(gap <= 1e-12);
                } else {
                    assert!(gap.abs() < 1e-12);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn solver_residual_is_small(
            g in -50.0f64..50.0,
            q in -50.0f64..50.0,
            b in -100.0f64..100.0,
            n in 2usize..300,
            robin in proptest::bool::ANY,
        ) {
            let bc = if robin { BoundaryKind::Robin } else { BoundaryKind::Dirichlet };
            let params = ProblemParams { g, q, b, alpha: Some(25.0), ..ProblemParams::default() };
            let p = validate(&params, bc).unwrap();
            let grid = make_grid(1.0, n).unwrap();
            let sys = assemble(&p, grid, SchemeKind::Classical, bc).unwrap();
            let v = solve_tridiagonal(&sys).unwrap();
            let res = sys.mul(&v);
            let rhs_max = sys.rhs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for (r, t) in res.iter().zip(&sys.rhs) {
                prop_assert!((r - t).abs() <= 1e-10 * (1.0 + rhs_max));
            }
        }
    }
}

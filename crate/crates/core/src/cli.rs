//! Command-line front end: configuration merging (flags over config file
//! over defaults), deterministic CSV output, and the five commands.

use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::analytic;
use crate::fdm;
use crate::metrics::{self, ConstantId, Field};
use crate::model::{
    BoundaryKind, ControlProblem, Error, ProblemParams, Result, SchemeKind, make_grid, validate,
};
use crate::optim;

/// Exit code for computational failures and value mismatches.
pub const EXIT_COMPUTE: i32 = 1;
/// Exit code for usage and configuration errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "fdcontrol",
    version,
    about = "Finite-difference solver and optimal-control studies for steady heat conduction"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one discrete system and compare with the exact state.
    Solve(CommonArgs),
    /// Compute a discrete optimal control and its gap to the continuous one.
    Optimize(CommonArgs),
    /// Grid-refinement error study with fitted convergence order.
    Converge(CommonArgs),
    /// Double-limit study over grids and convective coefficients.
    Sweep(CommonArgs),
    /// Reproduce the reference error table; fails on any mismatch.
    Table1(CommonArgs),
}

#[derive(Debug, Args, Default, Clone)]
pub struct CommonArgs {
    /// Boundary condition on the left edge.
    #[arg(long, value_enum)]
    pub bc: Option<BoundaryKind>,
    /// Boundary discretization scheme.
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeKind>,
    /// Control variable to optimize.
    #[arg(long, value_enum)]
    pub problem: Option<ControlProblem>,
    /// Number of subintervals.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated list of subinterval counts.
    #[arg(long = "n-list", value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Convective coefficient for Robin problems.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Comma-separated list of convective coefficients.
    #[arg(long = "alpha-list", value_delimiter = ',')]
    pub alpha_list: Option<Vec<f64>>,
    /// Source energy density.
    #[arg(long)]
    pub g: Option<f64>,
    /// Boundary heat flux.
    #[arg(long)]
    pub q: Option<f64>,
    /// Ambient temperature.
    #[arg(long)]
    pub b: Option<f64>,
    /// Domain extent in x.
    #[arg(long)]
    pub x0: Option<f64>,
    /// Domain extent in y.
    #[arg(long)]
    pub y0: Option<f64>,
    /// Tracking target temperature.
    #[arg(long)]
    pub zd: Option<f64>,
    /// Source-control regularization weight.
    #[arg(long)]
    pub m1: Option<f64>,
    /// Flux-control regularization weight.
    #[arg(long)]
    pub m2: Option<f64>,
    /// Ambient-control regularization weight.
    #[arg(long)]
    pub m3: Option<f64>,
    /// Error study variant for converge.
    #[arg(long, value_enum)]
    pub study: Option<StudyKind>,
    /// JSON config file with flat keys mirroring the flag names.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report the continuous optimum instead of a discrete one.
    #[arg(long)]
    pub continuous: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StudyKind {
    State,
    Derivative,
}

/// Config file contents; every key optional, kebab-case like the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    bc: Option<BoundaryKind>,
    scheme: Option<SchemeKind>,
    problem: Option<ControlProblem>,
    n: Option<usize>,
    n_list: Option<Vec<usize>>,
    alpha: Option<f64>,
    alpha_list: Option<Vec<f64>>,
    g: Option<f64>,
    q: Option<f64>,
    b: Option<f64>,
    x0: Option<f64>,
    y0: Option<f64>,
    zd: Option<f64>,
    m1: Option<f64>,
    m2: Option<f64>,
    m3: Option<f64>,
    study: Option<String>,
    continuous: Option<bool>,
    out: Option<PathBuf>,
}

/// Effective, fully merged configuration of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ProblemParams,
    pub scheme: SchemeKind,
    pub bc: BoundaryKind,
    pub problem: Option<ControlProblem>,
    pub n: Option<usize>,
    pub n_list: Option<Vec<usize>>,
    pub alpha_list: Option<Vec<f64>>,
    pub study: StudyKind,
    pub continuous: bool,
    pub out: Option<PathBuf>,
}

fn load_file_config(path: &PathBuf) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))
}

fn parse_study(name: &str) -> Result<StudyKind> {
    match name {
        "state" => Ok(StudyKind::State),
        "derivative" => Ok(StudyKind::Derivative),
        other => Err(Error::Config(format!("unknown study {other:?}"))),
    }
}

/// Merge precedence: flags override config-file values override defaults.
pub fn merge_config(args: &CommonArgs) -> Result<RunConfig> {
    let file = match &args.config {
        Some(path) => load_file_config(path)?,
        None => FileConfig::default(),
    };
    let defaults = ProblemParams::default();
    let params = ProblemParams {
        x0: args.x0.or(file.x0).unwrap_or(defaults.x0),
        y0: args.y0.or(file.y0).unwrap_or(defaults.y0),
        g: args.g.or(file.g).unwrap_or(defaults.g),
        q: args.q.or(file.q).unwrap_or(defaults.q),
        b: args.b.or(file.b).unwrap_or(defaults.b),
        alpha: args.alpha.or(file.alpha),
        z_d: args.zd.or(file.zd).unwrap_or(defaults.z_d),
        m1: args.m1.or(file.m1).unwrap_or(defaults.m1),
        m2: args.m2.or(file.m2).unwrap_or(defaults.m2),
        m3: args.m3.or(file.m3).unwrap_or(defaults.m3),
    };
    let study = match (&args.study, &file.study) {
        (Some(s), _) => *s,
        (None, Some(name)) => parse_study(name)?,
        (None, None) => StudyKind::State,
    };
    Ok(RunConfig {
        params,
        scheme: args.scheme.or(file.scheme).unwrap_or(SchemeKind::Classical),
        bc: args.bc.or(file.bc).unwrap_or(BoundaryKind::Dirichlet),
        problem: args.problem.or(file.problem),
        n: args.n.or(file.n),
        n_list: args.n_list.clone().or(file.n_list),
        alpha_list: args.alpha_list.clone().or(file.alpha_list),
        study,
        continuous: args.continuous || file.continuous.unwrap_or(false),
        out: args.out.clone().or(file.out),
    })
}

fn fmt(v: f64) -> String {
    format!("{:.8e}", v)
}

fn name_of_bc(bc: BoundaryKind) -> &'static str {
    match bc {
        BoundaryKind::Dirichlet => "dirichlet",
        BoundaryKind::Robin => "robin",
    }
}

fn name_of_scheme(s: SchemeKind) -> &'static str {
    match s {
        SchemeKind::Classical => "classical",
        SchemeKind::Improved => "improved",
    }
}

fn name_of_problem(p: ControlProblem) -> &'static str {
    match p {
        ControlProblem::SourceG => "g",
        ControlProblem::FluxQ => "q",
        ControlProblem::AmbientB => "b",
    }
}

fn config_comment(cfg: &RunConfig) -> String {
    let p = &cfg.params;
    let opt_num = |v: Option<f64>| v.map_or("-".to_string(), |x| x.to_string());
    let list = |v: &Option<Vec<String>>| {
        v.as_ref().map_or("-".to_string(), |xs| xs.join(";"))
    };
    let n_list = cfg.n_list.as_ref().map(|xs| xs.iter().map(|n| n.to_string()).collect());
    let alpha_list = cfg.alpha_list.as_ref().map(|xs| xs.iter().map(|a| a.to_string()).collect());
    format!(
        "# bc={} scheme={} problem={} n={} n-list={} alpha={} alpha-list={} study={} continuous={} \
         x0={} y0={} g={} q={} b={} zd={} m1={} m2={} m3={}",
        name_of_bc(cfg.bc),
        name_of_scheme(cfg.scheme),
        cfg.problem.map_or("-", name_of_problem),
        cfg.n.map_or("-".to_string(), |n| n.to_string()),
        list(&n_list),
        opt_num(p.alpha),
        list(&alpha_list),
        match cfg.study {
            StudyKind::State => "state",
            StudyKind::Derivative => "derivative",
        },
        cfg.continuous,
        p.x0,
        p.y0,
        p.g,
        p.q,
        p.b,
        p.z_d,
        p.m1,
        p.m2,
        p.m3,
    )
}

fn emit(cfg: &RunConfig, body: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
            file.write_all(body.as_bytes())
                .map_err(|e| Error::Config(format!("write failed: {e}")))?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(body.as_bytes());
        }
    }
    Ok(())
}

fn require_n(cfg: &RunConfig) -> Result<usize> {
    cfg.n.ok_or_else(|| Error::Config("--n is required for this command".into()))
}

/// Solve one grid and tabulate nodal values against the exact state.
pub fn cmd_solve(cfg: &RunConfig) -> Result<String> {
    let n = require_n(cfg)?;
    let vp = validate(&cfg.params, cfg.bc)?;
    let grid = make_grid(cfg.params.x0, n)?;
    let nodal = fdm::solve(&vp, grid, cfg.scheme, cfg.bc)?;
    let exact = analytic::continuous_state(&cfg.params, cfg.bc)?;
    let mut out = String::new();
    out.push_str(&config_comment(cfg));
    out.push('\n');
    out.push_str("i,x,u_h,u_exact,abs_err\n");
    for (idx, value) in nodal.values.iter().enumerate() {
        let x = grid.node(idx + 1);
        let u = exact.eval(x);
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            idx + 1,
            fmt(x),
            fmt(*value),
            fmt(u),
            fmt((value - u).abs())
        ));
    }
    Ok(out)
}

fn gap_constant(problem: ControlProblem) -> ConstantId {
    match problem {
        ControlProblem::SourceG => ConstantId::C3,
        ControlProblem::FluxQ => ConstantId::C8,
        ControlProblem::AmbientB => ConstantId::C13,
    }
}

/// Report an optimal control, its cost, and the gap to the continuous one.
pub fn cmd_optimize(cfg: &RunConfig) -> Result<String> {
    let problem = cfg
        .problem
        .ok_or_else(|| Error::Config("--problem is required for optimize".into()))?;
    validate(&cfg.params, cfg.bc)?;
    let cont = analytic::continuous_optimum(problem, cfg.bc, &cfg.params)?;
    let mut out = String::new();
    out.push_str(&config_comment(cfg));
    out.push('\n');
    out.push_str("control_star,cost_star,continuous_control_star,gap,bound_times_h\n");
    if cfg.continuous {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt(cont.control_star),
            fmt(cont.cost_star),
            fmt(cont.control_star),
            fmt(0.0),
            fmt(0.0)
        ));
        return Ok(out);
    }
    let n = require_n(cfg)?;
    let grid = make_grid(cfg.params.x0, n)?;
    let opt = optim::discrete_optimum(problem, cfg.bc, &cfg.params, grid)?;
    let bound =
        metrics::lemma_constant(gap_constant(problem), &cfg.params, cfg.bc, cfg.scheme)? * grid.h;
    out.push_str(&format!(
        "{},{},{},{},{}\n",
        fmt(opt.control_star),
        fmt(opt.cost_star),
        fmt(cont.control_star),
        fmt(opt.control_star - cont.control_star),
        fmt(bound)
    ));
    Ok(out)
}

fn derivative_error_study(cfg: &RunConfig, n_list: &[usize]) -> Result<Vec<metrics::ErrorRecord>> {
    let vp = validate(&cfg.params, cfg.bc)?;
    let exact = Field::Quadratic {
        state: analytic::continuous_state(&cfg.params, cfg.bc)?,
        x0: cfg.params.x0,
    };
    let constant = match cfg.scheme {
        SchemeKind::Classical => {
            metrics::lemma_constant(ConstantId::C1Tilde, &cfg.params, cfg.bc, cfg.scheme)?
        }
        SchemeKind::Improved => match cfg.bc {
            BoundaryKind::Dirichlet => {
                metrics::lemma_constant(ConstantId::D1Tilde, &cfg.params, cfg.bc, cfg.scheme)?
            }
            BoundaryKind::Robin => {
                metrics::lemma_constant(ConstantId::D2Tilde, &cfg.params, cfg.bc, cfg.scheme)?
            }
        },
    };
    let mut records = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let grid = make_grid(cfg.params.x0, n)?;
        let nodal = fdm::explicit_nodal_solution(&vp, grid, cfg.scheme, cfg.bc)?;
        let field = Field::Linear(fdm::interpolate(&nodal));
        let err = metrics::l2_diff_derivative(&exact, &field, cfg.params.y0)?;
        records.push(metrics::ErrorRecord {
            h: grid.h,
            alpha: if cfg.bc == BoundaryKind::Robin { cfg.params.alpha } else { None },
            err,
            bound: constant * grid.h,
            kind: metrics::ErrorKind::Derivative,
        });
    }
    Ok(records)
}

/// Grid-refinement study: per-level errors, bounds and ratios, with the
/// fitted order in a trailing comment.
pub fn cmd_converge(cfg: &RunConfig) -> Result<String> {
    let n_list = cfg
        .n_list
        .as_ref()
        .ok_or_else(|| Error::Config("--n-list is required for converge".into()))?;
    if n_list.len() < 3 {
        return Err(Error::Config("converge needs at least 3 grid levels".into()));
    }
    let records = match cfg.study {
        StudyKind::State => {
            metrics::state_error_study(&cfg.params, cfg.scheme, cfg.bc, n_list)?
        }
        StudyKind::Derivative => derivative_error_study(cfg, n_list)?,
    };
    let power = match (cfg.study, cfg.scheme) {
        (StudyKind::State, SchemeKind::Improved) => 2,
        _ => 1,
    };
    let mut out = String::new();
    out.push_str(&config_comment(cfg));
    out.push('\n');
    out.push_str("h,err,bound,ratio,pairwise_order\n");
    for (i, r) in records.iter().enumerate() {
        let ratio = r.err / r.h.powi(power);
        let pairwise = if i == 0 {
            String::new()
        } else {
            let prev = &records[i - 1];
            if r.err > 0.0 && prev.err > 0.0 {
                fmt((prev.err / r.err).ln() / (prev.h / r.h).ln())
            } else {
                String::new()
            }
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt(r.h),
            fmt(r.err),
            fmt(r.bound),
            fmt(ratio),
            pairwise
        ));
    }
    let fit = metrics::fit_order(&records)?;
    out.push_str(&format!("# fitted_order={}\n", fmt(fit.slope)));
    Ok(out)
}

/// Double-limit study over (n, alpha) pairs.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<String> {
    let n_list = cfg
        .n_list
        .as_ref()
        .ok_or_else(|| Error::Config("--n-list is required for sweep".into()))?;
    let alpha_list = cfg
        .alpha_list
        .as_ref()
        .ok_or_else(|| Error::Config("--alpha-list is required for sweep".into()))?;
    let rows = metrics::double_limit_sweep(&cfg.params, n_list, alpha_list, cfg.problem)?;
    let mut out = String::new();
    out.push_str(&config_comment(cfg));
    out.push('\n');
    if cfg.problem.is_some() {
        out.push_str("n,h,alpha,err_state,err_control\n");
    } else {
        out.push_str("n,h,alpha,err_state\n");
    }
    for r in rows {
        match r.err_control {
            Some(ec) => out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n,
                fmt(r.h),
                fmt(r.alpha),
                fmt(r.err_state),
                fmt(ec)
            )),
            None => out.push_str(&format!(
                "{},{},{},{}\n",
                r.n,
                fmt(r.h),
                fmt(r.alpha),
                fmt(r.err_state)
            )),
        }
    }
    Ok(out)
}

/// The reference error table: rows by mesh size, columns Dirichlet then
/// alpha in {50, 100, 200}, classical scheme throughout.
pub const TABLE1_ALPHAS: [f64; 3] = [50.0, 100.0, 200.0];
pub const TABLE1_N: [usize; 5] = [4, 8, 16, 32, 64];
pub const TABLE1_EXPECTED: [[f64; 4]; 5] = [
    [7.675914e-1, 8.120374e-1, 7.897314e-1, 7.786397e-1],
    [3.722243e-1, 3.942740e-1, 3.832039e-1, 3.777023e-1],
    [1.832549e-1, 1.942324e-1, 1.887200e-1, 1.859813e-1],
    [9.091783e-2, 9.639423e-2, 9.364392e-2, 9.227771e-2],
    [4.528211e-2, 4.801716e-2, 4.664351e-2, 4.596121e-2],
];

/// Computed reference-table entries, one row per mesh size.
pub fn table1_values() -> Result<Vec<[f64; 5]>> {
    let params = ProblemParams::default();
    let mut rows = Vec::with_capacity(TABLE1_N.len());
    for &n in &TABLE1_N {
        let grid = make_grid(params.x0, n)?;
        let mut row = [0.0; 5];
        row[0] = grid.h;
        let dir = metrics::state_error_study(
            &params,
            SchemeKind::Classical,
            BoundaryKind::Dirichlet,
            &[n],
        )?;
        row[1] = dir[0].err;
        for (k, &alpha) in TABLE1_ALPHAS.iter().enumerate() {
            let pa = ProblemParams { alpha: Some(alpha), ..params };
            let rec = metrics::state_error_study(
                &pa,
                SchemeKind::Classical,
                BoundaryKind::Robin,
                &[n],
            )?;
            row[k + 2] = rec[0].err;
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Emit the reference table and report any deviation from the published
/// values; `Ok(false)` means at least one entry mismatched.
pub fn cmd_table1(cfg: &RunConfig) -> Result<(String, bool)> {
    let rows = table1_values()?;
    let mut out = String::new();
    out.push_str("# reference error table, classical scheme, x0=1 y0=1 g=10 q=12 b=30\n");
    out.push_str("h,dirichlet,alpha_50,alpha_100,alpha_200\n");
    let mut all_match = true;
    for (i, row) in rows.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt(row[0]),
            fmt(row[1]),
            fmt(row[2]),
            fmt(row[3]),
            fmt(row[4])
        ));
        for (j, &want) in TABLE1_EXPECTED[i].iter().enumerate() {
            let got = row[j + 1];
            if (got - want).abs() > 1e-5 * want {
                all_match = false;
                eprintln!(
                    "table1 mismatch at h={}, column {}: got {}, expected {}",
                    fmt(row[0]),
                    j + 1,
                    fmt(got),
                    fmt(want)
                );
            }
        }
    }
    let _ = cfg;
    Ok((out, all_match))
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::NonPositive(_)
        | Error::AlphaRequired
        | Error::GridTooCoarse(_)
        | Error::BadFitInput
        | Error::Config(_) => EXIT_USAGE,
        Error::SingularSystem(_) | Error::DomainMismatch | Error::NotConvex => EXIT_COMPUTE,
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let args = match &cli.command {
        Command::Solve(a)
        | Command::Optimize(a)
        | Command::Converge(a)
        | Command::Sweep(a)
        | Command::Table1(a) => a,
    };
    let cfg = merge_config(args)?;
    match &cli.command {
        Command::Solve(_) => {
            let body = cmd_solve(&cfg)?;
            emit(&cfg, &body)?;
            Ok(0)
        }
        Command::Optimize(_) => {
            let body = cmd_optimize(&cfg)?;
            emit(&cfg, &body)?;
            Ok(0)
        }
        Command::Converge(_) => {
            let body = cmd_converge(&cfg)?;
            emit(&cfg, &body)?;
            Ok(0)
        }
        Command::Sweep(_) => {
            let body = cmd_sweep(&cfg)?;
            emit(&cfg, &body)?;
            Ok(0)
        }
        Command::Table1(_) => {
            let (body, all_match) = cmd_table1(&cfg)?;
            emit(&cfg, &body)?;
            Ok(if all_match { 0 } else { EXIT_COMPUTE })
        }
    }
}

/// Parse the process arguments, run the selected command, and return the
/// process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args() -> CommonArgs {
        CommonArgs::default()
    }

    #[test]
    fn defaults_merge() {
        let cfg = merge_config(&args()).unwrap();
        assert_eq!(cfg.bc, BoundaryKind::Dirichlet);
        assert_eq!(cfg.scheme, SchemeKind::Classical);
        assert_eq!(cfg.params, ProblemParams::default());
        assert!(cfg.n.is_none());
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"bc":"robin","alpha":25.0,"g":3.0,"n":8}"#).unwrap();
        let a = CommonArgs { config: Some(path), g: Some(7.0), ..args() };
        let cfg = merge_config(&a).unwrap();
        assert_eq!(cfg.bc, BoundaryKind::Robin);
        assert_eq!(cfg.params.alpha, Some(25.0));
        assert_eq!(cfg.params.g, 7.0);
        assert_eq!(cfg.n, Some(8));
    }

    #[test]
    fn unknown_config_key_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"bogus":1}"#).unwrap();
        let a = CommonArgs { config: Some(path), ..args() };
        assert!(matches!(merge_config(&a), Err(Error::Config(_))));
    }

    #[test]
    fn solve_output_shape() {
        let a = CommonArgs { n: Some(4), ..args() };
        let cfg = merge_config(&a).unwrap();
        let body = cmd_solve(&cfg).unwrap();
        let lines: Vec<&str> = body.lines().collect();
        assert!(lines[0].starts_with('#'));
        assert_eq!(lines[1], "i,x,u_h,u_exact,abs_err");
        assert_eq!(lines.len(), 7);
        let last: Vec<&str> = lines[6].split(',').collect();
        assert_eq!(last[0], "5");
        assert_eq!(last[1].parse::<f64>().unwrap(), 1.0);
        assert_eq!(last[2].parse::<f64>().unwrap(), 21.75);
        assert_eq!(last[3].parse::<f64>().unwrap(), 23.0);
        assert_eq!(last[4].parse::<f64>().unwrap(), 1.25);
    }

    #[test]
    fn improved_solve_is_exact_at_flux_node() {
        let a = CommonArgs { n: Some(4), scheme: Some(SchemeKind::Improved), ..args() };
        let cfg = merge_config(&a).unwrap();
        let body = cmd_solve(&cfg).unwrap();
        let last = body.lines().last().unwrap();
        let cols: Vec<f64> = last.split(',').skip(1).map(|s| s.parse().unwrap()).collect();
        assert_eq!(cols[1], 23.0);
        assert!(cols[3] < 1e-12);
    }

    #[test]
    fn optimize_reports_exact_gap() {
        let a = CommonArgs { n: Some(10), problem: Some(ControlProblem::AmbientB), ..args() };
        let cfg = merge_config(&a).unwrap();
        let body = cmd_optimize(&cfg).unwrap();
        let row: Vec<f64> =
            body.lines().nth(2).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert!((row[0] - 21.4625).abs() < 1e-9);
        assert!((row[3] - 0.1291667).abs() < 1e-6);
    }

    #[test]
    fn optimize_continuous_has_zero_gap() {
        let a = CommonArgs {
            problem: Some(ControlProblem::SourceG),
            continuous: true,
            ..args()
        };
        let cfg = merge_config(&a).unwrap();
        let body = cmd_optimize(&cfg).unwrap();
        let row: Vec<f64> =
            body.lines().nth(2).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(row[3], 0.0);
        assert!((row[0] - 5.1470588).abs() < 1e-6);
    }

    #[test]
    fn converge_requires_three_levels() {
        let a = CommonArgs { n_list: Some(vec![4, 8]), ..args() };
        let cfg = merge_config(&a).unwrap();
        assert!(matches!(cmd_converge(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn converge_reports_first_order() {
        let a = CommonArgs { n_list: Some(vec![4, 8, 16, 32, 64]), ..args() };
        let cfg = merge_config(&a).unwrap();
        let body = cmd_converge(&cfg).unwrap();
        let footer = body.lines().last().unwrap();
        assert!(footer.starts_with("# fitted_order="));
        let slope: f64 = footer.trim_start_matches("# fitted_order=").parse().unwrap();
        assert!((slope - 1.0).abs() < 0.05);
        let first_row: Vec<&str> = body.lines().nth(2).unwrap().split(',').collect();
        assert!((first_row[1].parse::<f64>().unwrap() - 0.7675914).abs() < 1e-5);
    }

    #[test]
    fn sweep_requires_alpha_list() {
        let a = CommonArgs { n_list: Some(vec![4, 8]), ..args() };
        let cfg = merge_config(&a).unwrap();
        assert!(cmd_sweep(&cfg).is_err());
    }

    #[test]
    fn table1_matches_reference() {
        let cfg = merge_config(&args()).unwrap();
        let (body, all_match) = cmd_table1(&cfg).unwrap();
        assert!(all_match);
        assert_eq!(body.lines().count(), 7);
    }

    #[test]
    fn output_is_deterministic() {
        let a = CommonArgs { n: Some(16), ..args() };
        let cfg = merge_config(&a).unwrap();
        assert_eq!(cmd_solve(&cfg).unwrap(), cmd_solve(&cfg).unwrap());
    }
}

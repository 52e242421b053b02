//! Subcommand implementations. Every command builds its full output in
//! memory first, so failures never leave partial files behind.

use std::fmt::Write as _;

use painlin::classify_detailed;
use painlin::closed_forms::pole_free_grid;
use painlin::numeric::DEFAULT_ODE_TOL;
use painlin::verify::{oracle_compare, residual_at, Evaluator};
use painlin::{solve, Curve, OdeProblem, Solution, SolveRequest, Start};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::schema::{json_error, Family, Loaded, Physics, ProblemFile, Variable, SCHEMA_VERSION};

pub const DEFAULT_POINTS: usize = 301;
pub const DEFAULT_MAX_RESIDUAL: f64 = 1e-6;
pub const TOL_ENV: &str = "PAINLIN_TOL";

/// Integration tolerance, overridable through the environment.
pub fn tolerance() -> Result<f64, CliError> {
    match std::env::var(TOL_ENV) {
        Err(_) => Ok(DEFAULT_ODE_TOL),
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(CliError::Input(format!(
                "{TOL_ENV}: expected a positive number, got `{v}`"
            ))),
        },
    }
}

pub fn write_output(path: Option<&str>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|source| CliError::Io {
            path: p.to_string(),
            source,
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Everything needed to reproduce a solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Descriptor {
    pub schema_version: u32,
    pub class: String,
    pub span: [f64; 2],
    pub tol: f64,
    /// Constants the solver resolved, in its per-class convention.
    pub constants: Vec<f64>,
    pub problem: ProblemFile,
}

impl Descriptor {
    pub fn read(path: &str) -> Result<(Self, Loaded), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
        let d: Descriptor = serde_json::from_str(&text).map_err(|e| json_error(path, &e))?;
        if d.schema_version != SCHEMA_VERSION {
            return Err(CliError::Input(format!(
                "{path}: unsupported schema_version {}",
                d.schema_version
            )));
        }
        let inner = serde_json::to_string_pretty(&d.problem).expect("problem serializes");
        let loaded = Loaded::parse(&format!("{path} (problem)"), &inner)?;
        Ok((d, loaded))
    }
}

fn span_of(cli: Option<Vec<f64>>, fallback: Option<(f64, f64)>) -> Result<(f64, f64), CliError> {
    let span = match cli {
        Some(v) => (v[0], v[1]),
        None => fallback.ok_or_else(|| CliError::Input("no span: pass --span A B or set solution.span".into()))?,
    };
    let ordered = span.0.is_finite() && span.1.is_finite() && span.0 < span.1;
    if !ordered {
        return Err(CliError::Input(format!("invalid span [{}, {}]", span.0, span.1)));
    }
    Ok(span)
}

fn run_solve(loaded: &Loaded, span: (f64, f64), tol: f64) -> Result<(OdeProblem, Solution), CliError> {
    let problem = loaded.problem()?;
    let start = loaded
        .start()?
        .ok_or_else(|| loaded.at_key("solution", "missing: give `constants` or `x0`, `y0`, `ydot0`"))?;
    let req = SolveRequest {
        tol,
        ..SolveRequest::new(span, start)
    };
    let solution = solve(&problem, &req)?;
    Ok((problem, solution))
}

fn sample_grid(curve: &dyn Curve, span: (f64, f64), points: usize) -> Result<Vec<f64>, CliError> {
    if points < 2 {
        return Err(CliError::Input("--points must be at least 2".into()));
    }
    Ok(pole_free_grid(span.0, span.1, points, &curve.poles(span.0, span.1)))
}

/// Rows `(x, y, ydot, residual)` on the grid.
fn rows(problem: &OdeProblem, curve: &dyn Curve, grid: &[f64]) -> Result<Vec<[f64; 4]>, CliError> {
    let eval = Evaluator::new(problem)?;
    grid.iter()
        .map(|&x| {
            let jet = curve.jet(x)?;
            Ok([x, jet.y, jet.dy, residual_at(&eval, curve, x)?])
        })
        .collect()
}

pub fn csv(rows: &[[f64; 4]]) -> String {
    let mut out = String::from("x,y,ydot,residual\n");
    for r in rows {
        // + 0.0 folds -0 into 0
        let r = r.map(|v| v + 0.0);
        let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", r[0], r[1], r[2], r[3]);
    }
    out
}

fn max_residual(rows: &[[f64; 4]]) -> f64 {
    rows.iter().map(|r| r[3].abs()).fold(0.0, f64::max)
}

pub fn classify(problem_path: &str) -> Result<String, CliError> {
    let loaded = Loaded::read(problem_path)?;
    let c = classify_detailed(&loaded.problem()?)?;
    let mut out = format!("{}\n", c.class);
    for m in &c.matched {
        let _ = writeln!(out, "  {m}");
    }
    Ok(out)
}

pub struct SolveArgs<'a> {
    pub problem: &'a str,
    pub span: Option<Vec<f64>>,
    pub points: usize,
    pub out: Option<&'a str>,
    pub descriptor: Option<&'a str>,
    pub max_residual: f64,
    pub check: bool,
}

pub fn solve_cmd(args: SolveArgs<'_>) -> Result<(), CliError> {
    let loaded = Loaded::read(args.problem)?;
    let span = span_of(args.span, loaded.default_span())?;
    let tol = tolerance()?;
    let (problem, solution) = run_solve(&loaded, span, tol)?;
    let grid = sample_grid(&*solution.curve, span, args.points)?;
    let rows = rows(&problem, &*solution.curve, &grid)?;
    let worst = max_residual(&rows);
    // NaN residuals fail the check too
    if args.check && (worst > args.max_residual || worst.is_nan()) {
        return Err(CliError::ResidualExceeded {
            residual: worst,
            bound: args.max_residual,
        });
    }
    if let Some(path) = args.descriptor {
        let d = Descriptor {
            schema_version: SCHEMA_VERSION,
            class: solution.class.to_string(),
            span: [span.0, span.1],
            tol,
            constants: solution.constants.clone(),
            problem: loaded.file.clone(),
        };
        write_output(
            Some(path),
            &(serde_json::to_string_pretty(&d).expect("descriptor serializes") + "\n"),
        )?;
    }
    write_output(args.out, &csv(&rows))
}

pub fn sample(descriptor: &str, span: Option<Vec<f64>>, points: usize, out: Option<&str>) -> Result<(), CliError> {
    let (d, loaded) = Descriptor::read(descriptor)?;
    let span = span_of(span, Some((d.span[0], d.span[1])))?;
    let (problem, solution) = run_solve(&loaded, span, d.tol)?;
    let grid = sample_grid(&*solution.curve, span, points)?;
    write_output(out, &csv(&rows(&problem, &*solution.curve, &grid)?))
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub class: String,
    pub span: [f64; 2],
    pub points: usize,
    pub poles: Vec<f64>,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub oracle_deviation: f64,
    pub oracle_span: [f64; 2],
    pub tol: f64,
}

/// The longest pole-free piece of `span`, pulled back 5% from each pole.
fn oracle_span(span: (f64, f64), poles: &[f64]) -> (f64, f64) {
    let mut cuts = vec![span.0];
    cuts.extend(poles.iter().copied().filter(|p| *p > span.0 && *p < span.1));
    cuts.push(span.1);
    cuts.sort_by(f64::total_cmp);
    let mut best = (span.0, span.1, 0.0);
    for (i, w) in cuts.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if b - a > best.2 {
            let margin = 0.05 * (b - a);
            let lo = if i == 0 { a } else { a + margin };
            let hi = if i + 2 == cuts.len() { b } else { b - margin };
            best = (lo, hi, b - a);
        }
    }
    (best.0, best.1)
}

pub fn verify(
    problem_path: Option<&str>,
    solution: &str,
    span: Option<Vec<f64>>,
    points: usize,
    report: Option<&str>,
) -> Result<(), CliError> {
    let (loaded, default_span, tol) = if solution == "closed" {
        let path = problem_path.ok_or_else(|| CliError::Input("--solution closed needs --problem".into()))?;
        let loaded = Loaded::read(path)?;
        let s = loaded.default_span().or(Some((0.0, 1.0)));
        (loaded, s, tolerance()?)
    } else {
        let (d, loaded) = Descriptor::read(solution)?;
        (loaded, Some((d.span[0], d.span[1])), d.tol)
    };
    let span = span_of(span, default_span)?;
    let (problem, sol) = run_solve(&loaded, span, tol)?;
    let curve = &*sol.curve;
    let poles = curve.poles(span.0, span.1);
    let rows = rows(&problem, curve, &sample_grid(curve, span, points)?)?;
    let ospan = oracle_span(span, &poles);
    let x0 = match loaded.start()? {
        Some(Start::Initial { x0, .. }) if x0 >= ospan.0 && x0 <= ospan.1 => x0,
        _ => ospan.0,
    };
    let deviation = oracle_compare(&problem, curve, x0, ospan, tol.min(1e-12))?;
    let rep = Report {
        schema_version: SCHEMA_VERSION,
        class: sol.class.to_string(),
        span: [span.0, span.1],
        points: rows.len(),
        poles,
        max_residual: max_residual(&rows),
        mean_residual: rows.iter().map(|r| r[3].abs()).sum::<f64>() / rows.len().max(1) as f64,
        oracle_deviation: deviation,
        oracle_span: [ospan.0, ospan.1],
        tol,
    };
    write_output(
        report,
        &(serde_json::to_string_pretty(&rep).expect("report serializes") + "\n"),
    )
}

pub enum Scenario {
    Tsallis { q: f64 },
    Bianchi { c: f64, c1: f64, c2: f64 },
    Viscous { r: f64, alpha: f64, beta: f64 },
    ShearFree { forcing: String },
}

/// A problem file with the scenario's parameters written out explicitly.
pub fn physics_map(scenario: Scenario, out: Option<&str>) -> Result<(), CliError> {
    let physics = match scenario {
        Scenario::Tsallis { q } => Physics::Tsallis { q },
        Scenario::Bianchi { c, c1, c2 } => Physics::Bianchi { c, c1, c2 },
        Scenario::Viscous { r, alpha, beta } => Physics::Viscous { r, alpha, beta },
        Scenario::ShearFree { forcing } => Physics::ShearFree { forcing_expr: forcing },
    };
    let wrapped = ProblemFile {
        schema_version: SCHEMA_VERSION,
        family: None,
        b: None,
        n: None,
        k: None,
        alpha: None,
        beta: None,
        gamma: None,
        delta: None,
        variable: None,
        physics: Some(physics.clone()),
        solution: None,
    };
    let text = serde_json::to_string(&wrapped).expect("problem serializes");
    let problem = Loaded::parse("scenario", &text)?.problem()?;
    let mut file = ProblemFile {
        physics: None,
        ..wrapped
    };
    match &physics {
        Physics::ShearFree { forcing_expr } => {
            file.family = Some(Family::Power);
            (file.b, file.n, file.k) = (Some(1.0), Some(0.5), Some(0.0));
            file.variable = Some(Variable {
                beta_expr: Some(format!("-1.5*({forcing_expr})")),
                ..Variable::default()
            });
        }
        _ => {
            let painlin::FunctionFamily::PowerPlusConstant { b, n, k } = problem.f else {
                return Err(CliError::Input("scenario did not map to a power family".into()));
            };
            let (alpha, beta, gamma, _) = problem.constants().expect("scenario parameters are constant");
            file.family = Some(Family::Power);
            (file.b, file.n, file.k) = (Some(b), Some(n), Some(k));
            (file.alpha, file.beta, file.gamma) = (Some(alpha), Some(beta), Some(gamma));
        }
    }
    write_output(
        out,
        &(serde_json::to_string_pretty(&file).expect("problem serializes") + "\n"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_span_avoids_poles() {
        assert_eq!(oracle_span((0.0, 3.0), &[]), (0.0, 3.0));
        let (a, b) = oracle_span((0.0, 3.0), &[1.0]);
        assert!((a - 1.1).abs() < 1e-12 && b == 3.0);
    }

    #[test]
    fn csv_is_fixed_precision() {
        let s = csv(&[[1.0, 0.1, -2.0, 0.0]]);
        assert_eq!(
            s,
            "x,y,ydot,residual\n1.0000000000000000e0,1.0000000000000001e-1,-2.0000000000000000e0,0.0000000000000000e0\n"
        );
    }
}

//! One entry point that picks the solution pathway from the family class.
//!
//! Constants are interpreted per class:
//!
//! | class | constants |
//! |---|---|
//! | AlreadyLinear | c₁, c₂ of the closed form in x (y(lo), ẏ(lo) with maps) |
//! | PainleveInce | c₁, c₂, c₃ of the generator w |
//! | CaseA, CaseB | c₁, c₂ of ŷ and c₃, the denominator at lo |
//! | CaseC | ŷ(lo), ŷ'(lo), c₃ |
//! | ShearFree | c₁, c₂ of ȳ, with x(x̄ = 0) = lo |
//! | GenericLinearizable | c₁, c₂ of ȳ(x̄), x̄(lo) = 0 |
//! | VariableParams | ȳ(0), ȳ'(0), x̄(lo) = 0 |

use std::sync::Arc;

use crate::classify::{case_a_beta, classify};
use crate::closed_forms::{
    case_b, case_c, painleve_ince, shear_free::shear_free_anchored, PainleveInceSolution, PowerParams,
    VariablePowerParams,
};
use crate::curve::{Curve, Jet};
use crate::error::{Error, Result};
use crate::linear_solver::{solve_constant, solve_variable, InitialConditions, LinearClosedForm};
use crate::linearize::{linearize_at, pullback, ParametricCurve, TransformTrace};
use crate::numeric::{quadrature, DEFAULT_ODE_TOL, DEFAULT_QUAD_TOL};
use crate::problem::{pow, FamilyClass, FunctionFamily, OdeProblem, Param};

/// How the free constants of the general solution are fixed.
#[derive(Debug, Clone, PartialEq)]
pub enum Start {
    Constants(Vec<f64>),
    Initial { x0: f64, y0: f64, dy0: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveRequest {
    pub span: (f64, f64),
    pub start: Start,
    /// Integration tolerance for numeric inner solutions.
    pub tol: f64,
}

impl SolveRequest {
    pub fn new(span: (f64, f64), start: Start) -> Self {
        Self {
            span,
            start,
            tol: DEFAULT_ODE_TOL,
        }
    }
}

#[derive(Clone)]
pub struct Solution {
    pub class: FamilyClass,
    pub curve: Arc<dyn Curve>,
    pub trace: Option<TransformTrace>,
    /// The constants actually used, in the convention of the class.
    pub constants: Vec<f64>,
}

impl std::fmt::Debug for Solution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solution")
            .field("class", &self.class)
            .field("constants", &self.constants)
            .finish()
    }
}

fn constants<const N: usize>(values: &[f64], class: FamilyClass) -> Result<[f64; N]> {
    values
        .try_into()
        .map_err(|_| Error::InvalidProblem(format!("{class} takes {N} constants, got {}", values.len())))
}

pub fn solve(problem: &OdeProblem, req: &SolveRequest) -> Result<Solution> {
    let (lo, hi) = req.span;
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidProblem(format!(
            "span [{lo}, {hi}] must be finite and nonempty"
        )));
    }
    if let Start::Initial { x0, .. } = req.start {
        if !(lo..=hi).contains(&x0) {
            return Err(Error::InvalidProblem(format!("x0 = {x0} outside the span")));
        }
    }
    let class = classify(problem)?;
    match class {
        FamilyClass::AlreadyLinear => already_linear(problem, req),
        FamilyClass::PainleveInce => painleve(problem, req),
        FamilyClass::CaseA | FamilyClass::CaseB => constant_power(problem, req, class),
        FamilyClass::CaseC => variable_power(problem, req),
        FamilyClass::ShearFree => shear(problem, req),
        FamilyClass::GenericLinearizable | FamilyClass::VariableParams => linearized(problem, req, class),
    }
}

/// A curve in x whose parameter maps read x̄ = c·(x − anchor).
struct Rescaled {
    inner: Arc<dyn Curve>,
    scale: f64,
    anchor: f64,
}

impl Curve for Rescaled {
    fn jet(&self, x: f64) -> Result<Jet> {
        self.inner.jet(x)
    }
    fn span(&self) -> (f64, f64) {
        self.inner.span()
    }
    fn transformed_point(&self, x: f64) -> Option<Result<f64>> {
        Some(Ok(self.scale * (x - self.anchor)))
    }
}

fn already_linear(problem: &OdeProblem, req: &SolveRequest) -> Result<Solution> {
    let c = problem.f_at(1.0, req.span.0);
    let class = FamilyClass::AlreadyLinear;
    if let (Some((alpha, beta, gamma, delta)), None) = (problem.constants(), &problem.offset) {
        let (a, b, g) = (alpha * c, beta * c * c + delta, gamma * c);
        let form = match &req.start {
            Start::Constants(v) => {
                let [c1, c2] = constants(v, class)?;
                solve_constant(a, b, g, c1, c2)
            }
            Start::Initial { x0, y0, dy0 } => LinearClosedForm::fit(a, b, g, *x0, *y0, *dy0),
        };
        let (c1, c2) = form.constants();
        return Ok(Solution {
            class,
            curve: Arc::new(form),
            trace: None,
            constants: vec![c1, c2],
        });
    }
    let ic = match &req.start {
        Start::Constants(v) => {
            let [y0, dy0] = constants(v, class)?;
            InitialConditions::new(req.span.0, y0, dy0)
        }
        Start::Initial { x0, y0, dy0 } => InitialConditions::new(*x0, *y0, *dy0),
    };
    let anchor = ic.x0;
    let (pa, pb, pg, pd) = (
        problem.alpha.clone(),
        problem.beta.clone(),
        problem.gamma.clone(),
        problem.delta.clone(),
    );
    let xbar = move |x: f64| c * (x - anchor);
    let a = Param::map(move |x| c * pa.at(xbar(x)));
    let b = Param::map(move |x| c * c * pb.at(xbar(x)) + pd.at(x));
    let g = Param::map(move |x| c * pg.at(xbar(x)));
    let sol = solve_variable(a, b, g, ic, req.span, req.tol)?;
    Ok(Solution {
        class,
        curve: Arc::new(Rescaled {
            inner: Arc::new(sol),
            scale: c,
            anchor,
        }),
        trace: None,
        constants: vec![ic.y0, ic.dy0],
    })
}

fn painleve(problem: &OdeProblem, req: &SolveRequest) -> Result<Solution> {
    let (alpha, _, gamma, _) = problem
        .constants()
        .ok_or_else(|| Error::InvalidProblem("constant parameters expected".into()))?;
    let class = FamilyClass::PainleveInce;
    let sol = match &req.start {
        Start::Constants(v) => {
            let [c1, c2, c3] = constants(v, class)?;
            painleve_ince(alpha, gamma, c1, c2, c3)?
        }
        Start::Initial { x0, y0, dy0 } => PainleveInceSolution::fit(alpha, gamma, *x0, *y0, *dy0)?,
    };
    Ok(Solution {
        class,
        constants: vec![sol.c1, sol.c2, sol.c3],
        curve: Arc::new(sol),
        trace: None,
    })
}

fn power_shape(problem: &OdeProblem) -> Result<(f64, f64, f64)> {
    match problem.f {
        FunctionFamily::PowerPlusConstant { b, n, k } => Ok((b, n, k)),
        _ => Err(Error::InvalidProblem("power family expected".into())),
    }
}

/// ŷ slope and denominator at x0 for a solution through `(y0, ẏ0)` with ŷ(x0) = 1.
fn power_start(b: f64, n: f64, alpha: f64, y0: f64, dy0: f64) -> Result<(f64, f64)> {
    let yn = pow(y0, n);
    if y0 == 0.0 || !yn.is_finite() || yn == 0.0 {
        return Err(Error::breakdown(
            f64::NAN,
            "initial value outside the power-family branch",
        ));
    }
    let coef = (n + 2.0) / (alpha * b * n);
    let d0 = coef / yn;
    Ok((dy0 / y0 + yn / (n * coef), d0))
}

fn integral_to(inner: &dyn Curve, n: f64, lo: f64, x0: f64) -> Result<f64> {
    let g = |x: f64| inner.value(x).map(|v| pow(v, n)).unwrap_or(f64::NAN);
    quadrature::integrate(&g, lo, x0, DEFAULT_QUAD_TOL)
}

fn constant_power(problem: &OdeProblem, req: &SolveRequest, class: FamilyClass) -> Result<Solution> {
    let (b, n, k) = power_shape(problem)?;
    let (alpha, _, _, delta) = problem
        .constants()
        .ok_or_else(|| Error::InvalidProblem("constant parameters expected".into()))?;
    let p = PowerParams { b, n, k, alpha };
    let c = match &req.start {
        Start::Constants(v) => constants::<3>(v, class)?,
        Start::Initial { x0, y0, dy0 } => {
            let (slope, d0) = power_start(b, n, alpha, *y0, *dy0)?;
            let ak = alpha * k;
            let inner = LinearClosedForm::fit(ak, case_a_beta(ak, n) + delta, 0.0, *x0, 1.0, slope);
            let (c1, c2) = inner.constants();
            [c1, c2, d0 - integral_to(&inner, n, req.span.0, *x0)?]
        }
    };
    let sol = case_b(p, delta, c, req.span)?;
    Ok(Solution {
        class,
        curve: Arc::new(sol),
        trace: None,
        constants: c.to_vec(),
    })
}

fn variable_power(problem: &OdeProblem, req: &SolveRequest) -> Result<Solution> {
    let (b, n, k) = power_shape(problem)?;
    let alpha = problem
        .alpha
        .as_const()
        .ok_or_else(|| Error::InvalidProblem("constant alpha expected".into()))?;
    let k = match &problem.offset {
        Some(map) => Param::Map(Arc::clone(map)),
        None => Param::Const(k),
    };
    let params = VariablePowerParams {
        b,
        n,
        alpha,
        k,
        delta: problem.delta.clone(),
    };
    let lo = req.span.0;
    let (ic, c3) = match &req.start {
        Start::Constants(v) => {
            let [h0, h1, c3] = constants(v, FamilyClass::CaseC)?;
            (InitialConditions::new(lo, h0, h1), c3)
        }
        Start::Initial { x0, y0, dy0 } => {
            let (slope, d0) = power_start(b, n, alpha, *y0, *dy0)?;
            let ic = InitialConditions::new(*x0, 1.0, slope);
            let (pk, pd) = (params.k.clone(), params.delta.clone());
            let inner = solve_variable(
                Param::map({
                    let pk = pk.clone();
                    move |x| alpha * pk.at(x)
                }),
                Param::map(move |x| case_a_beta(alpha * pk.at(x), n) + pd.at(x)),
                Param::Const(0.0),
                ic,
                req.span,
                req.tol,
            )?;
            (ic, d0 - integral_to(&inner, n, lo, *x0)?)
        }
    };
    let sol = case_c(&params, ic, c3, req.span, req.tol)?;
    let at_lo = sol.inner().jet(lo)?;
    Ok(Solution {
        class: FamilyClass::CaseC,
        curve: Arc::new(sol),
        trace: None,
        constants: vec![at_lo.y, at_lo.dy, c3],
    })
}

/// Grows an x̄ interval around 0 until the pulled-back curve covers the
/// requested x span, backing off when an overshoot breaks the map down.
fn cover<B>(span: (f64, f64), x0: f64, rate: f64, build: B) -> Result<ParametricCurve>
where
    B: Fn((f64, f64)) -> Result<ParametricCurve>,
{
    let (lo, hi) = span;
    let rate = if rate.is_finite() && rate > 0.0 { rate } else { 1.0 };
    let slack = 1e-12 * (hi - lo);
    let mut left = if x0 > lo { -(x0 - lo) * rate * 1.05 } else { 0.0 };
    let mut right = if hi > x0 { (hi - x0) * rate * 1.05 } else { 0.0 };
    let mut good: Option<(f64, f64)> = None;
    let mut growth: f64 = 2.0;
    let mut last_err = None;
    for _ in 0..200 {
        let trial = (left.min(0.0), right.max(0.0));
        let attempt = if trial.1 > trial.0 {
            build(trial)
        } else {
            build((trial.0, trial.0 + 1e-9))
        };
        match attempt {
            Ok(curve) => {
                let (clo, chi) = Curve::span(&curve);
                let short_lo = clo > lo + slack;
                let short_hi = chi < hi - slack;
                if !short_lo && !short_hi {
                    return Ok(curve);
                }
                good = Some(trial);
                if short_lo {
                    left = if left == 0.0 { -rate.max(1e-3) } else { left * growth };
                }
                if short_hi {
                    right = if right == 0.0 { rate.max(1e-3) } else { right * growth };
                }
            }
            Err(e) if e.is_breakdown() => {
                let Some((gl, gr)) = good else {
                    // even the first guess fails: shrink toward the origin
                    left *= 0.5;
                    right *= 0.5;
                    last_err = Some(e);
                    continue;
                };
                growth = growth.sqrt();
                if growth < 1.0005 {
                    return Err(Error::breakdown(
                        if left < gl { gl } else { gr },
                        format!("solution cannot be continued over the requested span: {e}"),
                    ));
                }
                left = if left < gl { gl * growth } else { gl };
                right = if right > gr { gr * growth } else { gr };
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or(Error::breakdown(hi, "time map did not reach the span end")))
}

fn shear(problem: &OdeProblem, req: &SolveRequest) -> Result<Solution> {
    let big_f = match &problem.beta {
        Param::Map(m) => {
            let m = Arc::clone(m);
            Arc::new(move |s: f64| -2.0 * m(s) / 3.0) as Arc<dyn Fn(f64) -> f64 + Send + Sync>
        }
        Param::Const(_) => return Err(Error::InvalidProblem("shear-free beta must be a map".into())),
    };
    let (c1, c2, x0, rate) = match &req.start {
        Start::Constants(v) => {
            let [c1, c2] = constants(v, FamilyClass::ShearFree)?;
            let y = (9.0 * c2).cbrt();
            (c1, c2, req.span.0, y * y / 3.0)
        }
        Start::Initial { x0, y0, dy0 } => (*dy0, y0.powi(3) / 9.0, *x0, y0 * y0 / 3.0),
    };
    let curve = cover(req.span, x0, rate, |span| {
        shear_free_anchored(Arc::clone(&big_f), c1, c2, (0.0, x0), span)
    })?;
    Ok(Solution {
        class: FamilyClass::ShearFree,
        curve: Arc::new(curve),
        trace: None,
        constants: vec![c1, c2],
    })
}

fn linearized(problem: &OdeProblem, req: &SolveRequest, class: FamilyClass) -> Result<Solution> {
    let (anchor, ybar0, dybar0, rate) = match &req.start {
        Start::Constants(v) => {
            let [c1, c2] = constants(v, class)?;
            (req.span.0, c1, c2, 1.0)
        }
        Start::Initial { x0, y0, dy0 } => {
            let (_, trace) = linearize_at(problem, *x0)?;
            (*x0, trace.ybar(*y0)?, *dy0, problem.f_at(*y0, *x0))
        }
    };
    let (linear, trace) = linearize_at(problem, anchor)?;
    let (curve, used) = match linear.constants() {
        Some((a, b, g)) => {
            let form = match &req.start {
                Start::Constants(_) => solve_constant(a, b, g, ybar0, dybar0),
                Start::Initial { .. } => LinearClosedForm::fit(a, b, g, 0.0, ybar0, dybar0),
            };
            let (c1, c2) = form.constants();
            let form: Arc<dyn Curve> = Arc::new(form);
            (
                cover(req.span, anchor, rate, |span| pullback(Arc::clone(&form), &trace, span))?,
                vec![c1, c2],
            )
        }
        None => {
            let ic = InitialConditions::new(0.0, ybar0, dybar0);
            let tol = req.tol;
            let build = |span: (f64, f64)| {
                let sol = solve_variable(linear.a.clone(), linear.b.clone(), linear.g.clone(), ic, span, tol).map_err(
                    |e| match e {
                        Error::StepUnderflow { x, .. } | Error::NonFinite { x } => {
                            Error::breakdown(x, "linear solution cannot be continued")
                        }
                        other => other,
                    },
                )?;
                pullback(Arc::new(sol), &trace, span)
            };
            (cover(req.span, anchor, rate, build)?, vec![ybar0, dybar0])
        }
    };
    Ok(Solution {
        class,
        curve: Arc::new(curve),
        trace: Some(trace),
        constants: used,
    })
}

//! Independent checks of candidate solutions: residual in the original
//! equation, agreement with a direct numeric integration, residual of
//! forward-mapped data in the linear target, and the cross-relation linking
//! two power-family solutions.

use crate::classify::classify;
use crate::closed_forms::{PowerFamilySolution, POLE_GUARD};
use crate::curve::{Curve, Jet};
use crate::error::{Error, Result};
use crate::linearize::{forward_map, linearize_at, Antiderivative};
use crate::numeric::{integrate_span, SpanSolution};
use crate::problem::{FamilyClass, FunctionFamily, OdeProblem};

/// Everything needed to evaluate the left-hand side of a problem.
pub struct Evaluator<'a> {
    problem: &'a OdeProblem,
    big_f: Antiderivative,
    base_k: f64,
}

impl<'a> Evaluator<'a> {
    pub fn new(problem: &'a OdeProblem) -> Result<Self> {
        problem.validate()?;
        let base_k = match problem.f {
            FunctionFamily::PowerPlusConstant { k, .. } => k,
            _ => 0.0,
        };
        Ok(Self {
            problem,
            big_f: Antiderivative::new(&problem.f)?,
            base_k,
        })
    }

    /// `∫f dy` at the original abscissa x (k(x) replaces the constant k).
    pub fn antiderivative(&self, y: f64, x: f64) -> Result<f64> {
        let shift = match self.problem.offset {
            Some(_) => (self.problem.offset_at(x) - self.base_k) * y,
            None => 0.0,
        };
        Ok(self.big_f.eval(y)? + shift)
    }

    /// `ÿ + αfẏ + βfF + γf + δy` with α, β, γ read at `xbar` and δ, k at `x`.
    pub fn lhs(&self, x: f64, xbar: f64, y: f64, dy: f64, ddy: f64) -> Result<f64> {
        let p = self.problem;
        let f = p.f_at(y, x);
        let big_f = self.antiderivative(y, x)?;
        Ok(ddy + p.alpha.at(xbar) * f * dy + p.beta.at(xbar) * f * big_f + p.gamma.at(xbar) * f + p.delta.at(x) * y)
    }

    /// dx̄/dx along a solution: y²/3 for the shear-free map, f(y) otherwise.
    pub fn weight(&self, y: f64, x: f64) -> Result<f64> {
        Ok(if classify(self.problem)? == FamilyClass::ShearFree {
            y * y / 3.0
        } else {
            self.problem.f_at(y, x)
        })
    }
}

fn normalize(r: f64, y: f64) -> f64 {
    r.abs() / (1.0 + y.abs() + y.abs().powi(3))
}

/// Second derivative from ẏ by a 5-point central difference with
/// `h = max(1e-5, 1e-5·|x|)`.
pub fn fd_second_derivative(curve: &dyn Curve, x: f64) -> Result<f64> {
    let h = 1e-5_f64.max(1e-5 * x.abs());
    let d = |t: f64| curve.jet(t).map(|j| j.dy);
    Ok((-d(x + 2.0 * h)? + 8.0 * d(x + h)? - 8.0 * d(x - h)? + d(x - 2.0 * h)?) / (12.0 * h))
}

fn transformed_point(problem: &OdeProblem, curve: &dyn Curve, x: f64) -> Result<f64> {
    if !problem.has_transformed_maps() {
        return Ok(x);
    }
    curve.transformed_point(x).unwrap_or_else(|| {
        Err(Error::Unsupported(
            "parameter maps over xbar need a curve that knows its transformed abscissa".into(),
        ))
    })
}

/// Normalized residual `|lhs| / (1 + |y| + |y|³)` at one point.
pub fn residual_at(eval: &Evaluator<'_>, curve: &dyn Curve, x: f64) -> Result<f64> {
    let Jet { y, dy, ddy } = curve.jet(x)?;
    let ddy = match ddy {
        Some(v) => v,
        None => fd_second_derivative(curve, x)?,
    };
    let xbar = transformed_point(eval.problem, curve, x)?;
    Ok(normalize(eval.lhs(x, xbar, y, dy, ddy)?, y))
}

/// Maximum normalized residual of `curve` in `problem` over `points`.
pub fn residual(problem: &OdeProblem, curve: &dyn Curve, points: &[f64]) -> Result<f64> {
    let eval = Evaluator::new(problem)?;
    if points.is_empty() {
        return Ok(0.0);
    }
    let lo = points.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = points.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let poles = curve.poles(lo - POLE_GUARD, hi + POLE_GUARD);
    let mut worst: f64 = 0.0;
    for &x in points {
        if let Some(&p) = poles.iter().find(|&&p| (x - p).abs() <= POLE_GUARD) {
            return Err(Error::Pole { x: p });
        }
        worst = worst.max(residual_at(&eval, curve, x)?);
    }
    Ok(worst)
}

/// Direct numeric integration of a problem as a first-order system.
///
/// The state carries x̄ as a third component when α, β or γ are maps of x̄.
pub struct OracleSolution {
    sol: SpanSolution,
}

impl OracleSolution {
    pub fn steps(&self) -> usize {
        self.sol.steps()
    }
}

impl Curve for OracleSolution {
    fn jet(&self, x: f64) -> Result<Jet> {
        let s = self.sol.state(x)?;
        Ok(Jet {
            y: s[0],
            dy: s[1],
            ddy: None,
        })
    }

    fn span(&self) -> (f64, f64) {
        self.sol.span()
    }

    fn transformed_point(&self, x: f64) -> Option<Result<f64>> {
        Some(self.sol.state(x).map(|s| s.get(2).copied().unwrap_or(x)))
    }
}

/// Integrates the problem from `(x0, y0, ẏ0)` (and x̄(x0) = `xbar0`) over `span`.
pub fn oracle_trajectory(
    problem: &OdeProblem,
    start: (f64, f64, f64),
    xbar0: f64,
    span: (f64, f64),
    tol: f64,
) -> Result<OracleSolution> {
    let eval = Evaluator::new(problem)?;
    let shear_free = classify(problem)? == FamilyClass::ShearFree;
    let augmented = problem.has_transformed_maps();
    let (x0, y0, dy0) = start;
    let rhs = |x: f64, s: &[f64], d: &mut [f64]| {
        let xbar = if augmented { s[2] } else { x };
        d[0] = s[1];
        d[1] = match eval.lhs(x, xbar, s[0], s[1], 0.0) {
            Ok(v) => -v,
            Err(_) => f64::NAN,
        };
        if augmented {
            d[2] = if shear_free {
                s[0] * s[0] / 3.0
            } else {
                problem.f_at(s[0], x)
            };
        }
    };
    let init: Vec<f64> = if augmented { vec![y0, dy0, xbar0] } else { vec![y0, dy0] };
    let sol = integrate_span(rhs, x0, &init, span, tol)?;
    Ok(OracleSolution { sol })
}

/// Max |y_candidate − y_oracle| on `samples` uniform points of `span`, the
/// oracle starting from the candidate's value and slope at `x0`.
pub fn oracle_compare(problem: &OdeProblem, curve: &dyn Curve, x0: f64, span: (f64, f64), tol: f64) -> Result<f64> {
    let j = curve.jet(x0)?;
    let xbar0 = transformed_point(problem, curve, x0)?;
    let oracle = oracle_trajectory(problem, (x0, j.y, j.dy), xbar0, span, tol)?;
    let (lo, hi) = span;
    let count = 200;
    let mut worst: f64 = 0.0;
    for i in 0..=count {
        let x = lo + (hi - lo) * i as f64 / count as f64;
        worst = worst.max((curve.value(x)? - oracle.value(x)?).abs());
    }
    Ok(worst)
}

/// Linear-target residual of a trajectory sampled on `grid` and mapped by
/// the nonlocal transformation anchored at `grid[0]`; derivatives are
/// three-point differences on the mapped, non-uniform grid.
pub fn roundtrip(problem: &OdeProblem, trajectory: &dyn Curve, grid: &[f64], tol: f64) -> Result<f64> {
    if grid.len() < 3 {
        return Err(Error::InvalidProblem("roundtrip needs at least three samples".into()));
    }
    let anchor = grid[0];
    let (linear, _) = linearize_at(problem, anchor)?;
    let m = forward_map(trajectory, grid, &problem.f, anchor, tol)?;
    let (xs, ys) = (&m.xbar, &m.ybar);
    let mut worst: f64 = 0.0;
    for i in 1..xs.len() - 1 {
        let (h1, h2) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
        let d1 = -h2 / (h1 * (h1 + h2)) * ys[i - 1] + (h2 - h1) / (h1 * h2) * ys[i] + h1 / (h2 * (h1 + h2)) * ys[i + 1];
        let d2 = 2.0 * (ys[i - 1] / (h1 * (h1 + h2)) - ys[i] / (h1 * h2) + ys[i + 1] / (h2 * (h1 + h2)));
        worst = worst.max(linear.residual(xs[i], ys[i], d1, d2).abs());
    }
    Ok(worst)
}

/// `y·D^(1/n)·e^(αkx/2)` for one power-family solution.
fn invariant(s: &PowerFamilySolution, x: f64) -> Result<f64> {
    let p = s.params();
    let k =
        p.k.as_const()
            .ok_or_else(|| Error::Unsupported("cross-relation needs constant k".into()))?;
    let d = s.denominator(x)?;
    let root = if d > 0.0 {
        d.powf(1.0 / p.n)
    } else if (1.0 / p.n).fract() == 0.0 {
        crate::problem::pow(d, 1.0 / p.n)
    } else {
        return Err(Error::breakdown(x, "denominator not positive for a fractional root"));
    };
    Ok(s.value(x)? * root * (0.5 * p.alpha * k * x).exp())
}

/// Max relative discrepancy of the relation `Q₁(x) ∝ Q₂(x)` over `points`,
/// the unknown proportionality fixed at the first point.
pub fn cross_relation(a: &PowerFamilySolution, b: &PowerFamilySolution, points: &[f64]) -> Result<f64> {
    let Some(&first) = points.first() else {
        return Ok(0.0);
    };
    let scale = invariant(b, first)? / invariant(a, first)?;
    let mut worst: f64 = 0.0;
    for &x in points {
        let q = invariant(a, x)? * scale / invariant(b, x)?;
        worst = worst.max((q - 1.0).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::painleve_ince;
    use crate::curve::FnCurve;
    use crate::linear_solver::solve_constant;
    use crate::problem::FunctionFamily;

    fn pi_problem() -> OdeProblem {
        OdeProblem::new(FunctionFamily::identity(), 3.0, 2.0, 0.0).unwrap()
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn exact_solution_has_tiny_residual() {
        let s = painleve_ince(3.0, 0.0, 1.0, 0.0, 1.0).unwrap();
        assert!(residual(&pi_problem(), &s, &grid(-3.0, 3.0, 50)).unwrap() < 1e-10);
    }

    #[test]
    fn zero_is_a_solution() {
        let zero = FnCurve::new(|_| (0.0, 0.0, 0.0));
        assert_eq!(residual(&pi_problem(), &zero, &grid(-1.0, 1.0, 11)).unwrap(), 0.0);
    }

    #[test]
    fn perturbation_is_detected() {
        let s = painleve_ince(3.0, 0.0, 1.0, 0.0, 1.0).unwrap();
        let bumped = FnCurve::new(move |x| {
            let j = s.jet(x).unwrap();
            (j.y + 0.01 * x * x, j.dy + 0.02 * x, j.ddy.unwrap() + 0.02)
        });
        assert!(residual(&pi_problem(), &bumped, &grid(-3.0, 3.0, 50)).unwrap() > 1e-4);
    }

    #[test]
    fn finite_difference_fallback() {
        let s = painleve_ince(3.0, 0.0, 1.0, 0.0, 1.0).unwrap();
        let no_curvature = FnCurve::new(move |x| {
            let j = s.jet(x).unwrap();
            (j.y, j.dy, f64::NAN)
        });
        struct Strip<C>(C);
        impl<C: Curve> Curve for Strip<C> {
            fn jet(&self, x: f64) -> Result<Jet> {
                let j = self.0.jet(x)?;
                Ok(Jet { ddy: None, ..j })
            }
        }
        assert!(residual(&pi_problem(), &Strip(no_curvature), &grid(-3.0, 3.0, 50)).unwrap() < 1e-8);
    }

    #[test]
    fn pole_in_points_is_rejected() {
        let s = painleve_ince(3.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            residual(&pi_problem(), &s, &[-1.0, 0.0, 1.0]),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn oracle_agrees_with_closed_form() {
        let s = painleve_ince(3.0, 0.0, 1.0, 0.0, 1.0).unwrap();
        assert!(oracle_compare(&pi_problem(), &s, 0.0, (0.0, 2.0), 1e-12).unwrap() < 1e-7);
        let lin = OdeProblem::new(FunctionFamily::Unit, 3.0, 2.0, 4.0).unwrap();
        let c = solve_constant(3.0, 2.0, 4.0, 1.0, -0.5);
        assert!(oracle_compare(&lin, &c, 0.0, (-1.0, 2.0), 1e-12).unwrap() < 1e-9);
    }

    #[test]
    fn roundtrip_of_numeric_trajectory() {
        let p = pi_problem();
        let traj = oracle_trajectory(&p, (0.0, 1.0, 0.0), 0.0, (0.0, 1.0), 1e-12).unwrap();
        let r: Vec<f64> = [51, 101, 201, 401]
            .iter()
            .map(|&n| roundtrip(&p, &traj, &grid(0.0, 1.0, n), 1e-12).unwrap())
            .collect();
        assert!(r[3] < 1e-5);
        for w in r.windows(2) {
            assert!(w[0] / w[1] > 3.5, "{r:?}");
        }
    }

    #[test]
    fn roundtrip_identity_is_linear_residual() {
        let p = OdeProblem::new(FunctionFamily::Unit, 3.0, 2.0, 0.0).unwrap();
        let c = solve_constant(3.0, 2.0, 0.0, 1.0, 1.0);
        let r = roundtrip(&p, &c, &grid(0.0, 1.0, 101), 1e-12).unwrap();
        // pure three-point truncation error of e^(-x) + e^(-2x)
        assert!(r < 1e-3 && r > 0.0);
    }
}

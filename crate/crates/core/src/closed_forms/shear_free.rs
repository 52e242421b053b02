//! `ÿ = F·y²` through `ȳ = y³/9`, `dx̄ = (y²/3)dx`, which turns it into
//! `ȳ'' = 3F(x̄)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linear_solver::{solve_variable, InitialConditions};
use crate::linearize::ParametricCurve;
use crate::numeric::{ScalarFn, DEFAULT_QUAD_TOL};
use crate::problem::{FunctionFamily, OdeProblem, Param};

/// f = y^(1/2), α = γ = 0, β = -3F/2.
pub fn shear_free_problem(big_f: ScalarFn) -> Result<OdeProblem> {
    OdeProblem::new(
        FunctionFamily::power(1.0, 0.5, 0.0)?,
        0.0,
        Param::map(move |s| -1.5 * big_f(s)),
        0.0,
    )
}

/// `ȳ = ∫₀^x̄ (x̄ - s)·3F(s) ds + c₁x̄ + c₂`, pulled back to
/// `y = (9ȳ)^(1/3)` with `x(x̄_lo) = x_offset`.
pub fn shear_free(big_f: ScalarFn, c1: f64, c2: f64, x_offset: f64, xbar_span: (f64, f64)) -> Result<ParametricCurve> {
    shear_free_anchored(big_f, c1, c2, (xbar_span.0, x_offset), xbar_span)
}

/// As [`shear_free`] with `x(origin.0) = origin.1`.
pub(crate) fn shear_free_anchored(
    big_f: ScalarFn,
    c1: f64,
    c2: f64,
    origin: (f64, f64),
    xbar_span: (f64, f64),
) -> Result<ParametricCurve> {
    let (a, b) = xbar_span;
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidProblem(format!(
            "xbar span [{a}, {b}] must be finite and nonempty"
        )));
    }
    let g = Param::map(move |s| -3.0 * big_f(s));
    let outer = (a.min(0.0), b.max(0.0));
    let ybar = solve_variable(
        Param::Const(0.0),
        Param::Const(0.0),
        g,
        InitialConditions::new(0.0, c2, c1),
        outer,
        DEFAULT_QUAD_TOL,
    )?;
    let inverse = Arc::new(|ybar: f64| {
        if ybar > 0.0 {
            Ok((9.0 * ybar).cbrt())
        } else {
            Err(Error::breakdown(f64::NAN, "ybar must stay positive"))
        }
    });
    ParametricCurve::new(
        Arc::new(ybar),
        inverse,
        Arc::new(|y: f64| y * y / 3.0),
        xbar_span,
        origin,
        DEFAULT_QUAD_TOL,
    )
}

//! The nonlocal transformation `ȳ = ∫f(y)dy`, `x̄ = ∫f(y)dx`.
//!
//! Under it the equation becomes `ȳ'' + αȳ' + βȳ + γ = 0`. Both integration
//! constants c and c̄ are fixed to zero, the time map is anchored so that
//! x̄(x₀) = 0, and the inverse time map is `x = x₀ + ∫ dx̄ / f(y)`.
//!
//! The transformation preserves slopes: dȳ/dx̄ = dy/dx. Curvature scales as
//! ÿ = f(y)·ȳ''.

use std::fmt;
use std::sync::Arc;

use crate::classify::classify;
use crate::curve::{Curve, Jet};
use crate::error::{Error, Result};
use crate::numeric::quadrature::{self, check_increasing};
use crate::numeric::{invert_monotone, CumulativeIntegral, DEFAULT_INVERT_TOL, DEFAULT_QUAD_TOL};
use crate::problem::{pow, FamilyClass, FunctionFamily, OdeProblem, Param};

const GENERIC_PANELS: usize = 512;
const CURVE_PANELS: usize = 256;

#[derive(Clone, Debug)]
enum Kind {
    Identity,
    Power { b: f64, n: f64, k: f64 },
    Log { b: f64, k: f64 },
    Numeric(CumulativeIntegral),
}

/// `F(y) = ∫f(y)dy` with the additive constant of the stated formula set
/// to zero; generic families are anchored at the lower domain end.
#[derive(Clone, Debug)]
pub struct Antiderivative {
    f: FunctionFamily,
    kind: Kind,
    domain: (f64, f64),
}

impl Antiderivative {
    pub fn new(f: &FunctionFamily) -> Result<Self> {
        f.validate()?;
        let domain = f.positivity_domain();
        if !(domain.1 > domain.0) {
            return Err(Error::InvalidProblem(format!("{f:?} is not positive for any y > 0")));
        }
        let kind = match f {
            FunctionFamily::Unit => Kind::Identity,
            FunctionFamily::PowerPlusConstant { b, n, k } if *n == -1.0 => Kind::Log { b: *b, k: *k },
            FunctionFamily::PowerPlusConstant { b, n, k } => Kind::Power { b: *b, n: *n, k: *k },
            FunctionFamily::Generic(g) => {
                let (lo, hi) = g.domain();
                let g = g.clone();
                Kind::Numeric(CumulativeIntegral::new(
                    Arc::new(move |y| g.eval(y)),
                    lo,
                    hi,
                    GENERIC_PANELS,
                    DEFAULT_QUAD_TOL,
                )?)
            }
        };
        Ok(Self {
            f: f.clone(),
            kind,
            domain,
        })
    }

    pub fn family(&self) -> &FunctionFamily {
        &self.f
    }

    /// Interval of y on which F is strictly increasing.
    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn integrand(&self, y: f64) -> f64 {
        self.f.eval(y)
    }

    pub fn eval(&self, y: f64) -> Result<f64> {
        let v = match &self.kind {
            Kind::Identity => y,
            Kind::Power { b, n, k } => b * pow(y, n + 1.0) / (n + 1.0) + k * y,
            Kind::Log { b, k } => b * y.ln() + k * y,
            Kind::Numeric(ci) => return ci.eval(y),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { x: y })
        }
    }

    fn in_domain(&self, y: f64) -> bool {
        let (lo, hi) = self.domain;
        match self.kind {
            Kind::Numeric(_) => y >= lo && y <= hi,
            _ => y > lo && y < hi,
        }
    }

    /// `F⁻¹(ȳ)` on the positive branch; closed form for k = 0 and for the
    /// quadratic n = 1, bracketed inversion otherwise.
    pub fn inverse(&self, ybar: f64) -> Result<f64> {
        let out_of_range = || Error::breakdown(f64::NAN, format!("ybar = {ybar} outside the range of F"));
        if !ybar.is_finite() {
            return Err(out_of_range());
        }
        let y = match self.kind {
            Kind::Identity => ybar,
            Kind::Power { b, n, k: 0.0 } => {
                let base = (n + 1.0) * ybar / b;
                if !(base > 0.0) {
                    return Err(out_of_range());
                }
                base.powf(1.0 / (n + 1.0))
            }
            Kind::Log { b, k: 0.0 } => (ybar / b).exp(),
            Kind::Power { b, n: 1.0, k } => {
                let disc = k * k + 2.0 * b * ybar;
                if disc < 0.0 {
                    return Err(out_of_range());
                }
                let s = disc.sqrt();
                // by + k = ±s, and f = by + k > 0 selects +s
                if k > 0.0 {
                    2.0 * ybar / (k + s)
                } else {
                    (s - k) / b
                }
            }
            _ => return self.numeric_inverse(ybar),
        };
        if self.in_domain(y) && y.is_finite() {
            Ok(y)
        } else {
            Err(out_of_range())
        }
    }

    fn numeric_inverse(&self, ybar: f64) -> Result<f64> {
        let (lo, hi) = self.bracket_for(ybar)?;
        let f = |y: f64| self.eval(y).unwrap_or(f64::NAN);
        let tol = DEFAULT_INVERT_TOL * ybar.abs().max(1.0);
        invert_monotone(&f, ybar, (lo, hi), tol)
            .map_err(|_| Error::breakdown(f64::NAN, format!("ybar = {ybar} outside the range of F")))
    }

    fn bracket_for(&self, ybar: f64) -> Result<(f64, f64)> {
        let (dlo, dhi) = self.domain;
        if let Kind::Numeric(_) = self.kind {
            return Ok((dlo, dhi));
        }
        let out = || Error::breakdown(f64::NAN, format!("ybar = {ybar} outside the range of F"));
        let pivot = if dhi.is_finite() {
            if dlo.is_finite() {
                0.5 * (dlo + dhi)
            } else {
                dhi - 1.0
            }
        } else if dlo.is_finite() {
            dlo + 1.0_f64.max(dlo.abs())
        } else {
            0.0
        };
        let value = |y: f64| self.eval(y).unwrap_or(f64::NAN);
        let mut lo = pivot;
        let mut step = 1.0_f64.max(pivot.abs());
        for _ in 0..2100 {
            if value(lo) <= ybar {
                break;
            }
            lo = if dlo.is_finite() {
                dlo + 0.5 * (lo - dlo)
            } else {
                lo - step
            };
            step *= 2.0;
            if dlo.is_finite() && lo - dlo <= f64::EPSILON * dlo.abs().max(1e-300) {
                return Err(out());
            }
        }
        let mut hi = pivot;
        let mut step = 1.0_f64.max(pivot.abs());
        for _ in 0..2100 {
            if value(hi) >= ybar {
                break;
            }
            hi = if dhi.is_finite() {
                dhi - 0.5 * (dhi - hi)
            } else {
                hi + step
            };
            step *= 2.0;
            if !hi.is_finite() || (dhi.is_finite() && dhi - hi <= f64::EPSILON * dhi.abs()) {
                return Err(out());
            }
        }
        if !(value(lo) <= ybar && value(hi) >= ybar) {
            return Err(out());
        }
        Ok((lo, hi))
    }
}

/// Audit record of the map used to produce a linear problem.
#[derive(Clone, Debug)]
pub struct TransformTrace {
    pub antiderivative: Antiderivative,
    /// x₀ with x̄(x₀) = 0; also the additive constant of the inverse time map.
    pub anchor: f64,
    /// Integration constant of ∫f dy on the nonlinear side.
    pub c: f64,
    /// Integration constant on the linear side.
    pub c_bar: f64,
    /// Whether α, β, γ were carried over as maps of x̄.
    pub variable: bool,
}

impl TransformTrace {
    pub fn ybar(&self, y: f64) -> Result<f64> {
        self.antiderivative.eval(y)
    }

    pub fn describe(&self) -> String {
        format!(
            "ybar = F(y) = integral of f(y) dy with c = {}; xbar = integral of f(y(x)) dx from x0 = {} (xbar(x0) = 0, c_bar = {}){}",
            self.c,
            self.anchor,
            self.c_bar,
            if self.variable { "; coefficients evaluated at xbar" } else { "" }
        )
    }
}

/// `ȳ'' + a·ȳ' + b·ȳ + g = 0`, coefficients constant or maps of x̄.
#[derive(Clone, Debug)]
pub struct LinearProblem {
    pub a: Param,
    pub b: Param,
    pub g: Param,
}

impl LinearProblem {
    pub fn is_constant(&self) -> bool {
        !(self.a.is_map() || self.b.is_map() || self.g.is_map())
    }

    pub fn constants(&self) -> Option<(f64, f64, f64)> {
        Some((self.a.as_const()?, self.b.as_const()?, self.g.as_const()?))
    }

    pub fn residual(&self, xbar: f64, y: f64, dy: f64, ddy: f64) -> f64 {
        ddy + self.a.at(xbar) * dy + self.b.at(xbar) * y + self.g.at(xbar)
    }
}

pub fn antiderivative(f: &FunctionFamily) -> Result<Antiderivative> {
    Antiderivative::new(f)
}

/// Linear target and transformation for `problem`, anchored at x₀ = 0.
pub fn linearize(problem: &OdeProblem) -> Result<(LinearProblem, TransformTrace)> {
    linearize_at(problem, 0.0)
}

pub fn linearize_at(problem: &OdeProblem, anchor: f64) -> Result<(LinearProblem, TransformTrace)> {
    if classify(problem)? == FamilyClass::ShearFree {
        return Err(Error::Unsupported(
            "shear-free problems map to ybar'' = 3F and are solved by the shear-free closed form".into(),
        ));
    }
    if !problem.delta.is_zero() || problem.offset.is_some() {
        return Err(Error::Unsupported(
            "delta-shifted and k(x) problems are solved through the power-family pathway".into(),
        ));
    }
    let antiderivative = Antiderivative::new(&problem.f)?;
    let linear = LinearProblem {
        a: problem.alpha.clone(),
        b: problem.beta.clone(),
        g: problem.gamma.clone(),
    };
    let trace = TransformTrace {
        antiderivative,
        anchor,
        c: 0.0,
        c_bar: 0.0,
        variable: problem.has_transformed_maps(),
    };
    Ok((linear, trace))
}

/// Samples of a trajectory mapped into the linear variables.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedSamples {
    pub xbar: Vec<f64>,
    pub ybar: Vec<f64>,
}

/// Maps `y(x)` sampled on `grid` to `(x̄ᵢ, ȳᵢ)` with x̄(x₀) = 0.
pub fn forward_map(
    trajectory: &dyn Curve,
    grid: &[f64],
    f: &FunctionFamily,
    anchor: f64,
    tol: f64,
) -> Result<MappedSamples> {
    check_increasing(grid)?;
    let big_f = Antiderivative::new(f)?;
    let density = |x: f64| match trajectory.value(x) {
        Ok(y) => {
            let v = f.eval(y);
            if v > 0.0 {
                v
            } else {
                f64::NAN
            }
        }
        Err(_) => f64::NAN,
    };
    let xbar = quadrature::cumulative_quadrature(&density, anchor, grid, tol).map_err(|e| match e {
        Error::NonFinite { x } => Error::breakdown(x, "f(y(x)) not positive along the trajectory"),
        other => other,
    })?;
    let ybar = grid
        .iter()
        .map(|&x| big_f.eval(trajectory.value(x)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(MappedSamples { xbar, ybar })
}

type InverseFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;
type WeightFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A solution given parametrically by `(x(x̄), y(x̄))`.
///
/// Built from a linear-side solution ȳ(x̄), the inverse `y = G⁻¹(ȳ)` and the
/// weight w(y) = dx̄/dx of a transformation with dȳ = w·dy and dx̄ = w·dx.
#[derive(Clone)]
pub struct ParametricCurve {
    source: Arc<dyn Curve>,
    inverse: InverseFn,
    weight: WeightFn,
    xbar_span: (f64, f64),
    xbar: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
    tol: f64,
}

impl fmt::Debug for ParametricCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricCurve")
            .field("xbar_span", &self.xbar_span)
            .field("x_span", &self.span())
            .field("nodes", &self.x.len())
            .finish()
    }
}

impl ParametricCurve {
    /// Samples the curve on `xbar_span`, with x(`origin.0`) = `origin.1`.
    pub fn new(
        source: Arc<dyn Curve>,
        inverse: InverseFn,
        weight: WeightFn,
        xbar_span: (f64, f64),
        origin: (f64, f64),
        tol: f64,
    ) -> Result<Self> {
        let (a, b) = xbar_span;
        if !(b > a) {
            return Err(Error::InvalidProblem(format!("empty xbar span [{a}, {b}]")));
        }
        let mut curve = Self {
            source,
            inverse,
            weight,
            xbar_span,
            xbar: Vec::new(),
            x: Vec::new(),
            y: Vec::new(),
            tol,
        };
        let xbar: Vec<f64> = (0..=CURVE_PANELS)
            .map(|i| a + (b - a) * i as f64 / CURVE_PANELS as f64)
            .collect();
        let y = xbar.iter().map(|&s| curve.y_at(s)).collect::<Result<Vec<_>>>()?;
        let speed = |s: f64| curve.speed(s).unwrap_or(f64::NAN);
        let x0 = origin.1 + curve.integrate_speed(&speed, origin.0, a)?;
        let mut x = vec![x0];
        x.extend(
            quadrature::cumulative_quadrature(&speed, a, &xbar[1..], tol)
                .map_err(breakdown_in_quadrature)?
                .into_iter()
                .map(|v| x0 + v),
        );
        check_increasing(&x).map_err(|e| match e {
            Error::NonMonotone { index } => Error::breakdown(xbar[index], "time map not increasing"),
            other => other,
        })?;
        curve.xbar = xbar;
        curve.x = x;
        curve.y = y;
        Ok(curve)
    }

    fn integrate_speed(&self, speed: &dyn Fn(f64) -> f64, from: f64, to: f64) -> Result<f64> {
        quadrature::integrate(speed, from, to, self.tol).map_err(breakdown_in_quadrature)
    }

    fn y_at(&self, xbar: f64) -> Result<f64> {
        let ybar = self.source.value(xbar)?;
        (self.inverse)(ybar).map_err(|e| match e {
            Error::DomainBreakdown { reason, .. } => Error::DomainBreakdown { x: xbar, reason },
            other => other,
        })
    }

    /// dx/dx̄ at x̄.
    fn speed(&self, xbar: f64) -> Result<f64> {
        let y = self.y_at(xbar)?;
        let w = (self.weight)(y);
        if w > 0.0 && w.is_finite() {
            Ok(1.0 / w)
        } else {
            Err(Error::breakdown(
                xbar,
                format!("transformation weight {w} not positive"),
            ))
        }
    }

    pub fn xbar_span(&self) -> (f64, f64) {
        self.xbar_span
    }

    /// Node table `(x̄ᵢ, xᵢ, yᵢ)`.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.x.len()).map(move |i| (self.xbar[i], self.x[i], self.y[i]))
    }

    /// x(x̄) for any x̄ in the span.
    pub fn x_at(&self, xbar: f64) -> Result<f64> {
        let (a, b) = self.xbar_span;
        if xbar < a || xbar > b {
            return Err(Error::OutOfSpan { x: xbar, lo: a, hi: b });
        }
        let h = (b - a) / CURVE_PANELS as f64;
        let i = (((xbar - a) / h).round() as usize).min(CURVE_PANELS);
        let speed = |s: f64| self.speed(s).unwrap_or(f64::NAN);
        Ok(self.x[i] + self.integrate_speed(&speed, self.xbar[i], xbar)?)
    }

    /// x̄ such that x(x̄) = x.
    pub fn xbar_at(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.span();
        let slack = 1e-12 * (hi - lo);
        if !(x >= lo - slack && x <= hi + slack) {
            return Err(Error::OutOfSpan { x, lo, hi });
        }
        let x = x.clamp(lo, hi);
        let i = (self.x.partition_point(|&v| v <= x).max(1) - 1).min(self.x.len() - 2);
        if x == self.x[i] {
            return Ok(self.xbar[i]);
        }
        let speed = |s: f64| self.speed(s).unwrap_or(f64::NAN);
        let base = self.xbar[i];
        let map = |s: f64| self.x[i] + quadrature::integrate(&speed, base, s, self.tol).unwrap_or(f64::NAN);
        let tol = 1e-14 * (hi - lo).abs().max(1.0);
        invert_monotone(&map, x, (self.xbar[i], self.xbar[i + 1]), tol)
    }
}

fn breakdown_in_quadrature(e: Error) -> Error {
    match e {
        Error::NonFinite { x } => Error::breakdown(x, "inverse transformation undefined"),
        other => other,
    }
}

impl Curve for ParametricCurve {
    fn jet(&self, x: f64) -> Result<Jet> {
        let xbar = self.xbar_at(x)?;
        let j = self.source.jet(xbar)?;
        let y = self.y_at(xbar)?;
        let w = (self.weight)(y);
        Ok(Jet {
            y,
            dy: j.dy,
            ddy: j.ddy.map(|d| d * w),
        })
    }

    fn span(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    fn transformed_point(&self, x: f64) -> Option<Result<f64>> {
        Some(self.xbar_at(x))
    }
}

/// Pulls a linear-side solution back to a parametric solution of the
/// original problem over `xbar_span`.
pub fn pullback(
    linear_solution: Arc<dyn Curve>,
    trace: &TransformTrace,
    xbar_span: (f64, f64),
) -> Result<ParametricCurve> {
    let inv = trace.antiderivative.clone();
    let wf = trace.antiderivative.clone();
    ParametricCurve::new(
        linear_solution,
        Arc::new(move |ybar| inv.inverse(ybar)),
        Arc::new(move |y| wf.integrand(y)),
        xbar_span,
        (0.0, trace.anchor),
        DEFAULT_QUAD_TOL,
    )
}

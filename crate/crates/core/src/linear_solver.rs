//! Solutions of the linear target `ȳ'' + a·ȳ' + b·ȳ + g = 0`.
//!
//! Constant coefficients have closed forms. A repeated root λ = -α/2 gives
//! `(c₁ + c₂x̄)·exp(-αx̄/2)`; the residual vanishes only with the factor α in
//! the exponent, so the often-quoted `exp(-x̄/2)` is correct at α = 1 alone.
//! Variable coefficients go through the adaptive integrator, or through a
//! single Cauchy quadrature when `a ≡ b ≡ 0`.

use crate::classify::CONSTRAINT_REL_TOL;
use crate::curve::{Curve, Jet};
use crate::error::{Error, Result};
use crate::numeric::{integrate_span, quadrature, SpanSolution};
use crate::problem::{Param, Regime};

/// Homogeneous part of a constant-coefficient solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Homogeneous {
    /// c₁·e^(λ₁x̄) + c₂·e^(λ₂x̄)
    DistinctReal { l1: f64, l2: f64, c1: f64, c2: f64 },
    /// (c₁ + c₂x̄)·e^(λx̄)
    DoubleRoot { lambda: f64, c1: f64, c2: f64 },
    /// e^(σx̄)·(c₁cos ωx̄ + c₂sin ωx̄)
    ComplexPair { sigma: f64, omega: f64, c1: f64, c2: f64 },
}

/// Closed-form solution of `ȳ'' + αȳ' + βȳ + γ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearClosedForm {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub homogeneous: Homogeneous,
}

enum Shape {
    Distinct(f64, f64),
    Double(f64),
    Complex(f64, f64),
}

fn shape(alpha: f64, beta: f64) -> Shape {
    let half = 0.5 * alpha;
    let disc = half * half - beta;
    if disc.abs() <= CONSTRAINT_REL_TOL * (half * half).max(beta.abs()) {
        Shape::Double(-half)
    } else if disc > 0.0 {
        let r = disc.sqrt();
        // larger-magnitude root first, the other from Vieta to avoid cancellation
        let q = -(half + half.signum() * r);
        Shape::Distinct(q, beta / q)
    } else {
        Shape::Complex(-half, (-disc).sqrt())
    }
}

/// Value, slope and curvature of the two basis functions at `x`.
fn basis(h: &Homogeneous, x: f64) -> [[f64; 3]; 2] {
    match *h {
        Homogeneous::DistinctReal { l1, l2, .. } => {
            let e1 = (l1 * x).exp();
            let e2 = (l2 * x).exp();
            [[e1, l1 * e1, l1 * l1 * e1], [e2, l2 * e2, l2 * l2 * e2]]
        }
        Homogeneous::DoubleRoot { lambda: l, .. } => {
            let e = (l * x).exp();
            [
                [e, l * e, l * l * e],
                [x * e, (1.0 + l * x) * e, (2.0 * l + l * l * x) * e],
            ]
        }
        Homogeneous::ComplexPair { sigma: s, omega: w, .. } => {
            let e = (s * x).exp();
            let (sn, cs) = (w * x).sin_cos();
            let u = [cs, -w * sn, -w * w * cs];
            let v = [sn, w * cs, -w * w * sn];
            let prod = |g: [f64; 3]| {
                [
                    e * g[0],
                    e * (s * g[0] + g[1]),
                    e * (s * s * g[0] + 2.0 * s * g[1] + g[2]),
                ]
            };
            [prod(u), prod(v)]
        }
    }
}

impl LinearClosedForm {
    pub fn constants(&self) -> (f64, f64) {
        match self.homogeneous {
            Homogeneous::DistinctReal { c1, c2, .. }
            | Homogeneous::DoubleRoot { c1, c2, .. }
            | Homogeneous::ComplexPair { c1, c2, .. } => (c1, c2),
        }
    }

    /// Particular solution: -γ/β, -γx̄/α when β = 0, or -γx̄²/2 when α = β = 0.
    fn particular(&self, x: f64) -> [f64; 3] {
        let (a, b, g) = (self.alpha, self.beta, self.gamma);
        if g == 0.0 {
            [0.0; 3]
        } else if b != 0.0 {
            [-g / b, 0.0, 0.0]
        } else if a != 0.0 {
            [-g * x / a, -g / a, 0.0]
        } else {
            [-0.5 * g * x * x, -g * x, -g]
        }
    }

    /// `[ȳ, ȳ', ȳ'']` at `x`.
    pub fn derivatives(&self, x: f64) -> [f64; 3] {
        let (c1, c2) = self.constants();
        let [p, q] = basis(&self.homogeneous, x);
        let part = self.particular(x);
        [
            c1 * p[0] + c2 * q[0] + part[0],
            c1 * p[1] + c2 * q[1] + part[1],
            c1 * p[2] + c2 * q[2] + part[2],
        ]
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.derivatives(x)[0]
    }

    /// `ȳ'' + αȳ' + βȳ + γ` evaluated analytically.
    pub fn residual(&self, x: f64) -> f64 {
        let [y, d1, d2] = self.derivatives(x);
        d2 + self.alpha * d1 + self.beta * y + self.gamma
    }

    /// Solution through `(x0, y0)` with slope `dy0`.
    pub fn fit(alpha: f64, beta: f64, gamma: f64, x0: f64, y0: f64, dy0: f64) -> Self {
        let unit = solve_constant(alpha, beta, gamma, 1.0, 1.0);
        let [p, q] = basis(&unit.homogeneous, x0);
        let part = unit.particular(x0);
        let (ry, rd) = (y0 - part[0], dy0 - part[1]);
        let det = p[0] * q[1] - p[1] * q[0];
        let c1 = (ry * q[1] - rd * q[0]) / det;
        let c2 = (p[0] * rd - p[1] * ry) / det;
        unit.with_constants(c1, c2)
    }

    pub fn with_constants(mut self, c1: f64, c2: f64) -> Self {
        self.homogeneous = match self.homogeneous {
            Homogeneous::DistinctReal { l1, l2, .. } => Homogeneous::DistinctReal { l1, l2, c1, c2 },
            Homogeneous::DoubleRoot { lambda, .. } => Homogeneous::DoubleRoot { lambda, c1, c2 },
            Homogeneous::ComplexPair { sigma, omega, .. } => Homogeneous::ComplexPair { sigma, omega, c1, c2 },
        };
        self
    }
}

impl Curve for LinearClosedForm {
    fn jet(&self, x: f64) -> Result<Jet> {
        let [y, d1, d2] = self.derivatives(x);
        Ok(Jet::new(y, d1, d2))
    }
}

pub fn solve_constant(alpha: f64, beta: f64, gamma: f64, c1: f64, c2: f64) -> LinearClosedForm {
    let homogeneous = match shape(alpha, beta) {
        Shape::Distinct(l1, l2) => Homogeneous::DistinctReal { l1, l2, c1, c2 },
        Shape::Double(lambda) => Homogeneous::DoubleRoot { lambda, c1, c2 },
        Shape::Complex(sigma, omega) => Homogeneous::ComplexPair { sigma, omega, c1, c2 },
    };
    LinearClosedForm {
        alpha,
        beta,
        gamma,
        homogeneous,
    }
}

/// Damping regime from the sign of α and of α²/4 - β.
///
/// α = 0 is the undamped boundary and is reported as an error.
pub fn classify_damping(alpha: f64, beta: f64) -> Result<Regime> {
    if alpha == 0.0 {
        return Err(Error::Unsupported("alpha = 0 is the undamped boundary".into()));
    }
    if alpha < 0.0 {
        return Ok(Regime::Growing);
    }
    Ok(match shape(alpha, beta) {
        Shape::Distinct(..) => Regime::StrongDamped,
        Shape::Double(_) => Regime::CriticallyDamped,
        Shape::Complex(..) => Regime::WeakDamped,
    })
}

enum VariableKind {
    Dense(SpanSolution),
    Quadrature { x0: f64, y0: f64, dy0: f64 },
}

/// Solution of a linear problem with coefficient maps, valid on a span.
pub struct VariableSolution {
    a: Param,
    b: Param,
    g: Param,
    kind: VariableKind,
    span: (f64, f64),
    tol: f64,
}

impl std::fmt::Debug for VariableSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.kind {
            VariableKind::Dense(_) => "dense",
            VariableKind::Quadrature { .. } => "quadrature",
        };
        f.debug_struct("VariableSolution")
            .field("kind", &kind)
            .field("span", &self.span)
            .finish()
    }
}

impl VariableSolution {
    /// Number of accepted integrator steps (0 for the quadrature form).
    pub fn steps(&self) -> usize {
        match &self.kind {
            VariableKind::Dense(d) => d.steps(),
            VariableKind::Quadrature { .. } => 0,
        }
    }

    pub fn is_quadrature(&self) -> bool {
        matches!(self.kind, VariableKind::Quadrature { .. })
    }
}

impl Curve for VariableSolution {
    fn jet(&self, x: f64) -> Result<Jet> {
        let (lo, hi) = self.span;
        let slack = 1e-12 * (hi - lo);
        if x < lo - slack || x > hi + slack {
            return Err(Error::OutOfSpan { x, lo, hi });
        }
        match &self.kind {
            VariableKind::Dense(sol) => {
                let s = sol.state(x)?;
                let ddy = -self.a.at(x) * s[1] - self.b.at(x) * s[0] - self.g.at(x);
                Ok(Jet::new(s[0], s[1], ddy))
            }
            VariableKind::Quadrature { x0, y0, dy0 } => {
                let g = |s: f64| self.g.at(s);
                let first = quadrature::integrate(&g, *x0, x, self.tol)?;
                let moment = quadrature::integrate(&|s: f64| (x - s) * self.g.at(s), *x0, x, self.tol)?;
                Ok(Jet::new(y0 + dy0 * (x - x0) - moment, dy0 - first, -self.g.at(x)))
            }
        }
    }

    fn span(&self) -> (f64, f64) {
        self.span
    }
}

/// Initial value and slope at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialConditions {
    pub x0: f64,
    pub y0: f64,
    pub dy0: f64,
}

impl InitialConditions {
    pub fn new(x0: f64, y0: f64, dy0: f64) -> Self {
        Self { x0, y0, dy0 }
    }
}

/// Dense solution of `ȳ'' = -a·ȳ' - b·ȳ - g` through the initial conditions.
pub fn solve_variable(
    a: Param,
    b: Param,
    g: Param,
    ic: InitialConditions,
    span: (f64, f64),
    tol: f64,
) -> Result<VariableSolution> {
    let InitialConditions { x0, y0, dy0 } = ic;
    let (lo, hi) = span;
    if !(lo <= x0 && x0 <= hi && hi > lo) {
        return Err(Error::InvalidProblem(format!(
            "initial point {x0} must lie in span [{lo}, {hi}]"
        )));
    }
    let kind = if a.is_zero() && b.is_zero() {
        VariableKind::Quadrature { x0, y0, dy0 }
    } else {
        let (ca, cb, cg) = (a.clone(), b.clone(), g.clone());
        let rhs = move |x: f64, s: &[f64], d: &mut [f64]| {
            d[0] = s[1];
            d[1] = -ca.at(x) * s[1] - cb.at(x) * s[0] - cg.at(x);
        };
        VariableKind::Dense(integrate_span(rhs, x0, &[y0, dy0], span, tol)?)
    };
    Ok(VariableSolution {
        a,
        b,
        g,
        kind,
        span,
        tol: tol.min(crate::numeric::DEFAULT_QUAD_TOL),
    })
}

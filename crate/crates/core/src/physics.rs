//! Physical models that reduce to the equation class, and reconstruction of
//! the Tsallis distribution from a solved `y = ḟ_d/f_d`.

use std::fmt;
use std::sync::Arc;

use crate::closed_forms::shear_free_problem;
use crate::curve::{Curve, Jet};
use crate::error::{Error, Result};
use crate::numeric::{integrate_span, quadrature, CumulativeIntegral, ScalarFn, SpanSolution, DEFAULT_QUAD_TOL};
use crate::problem::{FunctionFamily, OdeProblem};

#[derive(Clone)]
pub enum PhysicsScenario {
    Tsallis { q: f64 },
    BianchiScalar { c: f64, c1: f64, c2: f64 },
    ViscousFluid { r: f64, alpha: f64, beta: f64 },
    ShearFreeFluid { forcing: ScalarFn },
}

impl fmt::Debug for PhysicsScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhysicsScenario::Tsallis { q } => write!(f, "Tsallis {{ q: {q} }}"),
            PhysicsScenario::BianchiScalar { c, c1, c2 } => {
                write!(f, "BianchiScalar {{ c: {c}, c1: {c1}, c2: {c2} }}")
            }
            PhysicsScenario::ViscousFluid { r, alpha, beta } => {
                write!(f, "ViscousFluid {{ r: {r}, alpha: {alpha}, beta: {beta} }}")
            }
            PhysicsScenario::ShearFreeFluid { .. } => f.write_str("ShearFreeFluid { forcing: <map> }"),
        }
    }
}

impl PhysicsScenario {
    pub fn to_problem(&self) -> Result<OdeProblem> {
        match self {
            PhysicsScenario::Tsallis { q } => from_tsallis(*q),
            PhysicsScenario::BianchiScalar { c, c1, c2 } => from_bianchi(*c, *c1, *c2),
            PhysicsScenario::ViscousFluid { r, alpha, beta } => from_viscous(*r, *alpha, *beta),
            PhysicsScenario::ShearFreeFluid { forcing } => shear_free_problem(Arc::clone(forcing)),
        }
    }
}

/// f = y, α = 2q − 1, β = q(q − 1)/2, γ = 0.
pub fn from_tsallis(q: f64) -> Result<OdeProblem> {
    if !q.is_finite() {
        return Err(Error::InvalidProblem("q must be finite".into()));
    }
    OdeProblem::new(FunctionFamily::identity(), 2.0 * q - 1.0, 0.5 * q * (q - 1.0), 0.0)
}

/// `GG̈/Ġ + (c−1)Ġ + c₁/Ġ = c₂` under `G = y^(1/c)`:
/// f = y^(−1/c), α = −c₂, β = c₁(c − 1), γ = 0.
///
/// At c = 1 the c₁ term no longer passes through ∫f dy = ln y; it survives
/// as γ = c₁ (the equation becomes `ÿ − c₂ẏ/y + c₁/y = 0`).
pub fn from_bianchi(c: f64, c1: f64, c2: f64) -> Result<OdeProblem> {
    if c == 0.0 || ![c, c1, c2].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidProblem(
            "Bianchi exponent c must be finite and nonzero".into(),
        ));
    }
    let f = FunctionFamily::power(1.0, -1.0 / c, 0.0)?;
    if c == 1.0 {
        OdeProblem::new(f, -c2, 0.0, c1)
    } else {
        OdeProblem::new(f, -c2, c1 * (c - 1.0), 0.0)
    }
}

/// f = y^(−1/r), γ = 0, α and β as given.
pub fn from_viscous(r: f64, alpha: f64, beta: f64) -> Result<OdeProblem> {
    if r == 0.0 || !r.is_finite() {
        return Err(Error::InvalidProblem(
            "viscous exponent r must be finite and nonzero".into(),
        ));
    }
    OdeProblem::new(FunctionFamily::power(1.0, -1.0 / r, 0.0)?, alpha, beta, 0.0)
}

/// A numeric solution G of the Bianchi equation, exposed as `y = G^c`.
pub struct BianchiTrajectory {
    c: f64,
    c1: f64,
    c2: f64,
    sol: SpanSolution,
}

/// Integrates `G̈ = (c₂Ġ − (c−1)Ġ² − c₁)/G` from `(x0, G0, Ġ0)`.
pub fn bianchi_trajectory(
    (c, c1, c2): (f64, f64, f64),
    start: (f64, f64, f64),
    span: (f64, f64),
    tol: f64,
) -> Result<BianchiTrajectory> {
    let (x0, g0, gd0) = start;
    if !(g0 > 0.0) {
        return Err(Error::InvalidProblem("G must start positive".into()));
    }
    let rhs = move |_: f64, s: &[f64], d: &mut [f64]| {
        d[0] = s[1];
        d[1] = (c2 * s[1] - (c - 1.0) * s[1] * s[1] - c1) / s[0];
    };
    let sol = integrate_span(rhs, x0, &[g0, gd0], span, tol)?;
    Ok(BianchiTrajectory { c, c1, c2, sol })
}

impl Curve for BianchiTrajectory {
    fn jet(&self, x: f64) -> Result<Jet> {
        let s = self.sol.state(x)?;
        let (g, gd) = (s[0], s[1]);
        if !(g > 0.0) {
            return Err(Error::breakdown(x, "G left the positive axis"));
        }
        let c = self.c;
        let gdd = (self.c2 * gd - (c - 1.0) * gd * gd - self.c1) / g;
        let y = g.powf(c);
        let dy = c * g.powf(c - 1.0) * gd;
        let ddy = c * (c - 1.0) * g.powf(c - 2.0) * gd * gd + c * g.powf(c - 1.0) * gdd;
        Ok(Jet::new(y, dy, ddy))
    }

    fn span(&self) -> (f64, f64) {
        self.sol.span()
    }
}

const DENSITY_PANELS: usize = 512;

/// `f_d(x) = N·exp(∫_{x₀}^x y)`, normalized to unit mass on its span.
#[derive(Debug, Clone)]
pub struct TsallisDensity {
    log_integral: CumulativeIntegral,
    log_shift: f64,
    norm: f64,
}

pub fn tsallis_distribution(y: Arc<dyn Curve>, x0: f64, span: (f64, f64)) -> Result<TsallisDensity> {
    let (lo, hi) = span;
    if !(lo <= x0 && x0 <= hi && hi > lo) {
        return Err(Error::InvalidProblem(format!("x0 = {x0} must lie in [{lo}, {hi}]")));
    }
    let src = Arc::clone(&y);
    let g: ScalarFn = Arc::new(move |x| src.value(x).unwrap_or(f64::NAN));
    let diverged = |e: Error| match e {
        Error::NonFinite { x } => Error::breakdown(x, "distribution integral diverges"),
        other => other,
    };
    let running = CumulativeIntegral::new(g, lo, hi, DENSITY_PANELS, DEFAULT_QUAD_TOL).map_err(diverged)?;
    let at_x0 = running.eval(x0)?;
    let log_integral = running.with_offset(-at_x0);
    // subtract the largest node value so the exponentials stay in range
    let log_shift = log_integral.node_values().fold(f64::NEG_INFINITY, f64::max);
    let unnormalized = |x: f64| match log_integral.eval(x) {
        Ok(l) => (l - log_shift).exp(),
        Err(_) => f64::NAN,
    };
    let mass = quadrature::integrate(&unnormalized, lo, hi, DEFAULT_QUAD_TOL).map_err(diverged)?;
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::breakdown(lo, "distribution integral diverges"));
    }
    Ok(TsallisDensity {
        log_integral,
        log_shift,
        norm: 1.0 / mass,
    })
}

impl TsallisDensity {
    pub fn span(&self) -> (f64, f64) {
        self.log_integral.span()
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.norm * (self.log_integral.eval(x)? - self.log_shift).exp())
    }

    /// `ḟ_d/f_d`, which equals the generating y.
    pub fn log_derivative(&self, x: f64) -> f64 {
        self.log_integral.integrand(x)
    }

    /// Density values on `grid`.
    pub fn samples(&self, grid: &[f64]) -> Result<Vec<f64>> {
        grid.iter().map(|&x| self.eval(x)).collect()
    }
}

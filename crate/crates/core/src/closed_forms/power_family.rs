//! The f = b·yⁿ + k families:
//! `yⁿ = C·ŷⁿ / (∫ŷⁿdx + c₃)` with `C = (n+2)/(αbn)`, where ŷ solves
//! `ŷ'' + αkŷ' + [α²k²(n+1)/(n+2)² + δ]ŷ = 0`.
//!
//! With k and δ constant ŷ is a closed form; with k(x) or δ(x) it comes from
//! the dense integrator. The running integral starts at the span's left end,
//! so c₃ is the value of the denominator there.

use std::sync::Arc;

use crate::classify::{case_a_beta, case_a_gamma};
use crate::curve::{Curve, Jet};
use crate::error::{Error, Result};
use crate::linear_solver::{solve_constant, solve_variable, InitialConditions};
use crate::numeric::{CumulativeIntegral, ScalarFn, DEFAULT_QUAD_TOL};
use crate::problem::{pow, FunctionFamily, OdeProblem, Param};

const INTEGRAL_PANELS: usize = 512;

/// Constant parameters of f = b·yⁿ + k together with α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerParams {
    pub b: f64,
    pub n: f64,
    pub k: f64,
    pub alpha: f64,
}

/// Parameters with k and δ given as maps of x.
#[derive(Debug, Clone)]
pub struct VariablePowerParams {
    pub b: f64,
    pub n: f64,
    pub alpha: f64,
    pub k: Param,
    pub delta: Param,
}

#[derive(Clone)]
pub struct PowerFamilySolution {
    params: VariablePowerParams,
    inner: Arc<dyn Curve>,
    integral: CumulativeIntegral,
    coef: f64,
    span: (f64, f64),
}

impl std::fmt::Debug for PowerFamilySolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PowerFamilySolution")
            .field("params", &self.params)
            .field("span", &self.span)
            .finish()
    }
}

fn is_odd_integer(v: f64) -> bool {
    v.is_finite() && v == v.trunc() && (v % 2.0).abs() == 1.0
}

fn is_even_integer(v: f64) -> bool {
    v.is_finite() && v == v.trunc() && v % 2.0 == 0.0
}

/// `sign(v)·|v|^e`.
fn signed_pow(v: f64, e: f64) -> f64 {
    v.signum() * v.abs().powf(e)
}

fn check_shape(b: f64, n: f64, alpha: f64) -> Result<()> {
    if ![b, n, alpha].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidProblem("parameters must be finite".into()));
    }
    if alpha == 0.0 || b == 0.0 {
        return Err(Error::InvalidProblem("alpha and b must be nonzero".into()));
    }
    if n == 0.0 || n == -2.0 {
        return Err(Error::InvalidProblem("n must differ from 0 and -2".into()));
    }
    Ok(())
}

/// General solution of the δ = 0 family, ŷ = c₁e^(λ₁x) + c₂e^(λ₂x) (or its
/// repeated/complex-root counterpart).
pub fn case_a(p: PowerParams, constants: [f64; 3], span: (f64, f64)) -> Result<PowerFamilySolution> {
    case_b(p, 0.0, constants, span)
}

/// As [`case_a`] with the extra `δ·y` term.
pub fn case_b(p: PowerParams, delta: f64, constants: [f64; 3], span: (f64, f64)) -> Result<PowerFamilySolution> {
    check_shape(p.b, p.n, p.alpha)?;
    let [c1, c2, c3] = constants;
    let ak = p.alpha * p.k;
    let inner = solve_constant(ak, case_a_beta(ak, p.n) + delta, 0.0, c1, c2);
    let params = VariablePowerParams {
        b: p.b,
        n: p.n,
        alpha: p.alpha,
        k: Param::Const(p.k),
        delta: Param::Const(delta),
    };
    PowerFamilySolution::build(params, Arc::new(inner), c3, span)
}

/// Variable k(x), δ(x): ŷ is integrated from `inner` initial conditions.
pub fn case_c(
    p: &VariablePowerParams,
    inner: InitialConditions,
    c3: f64,
    span: (f64, f64),
    tol: f64,
) -> Result<PowerFamilySolution> {
    check_shape(p.b, p.n, p.alpha)?;
    let (alpha, n) = (p.alpha, p.n);
    let (k1, k2, d) = (p.k.clone(), p.k.clone(), p.delta.clone());
    let a = Param::map(move |x| alpha * k1.at(x));
    let b = Param::map(move |x| case_a_beta(alpha * k2.at(x), n) + d.at(x));
    let yhat = solve_variable(a, b, Param::Const(0.0), inner, span, tol)?;
    PowerFamilySolution::build(p.clone(), Arc::new(yhat), c3, span)
}

impl PowerFamilySolution {
    fn build(params: VariablePowerParams, inner: Arc<dyn Curve>, c3: f64, span: (f64, f64)) -> Result<Self> {
        let (lo, hi) = span;
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "span [{lo}, {hi}] must be finite and nonempty"
            )));
        }
        if !c3.is_finite() {
            return Err(Error::InvalidProblem("c3 must be finite".into()));
        }
        let n = params.n;
        let src = Arc::clone(&inner);
        let g: ScalarFn = Arc::new(move |x| match src.value(x) {
            Ok(v) => hat_pow(v, n).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        });
        let integral = CumulativeIntegral::new(g, lo, hi, INTEGRAL_PANELS, DEFAULT_QUAD_TOL)
            .map_err(|e| match e {
                Error::NonFinite { x } => Error::breakdown(x, "inner solution power undefined (non-positive base)"),
                other => other,
            })?
            .with_offset(c3);
        let sol = Self {
            coef: (n + 2.0) / (params.alpha * params.b * n),
            params,
            inner,
            integral,
            span,
        };
        if let Some(&x) = sol.denominator_zeros().first() {
            return Err(Error::Pole { x });
        }
        Ok(sol)
    }

    pub fn params(&self) -> &VariablePowerParams {
        &self.params
    }

    pub fn c3(&self) -> f64 {
        self.integral.node_values().next().unwrap_or(0.0)
    }

    /// Scale factor C = (n+2)/(αbn).
    pub fn coefficient(&self) -> f64 {
        self.coef
    }

    /// The inner linear solution ŷ.
    pub fn inner(&self) -> &Arc<dyn Curve> {
        &self.inner
    }

    /// `∫ŷⁿdx + c₃` from the span start.
    pub fn denominator(&self, x: f64) -> Result<f64> {
        self.integral.eval(x)
    }

    fn denominator_zeros(&self) -> Vec<f64> {
        let nodes = self.integral.nodes();
        let values: Vec<f64> = self.integral.node_values().collect();
        let mut zeros = Vec::new();
        for i in 0..values.len() {
            if values[i] == 0.0 {
                zeros.push(nodes[i]);
            } else if i + 1 < values.len() && (values[i] < 0.0) != (values[i + 1] < 0.0) && values[i + 1] != 0.0 {
                let d = |x: f64| self.integral.eval(x).unwrap_or(f64::NAN);
                zeros.push(crate::numeric::roots::bisect_root(&d, nodes[i], nodes[i + 1]));
            }
        }
        zeros
    }

    /// The problem this family solves: f = b·yⁿ + k(x), β = α²(n+1)/(n+2)²,
    /// γ = 0 (α²b at n = -1), plus δ.
    pub fn problem(&self) -> Result<OdeProblem> {
        let p = &self.params;
        let base_k = p.k.as_const().unwrap_or(0.0);
        let f = FunctionFamily::power(p.b, p.n, base_k)?;
        let mut problem = OdeProblem::new(f, p.alpha, case_a_beta(p.alpha, p.n), case_a_gamma(p.alpha, p.b, p.n))?
            .with_delta(p.delta.clone())?;
        if let Param::Map(k) = &p.k {
            let k = Arc::clone(k);
            problem = problem.with_offset_map(move |x| k(x))?;
        }
        Ok(problem)
    }
}

/// ŷⁿ with the branch rules of the family.
fn hat_pow(v: f64, n: f64) -> Result<f64> {
    if is_odd_integer(1.0 / n) {
        Ok(signed_pow(v, n))
    } else if n == n.trunc() {
        Ok(pow(v, n))
    } else if v > 0.0 {
        Ok(v.powf(n))
    } else {
        Err(Error::breakdown(
            f64::NAN,
            "non-positive inner solution with non-integer n",
        ))
    }
}

impl Curve for PowerFamilySolution {
    fn jet(&self, x: f64) -> Result<Jet> {
        let n = self.params.n;
        let h = self.inner.jet(x)?;
        let (v, v1) = (h.y, h.dy);
        let v2 = h
            .ddy
            .ok_or_else(|| Error::Unsupported("inner solution lacks curvature".into()))?;
        let d = self.integral.eval(x)?;
        if d == 0.0 {
            return Err(Error::Pole { x });
        }
        let ratio = self.coef / d;
        let signed = is_odd_integer(n) || is_odd_integer(1.0 / n);
        let scale = if signed {
            signed_pow(ratio, 1.0 / n)
        } else if ratio > 0.0 {
            ratio.powf(1.0 / n)
        } else {
            return Err(Error::breakdown(x, "bracket of the n-th root is not positive"));
        };
        let sign = if is_even_integer(n) && v < 0.0 {
            -1.0
        } else if !signed && n != n.trunc() && v <= 0.0 {
            return Err(Error::breakdown(x, "non-positive inner solution with non-integer n"));
        } else {
            1.0
        };
        let vn = hat_pow(v, n).map_err(|_| Error::breakdown(x, "inner solution power undefined"))?;
        // y = sign·scale·ŷ, with scale'/scale = p = -ŷⁿ/(nD)
        let p = -vn / (n * d);
        let vn1 = if v != 0.0 {
            vn / v
        } else {
            hat_pow(v, n - 1.0).unwrap_or(f64::NAN)
        };
        let dp = -vn1 * v1 / d + vn * vn / (n * d * d);
        let s = sign * scale;
        let y = s * v;
        let dy = s * (v1 + p * v);
        let ddy = s * (v2 + 2.0 * p * v1 + (dp + p * p) * v);
        if !(y.is_finite() && dy.is_finite() && ddy.is_finite()) {
            return Err(Error::NonFinite { x });
        }
        Ok(Jet::new(y, dy, ddy))
    }

    fn span(&self) -> (f64, f64) {
        self.span
    }
}

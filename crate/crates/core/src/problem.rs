//! Problem instances of `ÿ + α f(y) ẏ + β f(y) ∫f(y)dy + γ f(y) + δ y = 0`.
//!
//! Parameter maps for α, β and γ are functions of the *transformed*
//! independent variable x̄ (the convention under which variable-parameter
//! problems linearize). The offset map k(x) and the shift δ(x) are
//! functions of the original variable x.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric::{MonotoneCubic, ScalarFn};

const POSITIVITY_SAMPLES: usize = 4096;

/// A scalar parameter: constant, or a map over one independent variable.
#[derive(Clone)]
pub enum Param {
    Const(f64),
    Map(ScalarFn),
}

impl Param {
    pub fn map<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Param::Map(Arc::new(f))
    }

    pub fn at(&self, x: f64) -> f64 {
        match self {
            Param::Const(c) => *c,
            Param::Map(f) => f(x),
        }
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Param::Const(c) => Some(*c),
            Param::Map(_) => None,
        }
    }

    pub fn is_map(&self) -> bool {
        matches!(self, Param::Map(_))
    }

    /// True only for the constant zero.
    pub fn is_zero(&self) -> bool {
        matches!(self, Param::Const(c) if *c == 0.0)
    }
}

impl From<f64> for Param {
    fn from(c: f64) -> Self {
        Param::Const(c)
    }
}

impl fmt::Debug for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Const(c) => write!(f, "{c}"),
            Param::Map(_) => f.write_str("<map>"),
        }
    }
}

/// A user supplied f(y), strictly positive and continuous on `domain`.
#[derive(Clone)]
pub struct GenericFn {
    eval: ScalarFn,
    domain: (f64, f64),
    table: Option<Arc<MonotoneCubic>>,
}

impl GenericFn {
    pub fn eval(&self, y: f64) -> f64 {
        (self.eval)(y)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// The interpolation table when the function came from tabulated data.
    pub fn table(&self) -> Option<&MonotoneCubic> {
        self.table.as_deref()
    }

    fn check_positive(&self) -> Result<()> {
        let (lo, hi) = self.domain;
        for i in 0..=POSITIVITY_SAMPLES {
            let y = lo + (hi - lo) * i as f64 / POSITIVITY_SAMPLES as f64;
            let v = self.eval(y);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidProblem(format!(
                    "generic f must be positive on [{lo}, {hi}], f({y}) = {v}"
                )));
            }
        }
        Ok(())
    }
}

/// The algebraic shape of f(y).
#[derive(Clone)]
pub enum FunctionFamily {
    /// f = 1
    Unit,
    /// f = b·yⁿ + k
    PowerPlusConstant {
        b: f64,
        n: f64,
        k: f64,
    },
    Generic(GenericFn),
}

impl FunctionFamily {
    pub fn power(b: f64, n: f64, k: f64) -> Result<Self> {
        if ![b, n, k].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidProblem("power family parameters must be finite".into()));
        }
        if b == 0.0 && k == 0.0 {
            return Err(Error::InvalidProblem("power family needs b != 0 or k != 0".into()));
        }
        Ok(FunctionFamily::PowerPlusConstant { b, n, k })
    }

    /// f = y
    pub fn identity() -> Self {
        FunctionFamily::PowerPlusConstant { b: 1.0, n: 1.0, k: 0.0 }
    }

    /// A generic f on the closed interval `[lo, hi]`; rejected unless f is
    /// positive at every point of a dense sample of the interval.
    pub fn generic<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F, lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::InvalidProblem(format!(
                "generic f needs a finite domain, got [{lo}, {hi}]"
            )));
        }
        let g = GenericFn {
            eval: Arc::new(f),
            domain: (lo, hi),
            table: None,
        };
        g.check_positive()?;
        Ok(FunctionFamily::Generic(g))
    }

    /// A generic f interpolated from `(y, f)` pairs with a monotone cubic.
    pub fn table(points: &[(f64, f64)]) -> Result<Self> {
        let table = Arc::new(MonotoneCubic::new(points)?);
        let (lo, hi) = table.range();
        let interp = Arc::clone(&table);
        let g = GenericFn {
            eval: Arc::new(move |y| interp.eval(y)),
            domain: (lo, hi),
            table: Some(table),
        };
        g.check_positive()?;
        Ok(FunctionFamily::Generic(g))
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self {
            FunctionFamily::Unit => 1.0,
            FunctionFamily::PowerPlusConstant { b, n, k } => b * pow(y, *n) + k,
            FunctionFamily::Generic(g) => g.eval(y),
        }
    }

    /// Same family with the additive constant replaced (power families only).
    pub fn eval_with_offset(&self, y: f64, offset: f64) -> f64 {
        match self {
            FunctionFamily::PowerPlusConstant { b, n, .. } => b * pow(y, *n) + offset,
            other => other.eval(y),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, FunctionFamily::PowerPlusConstant { b, n, k } if *b == 1.0 && *n == 1.0 && *k == 0.0)
    }

    /// True when f does not depend on y.
    pub fn is_constant(&self) -> bool {
        match self {
            FunctionFamily::Unit => true,
            FunctionFamily::PowerPlusConstant { b, n, .. } => *b == 0.0 || *n == 0.0,
            FunctionFamily::Generic(_) => false,
        }
    }

    /// Open interval of y on which the engine treats f as valid and
    /// positive. Power families are restricted to y > 0.
    pub fn positivity_domain(&self) -> (f64, f64) {
        match self {
            FunctionFamily::Unit => (f64::NEG_INFINITY, f64::INFINITY),
            FunctionFamily::Generic(g) => g.domain,
            FunctionFamily::PowerPlusConstant { b, n, k } => power_positivity(*b, *n, *k),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            FunctionFamily::Unit => Ok(()),
            FunctionFamily::PowerPlusConstant { b, n, k } => FunctionFamily::power(*b, *n, *k).map(|_| ()),
            FunctionFamily::Generic(g) => g.check_positive(),
        }
    }
}

impl fmt::Debug for FunctionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionFamily::Unit => f.write_str("Unit"),
            FunctionFamily::PowerPlusConstant { b, n, k } => f
                .debug_struct("PowerPlusConstant")
                .field("b", b)
                .field("n", n)
                .field("k", k)
                .finish(),
            FunctionFamily::Generic(g) => f.debug_struct("Generic").field("domain", &g.domain).finish(),
        }
    }
}

/// `yⁿ` using `powi` for integral exponents so negative bases stay defined.
pub(crate) fn pow(y: f64, n: f64) -> f64 {
    if n == n.trunc() && n.abs() < i32::MAX as f64 {
        y.powi(n as i32)
    } else {
        y.powf(n)
    }
}

fn power_positivity(b: f64, n: f64, k: f64) -> (f64, f64) {
    let all = (0.0, f64::INFINITY);
    let none = (0.0, 0.0);
    if b == 0.0 || n == 0.0 {
        // f is the constant b·1 + k (n = 0) or k (b = 0)
        let c = if n == 0.0 { b + k } else { k };
        return if c > 0.0 { all } else { none };
    }
    let ratio = -k / b;
    if ratio <= 0.0 {
        return if b > 0.0 { all } else { none };
    }
    let threshold = ratio.powf(1.0 / n);
    if b * n > 0.0 {
        (threshold, f64::INFINITY)
    } else {
        (0.0, threshold)
    }
}

/// One instance of the equation class.
#[derive(Clone)]
pub struct OdeProblem {
    pub f: FunctionFamily,
    pub alpha: Param,
    pub beta: Param,
    pub gamma: Param,
    /// Coefficient of the extra `δ·y` term (case b/c), a map over x.
    pub delta: Param,
    /// Replaces the constant k of a power family by k(x).
    pub offset: Option<ScalarFn>,
}

impl fmt::Debug for OdeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OdeProblem")
            .field("f", &self.f)
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .field("gamma", &self.gamma)
            .field("delta", &self.delta)
            .field("offset", &self.offset.as_ref().map(|_| "<map>"))
            .finish()
    }
}

impl OdeProblem {
    pub fn new(
        f: FunctionFamily,
        alpha: impl Into<Param>,
        beta: impl Into<Param>,
        gamma: impl Into<Param>,
    ) -> Result<Self> {
        let p = Self {
            f,
            alpha: alpha.into(),
            beta: beta.into(),
            gamma: gamma.into(),
            delta: Param::Const(0.0),
            offset: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_delta(mut self, delta: impl Into<Param>) -> Result<Self> {
        self.delta = delta.into();
        self.validate()?;
        Ok(self)
    }

    pub fn with_offset_map<F: Fn(f64) -> f64 + Send + Sync + 'static>(mut self, k: F) -> Result<Self> {
        self.offset = Some(Arc::new(k));
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.f.validate()?;
        for (name, p) in [
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
            ("delta", &self.delta),
        ] {
            if let Param::Const(c) = p {
                if !c.is_finite() {
                    return Err(Error::InvalidProblem(format!("{name} must be finite")));
                }
            }
        }
        let power = matches!(self.f, FunctionFamily::PowerPlusConstant { .. });
        if !self.delta.is_zero() && !power {
            return Err(Error::InvalidProblem(
                "a delta shift is only defined for f = b y^n + k".into(),
            ));
        }
        if self.offset.is_some() && !power {
            return Err(Error::InvalidProblem(
                "an offset map k(x) is only defined for f = b y^n + k".into(),
            ));
        }
        Ok(())
    }

    /// True when any parameter (including k(x) and δ) is a map.
    pub fn is_variable(&self) -> bool {
        self.alpha.is_map() || self.beta.is_map() || self.gamma.is_map() || self.delta.is_map() || self.offset.is_some()
    }

    /// True when α, β or γ is a map over x̄.
    pub fn has_transformed_maps(&self) -> bool {
        self.alpha.is_map() || self.beta.is_map() || self.gamma.is_map()
    }

    /// The additive constant of a power family at `x`.
    pub fn offset_at(&self, x: f64) -> f64 {
        match (&self.offset, &self.f) {
            (Some(k), _) => k(x),
            (None, FunctionFamily::PowerPlusConstant { k, .. }) => *k,
            _ => 0.0,
        }
    }

    /// f(y) at the original abscissa x.
    pub fn f_at(&self, y: f64, x: f64) -> f64 {
        match self.offset {
            Some(_) => self.f.eval_with_offset(y, self.offset_at(x)),
            None => self.f.eval(y),
        }
    }

    /// The constant parameters `(α, β, γ, δ)`, if none is a map.
    pub fn constants(&self) -> Option<(f64, f64, f64, f64)> {
        Some((
            self.alpha.as_const()?,
            self.beta.as_const()?,
            self.gamma.as_const()?,
            self.delta.as_const()?,
        ))
    }
}

/// The solvable family an [`OdeProblem`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyClass {
    AlreadyLinear,
    PainleveInce,
    CaseA,
    CaseB,
    CaseC,
    ShearFree,
    GenericLinearizable,
    VariableParams,
}

impl FamilyClass {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyClass::AlreadyLinear => "AlreadyLinear",
            FamilyClass::PainleveInce => "PainleveInce",
            FamilyClass::CaseA => "CaseA",
            FamilyClass::CaseB => "CaseB",
            FamilyClass::CaseC => "CaseC",
            FamilyClass::ShearFree => "ShearFree",
            FamilyClass::GenericLinearizable => "GenericLinearizable",
            FamilyClass::VariableParams => "VariableParams",
        }
    }
}

impl fmt::Display for FamilyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Damping regime of the linear target `ȳ'' + αȳ' + βȳ + γ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    StrongDamped,
    CriticallyDamped,
    WeakDamped,
    Growing,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::StrongDamped => "StrongDamped",
            Regime::CriticallyDamped => "CriticallyDamped",
            Regime::WeakDamped => "WeakDamped",
            Regime::Growing => "Growing",
        };
        f.write_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_needs_nonzero_term() {
        assert!(FunctionFamily::power(0.0, 2.0, 0.0).is_err());
        assert!(FunctionFamily::power(0.0, 2.0, 1.0).is_ok());
    }

    #[test]
    fn generic_rejects_nonpositive() {
        assert!(FunctionFamily::generic(|y| y, -1.0, 1.0).is_err());
        assert!(FunctionFamily::generic(|y| 1.0 + y * y, -1.0, 1.0).is_ok());
    }

    #[test]
    fn table_must_stay_positive() {
        assert!(FunctionFamily::table(&[(0.0, 1.0), (1.0, 0.0)]).is_err());
        let f = FunctionFamily::table(&[(0.0, 1.0), (1.0, 2.0), (2.0, 5.0)]).unwrap();
        assert_eq!(f.eval(1.0), 2.0);
    }

    #[test]
    fn delta_requires_power_family() {
        let p = OdeProblem::new(FunctionFamily::Unit, 1.0, 1.0, 0.0).unwrap();
        assert!(p.with_delta(1.0).is_err());
    }

    #[test]
    fn positivity_domains() {
        assert_eq!(power_positivity(1.0, 1.0, 0.0), (0.0, f64::INFINITY));
        assert_eq!(power_positivity(1.0, 2.0, -4.0), (2.0, f64::INFINITY));
        assert_eq!(power_positivity(-1.0, 2.0, 4.0), (0.0, 2.0));
        assert_eq!(power_positivity(1.0, -1.0, -1.0), (0.0, 1.0));
        assert_eq!(power_positivity(-1.0, 1.0, 0.0), (0.0, 0.0));
    }

    #[test]
    fn variable_flag() {
        let p = OdeProblem::new(FunctionFamily::identity(), Param::map(|x| x), 1.0, 0.0).unwrap();
        assert!(p.is_variable());
        assert!(p.has_transformed_maps());
        assert!(p.constants().is_none());
    }
}

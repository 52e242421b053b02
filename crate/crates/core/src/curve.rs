//! The query interface shared by every solution representation.

use crate::error::Result;

/// Value and derivatives of a solution at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub y: f64,
    pub dy: f64,
    /// Second derivative when the representation knows it analytically.
    pub ddy: Option<f64>,
}

impl Jet {
    pub fn new(y: f64, dy: f64, ddy: f64) -> Self {
        Self { y, dy, ddy: Some(ddy) }
    }
}

/// A solution `y(x)` that can be queried pointwise.
pub trait Curve: Send + Sync {
    fn jet(&self, x: f64) -> Result<Jet>;

    /// Interval on which queries are valid; closed forms return the whole line.
    fn span(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Poles inside `[lo, hi]`.
    fn poles(&self, _lo: f64, _hi: f64) -> Vec<f64> {
        Vec::new()
    }

    /// The transformed abscissa `x̄(x)` for curves produced through a
    /// nonlocal transformation.
    fn transformed_point(&self, _x: f64) -> Option<Result<f64>> {
        None
    }

    fn value(&self, x: f64) -> Result<f64> {
        Ok(self.jet(x)?.y)
    }
}

impl<C: Curve + ?Sized> Curve for std::sync::Arc<C> {
    fn jet(&self, x: f64) -> Result<Jet> {
        (**self).jet(x)
    }
    fn span(&self) -> (f64, f64) {
        (**self).span()
    }
    fn poles(&self, lo: f64, hi: f64) -> Vec<f64> {
        (**self).poles(lo, hi)
    }
    fn transformed_point(&self, x: f64) -> Option<Result<f64>> {
        (**self).transformed_point(x)
    }
}

impl<C: Curve + ?Sized> Curve for Box<C> {
    fn jet(&self, x: f64) -> Result<Jet> {
        (**self).jet(x)
    }
    fn span(&self) -> (f64, f64) {
        (**self).span()
    }
    fn poles(&self, lo: f64, hi: f64) -> Vec<f64> {
        (**self).poles(lo, hi)
    }
    fn transformed_point(&self, x: f64) -> Option<Result<f64>> {
        (**self).transformed_point(x)
    }
}

/// Adapts a closure returning `(y, ẏ, ÿ)` into a [`Curve`].
pub struct FnCurve<F> {
    f: F,
    span: (f64, f64),
}

impl<F> FnCurve<F>
where
    F: Fn(f64) -> (f64, f64, f64) + Send + Sync,
{
    pub fn new(f: F) -> Self {
        Self {
            f,
            span: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn on(f: F, lo: f64, hi: f64) -> Self {
        Self { f, span: (lo, hi) }
    }
}

impl<F> Curve for FnCurve<F>
where
    F: Fn(f64) -> (f64, f64, f64) + Send + Sync,
{
    fn jet(&self, x: f64) -> Result<Jet> {
        let (y, dy, ddy) = (self.f)(x);
        Ok(Jet::new(y, dy, ddy))
    }

    fn span(&self) -> (f64, f64) {
        self.span
    }
}

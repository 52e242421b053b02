//! Adaptive Simpson quadrature, plain and cumulative.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub const DEFAULT_QUAD_TOL: f64 = 1e-12;

const MAX_DEPTH: u32 = 50;
const MIN_DEPTH: u32 = 2;

fn sample<G: Fn(f64) -> f64 + ?Sized>(g: &G, x: f64) -> Result<f64> {
    let v = g(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { x })
    }
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn simpson<G: Fn(f64) -> f64 + ?Sized>(g: &G, p: Panel, tol: f64, depth: u32) -> Result<f64> {
    let Panel {
        a,
        b,
        fa,
        fm,
        fb,
        whole,
    } = p;
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = sample(g, lm)?;
    let frm = sample(g, rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    let floor = 8.0 * f64::EPSILON * (left.abs() + right.abs());
    let converged = depth >= MIN_DEPTH && delta.abs() <= 15.0 * tol.max(floor);
    if converged || depth >= MAX_DEPTH || lm <= a || rm >= b {
        return Ok(left + right + delta / 15.0);
    }
    let l = simpson(
        g,
        Panel {
            a,
            b: m,
            fa,
            fm: flm,
            fb: fm,
            whole: left,
        },
        0.5 * tol,
        depth + 1,
    )?;
    let r = simpson(
        g,
        Panel {
            a: m,
            b,
            fa: fm,
            fm: frm,
            fb,
            whole: right,
        },
        0.5 * tol,
        depth + 1,
    )?;
    Ok(l + r)
}

/// Integrates `g` over `[a, b]` (signed when `b < a`) to absolute tolerance `tol`.
pub fn integrate<G: Fn(f64) -> f64 + ?Sized>(g: &G, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(g, b, a, tol).map(|v| -v);
    }
    let fa = sample(g, a)?;
    let fb = sample(g, b)?;
    let m = 0.5 * (a + b);
    let fm = sample(g, m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(
        g,
        Panel {
            a,
            b,
            fa,
            fm,
            fb,
            whole,
        },
        tol,
        0,
    )
}

/// Values of `∫_a^{grid[i]} g` for every grid point, each panel to `tol`.
///
/// The grid must be strictly increasing; `a` may lie anywhere, the first
/// panel is `[a, grid[0]]`.
pub fn cumulative_quadrature<G: Fn(f64) -> f64 + ?Sized>(g: &G, a: f64, grid: &[f64], tol: f64) -> Result<Vec<f64>> {
    check_increasing(grid)?;
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    let mut prev = a;
    for &x in grid {
        acc += integrate(g, prev, x, tol)?;
        out.push(acc);
        prev = x;
    }
    Ok(out)
}

pub(crate) fn check_increasing(xs: &[f64]) -> Result<()> {
    for (i, w) in xs.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::NonMonotone { index: i + 1 });
        }
    }
    Ok(())
}

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A running integral `x ↦ offset + ∫_lo^x g` over `[lo, hi]`.
///
/// Values at a uniform node table are computed once; a query integrates
/// only from the nearest node.
#[derive(Clone)]
pub struct CumulativeIntegral {
    g: ScalarFn,
    lo: f64,
    hi: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
    offset: f64,
    tol: f64,
}

impl fmt::Debug for CumulativeIntegral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CumulativeIntegral")
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("nodes", &self.nodes.len())
            .field("offset", &self.offset)
            .finish()
    }
}

impl CumulativeIntegral {
    pub fn new(g: ScalarFn, lo: f64, hi: f64, panels: usize, tol: f64) -> Result<Self> {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "cumulative integral needs a finite interval, got [{lo}, {hi}]"
            )));
        }
        let panels = panels.max(1);
        let nodes: Vec<f64> = (0..=panels)
            .map(|i| lo + (hi - lo) * i as f64 / panels as f64)
            .collect();
        let mut values = vec![0.0];
        values.extend(cumulative_quadrature(&*g, lo, &nodes[1..], tol)?);
        Ok(Self {
            g,
            lo,
            hi,
            nodes,
            values,
            offset: 0.0,
            tol,
        })
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn span(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Integral values at the node table, including the offset.
    pub fn node_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(move |v| v + self.offset)
    }

    pub fn integrand(&self, x: f64) -> f64 {
        (self.g)(x)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let slack = 1e-12 * (self.hi - self.lo);
        if x < self.lo - slack || x > self.hi + slack {
            return Err(Error::OutOfSpan {
                x,
                lo: self.lo,
                hi: self.hi,
            });
        }
        let h = (self.hi - self.lo) / (self.nodes.len() - 1) as f64;
        let pos = ((x - self.lo) / h).round();
        let i = (pos.max(0.0) as usize).min(self.nodes.len() - 1);
        let tail = integrate(&*self.g, self.nodes[i], x, self.tol)?;
        Ok(self.offset + self.values[i] + tail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_integrand_reproduces_grid() {
        let grid = [0.5, 1.0, 2.0, 3.5];
        let v = cumulative_quadrature(&|_| 1.0, 0.0, &grid, 1e-12).unwrap();
        for (g, v) in grid.iter().zip(v) {
            assert!((g - v).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_integrand() {
        let grid: Vec<f64> = (1..=10).map(|i| i as f64 * 0.3).collect();
        let v = cumulative_quadrature(&|x| x, 0.0, &grid, 1e-12).unwrap();
        for (g, v) in grid.iter().zip(v) {
            assert!((g * g / 2.0 - v).abs() < 1e-12);
        }
    }

    #[test]
    fn reciprocal_gives_log() {
        let v = cumulative_quadrature(&|x| 1.0 / x, 1.0, &[std::f64::consts::E], 1e-12).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_limits_are_signed() {
        let fwd = integrate(&|x: f64| x.sin(), 0.0, 2.0, 1e-12).unwrap();
        let back = integrate(&|x: f64| x.sin(), 2.0, 0.0, 1e-12).unwrap();
        assert_eq!(fwd, -back);
        assert!((fwd - (1.0 - 2f64.cos())).abs() < 1e-12);
    }

    #[test]
    fn non_finite_integrand_is_rejected() {
        let err = integrate(&|x: f64| 1.0 / x, 0.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn unordered_grid_is_rejected() {
        let err = cumulative_quadrature(&|x| x, 0.0, &[1.0, 0.5], 1e-12).unwrap_err();
        assert_eq!(err, Error::NonMonotone { index: 1 });
    }

    #[test]
    fn cumulative_integral_queries_between_nodes() {
        let ci = CumulativeIntegral::new(Arc::new(|x: f64| x.cos()), 0.0, 3.0, 16, 1e-13)
            .unwrap()
            .with_offset(2.0);
        for &x in &[0.0, 0.1, 1.234, 2.999, 3.0] {
            assert!((ci.eval(x).unwrap() - (2.0 + x.sin())).abs() < 1e-12);
        }
        assert!(matches!(ci.eval(3.5), Err(Error::OutOfSpan { .. })));
    }
}

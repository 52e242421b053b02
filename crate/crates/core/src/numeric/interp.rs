//! Shape-preserving piecewise cubic interpolation (Fritsch–Carlson).

use crate::error::{Error, Result};
use crate::numeric::quadrature::check_increasing;

/// Piecewise cubic Hermite interpolant with Fritsch–Carlson limited slopes.
///
/// Monotone data stay monotone and positive data with positive slopes stay
/// positive between knots. Queries outside the knot range clamp to the end
/// values.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidProblem(
                "interpolation table needs at least two points".into(),
            ));
        }
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem(
                "interpolation table has non-finite entries".into(),
            ));
        }
        check_increasing(&xs)?;
        let n = xs.len();
        let secants: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            slopes[i] = if secants[i - 1] * secants[i] <= 0.0 {
                0.0
            } else {
                0.5 * (secants[i - 1] + secants[i])
            };
        }
        for i in 0..n - 1 {
            if secants[i] == 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
                continue;
            }
            let a = slopes[i] / secants[i];
            let b = slopes[i + 1] / secants[i];
            let r = a * a + b * b;
            if r > 9.0 {
                let t = 3.0 / r.sqrt();
                slopes[i] = t * a * secants[i];
                slopes[i + 1] = t * b * secants[i];
            }
        }
        Ok(Self { xs, ys, slopes })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = self.xs.partition_point(|&k| k <= x) - 1;
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let h00 = (2.0 * t - 3.0) * t * t + 1.0;
        let h10 = ((t - 2.0) * t + 1.0) * t;
        let h01 = (3.0 - 2.0 * t) * t * t;
        let h11 = (t - 1.0) * t * t;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots_and_lines() {
        let m = MonotoneCubic::new(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]).unwrap();
        assert_eq!(m.eval(1.0), 3.0);
        assert!((m.eval(1.5) - 4.0).abs() < 1e-15);
        assert_eq!(m.eval(-1.0), 1.0);
        assert_eq!(m.eval(3.0), 5.0);
    }

    #[test]
    fn stays_monotone_on_step_data() {
        let m = MonotoneCubic::new(&[(0.0, 0.0), (1.0, 0.0), (2.0, 1.0), (3.0, 1.0)]).unwrap();
        let mut prev = m.eval(0.0);
        for i in 1..=300 {
            let v = m.eval(i as f64 / 100.0);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn rejects_unsorted() {
        assert!(MonotoneCubic::new(&[(1.0, 0.0), (0.0, 1.0)]).is_err());
    }
}

//! `ÿ + αyẏ + (α²/9)y³ + γy = 0` through `y = (3/α)·ẇ/w`.
//!
//! The generator satisfies `w''' + γẇ = 0`, giving a quadratic (γ = 0),
//! exponentials (γ < 0) or a trigonometric pair (γ > 0). The commonly printed
//! γ > 0 form `c₁e^(√γx) − c₂e^(−√γx) + c₃` is available through
//! [`painleve_ince_literal`]; it solves the equation with the sign of γ
//! reversed.

use crate::curve::{Curve, Jet};
use crate::error::{Error, Result};
use crate::numeric::sign_changes;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Generator {
    Quadratic,
    Exponential(f64),
    Trigonometric(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PainleveInceSolution {
    pub alpha: f64,
    pub gamma: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    generator: Generator,
    literal: bool,
}

/// `3(2c₁x + c₂) / (α(c₁x² + c₂x + c₃))`.
pub fn rational_form(alpha: f64, c1: f64, c2: f64, c3: f64, x: f64) -> f64 {
    3.0 * (2.0 * c1 * x + c2) / (alpha * (c1 * x * x + c2 * x + c3))
}

pub fn painleve_ince(alpha: f64, gamma: f64, c1: f64, c2: f64, c3: f64) -> Result<PainleveInceSolution> {
    check(alpha, gamma, [c1, c2, c3])?;
    let generator = if gamma == 0.0 {
        Generator::Quadratic
    } else if gamma < 0.0 {
        Generator::Exponential((-gamma).sqrt())
    } else {
        Generator::Trigonometric(gamma.sqrt())
    };
    Ok(PainleveInceSolution {
        alpha,
        gamma,
        c1,
        c2,
        c3,
        generator,
        literal: false,
    })
}

/// The printed γ > 0 form `w = c₁e^(√γx) − c₂e^(−√γx) + c₃`, kept to
/// document that it does not solve the equation as stated.
pub fn painleve_ince_literal(alpha: f64, gamma: f64, c1: f64, c2: f64, c3: f64) -> Result<PainleveInceSolution> {
    check(alpha, gamma, [c1, c2, c3])?;
    if gamma <= 0.0 {
        return Err(Error::InvalidProblem(
            "the literal form is printed for gamma > 0 only".into(),
        ));
    }
    Ok(PainleveInceSolution {
        alpha,
        gamma,
        c1,
        c2: -c2,
        c3,
        generator: Generator::Exponential(gamma.sqrt()),
        literal: true,
    })
}

fn check(alpha: f64, gamma: f64, c: [f64; 3]) -> Result<()> {
    if alpha == 0.0 {
        return Err(Error::InvalidProblem("alpha must be nonzero".into()));
    }
    if !alpha.is_finite() || !gamma.is_finite() || c.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidProblem("parameters must be finite".into()));
    }
    Ok(())
}

impl PainleveInceSolution {
    pub fn is_literal(&self) -> bool {
        self.literal
    }

    /// The solution with `y(x0) = y0`, `ẏ(x0) = dy0`, scaled so w(x0) = 1.
    pub fn fit(alpha: f64, gamma: f64, x0: f64, y0: f64, dy0: f64) -> Result<Self> {
        let unit = painleve_ince(alpha, gamma, 1.0, 1.0, 1.0)?;
        let w1 = alpha * y0 / 3.0;
        let w2 = alpha * dy0 / 3.0 + w1 * w1;
        let [p, q] = unit.basis(x0);
        let det = p[1] * q[2] - p[2] * q[1];
        let c1 = (w1 * q[2] - w2 * q[1]) / det;
        let c2 = (p[1] * w2 - p[2] * w1) / det;
        let c3 = 1.0 - c1 * p[0] - c2 * q[0];
        painleve_ince(alpha, gamma, c1, c2, c3)
    }

    /// Value, slope and curvature of the two non-constant generator terms.
    fn basis(&self, x: f64) -> [[f64; 3]; 2] {
        match self.generator {
            Generator::Quadratic => [[x * x, 2.0 * x, 2.0], [x, 1.0, 0.0]],
            Generator::Exponential(m) => {
                let (e, f) = ((m * x).exp(), (-m * x).exp());
                [[e, m * e, m * m * e], [f, -m * f, m * m * f]]
            }
            Generator::Trigonometric(m) => {
                let (s, c) = (m * x).sin_cos();
                [[s, m * c, -m * m * s], [c, -m * s, -m * m * c]]
            }
        }
    }

    /// `[w, ẇ, ẅ, w''']` at `x`.
    pub fn generator(&self, x: f64) -> [f64; 4] {
        let (c1, c2, c3) = (self.c1, self.c2, self.c3);
        match self.generator {
            Generator::Quadratic => [c1 * x * x + c2 * x + c3, 2.0 * c1 * x + c2, 2.0 * c1, 0.0],
            Generator::Exponential(m) => {
                let (p, q) = (c1 * (m * x).exp(), c2 * (-m * x).exp());
                [p + q + c3, m * (p - q), m * m * (p + q), m * m * m * (p - q)]
            }
            Generator::Trigonometric(m) => {
                let (s, c) = (m * x).sin_cos();
                let (u, v) = (c1 * s + c2 * c, c1 * c - c2 * s);
                [u + c3, m * v, -m * m * u, -m * m * m * v]
            }
        }
    }

    /// Zeros of w in `[lo, hi]`, where y has poles.
    pub fn poles_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let freq = match self.generator {
            Generator::Trigonometric(m) | Generator::Exponential(m) => m,
            Generator::Quadratic => 1.0,
        };
        let samples = ((hi - lo).abs() * freq * 64.0).clamp(4096.0, 1e6) as usize;
        let w = |x: f64| self.generator(x)[0];
        sign_changes(&w, lo, hi, samples)
    }
}

impl Curve for PainleveInceSolution {
    fn jet(&self, x: f64) -> Result<Jet> {
        let [w, w1, w2, w3] = self.generator(x);
        if w == 0.0 {
            return Err(Error::Pole { x });
        }
        let s = 3.0 / self.alpha;
        let r = w1 / w;
        let y = match self.generator {
            Generator::Quadratic => rational_form(self.alpha, self.c1, self.c2, self.c3, x),
            _ => 3.0 * w1 / (self.alpha * w),
        };
        let dy = s * (w2 / w - r * r);
        let ddy = s * (w3 / w - 3.0 * w2 * r / w + 2.0 * r * r * r);
        if !(y.is_finite() && dy.is_finite() && ddy.is_finite()) {
            return Err(Error::Pole { x });
        }
        Ok(Jet::new(y, dy, ddy))
    }

    fn poles(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.poles_in(lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(s: &PainleveInceSolution, gamma: f64, x: f64) -> f64 {
        let j = s.jet(x).unwrap();
        let a = s.alpha;
        j.ddy.unwrap() + a * j.y * j.dy + a * a / 9.0 * j.y.powi(3) + gamma * j.y
    }

    #[test]
    fn rational_example() {
        let s = painleve_ince(3.0, 0.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(s.value(1.0).unwrap(), 1.0);
        assert!(s.poles_in(-5.0, 5.0).is_empty());
    }

    #[test]
    fn reciprocal_example() {
        let s = painleve_ince(3.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        assert!((s.value(2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(residual(&s, 0.0, 2.0).abs() < 1e-14);
        let p = s.poles_in(-1.0, 1.0);
        assert_eq!(p.len(), 1);
        assert!(p[0].abs() < 1e-12);
    }

    #[test]
    fn constant_solution_for_negative_gamma() {
        let s = painleve_ince(3.0, -1.0, 1.0, 0.0, 0.0).unwrap();
        for x in [-1.0, 0.0, 2.5] {
            let j = s.jet(x).unwrap();
            assert!((j.y - 1.0).abs() < 1e-15 && j.dy.abs() < 1e-15);
        }
    }

    #[test]
    fn trigonometric_branch() {
        let s = painleve_ince(3.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        for i in 1..100 {
            let x = std::f64::consts::PI * i as f64 / 100.0;
            let expect = -x.sin() / (x.cos() + 1.0);
            assert!((s.value(x).unwrap() - expect).abs() < 1e-12);
            assert!(residual(&s, 1.0, x).abs() < 1e-10);
        }
    }

    #[test]
    fn literal_form_flips_gamma() {
        let s = painleve_ince_literal(3.0, 1.0, 1.0, 0.5, 2.0).unwrap();
        let worst_as_printed = (0..20)
            .map(|i| residual(&s, 1.0, 0.1 * i as f64).abs())
            .fold(0.0, f64::max);
        let worst_flipped = (0..20)
            .map(|i| residual(&s, -1.0, 0.1 * i as f64).abs())
            .fold(0.0, f64::max);
        assert!(worst_as_printed > 1e-2);
        assert!(worst_flipped < 1e-12);
    }

    #[test]
    fn fit_reproduces_initial_conditions() {
        for gamma in [0.0, -2.0, 1.5] {
            let s = PainleveInceSolution::fit(2.0, gamma, 0.3, 0.7, -0.4).unwrap();
            let j = s.jet(0.3).unwrap();
            assert!((j.y - 0.7).abs() < 1e-13 && (j.dy + 0.4).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_zero_alpha() {
        assert!(painleve_ince(0.0, 1.0, 1.0, 1.0, 1.0).is_err());
    }
}

//! Embedded Runge–Kutta 4(5) integration with dense output.
//!
//! The tableau is Dormand–Prince: the fifth-order solution is propagated and
//! the embedded fourth-order one only feeds the error estimate. Dense output
//! is a cubic Hermite interpolant through the accepted step end points.

use crate::error::{Error, Result};

pub const DEFAULT_ODE_TOL: f64 = 1e-10;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

// fifth-order weights minus fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

// Dense-output weights of the same pair. Their combination measures how far
// the cubic Hermite interpolant strays from the fourth-order continuous
// extension at mid-step, so accepted steps also bound interpolation error.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const SAFETY: f64 = 0.9;
const MAX_GROWTH: f64 = 5.0;
const MIN_SHRINK: f64 = 0.2;
const MAX_STEPS: usize = 2_000_000;

/// Accepted step mesh with states and slopes at every mesh point.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    xs: Vec<f64>,
    ys: Vec<Vec<f64>>,
    fs: Vec<Vec<f64>>,
}

impl DenseSolution {
    pub fn dim(&self) -> usize {
        self.ys[0].len()
    }

    pub fn span(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn mesh(&self) -> &[f64] {
        &self.xs
    }

    pub fn steps(&self) -> usize {
        self.xs.len() - 1
    }

    fn locate(&self, x: f64) -> Result<usize> {
        let (lo, hi) = self.span();
        let slack = 1e-12 * (hi - lo).abs().max(1.0);
        if !(x >= lo - slack && x <= hi + slack) {
            return Err(Error::OutOfSpan { x, lo, hi });
        }
        let i = self.xs.partition_point(|&m| m <= x);
        Ok(i.clamp(1, self.xs.len() - 1) - 1)
    }

    /// Interpolated state at `x`.
    pub fn state(&self, x: f64) -> Result<Vec<f64>> {
        let i = self.locate(x)?;
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let h00 = (2.0 * t - 3.0) * t * t + 1.0;
        let h10 = ((t - 2.0) * t + 1.0) * t;
        let h01 = (3.0 - 2.0 * t) * t * t;
        let h11 = (t - 1.0) * t * t;
        Ok((0..self.dim())
            .map(|k| {
                h00 * self.ys[i][k] + h10 * h * self.fs[i][k] + h01 * self.ys[i + 1][k] + h11 * h * self.fs[i + 1][k]
            })
            .collect())
    }

    /// Derivative of the interpolant at `x`.
    pub fn derivative(&self, x: f64) -> Result<Vec<f64>> {
        let i = self.locate(x)?;
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let d00 = 6.0 * t * (t - 1.0) / h;
        let d10 = (3.0 * t - 4.0) * t + 1.0;
        let d01 = -d00;
        let d11 = (3.0 * t - 2.0) * t;
        Ok((0..self.dim())
            .map(|k| d00 * self.ys[i][k] + d10 * self.fs[i][k] + d01 * self.ys[i + 1][k] + d11 * self.fs[i + 1][k])
            .collect())
    }

    pub fn final_state(&self) -> &[f64] {
        self.ys.last().unwrap()
    }
}

fn eval_rhs<R>(rhs: &mut R, x: f64, y: &[f64], out: &mut [f64]) -> Result<()>
where
    R: FnMut(f64, &[f64], &mut [f64]),
{
    rhs(x, y, out);
    if out.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { x })
    }
}

struct Stepper {
    k: Vec<Vec<f64>>,
    tmp: Vec<f64>,
}

impl Stepper {
    fn new(dim: usize) -> Self {
        Self {
            k: vec![vec![0.0; dim]; 7],
            tmp: vec![0.0; dim],
        }
    }

    /// One Dormand–Prince step from `(x, y)` with `k[0]` already holding
    /// `f(x, y)`. Leaves the new state in `out` and `f(x+h, out)` in `k[6]`.
    fn step<R>(&mut self, rhs: &mut R, x: f64, y: &[f64], h: f64, out: &mut [f64]) -> Result<()>
    where
        R: FnMut(f64, &[f64], &mut [f64]),
    {
        for s in 1..7 {
            for (d, yd) in y.iter().enumerate() {
                let mut acc = 0.0;
                for (j, a) in A[s].iter().enumerate().take(s) {
                    acc += a * self.k[j][d];
                }
                self.tmp[d] = yd + h * acc;
            }
            eval_rhs(rhs, x + C[s] * h, &self.tmp, &mut self.k[s])?;
        }
        // row 7 of A is the fifth-order weight vector (FSAL)
        out.copy_from_slice(&self.tmp);
        Ok(())
    }

    /// Scaled norms of the embedded error and of the mid-step Hermite
    /// interpolation error.
    fn error_norms(&self, y: &[f64], y_new: &[f64], h: f64, tol: f64) -> (f64, f64) {
        let mut step_err: f64 = 0.0;
        let mut interp_err: f64 = 0.0;
        for d in 0..y.len() {
            let mut e = 0.0;
            let mut m = 0.0;
            for s in 0..7 {
                e += E[s] * self.k[s][d];
                m += D[s] * self.k[s][d];
            }
            let scale = tol * (1.0 + y[d].abs().max(y_new[d].abs()));
            step_err = step_err.max((h * e).abs() / scale);
            interp_err = interp_err.max((h * m).abs() / (16.0 * scale));
        }
        (step_err, interp_err)
    }
}

fn step_factor(step_err: f64, interp_err: f64) -> f64 {
    let a = if step_err == 0.0 {
        MAX_GROWTH
    } else {
        SAFETY * step_err.powf(-0.2)
    };
    let b = if interp_err == 0.0 {
        MAX_GROWTH
    } else {
        SAFETY * interp_err.powf(-0.25)
    };
    a.min(b)
}

fn initial_step<R>(rhs: &mut R, x0: f64, y0: &[f64], f0: &[f64], dir: f64, tol: f64) -> Result<f64>
where
    R: FnMut(f64, &[f64], &mut [f64]),
{
    let scale = |v: f64| tol * (1.0 + v.abs());
    let d0 = y0.iter().map(|v| (v / scale(*v)).powi(2)).sum::<f64>().sqrt();
    let d1 = y0
        .iter()
        .zip(f0)
        .map(|(v, f)| (f / scale(*v)).powi(2))
        .sum::<f64>()
        .sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(v, f)| v + dir * h0 * f).collect();
    let mut f1 = vec![0.0; y0.len()];
    eval_rhs(rhs, x0 + dir * h0, &y1, &mut f1)?;
    let d2 = y0
        .iter()
        .zip(f0.iter().zip(&f1))
        .map(|(v, (a, b))| ((b - a) / scale(*v)).powi(2))
        .sum::<f64>()
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1))
}

/// Integrates `y' = rhs(x, y)` from `x0` to `x_end` (either direction).
///
/// Each accepted step keeps the estimated local error below
/// `tol · (1 + |y|)` componentwise.
pub fn integrate<R>(mut rhs: R, x0: f64, y0: &[f64], x_end: f64, tol: f64) -> Result<DenseSolution>
where
    R: FnMut(f64, &[f64], &mut [f64]),
{
    if !(1e-14..=1e-2).contains(&tol) {
        return Err(Error::InvalidProblem(format!(
            "integration tolerance {tol:e} outside [1e-14, 1e-2]"
        )));
    }
    if y0.is_empty() {
        return Err(Error::InvalidProblem("empty initial state".into()));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { x: x0 });
    }
    let dim = y0.len();
    let dir = if x_end >= x0 { 1.0 } else { -1.0 };
    let length = (x_end - x0).abs();

    let mut stepper = Stepper::new(dim);
    let mut x = x0;
    let mut y = y0.to_vec();
    eval_rhs(&mut rhs, x, &y, &mut stepper.k[0])?;

    let mut xs = vec![x];
    let mut ys = vec![y.clone()];
    let mut fs = vec![stepper.k[0].clone()];

    if length == 0.0 {
        xs.push(x);
        ys.push(y.clone());
        fs.push(stepper.k[0].clone());
        return Ok(DenseSolution { xs, ys, fs });
    }

    let mut h = initial_step(&mut rhs, x0, &y, &stepper.k[0].clone(), dir, tol)?.min(length);
    let mut y_new = vec![0.0; dim];
    let mut last_rejected = false;
    for _ in 0..MAX_STEPS {
        let remaining = (x_end - x).abs();
        if remaining <= 1e-14 * length.max(1.0) {
            break;
        }
        let hmin = 16.0 * f64::EPSILON * x.abs().max(length);
        if h < hmin {
            return Err(Error::StepUnderflow { x, h });
        }
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        stepper.step(&mut rhs, x, &y, dir * step, &mut y_new)?;
        let (step_err, interp_err) = stepper.error_norms(&y, &y_new, step, tol);
        let err = step_err.max(interp_err);
        if !err.is_finite() {
            h *= MIN_SHRINK;
            last_rejected = true;
            continue;
        }
        if err <= 1.0 {
            x = if last { x_end } else { x + dir * step };
            std::mem::swap(&mut y, &mut y_new);
            let f_end = stepper.k[6].clone();
            stepper.k[0].copy_from_slice(&f_end);
            xs.push(x);
            ys.push(y.clone());
            fs.push(f_end);
            let mut factor = step_factor(step_err, interp_err).clamp(MIN_SHRINK, MAX_GROWTH);
            if last_rejected {
                factor = factor.min(1.0);
            }
            h = step * factor;
            last_rejected = false;
            if last {
                break;
            }
        } else {
            h = step * step_factor(step_err, interp_err).clamp(MIN_SHRINK, 1.0);
            last_rejected = true;
        }
    }
    if (x - x_end).abs() > 1e-14 * length.max(1.0) {
        return Err(Error::StepUnderflow { x, h });
    }

    if dir < 0.0 {
        xs.reverse();
        ys.reverse();
        fs.reverse();
    }
    Ok(DenseSolution { xs, ys, fs })
}

/// Dense solutions on both sides of an interior initial point.
#[derive(Debug, Clone)]
pub struct SpanSolution {
    left: Option<DenseSolution>,
    right: Option<DenseSolution>,
    x0: f64,
    span: (f64, f64),
}

impl SpanSolution {
    pub fn span(&self) -> (f64, f64) {
        self.span
    }

    pub fn origin(&self) -> f64 {
        self.x0
    }

    fn side(&self, x: f64) -> Result<&DenseSolution> {
        let pick = if x < self.x0 { &self.left } else { &self.right };
        pick.as_ref()
            .or(self.left.as_ref())
            .or(self.right.as_ref())
            .ok_or(Error::OutOfSpan {
                x,
                lo: self.span.0,
                hi: self.span.1,
            })
    }

    pub fn state(&self, x: f64) -> Result<Vec<f64>> {
        self.side(x)?.state(x)
    }

    pub fn steps(&self) -> usize {
        self.left.as_ref().map_or(0, |d| d.steps()) + self.right.as_ref().map_or(0, |d| d.steps())
    }
}

/// Integrates from the interior point `x0` out to both ends of `span`.
pub fn integrate_span<R>(rhs: R, x0: f64, y0: &[f64], span: (f64, f64), tol: f64) -> Result<SpanSolution>
where
    R: FnMut(f64, &[f64], &mut [f64]) + Clone,
{
    let (lo, hi) = span;
    if !(lo <= x0 && x0 <= hi) || !(hi > lo) {
        return Err(Error::InvalidProblem(format!(
            "initial point {x0} must lie in span [{lo}, {hi}]"
        )));
    }
    let left = if x0 > lo {
        Some(integrate(rhs.clone(), x0, y0, lo, tol)?)
    } else {
        None
    };
    let right = if hi > x0 {
        Some(integrate(rhs, x0, y0, hi, tol)?)
    } else {
        None
    };
    Ok(SpanSolution { left, right, x0, span })
}

/// Fixed-step Dormand–Prince (fifth-order solution only); returns the
/// state at `x_end`. Used for convergence-order checks.
pub fn integrate_fixed<R>(mut rhs: R, x0: f64, y0: &[f64], x_end: f64, steps: usize) -> Result<Vec<f64>>
where
    R: FnMut(f64, &[f64], &mut [f64]),
{
    let dim = y0.len();
    let mut stepper = Stepper::new(dim);
    let h = (x_end - x0) / steps as f64;
    let mut y = y0.to_vec();
    let mut y_new = vec![0.0; dim];
    for i in 0..steps {
        let x = x0 + h * i as f64;
        eval_rhs(&mut rhs, x, &y, &mut stepper.k[0])?;
        stepper.step(&mut rhs, x, &y, h, &mut y_new)?;
        std::mem::swap(&mut y, &mut y_new);
    }
    Ok(y)
}

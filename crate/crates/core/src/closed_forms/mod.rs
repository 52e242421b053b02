//! Explicit solution families of the nonlinear equation.

mod painleve_ince;
mod power_family;
pub(crate) mod shear_free;

pub use painleve_ince::{painleve_ince, painleve_ince_literal, rational_form, PainleveInceSolution};
pub use power_family::{case_a, case_b, case_c, PowerFamilySolution, PowerParams, VariablePowerParams};
pub use shear_free::{shear_free, shear_free_problem};

/// Half-width of the band around a pole that samplers must skip.
pub const POLE_GUARD: f64 = 1e-6;

/// Points of `[lo, hi]` on a uniform grid of `count` points that keep at
/// least [`POLE_GUARD`] away from every pole.
pub fn pole_free_grid(lo: f64, hi: f64, count: usize, poles: &[f64]) -> Vec<f64> {
    let count = count.max(2);
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .filter(|x| poles.iter().all(|p| (x - p).abs() > POLE_GUARD))
        .collect()
}

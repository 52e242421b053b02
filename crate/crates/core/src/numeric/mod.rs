//! Numerical kernels shared by every solution pathway.

pub mod integrate;
pub mod interp;
pub mod quadrature;
pub mod roots;

pub use integrate::{integrate, integrate_fixed, integrate_span, DenseSolution, SpanSolution, DEFAULT_ODE_TOL};
pub use interp::MonotoneCubic;
pub use quadrature::{cumulative_quadrature, CumulativeIntegral, ScalarFn, DEFAULT_QUAD_TOL};
pub use roots::{invert_monotone, sign_changes, DEFAULT_INVERT_TOL};

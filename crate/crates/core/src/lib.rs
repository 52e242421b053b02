//! Classification, linearization and closed-form evaluation for
//!
//! ```text
//! ÿ + α·f(y)·ẏ + β·f(y)·∫f(y)dy + γ·f(y) (+ δ·y) = 0
//! ```
//!
//! A problem is assigned a [`FamilyClass`], which selects its pathway:
//! explicit families ([`closed_forms`]), the nonlocal map to
//! `ȳ'' + αȳ' + βȳ + γ = 0` and back ([`linearize`], [`linear_solver`]), or
//! direct numeric integration as an independent oracle ([`verify`]).
//!
//! ```
//! use painlin::{classify, solve, FamilyClass, FunctionFamily, OdeProblem, SolveRequest, Start};
//!
//! let p = OdeProblem::new(FunctionFamily::identity(), 3.0, 2.0, 0.0).unwrap();
//! assert_eq!(classify(&p).unwrap(), FamilyClass::PainleveInce);
//! let s = solve(&p, &SolveRequest::new((0.0, 3.0), Start::Constants(vec![1.0, 0.0, 1.0]))).unwrap();
//! assert_eq!(s.curve.value(1.0).unwrap(), 1.0);
//! ```

// `!(a < b)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod closed_forms;
pub mod curve;
pub mod error;
pub mod linear_solver;
pub mod linearize;
pub mod numeric;
pub mod physics;
pub mod pipeline;
pub mod problem;
pub mod verify;

pub use classify::{classify, classify_detailed, dual_exponent, Classification};
pub use curve::{Curve, FnCurve, Jet};
pub use error::{Error, Result};
pub use linear_solver::{classify_damping, solve_constant, solve_variable, InitialConditions, LinearClosedForm};
pub use linearize::{antiderivative, forward_map, linearize, pullback, LinearProblem, ParametricCurve, TransformTrace};
pub use pipeline::{solve, Solution, SolveRequest, Start};
pub use problem::{FamilyClass, FunctionFamily, OdeProblem, Param, Regime};

//! Assignment of a problem to the family that decides its solution pathway.

use crate::error::{Error, Result};
use crate::problem::{FamilyClass, FunctionFamily, OdeProblem, Param};

/// Relative tolerance for the algebraic parameter constraints.
pub const CONSTRAINT_REL_TOL: f64 = 1e-12;

pub(crate) fn rel_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= CONSTRAINT_REL_TOL * a.abs().max(b.abs())
}

/// β = 2α²/9, the Painlevé–Ince constraint.
pub fn painleve_ince_beta(alpha: f64) -> f64 {
    2.0 * alpha * alpha / 9.0
}

/// β = α²(n+1)/(n+2)², the constraint of the f = b·yⁿ + k families.
pub fn case_a_beta(alpha: f64, n: f64) -> f64 {
    alpha * alpha * (n + 1.0) / ((n + 2.0) * (n + 2.0))
}

/// The γ a power family must carry: 0, or α²b in the n = -1 limit.
pub fn case_a_gamma(alpha: f64, b: f64, n: f64) -> f64 {
    if n == -1.0 {
        alpha * alpha * b
    } else {
        0.0
    }
}

/// The exponent pair `(n, -n/(n+1))` linked by the k-independent transformation.
pub fn dual_exponent(n: f64) -> Result<(f64, f64)> {
    if n == -1.0 {
        return Err(Error::UndefinedDual);
    }
    // + 0.0 folds -0 into 0
    Ok((n, -n / (n + 1.0) + 0.0))
}

/// A class plus the constraints that selected it.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub class: FamilyClass,
    pub matched: Vec<String>,
}

pub fn classify(problem: &OdeProblem) -> Result<FamilyClass> {
    classify_detailed(problem).map(|c| c.class)
}

pub fn classify_detailed(problem: &OdeProblem) -> Result<Classification> {
    problem.validate()?;
    let done = |class, matched: Vec<&str>| {
        Ok(Classification {
            class,
            matched: matched.into_iter().map(String::from).collect(),
        })
    };

    if problem.f.is_constant() && problem.offset.is_none() {
        return done(FamilyClass::AlreadyLinear, vec!["f constant"]);
    }

    if let FunctionFamily::PowerPlusConstant { b, n, k } = problem.f {
        if b == 1.0
            && n == 0.5
            && k == 0.0
            && problem.offset.is_none()
            && problem.alpha.is_zero()
            && problem.gamma.is_zero()
            && problem.delta.is_zero()
            && problem.beta.is_map()
        {
            return done(
                FamilyClass::ShearFree,
                vec!["f = y^(1/2)", "alpha = 0", "gamma = 0", "beta(x) = -3F(x)/2"],
            );
        }

        if let (Some(alpha), Some(beta)) = (problem.alpha.as_const(), problem.beta.as_const()) {
            if alpha != 0.0 && b != 0.0 && n != -2.0 {
                if problem.f.is_identity()
                    && problem.offset.is_none()
                    && problem.delta.is_zero()
                    && problem.gamma.as_const().is_some()
                    && rel_eq(beta, painleve_ince_beta(alpha))
                {
                    return done(
                        FamilyClass::PainleveInce,
                        vec!["f = y", "beta = 2 alpha^2 / 9", "delta = 0"],
                    );
                }
                let gamma_ok = match problem.gamma {
                    Param::Const(g) => rel_eq(g, case_a_gamma(alpha, b, n)),
                    Param::Map(_) => false,
                };
                if gamma_ok && rel_eq(beta, case_a_beta(alpha, n)) {
                    let gamma_note = if n == -1.0 {
                        "gamma = alpha^2 b (n = -1)"
                    } else {
                        "gamma = 0"
                    };
                    let beta_note = "beta = alpha^2 (n+1)/(n+2)^2";
                    if problem.offset.is_some() || problem.delta.is_map() {
                        return done(
                            FamilyClass::CaseC,
                            vec![beta_note, gamma_note, "k(x) and/or delta(x) maps"],
                        );
                    }
                    if problem.delta.is_zero() {
                        return done(FamilyClass::CaseA, vec![beta_note, gamma_note, "delta = 0"]);
                    }
                    return done(FamilyClass::CaseB, vec![beta_note, gamma_note, "delta != 0"]);
                }
            }
        }
    }

    if problem.is_variable() {
        return done(FamilyClass::VariableParams, vec!["parameter maps"]);
    }
    done(
        FamilyClass::GenericLinearizable,
        vec!["no closed-form constraint matched"],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(b: f64, n: f64, k: f64) -> FunctionFamily {
        FunctionFamily::power(b, n, k).unwrap()
    }

    #[test]
    fn painleve_ince_instance() {
        let p = OdeProblem::new(FunctionFamily::identity(), 3.0, 2.0, 0.0).unwrap();
        assert_eq!(classify(&p).unwrap(), FamilyClass::PainleveInce);
    }

    #[test]
    fn unit_is_linear() {
        let p = OdeProblem::new(FunctionFamily::Unit, 5.0, 3.0, 1.0).unwrap();
        assert_eq!(classify(&p).unwrap(), FamilyClass::AlreadyLinear);
    }

    #[test]
    fn shear_free_instance() {
        let p = OdeProblem::new(power(1.0, 0.5, 0.0), 0.0, Param::map(|x| -1.5 * x), 0.0).unwrap();
        assert_eq!(classify(&p).unwrap(), FamilyClass::ShearFree);
    }

    #[test]
    fn case_a_instance() {
        // 16 * 3 / 16 = 3
        let p = OdeProblem::new(power(1.0, 2.0, 1.0), 4.0, 3.0, 0.0).unwrap();
        assert_eq!(classify(&p).unwrap(), FamilyClass::CaseA);
    }

    #[test]
    fn cubic_falls_back() {
        let p = OdeProblem::new(power(1.0, 3.0, 0.0), 1.0, 7.0, 0.0).unwrap();
        assert_eq!(classify(&p).unwrap(), FamilyClass::GenericLinearizable);
    }

    #[test]
    fn shifted_and_variable_cases() {
        let p = OdeProblem::new(power(1.0, 2.0, 1.0), 4.0, 3.0, 0.0).unwrap();
        assert_eq!(
            classify(&p.clone().with_delta(0.5).unwrap()).unwrap(),
            FamilyClass::CaseB
        );
        assert_eq!(
            classify(&p.clone().with_delta(Param::map(|x: f64| x.sin())).unwrap()).unwrap(),
            FamilyClass::CaseC
        );
        assert_eq!(
            classify(&p.with_offset_map(|x| x).unwrap()).unwrap(),
            FamilyClass::CaseC
        );
    }

    #[test]
    fn reciprocal_case_needs_gamma() {
        let f = power(1.0, -1.0, 1.0);
        let ok = OdeProblem::new(f.clone(), 2.0, 0.0, 4.0).unwrap();
        assert_eq!(classify(&ok).unwrap(), FamilyClass::CaseA);
        let off = OdeProblem::new(f, 2.0, 0.0, 0.0).unwrap();
        assert_eq!(classify(&off).unwrap(), FamilyClass::GenericLinearizable);
    }

    #[test]
    fn tolerance_is_relative() {
        let near = 2.0 * (1.0 + 5e-13);
        let far = 2.0 * (1.0 + 5e-11);
        let pi = |beta| OdeProblem::new(FunctionFamily::identity(), 3.0, beta, 0.0).unwrap();
        assert_eq!(classify(&pi(near)).unwrap(), FamilyClass::PainleveInce);
        assert_eq!(classify(&pi(far)).unwrap(), FamilyClass::GenericLinearizable);
    }

    #[test]
    fn tsallis_minus_one_is_not_painleve_ince() {
        let p = OdeProblem::new(FunctionFamily::identity(), -3.0, 1.0, 0.0).unwrap();
        assert_eq!(classify(&p).unwrap(), FamilyClass::GenericLinearizable);
    }

    #[test]
    fn variable_fallback() {
        let p = OdeProblem::new(
            FunctionFamily::identity(),
            Param::map(|x| x),
            Param::map(|x| x * x),
            0.0,
        )
        .unwrap();
        assert_eq!(classify(&p).unwrap(), FamilyClass::VariableParams);
    }

    #[test]
    fn dual_exponents() {
        assert_eq!(dual_exponent(1.0).unwrap(), (1.0, -0.5));
        let (_, d0) = dual_exponent(0.0).unwrap();
        assert_eq!(d0, 0.0);
        assert!(d0.is_sign_positive());
        assert_eq!(dual_exponent(-2.0).unwrap(), (-2.0, -2.0));
        assert_eq!(dual_exponent(-1.0), Err(Error::UndefinedDual));
    }
}

//! Recovering the `r`-dependence of coefficients by exact interpolation.
//!
//! Every coefficient of the normalized polynomials below is a polynomial in
//! `r` of degree at most `k`, so its values at `k + 2` integers pin it down;
//! three further values of `r` are checked against the interpolant.

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::CertifyError;
use crate::amplitude::{factor_amplitude, ProblemSpec};
use crate::exactmath::{int, Poly, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftTarget {
    /// `-P^{(1)}_{r,k}` scaled to a fixed constant term.
    MinusP1,
    /// Even part of `P/P(0)`.
    QPlus,
    /// Minus the odd part of `P/P(0)`.
    QMinus,
}

/// The coefficient of `x^degree_in_x` as a polynomial in `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoefficientInR {
    pub degree_in_x: usize,
    pub poly_in_r: Poly,
}

/// The target polynomial in `x` at one `r`. For [`LiftTarget::MinusP1`] it is
/// scaled by the positive factor making its constant term `minus_p1_constant`.
pub fn target_at(
    k: u32,
    target: LiftTarget,
    r: u32,
    minus_p1_constant: &Rational,
) -> Result<Poly, CertifyError> {
    let factorization = factor_amplitude(ProblemSpec::new(r, k)?)?;
    Ok(match target {
        LiftTarget::MinusP1 => {
            let minus = -&factorization.p1_poly;
            minus.scale(&(minus_p1_constant / minus.coeff(0)))
        }
        LiftTarget::QPlus => factorization.normalized_p().even_odd().0,
        LiftTarget::QMinus => -&factorization.normalized_p().even_odd().1,
    })
}

/// Default interpolation nodes `k+1 ..= 2k+2`.
pub fn default_sample_rs(k: u32) -> Vec<u32> {
    (k + 1..=2 * k + 2).collect()
}

/// Interpolates each `x`-coefficient of the target over `sample_rs` and
/// verifies the result at the three integers following the largest sample.
pub fn lift_coefficients_in_r(
    k: u32,
    target: LiftTarget,
    sample_rs: &[u32],
    minus_p1_constant: &Rational,
) -> Result<Vec<CoefficientInR>, CertifyError> {
    let needed = k as usize + 2;
    if sample_rs.len() < needed {
        return Err(CertifyError::LiftMismatch {
            k,
            detail: format!("{} sample values of r, need at least {needed}", sample_rs.len()),
        });
    }
    let samples = sample_rs
        .iter()
        .map(|&r| Ok((r, target_at(k, target, r, minus_p1_constant)?)))
        .collect::<Result<Vec<_>, CertifyError>>()?;

    let mut lifted = Vec::with_capacity(k as usize + 1);
    for degree_in_x in 0..=k as usize {
        let points: Vec<(Rational, Rational)> =
            samples.iter().map(|(r, p)| (int(*r as i64), p.coeff(degree_in_x))).collect();
        let poly_in_r = Poly::interpolate(&points);
        if poly_in_r.degree().unwrap_or(0) > k as usize {
            return Err(CertifyError::LiftMismatch {
                k,
                detail: format!("{target:?} x^{degree_in_x}: interpolant has degree above {k}"),
            });
        }
        lifted.push(CoefficientInR { degree_in_x, poly_in_r });
    }

    let last = *sample_rs.iter().max().unwrap();
    for r in last + 1..=last + 3 {
        let actual = target_at(k, target, r, minus_p1_constant)?;
        if actual.degree().unwrap_or(0) > k as usize {
            return Err(CertifyError::LiftMismatch { k, detail: format!("{target:?} degree at r={r}") });
        }
        for c in &lifted {
            if c.poly_in_r.eval(&int(r as i64)) != actual.coeff(c.degree_in_x) {
                return Err(CertifyError::LiftMismatch {
                    k,
                    detail: format!("{target:?} x^{} disagrees at held-out r={r}", c.degree_in_x),
                });
            }
        }
    }
    Ok(lifted)
}

/// Evaluates a lifted coefficient family at `r`, as a polynomial in `x`.
pub fn evaluate_lifted(lifted: &[CoefficientInR], r: &Rational) -> Poly {
    let n = lifted.iter().map(|c| c.degree_in_x + 1).max().unwrap_or(0);
    let mut coeffs = vec![Rational::zero(); n];
    for c in lifted {
        coeffs[c.degree_in_x] = c.poly_in_r.eval(r);
    }
    Poly::new(coeffs)
}

/// Checks that `a` and `b` are proportional with a positive ratio, returning
/// `b / a` (compared by cross-multiplication against the constant terms).
pub fn positive_ratio(a: &Poly, b: &Poly) -> Option<Rational> {
    let (a0, b0) = (a.coeff(0), b.coeff(0));
    if a0.is_zero() || b0.is_zero() || a0.is_positive() != b0.is_positive() {
        return None;
    }
    let n = a.coeffs().len().max(b.coeffs().len());
    let proportional = (0..n).all(|i| a.coeff(i) * &b0 == b.coeff(i) * &a0);
    proportional.then(|| b0 / a0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;

    #[test]
    fn minus_p1_linear_coefficient_for_k4() {
        let lifted = lift_coefficients_in_r(4, LiftTarget::MinusP1, &default_sample_rs(4), &int(45)).unwrap();
        assert_eq!(lifted[1].poly_in_r, Poly::from_ints(&[540, -240]));
        assert_eq!(lifted[0].poly_in_r, Poly::from_ints(&[45]));
        assert_eq!(lifted[4].poly_in_r, Poly::from_ints(&[45, -168, 200, -96, 16]));
    }

    #[test]
    fn canonical_minus_p1_ratio_at_r5() {
        let canonical = -&factor_amplitude(ProblemSpec::new(5, 4).unwrap()).unwrap().p1_poly;
        let appendix = Poly::from_ints(&[45, -660, 2814, -4340, 2205]);
        assert_eq!(positive_ratio(&canonical, &appendix), Some(int(128)));
        assert_eq!(positive_ratio(&canonical, &-&appendix), None);
    }

    #[test]
    fn q_plus_for_k6() {
        let lifted = lift_coefficients_in_r(6, LiftTarget::QPlus, &default_sample_rs(6), &int(1575)).unwrap();
        assert_eq!(lifted[2].poly_in_r, Poly::from_ints(&[715, -396, 44]));
        assert_eq!(lifted[0].poly_in_r, Poly::from_ints(&[1]));
        assert!(lifted[1].poly_in_r.is_zero());
        assert_eq!(lifted[6].poly_in_r.coeff(6), rat(64, 225));
    }

    #[test]
    fn too_few_samples() {
        let err = lift_coefficients_in_r(4, LiftTarget::QPlus, &[5, 6, 7], &int(45)).unwrap_err();
        assert!(matches!(err, CertifyError::LiftMismatch { .. }));
    }

    #[test]
    fn evaluation_of_lifted_family() {
        let lifted = lift_coefficients_in_r(4, LiftTarget::QMinus, &default_sample_rs(4), &int(45)).unwrap();
        let at5 = evaluate_lifted(&lifted, &int(5));
        assert_eq!(at5, Poly::new(vec![int(0), int(4), int(0), rat(644, 9)]));
    }
}

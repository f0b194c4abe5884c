use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::{rodrigues_derivative_at_zero, AmplitudeError, ProblemSpec};
use crate::exactmath::decimal::{sqrt_to_decimal, Rounding};
use crate::exactmath::{factorial, format_rational, pow2, rat, Rational};

/// How far the center-based value is known to be the true best constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterStatus {
    /// `k` in {0, 2}: the center is the global maximum by a published result.
    Cited,
    /// `k` in {4, 6}: covered by the built-in certificate (`certify`).
    Certified,
    /// Other even `k`: valid only if the center is the global maximum.
    Conditional,
}

impl CenterStatus {
    pub fn for_k(k: u32) -> Self {
        match k {
            0 | 2 => CenterStatus::Cited,
            4 | 6 => CenterStatus::Certified,
            _ => CenterStatus::Conditional,
        }
    }
}

/// The closed-form value printed with the `k = 4, 6` result, for comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrintedFormula {
    /// Square of the printed value, exact.
    pub value_squared: String,
    pub value_decimal: String,
    /// `lambda^2 (recipe) / lambda^2 (printed)`.
    pub discrepancy_ratio: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BestConstantResult {
    pub spec: ProblemSpec,
    /// `A^2(0)`, exact.
    pub amplitude_squared_at_center: String,
    /// `lambda^2 = 1 / A^2(0)`, exact.
    pub lambda_squared: String,
    /// `sqrt(lambda^2)`, truncated toward zero to the requested digits.
    pub lambda: String,
    pub digits: u32,
    pub rounding: Rounding,
    pub center_status: CenterStatus,
    pub printed_formula: Option<PrintedFormula>,
    #[serde(skip)]
    pub lambda_squared_exact: Rational,
}

/// `A^2_{r,k}(0)` from the closed form using only the values `Q_n^{(s)}(0)`.
pub fn amplitude_squared_at_zero(spec: ProblemSpec) -> Rational {
    let (r, k) = (spec.r(), spec.k());
    let head = rodrigues_derivative_at_zero(r - k - 1, 0);
    let mut total = &head * &head / Rational::from_integer(BigInt::from(2 * spec.exponent()));
    for n in (r - k)..r {
        let q = rodrigues_derivative_at_zero(n, n + k - r);
        total -= &q * &q * rat(2 * n as i64 + 1, 2);
    }
    total
}

/// The squared value of the printed closed form for `lambda(r, k, 2, inf)`,
/// `k` in {4, 6}; `None` for other `k`.
pub fn printed_lambda_squared(spec: ProblemSpec) -> Option<Rational> {
    let r = spec.r() as i64;
    let (numerator, denominator, shift) = match spec.k() {
        4 => (3 * (4 * r * r - 24 * r + 39), 2 * (2 * r - 9), 3),
        6 => (
            192 * r.pow(4) - 3456 * r.pow(3) + 23372 * r * r - 70240 * r + 79065,
            2 * (2 * r - 13),
            4,
        ),
        _ => return None,
    };
    let prefactor = pow2((r - 2) as u64) * factorial((r - shift) as u64);
    Some(rat(numerator, denominator) / Rational::from_integer(&prefactor * &prefactor))
}

/// `lambda^2 = 1 / A^2(0)` for even `k`, plus the printed comparison for `k` in {4, 6}.
pub fn best_constant(spec: ProblemSpec, digits: u32) -> Result<BestConstantResult, AmplitudeError> {
    if spec.k_is_odd() {
        return Err(AmplitudeError::OddK { r: spec.r(), k: spec.k() });
    }
    let center = amplitude_squared_at_zero(spec);
    if center.is_zero() {
        return Err(AmplitudeError::InternalMismatch {
            r: spec.r(),
            k: spec.k(),
            detail: "A^2(0) vanishes".into(),
        });
    }
    let lambda_squared = center.recip();
    let printed_formula = printed_lambda_squared(spec).map(|printed| PrintedFormula {
        value_squared: format_rational(&printed),
        value_decimal: sqrt_to_decimal(&printed, digits, Rounding::Floor),
        discrepancy_ratio: format_rational(&(&lambda_squared / &printed)),
    });
    Ok(BestConstantResult {
        spec,
        amplitude_squared_at_center: format_rational(&center),
        lambda_squared: format_rational(&lambda_squared),
        lambda: sqrt_to_decimal(&lambda_squared, digits, Rounding::Floor),
        digits,
        rounding: Rounding::Floor,
        center_status: CenterStatus::for_k(spec.k()),
        printed_formula,
        lambda_squared_exact: lambda_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitude::{amplitude_squared, factor_amplitude};
    use crate::exactmath::int;

    fn spec(r: u32, k: u32) -> ProblemSpec {
        ProblemSpec::new(r, k).unwrap()
    }

    #[test]
    fn center_value_matches_polynomial() {
        for r in 1..=12 {
            for k in 0..r {
                let s = spec(r, k);
                let direct = amplitude_squared_at_zero(s);
                assert_eq!(direct, amplitude_squared(s).eval(&int(0)));
                assert_eq!(direct, factor_amplitude(s).unwrap().p_poly.coeff(0));
            }
        }
    }

    #[test]
    fn lambda_examples() {
        let b = best_constant(spec(1, 0), 30).unwrap();
        assert_eq!(b.lambda_squared, "2/1");
        assert!(b.lambda.starts_with("1.41421356237309504880168872420"));
        assert!(b.printed_formula.is_none());

        let b = best_constant(spec(5, 4), 12).unwrap();
        assert_eq!(b.lambda_squared_exact, rat(128, 9));
        assert_eq!(b.lambda, "3.77123616632");
        let printed = b.printed_formula.unwrap();
        assert_eq!(printed.value_squared, "57/512");
        assert!(printed.value_decimal.starts_with("0.33365"), "{}", printed.value_decimal);
        assert_eq!(sqrt_to_decimal(&rat(57, 512), 5, Rounding::Nearest), "0.33366");
        assert_eq!(printed.discrepancy_ratio, "65536/513");
        assert_eq!(b.center_status, CenterStatus::Certified);
    }

    #[test]
    fn odd_k_is_refused() {
        assert_eq!(best_constant(spec(2, 1), 10), Err(AmplitudeError::OddK { r: 2, k: 1 }));
    }

    #[test]
    fn printed_only_for_four_and_six() {
        assert!(printed_lambda_squared(spec(7, 6)).is_some());
        assert!(printed_lambda_squared(spec(9, 8)).is_none());
        assert!(printed_lambda_squared(spec(5, 2)).is_none());
    }
}

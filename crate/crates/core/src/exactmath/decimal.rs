//! Decimal rendering of exact values with a stated rounding direction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rounding {
    /// Toward negative infinity.
    Floor,
    /// Toward positive infinity.
    Ceil,
    /// To nearest, ties away from zero.
    Nearest,
}

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

fn div_round(n: &BigInt, d: &BigInt, rounding: Rounding) -> BigInt {
    match rounding {
        Rounding::Floor => n.div_floor(d),
        Rounding::Ceil => -((-n).div_floor(d)),
        Rounding::Nearest => {
            let two = BigInt::from(2);
            let (q, r) = n.abs().div_rem(d);
            let q = if &(r * &two) >= d { q + 1 } else { q };
            if n.is_negative() {
                -q
            } else {
                q
            }
        }
    }
}

fn pow10_signed(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(pow10(e as u32))
    } else {
        Rational::new(BigInt::from(1), pow10((-e) as u32))
    }
}

/// Number of decimal digits of a positive integer.
fn digit_count(n: &BigInt) -> i64 {
    n.to_string().trim_start_matches('-').len() as i64
}

/// Renders `q` with `digits` significant digits.
///
/// Plain notation for decimal exponents in `[-4, digits)`, otherwise
/// scientific (`1.4e-5`). Trailing zeros are kept so the width is stable.
pub fn to_decimal(q: &Rational, digits: u32, rounding: Rounding) -> String {
    assert!(digits >= 1);
    if q.is_zero() {
        return "0".to_string();
    }
    let abs = q.abs();
    // Exact decimal exponent: 10^e <= |q| < 10^(e+1).
    let mut exp10 = digit_count(q.numer()) - digit_count(q.denom());
    while abs < pow10_signed(exp10) {
        exp10 -= 1;
    }
    while abs >= pow10_signed(exp10 + 1) {
        exp10 += 1;
    }
    let shift = digits as i64 - 1 - exp10;
    let scaled = q * pow10_signed(shift);
    let mut mantissa = div_round(scaled.numer(), scaled.denom(), rounding);
    if digit_count(&mantissa) > digits as i64 {
        // Rounding carried into a new leading digit: 9.99.. -> 10.0..
        mantissa /= BigInt::from(10);
        exp10 += 1;
    }
    render(&mantissa, exp10, digits)
}

fn render(mantissa: &BigInt, exp10: i64, digits: u32) -> String {
    let negative = mantissa.is_negative();
    let body = mantissa.abs().to_string();
    let sign = if negative { "-" } else { "" };
    if exp10 >= -4 && exp10 < digits as i64 {
        if exp10 >= 0 {
            let split = (exp10 + 1) as usize;
            let (int_part, frac) = body.split_at(split.min(body.len()));
            if frac.is_empty() {
                format!("{sign}{int_part}")
            } else {
                format!("{sign}{int_part}.{frac}")
            }
        } else {
            let zeros = "0".repeat((-exp10 - 1) as usize);
            format!("{sign}0.{zeros}{body}")
        }
    } else {
        let (lead, rest) = body.split_at(1);
        if rest.is_empty() {
            format!("{sign}{lead}e{exp10}")
        } else {
            format!("{sign}{lead}.{rest}e{exp10}")
        }
    }
}

/// Enclosure `[lo, hi]` of `sqrt(q)` with both ends multiples of `10^-scale`.
/// `lo == hi` when the root is exact at that scale.
pub fn sqrt_enclosure(q: &Rational, scale: u32) -> (Rational, Rational) {
    assert!(!q.is_negative(), "sqrt of a negative number");
    let factor = pow10(2 * scale);
    let scaled = (q.numer() * &factor).div_floor(q.denom());
    let root = scaled.sqrt();
    let den = pow10(scale);
    let lo = Rational::new(root.clone(), den.clone());
    let exact = &root * &root * q.denom() == q.numer() * &factor;
    let hi = if exact { lo.clone() } else { Rational::new(root + 1, den) };
    (lo, hi)
}

/// `sqrt(q)` rendered with `digits` significant digits, rounded as requested.
pub fn sqrt_to_decimal(q: &Rational, digits: u32, rounding: Rounding) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    // Enough fractional digits that the enclosure width is far below one unit
    // in the last significant place.
    let magnitude = (digit_count(q.numer()) - digit_count(q.denom())).abs() as u32;
    let scale = digits + magnitude + 4;
    let (lo, hi) = sqrt_enclosure(q, scale);
    let a = to_decimal(&lo, digits, rounding);
    let b = to_decimal(&hi, digits, rounding);
    match rounding {
        Rounding::Floor => a,
        Rounding::Ceil => b,
        Rounding::Nearest => a,
    }
}

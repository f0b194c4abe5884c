//! Directed rational bounds for transcendental and high-power quantities.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{pow2, Rational};

/// Upper bound on `e^{-t}` for `t >= 0`: the reciprocal of the Taylor partial
/// sum `sum_{i <= terms} t^i / i!`, which never exceeds `e^t`.
///
/// Non-increasing in `terms`.
pub fn exp_upper_bound(t: &Rational, terms: u32) -> Rational {
    assert!(!t.is_negative(), "exp_upper_bound needs t >= 0");
    exp_partial_sum(t, terms).recip()
}

/// `sum_{i <= terms} t^i / i!`.
pub fn exp_partial_sum(t: &Rational, terms: u32) -> Rational {
    let mut term = Rational::one();
    let mut sum = Rational::one();
    for i in 1..=terms {
        term = term * t / Rational::from_integer(i.into());
        sum += &term;
    }
    sum
}

/// Smallest `m <= max_terms` whose partial sum exceeds `target`, together
/// with that sum. `None` if no partial sum up to `max_terms` gets there.
pub fn exp_partial_sum_exceeding(
    t: &Rational,
    target: &Rational,
    max_terms: u32,
) -> Option<(u32, Rational)> {
    let mut term = Rational::one();
    let mut sum = Rational::one();
    if &sum > target {
        return Some((0, sum));
    }
    for i in 1..=max_terms {
        term = term * t / Rational::from_integer(i.into());
        sum += &term;
        if &sum > target {
            return Some((i, sum));
        }
    }
    None
}

/// `ceil(q * 2^bits) / 2^bits`, the dyadic upper neighbour of `q`.
pub fn round_up_dyadic(q: &Rational, bits: u32) -> Rational {
    let scaled = q.numer() << bits;
    let (quot, rem) = scaled.div_mod_floor(q.denom());
    let ceil = if rem.is_zero() { quot } else { quot + 1 };
    Rational::new(ceil, pow2(bits as u64))
}

/// Upper bound on `base^exp` for `base >= 0`, carrying `bits` fractional
/// bits and rounding every intermediate product upward. Exact for `exp <= 1`.
pub fn pow_upper_bound(base: &Rational, exp: u64, bits: u32) -> Rational {
    assert!(!base.is_negative(), "pow_upper_bound needs base >= 0");
    match exp {
        0 => return Rational::one(),
        1 => return base.clone(),
        _ => {}
    }
    let mantissa = pow_upper_mantissa(base.numer(), base.denom(), exp, bits);
    Rational::new(mantissa, pow2(bits as u64))
}

/// Integer `M` with `(numer / denom)^exp <= M / 2^bits`, for nonnegative
/// `numer / denom`. Works on fixed-point mantissas only.
pub fn pow_upper_mantissa(numer: &BigInt, denom: &BigInt, exp: u64, bits: u32) -> BigInt {
    let ceil_div = |a: BigInt, b: &BigInt| {
        let (q, r) = a.div_mod_floor(b);
        if r.is_zero() {
            q
        } else {
            q + 1
        }
    };
    let one_fixed = BigInt::one() << bits;
    let mul_up = |a: &BigInt, b: &BigInt| ceil_div(a * b, &one_fixed);
    let mut base = ceil_div(numer << bits, denom);
    let mut acc = one_fixed.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_up(&acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul_up(&base, &base);
        }
    }
    acc
}

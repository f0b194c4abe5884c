use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{amplitude_squared, rodrigues_derivative_at_zero, AmplitudeError, ProblemSpec};
use crate::exactmath::{binomial, factorial, format_rational, int, pow2, rat, Rational};

/// What `x = 0` is for `A_{r,k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterExtremum {
    LocalMin,
    LocalMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    /// The extremal is not symmetric.
    Asymmetric,
    /// The even candidate is a local optimum; global status needs a certificate.
    CenterIsLocalMax,
}

/// `(A^2)''(0)` together with the pieces of its closed-form evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaBreakdown {
    pub spec: ProblemSpec,
    #[serde(serialize_with = "ser_rat")]
    pub second_derivative: Rational,
    /// `M = 1 / (2^{2r-2k-1} (r-k-1)!^2 (r-k))`.
    #[serde(serialize_with = "ser_rat")]
    pub m_constant: Rational,
    /// `F(t)` for `t = 1 ..= floor(k/2) + 1`.
    #[serde(serialize_with = "ser_rat_map")]
    pub f_values: BTreeMap<u32, Rational>,
    /// Correction term `R`, present for even `k` only.
    #[serde(serialize_with = "ser_opt_rat")]
    pub r_term: Option<Rational>,
    pub verdict: CenterExtremum,
}

fn ser_rat<S: serde::Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

fn ser_opt_rat<S: serde::Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_some(&format_rational(q)),
        None => s.serialize_none(),
    }
}

fn ser_rat_map<S: serde::Serializer>(m: &BTreeMap<u32, Rational>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, v)| (k.to_string(), format_rational(v))))
}

fn fact(n: u32) -> BigInt {
    factorial(n as u64)
}

fn frac(n: BigInt, d: BigInt) -> Rational {
    Rational::new(n, d)
}

/// `M` of the closed-form evaluation.
pub fn m_constant(spec: ProblemSpec) -> Rational {
    let d = spec.r - spec.k;
    let f = fact(d - 1);
    frac(BigInt::from(1), pow2((2 * d - 1) as u64) * &f * &f * d)
}

/// `F(t) = (2t)!^2 (r-k-1)!^2 (r-k) (r-k+t-1) / (2^{4t-1} t!^2 (r-k+t-1)!^2)`, `t >= 1`.
pub fn f_value(spec: ProblemSpec, t: u32) -> Rational {
    let d = spec.r - spec.k;
    let (a, b, c) = (fact(2 * t), fact(d - 1), fact(d + t - 1));
    let num = &a * &a * &b * &b * d * (d + t - 1);
    let tf = fact(t);
    let den = pow2((4 * t - 1) as u64) * &tf * &tf * &c * &c;
    frac(num, den)
}

/// `R = k! (k+2)! / (2^{2r-1} r!^2) C(r, l) C(r, l+1) (r + 1/2)` for `k = 2l`.
pub fn r_term(spec: ProblemSpec) -> Rational {
    let (r, k) = (spec.r, spec.k);
    let l = k / 2;
    let rf = fact(r);
    let num = fact(k) * fact(k + 2) * binomial(r as u64, l as u64) * binomial(r as u64, (l + 1) as u64);
    frac(num, pow2((2 * r - 1) as u64) * &rf * &rf) * rat(2 * r as i64 + 1, 2)
}

/// `(A^2)''(0)` by summing second derivatives of the terms of `A^2`, using
/// only the values `Q_n^{(s)}(0)`.
pub fn second_derivative_by_terms(spec: ProblemSpec) -> Rational {
    let (r, k) = (spec.r, spec.k);
    let d = r - k;
    let f = fact(d - 1);
    let mut total = -frac(BigInt::from(2), &f * &f * pow2((2 * d - 1) as u64));
    for s in 0..k {
        let n = d + s;
        let q0 = rodrigues_derivative_at_zero(n, s);
        let q1 = rodrigues_derivative_at_zero(n, s + 1);
        let q2 = rodrigues_derivative_at_zero(n, s + 2);
        let weight = rat(2 * n as i64 + 1, 1);
        total -= weight * (&q1 * &q1 + q0 * q2);
    }
    total
}

/// The parity-specific closed form of `(A^2)''(0)`.
pub fn second_derivative_closed_form(spec: ProblemSpec) -> Rational {
    let r = spec.r;
    if spec.k_is_odd() {
        let h = (spec.k + 1) / 2;
        let (a, b, c) = (fact(spec.k + 1), fact(h), fact(r - h));
        frac(&a * &a * (r - h), pow2((2 * r - 1) as u64) * &b * &b * &c * &c)
    } else {
        let l = spec.k / 2;
        let num = fact(2 * l) * fact(2 * l + 2) * (r - l);
        let den = pow2((2 * r - 1) as u64) * fact(l) * fact(l + 1) * fact(r - l) * fact(r - l - 1);
        -frac(num, den)
    }
}

/// Computes `(A^2)''(0)` by term sums, by differentiating the expanded
/// polynomial, and by the closed form, and insists that they agree.
pub fn second_derivative_at_zero(spec: ProblemSpec) -> Result<LemmaBreakdown, AmplitudeError> {
    let mismatch = |detail: String| AmplitudeError::InternalMismatch { r: spec.r, k: spec.k, detail };
    let by_terms = second_derivative_by_terms(spec);
    let by_polynomial = amplitude_squared(spec).differentiate(2).eval(&Rational::zero());
    let closed = second_derivative_closed_form(spec);
    if by_terms != by_polynomial || by_terms != closed {
        return Err(mismatch(format!(
            "(A^2)''(0): term sum {}, polynomial {}, closed form {}",
            format_rational(&by_terms),
            format_rational(&by_polynomial),
            format_rational(&closed)
        )));
    }

    let m = m_constant(spec);
    let f_values: BTreeMap<u32, Rational> =
        (1..=spec.k / 2 + 1).map(|t| (t, f_value(spec, t))).collect();
    if &f_values[&1] * int(2) != int(1) {
        return Err(mismatch(format!("2F(1) = {}", format_rational(&(&f_values[&1] * int(2))))));
    }
    let top = &f_values[&(spec.k / 2 + 1)];
    let (telescoped, r_value) = if spec.k_is_odd() {
        (int(2) * &m * top, None)
    } else {
        let rv = r_term(spec);
        (int(2) * &m * top - &rv, Some(rv))
    };
    if telescoped != closed {
        return Err(mismatch(format!(
            "telescoped form {} differs from closed form {}",
            format_rational(&telescoped),
            format_rational(&closed)
        )));
    }
    let verdict = if closed.is_positive() {
        CenterExtremum::LocalMin
    } else if closed.is_negative() {
        CenterExtremum::LocalMax
    } else {
        return Err(mismatch("(A^2)''(0) vanishes".into()));
    };
    Ok(LemmaBreakdown {
        spec,
        second_derivative: closed,
        m_constant: m,
        f_values,
        r_term: r_value,
        verdict,
    })
}

/// Symmetry of the extremal: asymmetric when the center is a local minimum
/// of `A` (odd `k`); for even `k` only the local statement is available here.
pub fn symmetry_verdict(spec: ProblemSpec) -> Symmetry {
    // The closed form alone decides the sign; the triple check lives in
    // `second_derivative_at_zero`.
    if second_derivative_closed_form(spec).is_positive() {
        Symmetry::Asymmetric
    } else {
        Symmetry::CenterIsLocalMax
    }
}

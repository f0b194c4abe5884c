//! The amplitude function `A_{r,k}` in closed form.
//!
//! `A_{r,k}(x)` is the largest value of `|f^{(k)}(x)|` over functions with
//! `f^{(j)}(+-1) = 0` for `j < r` and `||f^{(r)}||_{L2} <= 1`. Its square is
//! the polynomial
//!
//! ```text
//! A^2(x) = Q_{r-k-1}(x)^2 (1 - x^2) / (2(2r-2k-1))
//!        - sum_{n=r-k}^{r-1} (Q_n^{(n+k-r)}(x))^2 (n + 1/2),
//! Q_n(x) = (1 - x^2)^n / (2^n n!),
//! ```
//!
//! which factors as `P_{r,k}(x^2) (1 - x^2)^{2r-2k-1}` with `deg P = k`.

mod constant;
mod lemma;
mod series;

pub use constant::{
    amplitude_squared_at_zero, best_constant, printed_lambda_squared, BestConstantResult,
    CenterStatus, PrintedFormula,
};
pub use lemma::{second_derivative_at_zero, symmetry_verdict, CenterExtremum, LemmaBreakdown, Symmetry};
pub use series::extremal_series_truncated;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactmath::{binomial, factorial, int, pow2, rat, ExactMathError, Poly, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AmplitudeError {
    #[error("invalid problem (r={r}, k={k}): need 0 <= k < r")]
    InvalidSpec { r: u32, k: u32 },
    #[error("factorization of A^2 for (r={r}, k={k}) broke: {detail}")]
    FactorizationBroken { r: u32, k: u32, detail: String },
    #[error("internal mismatch for (r={r}, k={k}): {detail}")]
    InternalMismatch { r: u32, k: u32, detail: String },
    #[error("k={k} is odd: the maximum of A is off-center, use the scan")]
    OddK { r: u32, k: u32 },
}

/// Orders `(r, k)` of the controlling and the estimated derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ProblemSpec {
    r: u32,
    k: u32,
}

impl ProblemSpec {
    pub fn new(r: u32, k: u32) -> Result<Self, AmplitudeError> {
        if k >= r {
            return Err(AmplitudeError::InvalidSpec { r, k });
        }
        Ok(ProblemSpec { r, k })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `2r - 2k - 1`, the power of `(1 - x^2)` in the factorization.
    pub fn exponent(&self) -> u32 {
        2 * (self.r - self.k) - 1
    }

    pub fn k_is_odd(&self) -> bool {
        self.k % 2 == 1
    }
}

/// `1 - x^2`.
fn one_minus_square() -> Poly {
    Poly::from_ints(&[1, 0, -1])
}

fn rodrigues_normalizer(n: u32) -> BigInt {
    pow2(n as u64) * factorial(n as u64)
}

/// `Q_n(x) = (1 - x^2)^n / (2^n n!)`.
pub fn rodrigues_poly(n: u32) -> Poly {
    let norm = Rational::new(BigInt::one(), rodrigues_normalizer(n));
    one_minus_square().pow(n).scale(&norm)
}

/// `Q_n^{(s)}(0)`: zero for odd `s`, `(-1)^m (2m)! C(n, m) / (2^n n!)` for `s = 2m`.
pub fn rodrigues_derivative_at_zero(n: u32, s: u32) -> Rational {
    if s % 2 == 1 {
        return Rational::zero();
    }
    let m = s / 2;
    let magnitude = Rational::new(
        factorial(s as u64) * binomial(n as u64, m as u64),
        rodrigues_normalizer(n),
    );
    if m % 2 == 1 {
        -magnitude
    } else {
        magnitude
    }
}

/// `A^2_{r,k}` as an exact polynomial in `x`, straight from the closed form.
pub fn amplitude_squared(spec: ProblemSpec) -> Poly {
    let (r, k) = (spec.r, spec.k);
    let head = rodrigues_poly(r - k - 1);
    let mut total = (&head * &head) * one_minus_square();
    total = total.scale(&Rational::new(BigInt::one(), BigInt::from(2 * spec.exponent())));
    for n in (r - k)..r {
        let d = rodrigues_poly(n).differentiate((n + k - r) as usize);
        let weight = rat(2 * n as i64 + 1, 2);
        total = &total - &(&d * &d).scale(&weight);
    }
    total
}

/// `A^2 = P(x^2) (1 - x^2)^m` with the derivative polynomial
/// `P1(t) = (1 - t) P'(t) - m P(t)`, so that
/// `d/dt [P(t) (1-t)^m] = P1(t) (1-t)^{m-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AmplitudeFactorization {
    pub spec: ProblemSpec,
    /// `P_{r,k}` in `t = x^2`, degree exactly `k`.
    pub p_poly: Poly,
    pub exponent: u32,
    /// `P^{(1)}_{r,k}` in `t`.
    pub p1_poly: Poly,
}

impl AmplitudeFactorization {
    fn from_p(spec: ProblemSpec, p_poly: Poly) -> Result<Self, AmplitudeError> {
        if p_poly.degree() != Some(spec.k as usize) {
            return Err(AmplitudeError::FactorizationBroken {
                r: spec.r,
                k: spec.k,
                detail: format!("P has degree {:?}, expected {}", p_poly.degree(), spec.k),
            });
        }
        let exponent = spec.exponent();
        let p1_poly = derivative_polynomial(&p_poly, exponent);
        Ok(AmplitudeFactorization { spec, p_poly, exponent, p1_poly })
    }

    /// `P(t) / P(0)`, constant term 1.
    pub fn normalized_p(&self) -> Poly {
        self.p_poly.scale(&self.p_poly.coeff(0).recip())
    }

    /// `P(x^2) (1 - x^2)^m` re-expanded in `x`.
    pub fn expand(&self) -> Poly {
        &self.p_poly.substitute_square() * &one_minus_square().pow(self.exponent)
    }
}

/// `(1 - t) p'(t) - m p(t)`.
pub fn derivative_polynomial(p: &Poly, m: u32) -> Poly {
    let one_minus_t = Poly::from_ints(&[1, -1]);
    &(&one_minus_t * &p.derivative()) - &p.scale(&int(m as i64))
}

/// Extracts `P_{r,k}` by exact division of [`amplitude_squared`] by
/// `(1 - t)^{2r-2k-1}` after rewriting it in `t = x^2`.
pub fn factor_amplitude(spec: ProblemSpec) -> Result<AmplitudeFactorization, AmplitudeError> {
    let broken = |detail: String| AmplitudeError::FactorizationBroken { r: spec.r, k: spec.k, detail };
    let in_t = amplitude_squared(spec)
        .even_part_in_square()
        .ok_or_else(|| broken("odd power of x in A^2".into()))?;
    let divisor = Poly::from_ints(&[1, -1]).pow(spec.exponent());
    let p_poly = in_t.exact_div(&divisor).map_err(|e| match e {
        ExactMathError::NonZeroRemainder { remainder } => broken(format!("remainder {remainder}")),
        other => broken(other.to_string()),
    })?;
    AmplitudeFactorization::from_p(spec, p_poly)
}

/// Same factorization without expanding `A^2`.
///
/// Every `Q_n^{(j)}` in the sum has `n - j = r - k`, so it equals
/// `(1 - x^2)^{r-k} G_{n,j}(x) / (2^n n!)` with `G_{n,0} = 1` and
/// `G_{n,j+1} = -2(n-j) x G_{n,j} + (1 - x^2) G_{n,j}'`. Dividing the common
/// power out gives
///
/// ```text
/// P(x^2) = 1 / (2m (2^{r-k-1} (r-k-1)!)^2)
///        - (1 - x^2) sum_j (n_j + 1/2) G_{n_j,j}(x)^2 / (2^{n_j} n_j!)^2,
/// ```
///
/// whose cost does not grow with `r`. Used by the certification mesh, where
/// `r` runs into the hundreds.
pub fn factor_amplitude_direct(spec: ProblemSpec) -> Result<AmplitudeFactorization, AmplitudeError> {
    let (r, k) = (spec.r, spec.k);
    let m = spec.exponent();
    let head_norm = rodrigues_normalizer(r - k - 1);
    let mut in_x = Poly::constant(Rational::new(
        BigInt::one(),
        BigInt::from(2 * m) * &head_norm * &head_norm,
    ));
    let mut sum = Poly::zero();
    for j in 0..k {
        let n = r - k + j;
        let mut g = Poly::one();
        for s in 0..j {
            let lowered = &Poly::monomial(int(-2 * (n - s) as i64), 1) * &g;
            g = &lowered + &(&one_minus_square() * &g.derivative());
        }
        let norm = rodrigues_normalizer(n);
        let weight = Rational::new(BigInt::from(2 * n + 1), BigInt::from(2) * &norm * &norm);
        sum = &sum + &(&g * &g).scale(&weight);
    }
    in_x = &in_x - &(&one_minus_square() * &sum);
    let p_poly = in_x.even_part_in_square().ok_or_else(|| AmplitudeError::FactorizationBroken {
        r,
        k,
        detail: "odd power of x in the reduced form".into(),
    })?;
    AmplitudeFactorization::from_p(spec, p_poly)
}

/// Sign of `P1` just left of `t = 1`: `-1`, `0` (identically zero) or `1`.
pub fn sign_left_of_one(p1: &Poly) -> i8 {
    let around_one = p1.shift(&Rational::one());
    for (j, c) in around_one.coeffs().iter().enumerate() {
        if !c.is_zero() {
            let s = if c.is_positive() { 1 } else { -1 };
            return if j % 2 == 1 { -s } else { s };
        }
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(r: u32, k: u32) -> ProblemSpec {
        ProblemSpec::new(r, k).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert_eq!(ProblemSpec::new(3, 3), Err(AmplitudeError::InvalidSpec { r: 3, k: 3 }));
        assert!(ProblemSpec::new(1, 0).is_ok());
    }

    #[test]
    fn rodrigues_small() {
        assert_eq!(rodrigues_poly(0), Poly::one());
        assert_eq!(rodrigues_poly(1), Poly::new(vec![rat(1, 2), int(0), rat(-1, 2)]));
        assert_eq!(rodrigues_poly(2), Poly::from_ints(&[1, 0, -2, 0, 1]).scale(&rat(1, 8)));
    }

    #[test]
    fn rodrigues_values_at_zero() {
        assert_eq!(rodrigues_derivative_at_zero(1, 2), int(-1));
        assert_eq!(rodrigues_derivative_at_zero(5, 4), rat(1, 16));
        assert_eq!(rodrigues_derivative_at_zero(4, 3), int(0));
        assert_eq!(rodrigues_derivative_at_zero(2, 2), rat(-1, 2));
        assert_eq!(rodrigues_derivative_at_zero(2, 4), int(3));
        assert_eq!(rodrigues_derivative_at_zero(2, 6), int(0));
    }

    #[test]
    fn amplitude_small_cases() {
        assert_eq!(amplitude_squared(spec(1, 0)), Poly::new(vec![rat(1, 2), int(0), rat(-1, 2)]));
        let expected = &Poly::from_ints(&[1, 0, -1]).scale(&rat(1, 2))
            - &Poly::from_ints(&[1, 0, -1]).pow(2).scale(&rat(3, 8));
        assert_eq!(amplitude_squared(spec(2, 1)), expected);
        assert_eq!(amplitude_squared(spec(5, 4)).eval(&int(0)), rat(9, 128));
    }

    #[test]
    fn factorization_examples() {
        let f = factor_amplitude(spec(1, 0)).unwrap();
        assert_eq!(f.p_poly, Poly::constant(rat(1, 2)));
        assert_eq!(f.exponent, 1);

        let f = factor_amplitude(spec(5, 4)).unwrap();
        assert_eq!(f.exponent, 1);
        assert_eq!(f.p_poly, Poly::from_ints(&[9, -36, 294, -644, 441]).scale(&rat(1, 128)));
        assert_eq!(f.p1_poly.coeff(0), rat(-45, 128));
        assert_eq!(f.p1_poly.scale(&int(-128)), Poly::from_ints(&[45, -660, 2814, -4340, 2205]));
        let normalized = f.normalized_p();
        assert_eq!(normalized.coeff(4), int(49));
        assert_eq!(normalized.coeff(3), rat(-644, 9));
    }

    #[test]
    fn direct_route_matches_division() {
        for r in 1..=14 {
            for k in 0..r {
                let s = spec(r, k);
                assert_eq!(factor_amplitude(s).unwrap(), factor_amplitude_direct(s).unwrap(), "r={r} k={k}");
            }
        }
    }

    #[test]
    fn derivative_identity() {
        for (r, k) in [(3, 1), (5, 4), (7, 6), (6, 2)] {
            let f = factor_amplitude(spec(r, k)).unwrap();
            let m = f.exponent;
            let lhs = (&f.p_poly * &Poly::from_ints(&[1, -1]).pow(m)).derivative();
            let rhs = &f.p1_poly * &Poly::from_ints(&[1, -1]).pow(m - 1);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn left_of_one_sign() {
        assert_eq!(sign_left_of_one(&Poly::from_ints(&[-1, 0, 1])), -1);
        assert_eq!(sign_left_of_one(&Poly::from_ints(&[-3])), -1);
        assert_eq!(sign_left_of_one(&Poly::from_ints(&[1, -2, 1])), 1);
        assert_eq!(sign_left_of_one(&Poly::zero()), 0);
    }
}

//! Sturm sequences and exact positivity decisions.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{format_rational, int, sign, Poly, Rational};

/// Outcome of an exact positivity question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Positivity {
    /// Positive everywhere on the queried set.
    Proven { method: ProofMethod },
    /// Not positive somewhere; the witness locates where.
    Disproven { witness: Witness },
}

impl Positivity {
    pub fn is_proven(&self) -> bool {
        matches!(self, Positivity::Proven { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofMethod {
    /// After the shift `t -> threshold + s` all coefficients are nonnegative
    /// and the constant term is positive.
    ShiftedCoefficients,
    /// Sturm's theorem shows there is no root on the set.
    Sturm,
}

/// Where positivity fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// The polynomial is `<= 0` at this exact point.
    NonPositiveAt {
        #[serde(serialize_with = "ser_rat")]
        point: Rational,
    },
    /// `[lo, hi]` contains exactly one distinct real root.
    RootBracket {
        #[serde(serialize_with = "ser_rat")]
        lo: Rational,
        #[serde(serialize_with = "ser_rat")]
        hi: Rational,
    },
}

fn ser_rat<S: serde::Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

/// Sturm sequence of the squarefree part of a polynomial.
#[derive(Debug, Clone)]
pub struct SturmChain {
    chain: Vec<Poly>,
}

impl SturmChain {
    /// Builds the chain of `p`'s squarefree part. `p` must be nonzero.
    pub fn new(p: &Poly) -> Self {
        assert!(!p.is_zero(), "Sturm chain of the zero polynomial");
        let base = p.squarefree();
        let mut chain = vec![base.clone(), base.derivative()];
        while !chain.last().unwrap().is_zero() {
            let n = chain.len();
            let r = chain[n - 2].rem(&chain[n - 1]).expect("nonzero divisor");
            chain.push(-r);
        }
        chain.pop();
        SturmChain { chain }
    }

    /// The squarefree polynomial the chain was built from.
    pub fn base(&self) -> &Poly {
        &self.chain[0]
    }

    fn variations<I: Iterator<Item = i8>>(signs: I) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    pub fn variations_at(&self, x: &Rational) -> usize {
        Self::variations(self.chain.iter().map(|p| sign(&p.eval(x))))
    }

    pub fn variations_at_pos_inf(&self) -> usize {
        Self::variations(self.chain.iter().map(|p| sign(p.leading().unwrap())))
    }

    pub fn variations_at_neg_inf(&self) -> usize {
        Self::variations(self.chain.iter().map(|p| {
            let s = sign(p.leading().unwrap());
            if p.degree().unwrap() % 2 == 1 {
                -s
            } else {
                s
            }
        }))
    }

    /// Number of distinct real roots in `(a, b]`, for `a < b`.
    pub fn count_in(&self, a: &Rational, b: &Rational) -> usize {
        self.variations_at(a) - self.variations_at(b)
    }

    /// Number of distinct real roots in `(a, +inf)`.
    pub fn count_above(&self, a: &Rational) -> usize {
        self.variations_at(a) - self.variations_at_pos_inf()
    }

    pub fn count_real(&self) -> usize {
        self.variations_at_neg_inf() - self.variations_at_pos_inf()
    }

    /// Bisects `(a, b]` down to a bracket holding exactly one distinct root.
    /// Requires at least one root in `(a, b]`.
    pub fn isolate_one(&self, a: &Rational, b: &Rational) -> (Rational, Rational) {
        let (mut lo, mut hi) = (a.clone(), b.clone());
        loop {
            let count = self.count_in(&lo, &hi);
            debug_assert!(count > 0);
            if count == 1 {
                return (lo, hi);
            }
            let mid = (&lo + &hi) / int(2);
            if self.count_in(&lo, &mid) > 0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
}

/// Cauchy bound: every real root has absolute value below it.
pub fn root_bound(p: &Poly) -> Rational {
    let lead = p.leading().expect("nonzero polynomial").abs();
    let max = p.coeffs()[..p.coeffs().len() - 1]
        .iter()
        .map(|c| c.abs() / &lead)
        .max()
        .unwrap_or_else(Rational::zero);
    max + Rational::one()
}

/// Decides whether `p(t) > 0` for every real `t >= threshold`.
///
/// Tries the shifted-coefficient test first and falls back to Sturm
/// isolation, so it always decides.
pub fn positivity_on_ray(p: &Poly, threshold: &Rational) -> Positivity {
    assert!(!p.is_zero(), "positivity of the zero polynomial");
    let shifted = p.shift(threshold);
    if shifted.has_nonnegative_coeffs() && shifted.coeff(0).is_positive() {
        return Positivity::Proven { method: ProofMethod::ShiftedCoefficients };
    }
    let at_threshold = p.eval(threshold);
    if !at_threshold.is_positive() {
        return Positivity::Disproven { witness: Witness::NonPositiveAt { point: threshold.clone() } };
    }
    let bound = root_bound(p).max(threshold.clone()) + Rational::one();
    if p.leading().unwrap().is_negative() {
        return Positivity::Disproven { witness: Witness::NonPositiveAt { point: bound } };
    }
    let sturm = SturmChain::new(p);
    if sturm.count_in(threshold, &bound) == 0 {
        return Positivity::Proven { method: ProofMethod::Sturm };
    }
    Positivity::Disproven { witness: root_witness(p, &sturm, threshold, &bound) }
}

/// Decides whether `p > 0` on `[0, lo]` and on `[hi, +inf)`, for `0 <= lo < hi`.
pub fn positivity_outside_interval(p: &Poly, lo: &Rational, hi: &Rational) -> Positivity {
    assert!(!p.is_zero(), "positivity of the zero polynomial");
    assert!(!lo.is_negative() && lo < hi, "need 0 <= lo < hi");
    let zero = Rational::zero();
    for point in [&zero, lo] {
        if !p.eval(point).is_positive() {
            return Positivity::Disproven { witness: Witness::NonPositiveAt { point: point.clone() } };
        }
    }
    if lo.is_positive() {
        let sturm = SturmChain::new(p);
        if sturm.count_in(&zero, lo) > 0 {
            return Positivity::Disproven { witness: root_witness(p, &sturm, &zero, lo) };
        }
    }
    positivity_on_ray(p, hi)
}

/// A root bracket inside `(a, b]`, narrowed until `p` is non-positive at an
/// endpoint when the root has odd multiplicity.
fn root_witness(p: &Poly, sturm: &SturmChain, a: &Rational, b: &Rational) -> Witness {
    let (mut lo, mut hi) = sturm.isolate_one(a, b);
    let base = sturm.base();
    // The squarefree part changes sign across its simple root unless the root
    // sits exactly on `hi`.
    if base.eval(&hi).is_zero() {
        return Witness::NonPositiveAt { point: hi };
    }
    for _ in 0..64 {
        if !p.eval(&lo).is_positive() {
            return Witness::NonPositiveAt { point: lo };
        }
        if !p.eval(&hi).is_positive() {
            return Witness::NonPositiveAt { point: hi };
        }
        let mid = (&lo + &hi) / int(2);
        let s_mid = sign(&base.eval(&mid));
        if s_mid == 0 {
            return Witness::NonPositiveAt { point: mid };
        }
        if s_mid == sign(&base.eval(&hi)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Witness::RootBracket { lo, hi }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;

    #[test]
    fn appendix_quadratic_is_positive_beyond_five() {
        let p = Poly::from_ints(&[160, -96, 13]);
        assert_eq!(
            positivity_on_ray(&p, &int(5)),
            Positivity::Proven { method: ProofMethod::ShiftedCoefficients }
        );
    }

    #[test]
    fn linear_with_root_beyond_threshold() {
        let p = Poly::from_ints(&[-10, 1]);
        match positivity_on_ray(&p, &int(5)) {
            Positivity::Disproven { witness: Witness::NonPositiveAt { point } } => {
                assert!(!p.eval(&point).is_positive());
                assert!(point >= int(5));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sturm_fallback_proves() {
        // (t-3)^2 + 1 shifted at 0 has a negative coefficient but no real root.
        let p = Poly::from_ints(&[10, -6, 1]);
        assert_eq!(positivity_on_ray(&p, &int(0)), Positivity::Proven { method: ProofMethod::Sturm });
    }

    #[test]
    fn double_root_is_disproven() {
        // (t - 7/2)^2 touches zero.
        let p = &Poly::new(vec![rat(-7, 2), int(1)]) * &Poly::new(vec![rat(-7, 2), int(1)]);
        assert!(!positivity_on_ray(&p, &int(1)).is_proven());
    }

    #[test]
    fn roots_inside_interval() {
        let p = Poly::from_ints(&[2, -3, 1]);
        assert!(positivity_outside_interval(&p, &rat(1, 2), &int(3)).is_proven());
        assert!(!positivity_outside_interval(&p, &rat(1, 2), &rat(3, 2)).is_proven());
        assert!(!positivity_outside_interval(&p, &rat(3, 2), &int(3)).is_proven());
    }

    #[test]
    fn sturm_counts() {
        // (x-1)(x-2)(x+3)
        let p = &Poly::from_ints(&[2, -3, 1]) * &Poly::from_ints(&[3, 1]);
        let s = SturmChain::new(&p);
        assert_eq!(s.count_real(), 3);
        assert_eq!(s.count_in(&int(0), &int(5)), 2);
        assert_eq!(s.count_above(&rat(3, 2)), 1);
        let (lo, hi) = s.isolate_one(&int(0), &int(5));
        assert_eq!(s.count_in(&lo, &hi), 1);
    }
}

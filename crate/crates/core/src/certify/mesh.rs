//! Piecewise-constant majorants on uniform meshes with adaptive bisection.
//!
//! Both certificates bound a function of the form `(plus - minus) * decay`
//! where `plus`, `minus` have nonnegative coefficients and `decay` is
//! decreasing on the cell. Over `[a, b]` with `a >= 0` that product is at most
//! `(plus(b) - minus(a)) * decay(a)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::fixture::EnvelopeFixture;
use super::CertifyError;
use crate::amplitude::{factor_amplitude_direct, ProblemSpec};
use crate::exactmath::bounds::{pow_upper_bound, pow_upper_mantissa};
use crate::exactmath::decimal::{to_decimal, Rounding};
use crate::exactmath::{format_rational, int, pow2, Poly, Rational};

/// Fractional bits carried by the directed power `(1 - x0)^m`.
pub const POWER_BITS: u32 = 128;

/// Cap on Taylor terms in the `e^{-t}` bound.
pub const MAX_EXP_TERMS: u32 = 128;

/// `n` uniform cells covering `[lo, hi]`.
pub fn uniform_cells(lo: &Rational, hi: &Rational, n: u32) -> Vec<(Rational, Rational)> {
    let width = (hi - lo) / int(n as i64);
    (0..n)
        .map(|i| {
            let a = lo + &width * int(i as i64);
            let b = if i + 1 == n { hi.clone() } else { lo + &width * int(i as i64 + 1) };
            (a, b)
        })
        .collect()
}

/// A cell whose bound stayed above the threshold at the depth cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailedCell {
    pub lo: Rational,
    pub hi: Rational,
    pub bound: Rational,
    pub depth: u32,
}

impl FailedCell {
    /// Endpoints exactly when short, otherwise to 15 digits; the bound to 10.
    pub fn describe(&self) -> String {
        let point = |q: &Rational| {
            let exact = format_rational(q);
            if exact.len() <= 40 {
                exact
            } else {
                to_decimal(q, 15, Rounding::Nearest)
            }
        };
        format!(
            "cell [{}, {}] at depth {} has bound {}",
            point(&self.lo),
            point(&self.hi),
            self.depth,
            to_decimal(&self.bound, 10, Rounding::Floor)
        )
    }
}

/// Merged result of certifying a collection of cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeshOutcome {
    /// Largest certified bound over all leaves.
    pub max_bound: Rational,
    pub initial_cells: u64,
    pub evaluations: u64,
    /// Initial cells that needed bisection.
    pub refined_cells: u64,
    pub max_depth: u32,
    /// First failure in cell order, if any.
    pub failure: Option<FailedCell>,
}

impl MeshOutcome {
    fn empty() -> Self {
        MeshOutcome {
            max_bound: Rational::zero(),
            initial_cells: 0,
            evaluations: 0,
            refined_cells: 0,
            max_depth: 0,
            failure: None,
        }
    }

    /// Order-sensitive only in which failure is kept: `self` precedes `other`.
    pub fn merge(mut self, other: MeshOutcome) -> Self {
        if other.max_bound > self.max_bound {
            self.max_bound = other.max_bound;
        }
        self.initial_cells += other.initial_cells;
        self.evaluations += other.evaluations;
        self.refined_cells += other.refined_cells;
        self.max_depth = self.max_depth.max(other.max_depth);
        if self.failure.is_none() {
            self.failure = other.failure;
        }
        self
    }

    pub fn is_certified(&self) -> bool {
        self.failure.is_none()
    }

    /// `1 - max_bound`.
    pub fn margin(&self) -> Rational {
        Rational::one() - &self.max_bound
    }
}

/// Bisects `[lo, hi]` until every piece has `bound <= threshold` or the depth
/// cap is hit. `first_bound` is the already known bound of the whole cell.
pub fn refine<F>(
    lo: Rational,
    hi: Rational,
    first_bound: Rational,
    bound: &F,
    threshold: &Rational,
    depth_cap: u32,
) -> MeshOutcome
where
    F: Fn(&Rational, &Rational) -> Rational,
{
    let mut out = MeshOutcome { initial_cells: 1, evaluations: 1, ..MeshOutcome::empty() };
    if &first_bound <= threshold {
        out.max_bound = first_bound;
        return out;
    }
    out.refined_cells = 1;
    let mut stack = vec![(lo, hi, first_bound, 0u32)];
    while let Some((a, b, value, depth)) = stack.pop() {
        if &value <= threshold {
            if value > out.max_bound {
                out.max_bound = value;
            }
            out.max_depth = out.max_depth.max(depth);
            continue;
        }
        if depth >= depth_cap {
            out.max_depth = out.max_depth.max(depth);
            out.failure = Some(FailedCell { lo: a, hi: b, bound: value, depth });
            return out;
        }
        let mid = (&a + &b) / int(2);
        let left = bound(&a, &mid);
        let right = bound(&mid, &b);
        out.evaluations += 2;
        // Right pushed first so the left half is examined first.
        stack.push((mid.clone(), b, right, depth + 1));
        stack.push((a, mid, left, depth + 1));
    }
    out
}

/// Certifies every cell in parallel and merges in cell order.
pub fn certify_cells<F>(
    cells: Vec<(Rational, Rational)>,
    bound: &F,
    threshold: &Rational,
    depth_cap: u32,
) -> MeshOutcome
where
    F: Fn(&Rational, &Rational) -> Rational + Sync,
{
    let outcomes: Vec<MeshOutcome> = cells
        .into_par_iter()
        .map(|(a, b)| {
            let first = bound(&a, &b);
            refine(a, b, first, bound, threshold, depth_cap)
        })
        .collect();
    outcomes.into_iter().fold(MeshOutcome::empty(), MeshOutcome::merge)
}

/// `(Q+(y) - Q-(y)) e^{-alpha y}`, the large-`r` target in `y = r x`.
#[derive(Debug, Clone)]
pub struct LargeRMajorant {
    pub qplus: Poly,
    pub qminus: Poly,
    pub alpha: Rational,
    /// Relative accuracy asked of the exponential bound.
    pub slack: Rational,
    pub threshold: Rational,
}

impl LargeRMajorant {
    pub fn from_fixture(fixture: &EnvelopeFixture) -> Self {
        LargeRMajorant {
            qplus: fixture.qtilde_plus.clone(),
            qminus: fixture.qtilde_minus.clone(),
            alpha: fixture.alpha.clone(),
            slack: &fixture.margin / int(100),
            threshold: Rational::one() - &fixture.margin,
        }
    }

    /// Upper bound on the target over `[y0, y1]`, `0 <= y0 <= y1`.
    pub fn cell_bound(&self, y0: &Rational, y1: &Rational) -> Rational {
        let head = self.qplus.eval(y1) - self.qminus.eval(y0);
        if !head.is_positive() {
            return Rational::zero();
        }
        let t = &self.alpha * y0;
        let sum = self.exp_partial_sum(&t, &head);
        head / sum
    }

    /// A Taylor partial sum `S` of `e^t`, long enough that `head / S` either
    /// is at most `slack` or is within a relative `slack` of `head e^{-t}`.
    fn exp_partial_sum(&self, t: &Rational, head: &Rational) -> Rational {
        let easy = head / &self.slack;
        let mut term = Rational::one();
        let mut sum = Rational::one();
        for i in 1..=MAX_EXP_TERMS {
            term = term * t / int(i as i64);
            sum += &term;
            if sum > easy {
                break;
            }
            // Past i >= 2t the tail is at most the last term, so stopping
            // here leaves a relative error of at most term / sum.
            if int(i as i64) >= int(2) * t && term <= &sum * &self.slack {
                break;
            }
        }
        sum
    }

    /// The uniform mesh over `[c1, c2]` from the fixture, refined as needed.
    pub fn certify(&self, fixture: &EnvelopeFixture, cells: u32, depth_cap: u32) -> MeshOutcome {
        let mesh = uniform_cells(&fixture.c1, &fixture.c2, cells);
        certify_cells(mesh, &|a: &Rational, b: &Rational| self.cell_bound(a, b), &self.threshold, depth_cap)
    }
}

/// `(R+(x) - R-(x)) (1 - x)^m` at one `r`, where `R+ - R- = P/P(0)` is the
/// split by coefficient sign and `m = 2(r - k) - 1`. This is `A^2 / A^2(0)`
/// written in `x = t`.
#[derive(Debug, Clone)]
pub struct SmallRMajorant {
    pub r: u32,
    pub exponent: u64,
    pub rplus: Poly,
    pub rminus: Poly,
    pub threshold: Rational,
}

impl SmallRMajorant {
    pub fn new(k: u32, r: u32, margin: &Rational) -> Result<Self, CertifyError> {
        let factorization = factor_amplitude_direct(ProblemSpec::new(r, k)?)?;
        let (rplus, rminus) = factorization.normalized_p().split_by_sign();
        Ok(SmallRMajorant {
            r,
            exponent: factorization.exponent as u64,
            rplus,
            rminus,
            threshold: Rational::one() - margin,
        })
    }

    /// Upper bound over `[x0, x1]` with `0 <= x0 <= x1 <= 1`.
    pub fn cell_bound(&self, x0: &Rational, x1: &Rational) -> Rational {
        let head = self.rplus.eval(x1) - self.rminus.eval(x0);
        if !head.is_positive() {
            return Rational::zero();
        }
        head * pow_upper_bound(&(Rational::one() - x0), self.exponent, POWER_BITS)
    }

    /// The interval `[c1/r, min(c2/r, 1)]` in `x`.
    pub fn interval(&self, fixture: &EnvelopeFixture) -> (Rational, Rational) {
        let r = int(self.r as i64);
        let hi = (&fixture.c2 / &r).min(Rational::one());
        (&fixture.c1 / &r, hi)
    }

    /// Certifies `cells` uniform cells over `[lo, hi]`.
    ///
    /// The first pass runs in integers over the common denominator of the
    /// mesh and gives exactly the values of [`Self::cell_bound`]; cells above
    /// the threshold are then bisected in rationals.
    pub fn certify(&self, lo: &Rational, hi: &Rational, cells: u32, depth_cap: u32) -> MeshOutcome {
        let grid = IntegerGrid::new(self, lo, hi, cells);
        let bound = |a: &Rational, b: &Rational| self.cell_bound(a, b);
        let mut out = MeshOutcome::empty();
        let mut best_numer = BigInt::zero();
        let threshold_numer = self.threshold.numer();
        let threshold_denom = self.threshold.denom();
        // value = numer / grid.denominator; value <= threshold
        //   iff numer * td <= tn * denominator
        let limit = threshold_numer * &grid.denominator;
        for i in 0..cells {
            let numer = grid.bound_numer(i);
            if &numer * threshold_denom <= limit {
                if numer > best_numer {
                    best_numer = numer;
                }
                out.initial_cells += 1;
                out.evaluations += 1;
                continue;
            }
            let (a, b) = grid.cell(i);
            let first = Rational::new(numer, grid.denominator.clone());
            out = out.merge(refine(a, b, first, &bound, &self.threshold, depth_cap));
        }
        let uniform_max = Rational::new(best_numer, grid.denominator.clone());
        if uniform_max > out.max_bound {
            out.max_bound = uniform_max;
        }
        out
    }
}

/// Uniform mesh with all endpoints `n_i / D` for one integer `D`.
struct IntegerGrid<'a> {
    majorant: &'a SmallRMajorant,
    d: BigInt,
    start: BigInt,
    step: BigInt,
    plus: Vec<BigInt>,
    minus: Vec<BigInt>,
    /// `D^j` for `j = 0 ..= degree`.
    d_pows: Vec<BigInt>,
    /// Denominator shared by every cell's bound.
    denominator: BigInt,
    /// Scale of the power factor: `2^bits`, or `D^m` when `m <= 1`.
    power_scale: BigInt,
}

impl<'a> IntegerGrid<'a> {
    fn new(majorant: &'a SmallRMajorant, lo: &Rational, hi: &Rational, cells: u32) -> Self {
        let n = BigInt::from(cells);
        let base = num_integer::Integer::lcm(lo.denom(), hi.denom());
        let d = &base * &n;
        let start = lo.numer() * (&d / lo.denom());
        let end = hi.numer() * (&d / hi.denom());
        let step = (&end - &start) / &n;
        debug_assert_eq!(&start + &step * &n, end);

        let degree = majorant.rplus.coeffs().len().max(majorant.rminus.coeffs().len()).max(1) - 1;
        let common = majorant
            .rplus
            .coeffs()
            .iter()
            .chain(majorant.rminus.coeffs())
            .fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
        let scaled = |p: &Poly| -> Vec<BigInt> {
            (0..=degree).map(|j| (p.coeff(j) * Rational::from_integer(common.clone())).to_integer()).collect()
        };
        let plus = scaled(&majorant.rplus);
        let minus = scaled(&majorant.rminus);
        let mut d_pows = vec![BigInt::one()];
        for _ in 0..degree {
            let next = d_pows.last().unwrap() * &d;
            d_pows.push(next);
        }
        let power_scale = if majorant.exponent <= 1 {
            num_traits::pow(d.clone(), majorant.exponent as usize)
        } else {
            pow2(POWER_BITS as u64)
        };
        let denominator = &common * &d_pows[degree] * &power_scale;
        IntegerGrid { majorant, d, start, step, plus, minus, d_pows, denominator, power_scale }
    }

    fn node(&self, i: u32) -> BigInt {
        &self.start + &self.step * BigInt::from(i)
    }

    fn cell(&self, i: u32) -> (Rational, Rational) {
        (
            Rational::new(self.node(i), self.d.clone()),
            Rational::new(self.node(i + 1), self.d.clone()),
        )
    }

    /// `sum_j e_j n^j D^{degree - j}` by Horner.
    fn horner(&self, e: &[BigInt], n: &BigInt) -> BigInt {
        let degree = e.len() - 1;
        let mut acc = e[degree].clone();
        for j in (0..degree).rev() {
            acc = acc * n + &e[j] * &self.d_pows[degree - j];
        }
        acc
    }

    /// Numerator over `self.denominator` of the cell bound.
    fn bound_numer(&self, i: u32) -> BigInt {
        let n0 = self.node(i);
        let n1 = self.node(i + 1);
        let head = self.horner(&self.plus, &n1) - self.horner(&self.minus, &n0);
        if !head.is_positive() {
            return BigInt::zero();
        }
        let rest = &self.d - &n0;
        let m = self.majorant.exponent;
        let power = if m <= 1 {
            num_traits::pow(rest, m as usize)
        } else {
            pow_upper_mantissa(&rest, &self.d, m, POWER_BITS)
        };
        debug_assert!(m <= 1 || self.power_scale == pow2(POWER_BITS as u64));
        head * power
    }
}

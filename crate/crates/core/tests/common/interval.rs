//! Outward-rounded intervals with 200-bit dyadic endpoints (about 60
//! significant digits), used as an independent reference for `e^{-t}` and
//! large powers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use sharpembed::exactmath::Rational;

const PRECISION: u64 = 200;

/// `m * 2^e`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Dyadic {
    m: BigInt,
    e: i64,
}

fn floor_shift(m: &BigInt, s: u64) -> BigInt {
    // `>>` on a negative BigInt rounds toward negative infinity.
    m >> s
}

fn ceil_shift(m: &BigInt, s: u64) -> BigInt {
    -floor_shift(&-m, s)
}

impl Dyadic {
    fn zero() -> Self {
        Dyadic { m: BigInt::zero(), e: 0 }
    }

    fn exact(m: BigInt, e: i64) -> Self {
        Dyadic { m, e }
    }

    /// Cuts the mantissa to `PRECISION` bits, rounding as asked.
    fn normalized(self, up: bool) -> Self {
        let bits = self.m.bits();
        if bits <= PRECISION {
            return self;
        }
        let s = bits - PRECISION;
        let m = if up { ceil_shift(&self.m, s) } else { floor_shift(&self.m, s) };
        Dyadic { m, e: self.e + s as i64 }
    }

    fn from_rational(q: &Rational, up: bool) -> Self {
        if q.is_zero() {
            return Dyadic::zero();
        }
        let e = q.numer().bits() as i64 - q.denom().bits() as i64 - PRECISION as i64 - 2;
        let (num, den) = if e <= 0 {
            (q.numer() << (-e) as u64, q.denom().clone())
        } else {
            (q.numer().clone(), q.denom() << e as u64)
        };
        let (quot, rem) = num.div_mod_floor(&den);
        let m = if up && !rem.is_zero() { quot + 1 } else { quot };
        Dyadic { m, e }.normalized(up)
    }

    fn to_rational(&self) -> Rational {
        if self.e >= 0 {
            Rational::from_integer(&self.m << self.e as u64)
        } else {
            Rational::new(self.m.clone(), BigInt::one() << (-self.e) as u64)
        }
    }

    fn mul(&self, other: &Dyadic, up: bool) -> Self {
        Dyadic { m: &self.m * &other.m, e: self.e + other.e }.normalized(up)
    }

    fn add(&self, other: &Dyadic, up: bool) -> Self {
        let e = self.e.min(other.e);
        let m = (&self.m << (self.e - e) as u64) + (&other.m << (other.e - e) as u64);
        Dyadic { m, e }.normalized(up)
    }

    /// `1 / self` for positive `self`.
    fn recip(&self, up: bool) -> Self {
        assert!(self.m.is_positive());
        let s = 2 * PRECISION + 2;
        let (quot, rem) = (BigInt::one() << s).div_mod_floor(&self.m);
        let m = if up && !rem.is_zero() { quot + 1 } else { quot };
        Dyadic { m, e: -self.e - s as i64 }.normalized(up)
    }

    fn is_negative(&self) -> bool {
        self.m.is_negative()
    }
}

/// `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    pub fn point(q: Rational) -> Self {
        Interval { lo: Dyadic::from_rational(&q, false), hi: Dyadic::from_rational(&q, true) }
    }

    pub fn lo(&self) -> Rational {
        self.lo.to_rational()
    }

    pub fn hi(&self) -> Rational {
        self.hi.to_rational()
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo() <= q && q <= &self.hi()
    }

    /// Relative width `(hi - lo) / |lo|`, for precision checks.
    pub fn relative_width(&self) -> f64 {
        ((self.hi() - self.lo()) / self.lo().abs()).to_f64().unwrap()
    }

    /// Product of two intervals of nonnegative numbers.
    pub fn mul_nonneg(&self, other: &Interval) -> Interval {
        assert!(!self.lo.is_negative() && !other.lo.is_negative());
        Interval { lo: self.lo.mul(&other.lo, false), hi: self.hi.mul(&other.hi, true) }
    }

    /// `q * self` for any sign of `q`, with `self` nonnegative.
    pub fn scale(&self, q: &Rational) -> Interval {
        assert!(!self.lo.is_negative());
        let (qlo, qhi) = (Dyadic::from_rational(q, false), Dyadic::from_rational(q, true));
        if q.is_negative() {
            Interval { lo: qlo.mul(&self.hi, false), hi: qhi.mul(&self.lo, true) }
        } else {
            Interval { lo: qlo.mul(&self.lo, false), hi: qhi.mul(&self.hi, true) }
        }
    }

    /// `1 / self` for a positive interval.
    pub fn recip(&self) -> Interval {
        assert!(self.lo.m.is_positive());
        Interval { lo: self.hi.recip(false), hi: self.lo.recip(true) }
    }

    pub fn powu(&self, mut e: u64) -> Interval {
        let mut base = self.clone();
        let one = Dyadic::exact(BigInt::one(), 0);
        let mut acc = Interval { lo: one.clone(), hi: one };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_nonneg(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_nonneg(&base);
            }
        }
        acc
    }
}

/// `e^f` for `0 <= f <= 1` from 60 Taylor terms, each rounded outward; the
/// tail after term `n` is below twice the next term.
fn exp_unit(f: &Rational) -> Interval {
    assert!(!f.is_negative() && f <= &Rational::one());
    let n = 60;
    let (f_lo, f_hi) = (Dyadic::from_rational(f, false), Dyadic::from_rational(f, true));
    let one = Dyadic::exact(BigInt::one(), 0);
    let (mut lo, mut hi) = (one.clone(), one.clone());
    let (mut sum_lo, mut sum_hi) = (one.clone(), one);
    for i in 1..=n {
        let inv = Rational::new(BigInt::one(), BigInt::from(i));
        lo = lo.mul(&f_lo, false).mul(&Dyadic::from_rational(&inv, false), false);
        hi = hi.mul(&f_hi, true).mul(&Dyadic::from_rational(&inv, true), true);
        sum_lo = sum_lo.add(&lo, false);
        sum_hi = sum_hi.add(&hi, true);
    }
    let tail = hi.mul(&Dyadic::from_rational(&Rational::new(2.into(), (n + 1).into()), true), true);
    Interval { lo: sum_lo, hi: sum_hi.add(&tail, true) }
}

thread_local! {
    static INV_E: Interval = exp_unit(&Rational::one()).recip();
}

/// Enclosure of `e^{-t}` for rational `t >= 0`: `(e^{-1})^n e^{-f}` with
/// `n = floor(t)`.
pub fn exp_neg(t: &Rational) -> Interval {
    assert!(!t.is_negative());
    let n = t.floor();
    let f = t - &n;
    let whole = INV_E.with(|e| e.powu(n.to_integer().to_u64().unwrap()));
    whole.mul_nonneg(&exp_unit(&f).recip())
}

//! Re-probes certified mesh cells against the interval reference.

use num_bigint::BigInt;
use num_traits::One;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sharpembed::certify::mesh::uniform_cells;
use sharpembed::certify::{EnvelopeFixture, LargeRMajorant, SmallRMajorant};
use sharpembed::exactmath::{int, Rational};

use super::interval::{exp_neg, Interval};

/// A certified cell and the largest reference upper value seen inside it.
#[derive(Debug, Clone)]
pub struct AuditedCell {
    pub lo: Rational,
    pub hi: Rational,
    pub bound: Rational,
    pub worst: Rational,
}

impl AuditedCell {
    pub fn sound(&self) -> bool {
        self.worst <= self.bound
    }
}

/// Point of `[lo, hi]` at a random 32-bit fraction, endpoints included.
fn probe(rng: &mut ChaCha8Rng, lo: &Rational, hi: &Rational) -> Rational {
    let u: u64 = rng.gen_range(0..=1u64 << 32);
    lo + (hi - lo) * Rational::new(BigInt::from(u), BigInt::from(1u64 << 32))
}

/// Picks a random top-level cell and bisects into random halves until the
/// bound certifies, as the adaptive mesh would. `None` past the depth cap.
fn certified_leaf<F>(
    rng: &mut ChaCha8Rng,
    cells: &[(Rational, Rational)],
    bound: F,
    threshold: &Rational,
) -> Option<(Rational, Rational, Rational)>
where
    F: Fn(&Rational, &Rational) -> Rational,
{
    let (mut lo, mut hi) = cells[rng.gen_range(0..cells.len())].clone();
    for _ in 0..=20 {
        let b = bound(&lo, &hi);
        if &b <= threshold {
            return Some((lo, hi, b));
        }
        let mid = (&lo + &hi) / int(2);
        if rng.gen_bool(0.5) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    None
}

/// Audits `cells` random certified cells of the large-`r` mesh with
/// `probes` points each; the reference value at `y` is
/// `(Q+(y) - Q-(y)) e^{-alpha y}` with the exponential enclosed.
pub fn audit_large_r(fixture: &EnvelopeFixture, cells: usize, probes: usize, rng: &mut ChaCha8Rng) -> Vec<AuditedCell> {
    let majorant = LargeRMajorant::from_fixture(fixture);
    let mesh = uniform_cells(&fixture.c1, &fixture.c2, fixture.large_r_cells);
    let mut out = Vec::new();
    while out.len() < cells {
        let Some((lo, hi, bound)) =
            certified_leaf(rng, &mesh, |a, b| majorant.cell_bound(a, b), &majorant.threshold)
        else {
            continue;
        };
        let mut worst = None::<Rational>;
        for _ in 0..probes {
            let y = probe(rng, &lo, &hi);
            let head = fixture.qtilde_plus.eval(&y) - fixture.qtilde_minus.eval(&y);
            let value = exp_neg(&(&fixture.alpha * &y)).scale(&head).hi();
            if worst.as_ref().map_or(true, |w| &value > w) {
                worst = Some(value);
            }
        }
        out.push(AuditedCell { lo, hi, bound, worst: worst.unwrap() });
    }
    out
}

/// The same audit for fixed-`r` cells: `(P/P(0))(x) (1 - x)^m`, the power
/// enclosed by interval multiplication.
pub fn audit_small_r(
    fixture: &EnvelopeFixture,
    rs: &[u32],
    cells: usize,
    probes: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<AuditedCell> {
    let mut out = Vec::new();
    while out.len() < cells {
        let r = rs[rng.gen_range(0..rs.len())];
        let majorant = SmallRMajorant::new(fixture.k, r, &fixture.margin).unwrap();
        let (lo, hi) = majorant.interval(fixture);
        let mesh = uniform_cells(&lo, &hi, fixture.cells_for(r).unwrap());
        let Some((lo, hi, bound)) =
            certified_leaf(rng, &mesh, |a, b| majorant.cell_bound(a, b), &majorant.threshold)
        else {
            continue;
        };
        let p = &majorant.rplus - &majorant.rminus;
        let mut worst = None::<Rational>;
        for _ in 0..probes {
            let x = probe(rng, &lo, &hi);
            let power = Interval::point(Rational::one() - &x).powu(majorant.exponent);
            let value = power.scale(&p.eval(&x)).hi();
            if worst.as_ref().map_or(true, |w| &value > w) {
                worst = Some(value);
            }
        }
        out.push(AuditedCell { lo, hi, bound, worst: worst.unwrap() });
    }
    out
}

use super::{rodrigues_poly, ProblemSpec};
use crate::exactmath::{rat, Poly, Rational};

/// Partial sum `sum_{n=r}^{N} (n + 1/2) Q_n^{(n+k-r)}(x) Q_n^{(n-r)}(t)` of the
/// series for the function attaining `A_{r,k}(x)`, as a polynomial in `t`.
///
/// Only finite truncations are exposed; nothing here says how the series
/// converges.
pub fn extremal_series_truncated(spec: ProblemSpec, x: &Rational, n_max: u32) -> Poly {
    let (r, k) = (spec.r(), spec.k());
    let mut total = Poly::zero();
    for n in r..=n_max {
        let q = rodrigues_poly(n);
        let weight = q.differentiate((n + k - r) as usize).eval(x) * rat(2 * n as i64 + 1, 2);
        total = &total + &q.differentiate((n - r) as usize).scale(&weight);
    }
    total
}

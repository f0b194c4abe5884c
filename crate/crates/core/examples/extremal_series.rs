//! Truncations of the series for the extremal function at `x = 0`: only
//! powers of the parity of `k` survive.

use sharpembed::amplitude::{extremal_series_truncated, ProblemSpec};
use sharpembed::exactmath::int;

fn main() {
    for (r, k) in [(3, 1), (3, 2), (5, 4)] {
        let f = extremal_series_truncated(ProblemSpec::new(r, k).unwrap(), &int(0), r + 6);
        println!("r = {r} k = {k}: f(t) ~ {f}");
    }
}

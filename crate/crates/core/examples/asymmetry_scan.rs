//! Locates the maximum of `A_{r,k}` numerically. For odd `k` it sits away
//! from the center; for even `k` the scan lands on `x = 0`.

use sharpembed::amplitude::ProblemSpec;
use sharpembed::oracle::argmax_scan;

fn main() {
    for (r, k) in [(2, 1), (4, 1), (4, 3), (6, 3), (5, 4), (7, 6)] {
        let s = argmax_scan(ProblemSpec::new(r, k).unwrap(), 4001, 1e-12);
        println!(
            "r = {r} k = {k}: |x*| = {:.8}  A^2 = {:.12e}  lambda ~ {:.8e}",
            s.x_star,
            s.amplitude_squared,
            1.0 / s.amplitude
        );
    }
}

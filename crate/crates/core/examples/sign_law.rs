//! `(A^2)''(0)` for small `(r, k)`: positive for odd `k` (the center is a
//! local minimum, so the extremal cannot be symmetric), negative for even
//! `k >= 2`.

use sharpembed::amplitude::{second_derivative_at_zero, CenterExtremum, ProblemSpec};
use sharpembed::exactmath::format_rational;

fn main() {
    let r_max = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(7u32);
    for r in 2..=r_max {
        for k in 1..r {
            let b = second_derivative_at_zero(ProblemSpec::new(r, k).unwrap()).expect("three routes agree");
            let shape = match b.verdict {
                CenterExtremum::LocalMin => "local min",
                CenterExtremum::LocalMax => "local max",
            };
            println!("r = {r:>2} k = {k:>2}  A''(0) = {:>32}  {shape}", format_rational(&b.second_derivative));
        }
    }
}

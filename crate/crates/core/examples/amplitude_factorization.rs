//! Factors `A^2_{r,k}` as `P(x^2) (1 - x^2)^m` and prints `P` and the
//! derivative polynomial `P1` for a few `(r, k)`.
//!
//!     cargo run --example amplitude_factorization -- 5 4

use sharpembed::amplitude::{factor_amplitude, factor_amplitude_direct, ProblemSpec};
use sharpembed::exactmath::format_rational;

fn main() {
    let args: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let pairs = match args.as_slice() {
        [r, k] => vec![(*r, *k)],
        _ => vec![(2, 1), (3, 2), (5, 4), (7, 6)],
    };
    for (r, k) in pairs {
        let spec = match ProblemSpec::new(r, k) {
            Ok(spec) => spec,
            Err(e) => {
                eprintln!("{e}");
                std::process::exit(1);
            }
        };
        let f = factor_amplitude(spec).expect("A^2 is divisible by (1 - x^2)^m");
        // The reduced route never expands A^2; both must agree exactly.
        assert_eq!(f, factor_amplitude_direct(spec).unwrap());
        println!("r = {r}, k = {k}, m = {}", f.exponent);
        // Printed in the squared variable t = x^2, shown as x.
        println!("  P  = {}", f.p_poly);
        println!("  P1 = {}", f.p1_poly);
        println!("  A^2(0) = {}", format_rational(&f.p_poly.coeff(0)));
    }
}

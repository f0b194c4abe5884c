//! Exact best constants `lambda^2 = 1 / A^2(0)` for even `k`, next to the
//! value of the closed form printed for `k = 4, 6`.

use sharpembed::amplitude::{best_constant, ProblemSpec};

fn main() {
    let k = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(4u32);
    for r in k + 1..=k + 8 {
        let b = match best_constant(ProblemSpec::new(r, k).unwrap(), 15) {
            Ok(b) => b,
            Err(e) => {
                eprintln!("{e}");
                std::process::exit(1);
            }
        };
        print!("r = {r:>2}  lambda^2 = {:<28} lambda = {:<20}", b.lambda_squared, b.lambda);
        if let Some(p) = &b.printed_formula {
            print!("  printed {} (ratio {})", p.value_decimal, p.discrepancy_ratio);
        }
        println!();
    }
}

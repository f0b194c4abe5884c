//! Certifies that the amplitude peaks at the center for k = 4 (or the `k`
//! given as the first argument), printing one line per stage. A fixture file
//! or built-in name can be passed with `--fixture`.
//!
//!     cargo run --release --example certify_center -- 6 --quick
//!     cargo run --release --example certify_center -- --fixture k4-amended

use std::time::Instant;

use sharpembed::certify::{certify_global_center_max, CertifyOptions, EnvelopeFixture};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let k = args.iter().find_map(|a| a.parse().ok()).unwrap_or(4);
    let fixture_name = args.iter().position(|a| a == "--fixture").and_then(|i| args.get(i + 1));
    let options = if args.iter().any(|a| a == "--quick") { CertifyOptions::quick() } else { CertifyOptions::default() };

    let started = Instant::now();
    let fixture = match fixture_name {
        Some(name) => EnvelopeFixture::resolve(name),
        None => EnvelopeFixture::builtin(k),
    };
    let report = match fixture.map(|f| certify_global_center_max(&f, &options)) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    for stage in &report.stages {
        let margin = stage.margin.as_ref().map(|m| format!(" margin {}", m.decimal)).unwrap_or_default();
        println!("{:<20} {:?}{margin}", stage.name, stage.status);
        if let Some(w) = &stage.witness {
            println!("    witness: {w}");
        }
    }
    println!("k = {}: {:?}, covering {}", report.k, report.verdict, report.covered_r);
    for row in report.lambda_table.iter().take(4) {
        println!("  r = {:>2}  lambda^2 = {:<24} lambda = {}", row.r, row.lambda_squared, row.lambda);
    }
    eprintln!("elapsed {:.1?}", started.elapsed());
}

//! Samples the large-r envelope `(Q+(y) - Q-(y)) e^{-alpha y}` of a fixture
//! in floating point and reports its peak, next to the exact mesh bound.
//!
//!     cargo run --release --example envelope_audit -- k4
//!     cargo run --release --example envelope_audit -- k4-amended

use sharpembed::certify::mesh::LargeRMajorant;
use sharpembed::certify::EnvelopeFixture;
use sharpembed::exactmath::decimal::{to_decimal, Rounding};

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "k4".to_string());
    let fixture = match EnvelopeFixture::resolve(&name) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let alpha = num_traits::ToPrimitive::to_f64(&fixture.alpha).unwrap();
    let envelope = |y: f64| {
        (fixture.qtilde_plus.eval_f64(y) - fixture.qtilde_minus.eval_f64(y)) * (-alpha * y).exp()
    };
    // The mesh covers y in [c1, c2].
    let c1 = num_traits::ToPrimitive::to_f64(&fixture.c1).unwrap();
    let c2 = num_traits::ToPrimitive::to_f64(&fixture.c2).unwrap();
    let (mut y_peak, mut peak) = (c1, f64::MIN);
    for i in 0..=200_000 {
        let y = c1 + (c2 - c1) * i as f64 / 200_000.0;
        let v = envelope(y);
        if v > peak {
            (y_peak, peak) = (y, v);
        }
    }
    println!("{name}: sampled peak {peak:.6} at y = {y_peak:.6} on [{c1}, {c2}]");

    let outcome = LargeRMajorant::from_fixture(&fixture).certify(&fixture, fixture.large_r_cells, 20);
    match outcome.failure {
        None => println!(
            "certified: exact bound {}, margin {}",
            to_decimal(&outcome.max_bound, 6, Rounding::Ceil),
            to_decimal(&outcome.margin(), 4, Rounding::Floor)
        ),
        Some(cell) => println!("not certified: {}", cell.describe()),
    }
}

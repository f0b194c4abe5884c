//! Exact positivity decisions and directed bounds used by the certificate.

use sharpembed::exactmath::bounds::exp_partial_sum;
use sharpembed::exactmath::decimal::{to_decimal, Rounding};
use sharpembed::exactmath::{exp_upper_bound, int, positivity_on_ray, positivity_outside_interval, rat, Poly};

fn main() {
    // 13r^2 - 96r + 160 has no root at or beyond 5
    let q = Poly::from_ints(&[160, -96, 13]);
    println!("{q} > 0 on [5, inf): {:?}", positivity_on_ray(&q, &int(5)));

    let envelope = Poly::from_ints(&[45, -350, 112, -228, 3]);
    println!(
        "{envelope} > 0 off [1/10, 76]: {:?}",
        positivity_outside_interval(&envelope, &rat(1, 10), &int(76))
    );
    println!(
        "... but not off [1/10, 60]: {:?}",
        positivity_outside_interval(&envelope, &rat(1, 10), &int(60))
    );

    let t = rat(9, 5);
    for terms in [4, 8, 16] {
        let bound = exp_upper_bound(&t, terms);
        println!(
            "e^(-9/5) <= 1/S_{terms} = {} (partial sum {})",
            to_decimal(&bound, 12, Rounding::Ceil),
            to_decimal(&exp_partial_sum(&t, terms), 12, Rounding::Floor)
        );
    }
}

//! Cross-checks the closed form of `A^2` against the projection of the
//! evaluation kernel onto the boundary constraints.

use sharpembed::amplitude::{amplitude_squared, ProblemSpec};
use sharpembed::exactmath::{format_rational, rat};
use sharpembed::oracle::{oracle_amplitude_squared, EvaluationKernel};

fn main() {
    let spec = ProblemSpec::new(4, 1).unwrap();
    let closed = amplitude_squared(spec);
    for x in [rat(0, 1), rat(1, 4), rat(-1, 2), rat(3, 4)] {
        let kernel = EvaluationKernel::new(spec, x.clone());
        let projected = oracle_amplitude_squared(spec, &x);
        println!(
            "x = {:>5}: |phi|^2 = {:>12}  projection = {:>12}  A^2 = {:>14}  closed form agrees: {}",
            format_rational(&x),
            format_rational(&kernel.norm_squared()),
            format_rational(&kernel.projection_squared()),
            format_rational(&projected),
            closed.eval(&x) == projected
        );
    }
}

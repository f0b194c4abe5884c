//! Independent computation of `A^2_{r,k}(x)` as the squared norm of an
//! evaluation functional, plus a floating point maximizer.
//!
//! With `g = f^{(r)}`, the left boundary conditions give
//! `f^{(k)}(x) = <phi_x, g>` where `phi_x(s) = (x - s)^{r-k-1} / (r-k-1)!` on
//! `[-1, x]` and zero beyond. The right boundary conditions say exactly that
//! `g` is orthogonal to `(1 - s)^j` for `j < r`, i.e. to every polynomial of
//! degree `< r`. The Legendre polynomials `L_0 .. L_{r-1}` span the same space
//! and are orthogonal, so
//!
//! ```text
//! A^2(x) = ||phi_x||^2 - sum_{j<r} (2j+1)/2 <phi_x, L_j>^2.
//! ```
//!
//! Nothing here touches the closed form in [`crate::amplitude`].

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::amplitude::{factor_amplitude_direct, ProblemSpec};
use crate::exactmath::{factorial, int, rat, Poly, Rational};

/// Legendre polynomials `L_0 ..= L_{n-1}` by the three-term recurrence.
pub fn legendre_basis(n: usize) -> Vec<Poly> {
    let mut basis = Vec::with_capacity(n);
    if n == 0 {
        return basis;
    }
    basis.push(Poly::one());
    if n == 1 {
        return basis;
    }
    basis.push(Poly::x());
    for j in 1..n - 1 {
        // (j+1) L_{j+1} = (2j+1) x L_j - j L_{j-1}
        let a = (&Poly::x() * &basis[j]).scale(&int(2 * j as i64 + 1));
        let b = basis[j - 1].scale(&int(j as i64));
        basis.push((&a - &b).scale(&rat(1, j as i64 + 1)));
    }
    basis
}

/// The kernel `phi_x` restricted to its support `[-1, x]`.
#[derive(Debug, Clone)]
pub struct EvaluationKernel {
    pub spec: ProblemSpec,
    pub x: Rational,
    /// `(x - s)^{r-k-1} / (r-k-1)!` as a polynomial in `s`.
    pub kernel: Poly,
}

impl EvaluationKernel {
    pub fn new(spec: ProblemSpec, x: Rational) -> Self {
        assert!(x > int(-1) && x < int(1), "need |x| < 1");
        let d = spec.r() - spec.k() - 1;
        let base = Poly::new(vec![x.clone(), int(-1)]);
        let kernel = base.pow(d).scale(&Rational::new(BigInt::one(), factorial(d as u64)));
        EvaluationKernel { spec, x, kernel }
    }

    /// `int_{-1}^{1} phi_x(s) q(s) ds`; the only knot is `s = x`.
    pub fn inner(&self, q: &Poly) -> Rational {
        (&self.kernel * q).integrate(&int(-1), &self.x)
    }

    pub fn norm_squared(&self) -> Rational {
        self.inner(&self.kernel)
    }

    /// `sum_{j<r} (2j+1)/2 <phi_x, L_j>^2`.
    pub fn projection_squared(&self) -> Rational {
        legendre_basis(self.spec.r() as usize)
            .iter()
            .enumerate()
            .map(|(j, l)| {
                let c = self.inner(l);
                &c * &c * rat(2 * j as i64 + 1, 2)
            })
            .sum()
    }
}

/// `A^2_{r,k}(x)` for `|x| < 1` by orthogonal projection.
pub fn oracle_amplitude_squared(spec: ProblemSpec, x: &Rational) -> Rational {
    let kernel = EvaluationKernel::new(spec, x.clone());
    kernel.norm_squared() - kernel.projection_squared()
}

/// Non-rigorous location of `max A` on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanResult {
    /// Maximizer with the largest `|x|` among ties, reported nonnegative.
    pub x_star: f64,
    pub amplitude_squared: f64,
    pub amplitude: f64,
    pub grid_points: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Evaluates `A^2` in floating point on a symmetric odd grid over `[-1, 1]`
/// (so `x = 0` is always probed) and refines the best bracket by golden
/// section to `refine_tolerance`.
pub fn argmax_scan(spec: ProblemSpec, grid_points: usize, refine_tolerance: f64) -> ScanResult {
    assert!(grid_points >= 64, "grid needs at least 64 points");
    let n = if grid_points % 2 == 0 { grid_points + 1 } else { grid_points };
    let factorization = factor_amplitude_direct(spec).expect("factorization is an identity");
    let p: Vec<f64> = factorization.p_poly.coeffs().iter().map(|c| c.to_f64().unwrap()).collect();
    let m = factorization.exponent as i32;
    let amp2 = |x: f64| {
        let t = x * x;
        let pt = p.iter().rev().fold(0.0, |acc, c| acc * t + c);
        pt * (1.0 - t).powi(m)
    };
    let half = (n - 1) / 2;
    let step = 1.0 / half as f64;
    // Only the nonnegative half is needed: A is even and ties go to +|x|.
    let mut best_i = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=half {
        let v = amp2(i as f64 * step);
        if v >= best_v {
            best_v = v;
            best_i = i;
        }
    }
    let grid_x = best_i as f64 * step;
    let lo = (grid_x - step).max(-1.0);
    let hi = (grid_x + step).min(1.0);
    let refined = golden_section_max(amp2, lo, hi, refine_tolerance).abs();
    let (x_star, value) = if amp2(refined) > best_v { (refined, amp2(refined)) } else { (grid_x, best_v) };
    ScanResult { x_star, amplitude_squared: value, amplitude: value.sqrt(), grid_points: n }
}

/// `lambda ~ 1 / max A` from the scan; not certified.
pub fn best_constant_via_scan(spec: ProblemSpec, grid_points: usize, refine_tolerance: f64) -> f64 {
    1.0 / argmax_scan(spec, grid_points, refine_tolerance).amplitude
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(r: u32, k: u32) -> ProblemSpec {
        ProblemSpec::new(r, k).unwrap()
    }

    #[test]
    fn legendre_orthogonality() {
        let basis = legendre_basis(6);
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let ip = (a * b).integrate(&int(-1), &int(1));
                if i == j {
                    assert_eq!(ip, rat(2, 2 * i as i64 + 1));
                } else {
                    assert_eq!(ip, int(0));
                }
            }
        }
        assert_eq!(basis[2], Poly::new(vec![rat(-1, 2), int(0), rat(3, 2)]));
    }

    #[test]
    fn oracle_spot_values() {
        assert_eq!(oracle_amplitude_squared(spec(2, 1), &int(0)), rat(1, 8));
        assert_eq!(oracle_amplitude_squared(spec(3, 2), &int(0)), rat(1, 8));
        assert_eq!(oracle_amplitude_squared(spec(5, 4), &int(0)), rat(9, 128));
        assert_eq!(oracle_amplitude_squared(spec(1, 0), &rat(1, 2)), rat(3, 8));
    }

    #[test]
    fn projection_below_norm() {
        let kernel = EvaluationKernel::new(spec(4, 1), rat(1, 3));
        assert!(kernel.projection_squared() < kernel.norm_squared());
    }

    #[test]
    fn scan_examples() {
        let s = argmax_scan(spec(2, 1), 1001, 1e-10);
        assert!((s.x_star - 1.0 / 3f64.sqrt()).abs() < 1e-6);
        assert!((s.amplitude_squared - 1.0 / 6.0).abs() < 1e-12);

        let s = argmax_scan(spec(5, 4), 1001, 1e-10);
        assert_eq!(s.x_star, 0.0);

        let s = argmax_scan(spec(1, 0), 64, 1e-10);
        assert_eq!(s.grid_points, 65);
        assert_eq!(s.x_star, 0.0);
        assert!((s.amplitude - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((best_constant_via_scan(spec(1, 0), 65, 1e-10) - 2f64.sqrt()).abs() < 1e-12);
    }
}

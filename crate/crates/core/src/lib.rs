//! Sharp constants for the embedding of the zero-boundary Sobolev class
//! `W^r_2(-1, 1)` into `C[-1, 1]` for the `k`-th derivative.
//!
//! The crate computes the amplitude function `A_{r,k}` in closed form and by
//! an independent Hilbert-space projection, decides whether the extremal is
//! symmetric, and re-runs the computer-assisted proof that the center is the
//! global maximum of the amplitude for `k = 4` and `k = 6` with exact
//! rational arithmetic throughout.
//!
//! Modules, bottom-up:
//!
//! * [`exactmath`]: rationals, dense polynomials, Sturm sequences and
//!   directed bounds.
//! * [`amplitude`]: the closed form of `A^2_{r,k}`, its factorization, the
//!   second derivative at zero and best constants.
//! * [`oracle`]: the projection computation of `A^2_{r,k}` and a floating
//!   point maximizer.
//! * [`certify`]: envelope fixtures, interpolation lifting and the mesh
//!   certificates.
//! * [`cli`]: command implementations behind the `sharpembed` binary.

pub mod amplitude;
pub mod certify;
pub mod cli;
pub mod exactmath;
pub mod oracle;

pub use amplitude::{AmplitudeError, ProblemSpec};
pub use exactmath::{Poly, Rational};

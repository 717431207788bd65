//! Numerical toolkit for the lambda-Green function and lambda-potential
//! kernel of hyperbolic Brownian motion on a half-space.
//!
//! The toolkit evaluates the kernels through their exact representations —
//! modified Bessel brackets, Laplace transforms of exponential Brownian
//! functionals, and killed Bessel heat kernels — verifies the sharp
//! two-sided comparator estimates over parameter grids, and cross-validates
//! every analytic pipeline against an independent Monte Carlo simulator of
//! the underlying diffusions.
//!
//! Module map:
//!
//! * [`specfun`] — modified Bessel functions, the bracket `S_nu`, incomplete
//!   gamma integrals.
//! * [`laplace`] — forward Laplace transforms by quadrature, inverse
//!   transforms by real-node (Gaver–Stehfest) and complex-contour (Talbot)
//!   algorithms.
//! * [`functionals`] — Hartman–Watson density, joint law of the exponential
//!   functional, the potential `Q`, the hitting-functional density `q`, and
//!   the Green function `G_ab` of the two-dimensional process.
//! * [`besselproc`] — Bessel transition densities (free and killed at a
//!   level), hitting-time densities, and the killed-kernel comparator.
//! * [`hyperbolic`] — half-space geometry, quadrature evaluation of `U` and
//!   `G`, and the comparator formulas.
//! * [`mcsim`] — path simulation oracles with deterministic parallel RNG.
//! * [`verify`] / [`sweep`] — named identity suites and bound-ratio sweeps
//!   shared by the CLI and the acceptance tests.

pub mod besselproc;
pub mod error;
pub mod functionals;
pub mod hyperbolic;
pub mod laplace;
pub mod mcsim;
pub mod quad;
pub mod specfun;
pub mod sweep;
pub mod types;
pub mod verify;

pub use error::{Error, Result};
pub use types::{EvalResult, KernelValue, MCEstimate, Measure, Method};

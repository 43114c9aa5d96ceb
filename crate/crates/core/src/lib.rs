//! Time-fractional Schrödinger equation toolkit.
//!
//! * [`specfun`]: Mittag-Leffler function on the imaginary rays, its
//!   oscillatory/decay decomposition and the `F_ν` decay kernel.
//! * [`fraccalc`]: Caputo and Riemann–Liouville operators on sampled signals.
//! * [`tfse`]: closed-form free-particle and infinite-well solutions with
//!   probability, current, source and energy diagnostics.
//! * [`oracles`]: cross-checks that share no evaluation path with `specfun`.
//! * [`verify`]: the acceptance checks, runnable from tests and the CLI.

pub mod error;
pub mod fraccalc;
pub mod quad;
pub mod oracles;
pub mod specfun;
pub mod tfse;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

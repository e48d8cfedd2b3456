//! Spectral laboratory for the periodic cubic nonlinear Schrödinger equation
//! `i u_t − u_xx ± N(u) = 0` on `𝕋 = ℝ/2πℤ`, in both its plain form
//! (`N(u) = u|u|²`) and its Wick-ordered form (`N(u) = u|u|² − 2u∮|u|²`),
//! driven by Gaussian-randomized Fourier data.
//!
//! The crate is organized by subsystem:
//!
//! * [`spectral`]: Fourier states, transforms, Sobolev / Fourier–Lebesgue norms
//!   and discrete Bourgain-space functionals.
//! * [`random`]: seeded sampling of the random data and Monte Carlo tail checks.
//! * [`dynamics`]: linear propagation, the cubic nonlinearity and its
//!   resonant/non-resonant split, time integrators, exact solutions.
//! * [`highlow`]: the high/low frequency globalization loop.
//! * [`resonance`]: exact resonance and divisor counting.
//! * [`lab`]: ensemble experiments composing the above.

pub mod dynamics;
mod error;
pub mod highlow;
pub mod lab;
pub mod random;
pub mod resonance;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use num_complex::Complex64;

//! Time evolution of the plain and Wick-ordered cubic NLS
//!
//! ```text
//! i u_t − u_xx ± N(u) = 0,   N(u) = u|u|²   or   u|u|² − 2u∮|u|²
//! ```
//!
//! on the truncated system of modes `|n| ≤ M`. In Fourier variables this is
//! `û_t = i n² û ± i P_M N(u)^`, so the free flow is `S(t): û(n) ↦ e^{in²t}û(n)`.

mod config;
mod exact;
mod integrator;
mod nonlinearity;

pub use config::{Equation, EvolutionConfig, Integrator, Sign};
pub use exact::{duhamel_part, gauge_transform, plane_wave, wick_gauge_rate};
pub use integrator::{evolve, evolve_difference, evolve_steps, linear_propagate, step, step_plan};
pub use nonlinearity::{nonlinearity_full, nonlinearity_split, CubicKernel};

use num_complex::Complex64;

use super::{linear_propagate, Sign};
use crate::error::{Error, Result};
use crate::spectral::{FourierState, Trajectory};

/// `u_{N,a}(t) = a e^{i(Nx + N²t ∓ |a|²t)}`, an exact solution of the Wick-ordered
/// equation (upper sign defocusing).
pub fn plane_wave(a: Complex64, n: i64, cutoff: usize, sign: Sign, t: f64) -> FourierState {
    let phase = ((n * n) as f64 - sign.value() * a.norm_sqr()) * t;
    FourierState::single_mode(cutoff, n, a * Complex64::from_polar(1.0, phase), t)
}

/// Nonlinear part `w(t) = u(t) − S(t − t₀)u₀` of a trajectory started at `u0`.
pub fn duhamel_part(u0: &FourierState, traj: &Trajectory) -> Result<Trajectory> {
    let first = traj.first();
    if first.cutoff() != u0.cutoff() {
        return Err(Error::CutoffMismatch {
            expected: u0.cutoff(),
            found: first.cutoff(),
        });
    }
    if (first.time() - u0.time()).abs() > 1e-12 * (1.0 + u0.time().abs()) {
        return Err(Error::TimeMismatch {
            expected: u0.time(),
            found: first.time(),
        });
    }
    let mismatch = first.l2_distance(u0)?;
    if mismatch > 1e-12 * (1.0 + u0.l2_norm()) {
        return Err(Error::InitialStateMismatch { mismatch });
    }
    traj.map_states(|s| {
        let free = linear_propagate(u0, s.time() - u0.time());
        s.sub(&free).expect("cutoffs checked")
    })
}

/// Multiplies each state by the global phase `e^{iγ(t − t_start)}`.
pub fn gauge_transform(traj: &Trajectory, gamma: f64) -> Trajectory {
    let t0 = traj.t_start();
    traj.map_states(|s| s.scale(Complex64::from_polar(1.0, gamma * (s.time() - t0))))
        .expect("grid unchanged")
}

/// `γ = ∓2∮|u₀|²`, the phase rate relating the plain and Wick-ordered flows.
pub fn wick_gauge_rate(u0: &FourierState, sign: Sign) -> f64 {
    -2.0 * sign.value() * u0.mean_square()
}

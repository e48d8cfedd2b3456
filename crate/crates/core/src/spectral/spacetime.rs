//! Discrete Bourgain-space functionals on sampled trajectories.
//!
//! A trajectory `û(n, t_k)`, `k = 0..L`, is tapered by its window and
//! transformed in time per mode:
//!
//! ```text
//! F(n, τ_j) = dt Σ_k w_k û(n, t_k) e^{-iτ_j (t_k - t_start)},   τ_j = 2πj / (L' dt)
//! ```
//!
//! with `j ∈ [-L'/2, L'/2)` and `L' = padding · L`. Integrals in `τ` carry the
//! measure `dτ / 2π`, so that `X^{0,0}` reproduces the windowed discrete
//! `L²_{x,t}` norm exactly and `Y^{s,0}` dominates `sup_t ‖·‖_{H^s}` of the
//! windowed samples.
//!
//! These are proxies for the restriction norms on a time interval; no
//! infimum over extensions is attempted.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{bracket, fft_friendly_size, SpectralTransform, Trajectory};
use crate::error::{Error, Result};

pub const MIN_TIME_SAMPLES: usize = 8;

#[derive(Clone, Debug)]
pub struct SpaceTimeSpectrum {
    cutoff: usize,
    taus: Vec<f64>,
    dtau: f64,
    /// Row-major: mode `n` (offset by `M`) then frequency index.
    values: Vec<Complex64>,
}

impl SpaceTimeSpectrum {
    pub fn from_trajectory(traj: &Trajectory, padding: usize) -> Result<Self> {
        let samples = traj.len();
        if samples < MIN_TIME_SAMPLES {
            return Err(Error::TrajectoryTooShort {
                samples,
                required: MIN_TIME_SAMPLES,
            });
        }
        if padding == 0 {
            return Err(Error::invalid("padding factor must be at least 1"));
        }
        let dt = traj.dt();
        let nyquist = PI / dt;
        let top = traj
            .states()
            .iter()
            .filter_map(|s| s.highest_excited_mode())
            .max()
            .unwrap_or(0);
        let max_frequency = (top * top) as f64;
        if max_frequency >= nyquist {
            return Err(Error::TemporallyUnderResolved {
                dt,
                max_frequency,
                nyquist,
            });
        }

        let cutoff = traj.cutoff();
        let padded = samples * padding;
        let weights = traj.window().weights(samples);
        let fft = FftPlanner::new().plan_fft_forward(padded);
        let dtau = 2.0 * PI / (padded as f64 * dt);
        let half = padded / 2;
        let taus: Vec<f64> = (0..padded)
            .map(|j| (j as f64 - half as f64) * dtau)
            .collect();

        let width = 2 * cutoff + 1;
        let mut values = vec![Complex64::new(0.0, 0.0); width * padded];
        let mut buf = vec![Complex64::new(0.0, 0.0); padded];
        for idx in 0..width {
            buf.fill(Complex64::new(0.0, 0.0));
            for (k, (state, w)) in traj.states().iter().zip(&weights).enumerate() {
                buf[k] = state.coefficients()[idx] * *w;
            }
            fft.process(&mut buf);
            let row = &mut values[idx * padded..(idx + 1) * padded];
            for (j, slot) in row.iter_mut().enumerate() {
                // ascending τ: bin (j - half) mod L'
                let bin = (j + padded - half) % padded;
                *slot = buf[bin] * dt;
            }
        }
        Ok(Self {
            cutoff,
            taus,
            dtau,
            values,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn dtau(&self) -> f64 {
        self.dtau
    }

    pub fn value(&self, n: i64, j: usize) -> Complex64 {
        let row = (n + self.cutoff as i64) as usize;
        self.values[row * self.taus.len() + j]
    }

    /// Modulation weight `⟨τ_j − n²⟩`.
    pub fn modulation(&self, n: i64, j: usize) -> f64 {
        bracket(self.taus[j] - (n * n) as f64)
    }

    fn rows(&self) -> impl Iterator<Item = (i64, &[Complex64])> {
        let m = self.cutoff as i64;
        (-m..=m).zip(self.values.chunks(self.taus.len()))
    }

    pub fn xsb(&self, s: f64, b: f64) -> f64 {
        let measure = self.dtau / (2.0 * PI);
        let total = self
            .rows()
            .map(|(n, row)| {
                let space = bracket(n as f64).powf(2.0 * s);
                let nn = (n * n) as f64;
                space
                    * row
                        .iter()
                        .zip(&self.taus)
                        .map(|(v, tau)| bracket(tau - nn).powf(2.0 * b) * v.norm_sqr())
                        .sum::<f64>()
            })
            .sum::<f64>();
        (total * measure).sqrt()
    }

    pub fn ysb(&self, s: f64, b: f64) -> f64 {
        let measure = self.dtau / (2.0 * PI);
        self.rows()
            .map(|(n, row)| {
                let nn = (n * n) as f64;
                let l1: f64 = row
                    .iter()
                    .zip(&self.taus)
                    .map(|(v, tau)| bracket(tau - nn).powf(b) * v.norm())
                    .sum::<f64>()
                    * measure;
                bracket(n as f64).powf(2.0 * s) * l1 * l1
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// `‖⟨n⟩^s ⟨τ − n²⟩^b F(n, τ)‖_{ℓ²_n L²_τ}` of the windowed trajectory.
pub fn xsb_norm(traj: &Trajectory, s: f64, b: f64) -> Result<f64> {
    Ok(SpaceTimeSpectrum::from_trajectory(traj, 1)?.xsb(s, b))
}

/// `‖⟨n⟩^s ⟨τ − n²⟩^b F(n, τ)‖_{ℓ²_n L¹_τ}` of the windowed trajectory.
pub fn ysb_norm(traj: &Trajectory, s: f64, b: f64) -> Result<f64> {
    Ok(SpaceTimeSpectrum::from_trajectory(traj, 1)?.ysb(s, b))
}

/// `X^{s,b} + Y^{s,b−1/2}`.
pub fn zsb_norm(traj: &Trajectory, s: f64, b: f64) -> Result<f64> {
    let spectrum = SpaceTimeSpectrum::from_trajectory(traj, 1)?;
    Ok(spectrum.xsb(s, b) + spectrum.ysb(s, b - 0.5))
}

/// Discrete `L⁴(𝕋 × [t_start, t_end])` norm with `dx` (not `dx/2π`): exact
/// trapezoid quadrature in `x` on a grid that resolves `|u|⁴`, trapezoid rule in `t`.
pub fn l4_spacetime_norm(traj: &Trajectory) -> f64 {
    let cutoff = traj.cutoff();
    let points = fft_friendly_size(4 * cutoff + 2);
    let mut transform =
        SpectralTransform::new(cutoff, points).expect("grid sized above 2M+1");
    let mut buf = vec![Complex64::new(0.0, 0.0); points];
    let dx = 2.0 * PI / points as f64;
    let last = traj.len() - 1;
    let mut total = 0.0;
    for (k, state) in traj.states().iter().enumerate() {
        if last == 0 {
            break;
        }
        transform.to_physical_into(state.coefficients(), &mut buf);
        let spatial: f64 = buf.iter().map(|v| v.norm_sqr() * v.norm_sqr()).sum::<f64>() * dx;
        let weight = if k == 0 || k == last { 0.5 } else { 1.0 };
        total += weight * spatial * traj.dt();
    }
    total.powf(0.25)
}

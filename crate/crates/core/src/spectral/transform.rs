use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::FourierState;
use crate::error::{Error, Result};

/// Complex samples `u(x_k)` on the uniform grid `x_k = 2πk/P` of `[0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField {
    pub samples: Vec<Complex64>,
    pub time: f64,
}

impl PhysicalField {
    pub fn points(&self) -> usize {
        self.samples.len()
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> {
        let p = self.samples.len();
        (0..p).map(move |k| 2.0 * std::f64::consts::PI * k as f64 / p as f64)
    }

    /// `(P⁻¹ Σ_k |u(x_k)|²)^{1/2}`, the discrete normalized `L²` norm.
    pub fn l2_norm(&self) -> f64 {
        let p = self.samples.len() as f64;
        (self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>() / p).sqrt()
    }
}

/// Planned forward/inverse FFT pair for a fixed cutoff and grid size.
///
/// Mode `n` lives at FFT bin `n mod P`; `to_physical_into` evaluates
/// `Σ û(n) e^{inx_k}` and `to_fourier_into` recovers `û(n)` for `|n| ≤ M`.
pub struct SpectralTransform {
    cutoff: usize,
    points: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl SpectralTransform {
    pub fn new(cutoff: usize, points: usize) -> Result<Self> {
        let required = 2 * cutoff + 1;
        if points < required {
            return Err(Error::UnderResolved {
                points,
                cutoff,
                required,
            });
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(points);
        let inverse = planner.plan_fft_inverse(points);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Ok(Self {
            cutoff,
            points,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// `coeffs` are ordered `n = -M..=M`; `out` has length `P`.
    pub fn to_physical_into(&mut self, coeffs: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(coeffs.len(), 2 * self.cutoff + 1);
        debug_assert_eq!(out.len(), self.points);
        out.fill(Complex64::new(0.0, 0.0));
        let m = self.cutoff as i64;
        let p = self.points as i64;
        for (n, &c) in (-m..=m).zip(coeffs) {
            out[n.rem_euclid(p) as usize] = c;
        }
        self.inverse.process_with_scratch(out, &mut self.scratch);
    }

    /// Consumes the samples in `buf` (overwritten) and writes `û(-M..=M)` to `out`.
    pub fn to_fourier_into(&mut self, buf: &mut [Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.points);
        debug_assert_eq!(out.len(), 2 * self.cutoff + 1);
        self.forward.process_with_scratch(buf, &mut self.scratch);
        let m = self.cutoff as i64;
        let p = self.points as i64;
        let norm = 1.0 / self.points as f64;
        for (n, slot) in (-m..=m).zip(out.iter_mut()) {
            *slot = buf[n.rem_euclid(p) as usize] * norm;
        }
    }
}

pub fn to_physical(state: &FourierState, grid_points: usize) -> Result<PhysicalField> {
    let mut transform = SpectralTransform::new(state.cutoff(), grid_points)?;
    let mut samples = vec![Complex64::new(0.0, 0.0); grid_points];
    transform.to_physical_into(state.coefficients(), &mut samples);
    Ok(PhysicalField {
        samples,
        time: state.time(),
    })
}

/// Projects a sampled field onto modes `|n| ≤ cutoff`; exact for band-limited fields.
pub fn to_fourier(field: &PhysicalField, cutoff: usize) -> Result<FourierState> {
    let mut transform = SpectralTransform::new(cutoff, field.points())?;
    let mut buf = field.samples.clone();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * cutoff + 1];
    transform.to_fourier_into(&mut buf, &mut coeffs);
    FourierState::from_coefficients(cutoff, field.time, coeffs)
}

/// Smallest `2^a 3^b 5^c` that is at least `n`.
pub fn fft_friendly_size(n: usize) -> usize {
    let mut best = n.next_power_of_two();
    let mut p5 = 1;
    while p5 < best {
        let mut p35 = p5;
        while p35 < best {
            let mut candidate = p35;
            while candidate < n {
                candidate *= 2;
            }
            best = best.min(candidate);
            p35 *= 3;
        }
        p5 *= 5;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_mode_gives_constant_field() {
        let s = FourierState::single_mode(4, 0, Complex64::new(1.0, 0.0), 0.0);
        let f = to_physical(&s, 9).unwrap();
        for v in &f.samples {
            assert_relative_eq!(v.re, 1.0, epsilon = 1e-14);
            assert!(v.im.abs() < 1e-14);
        }
    }

    #[test]
    fn first_harmonic_samples_exponential() {
        let s = FourierState::single_mode(3, 1, Complex64::new(1.0, 0.0), 0.0);
        let f = to_physical(&s, 16).unwrap();
        for (x, v) in f.grid().zip(&f.samples) {
            assert!((v - Complex64::from_polar(1.0, x)).norm() < 1e-14);
        }
    }

    #[test]
    fn fourier_of_harmonics() {
        let one = PhysicalField {
            samples: vec![Complex64::new(1.0, 0.0); 12],
            time: 0.0,
        };
        let s = to_fourier(&one, 5).unwrap();
        assert!((s.mode(0) - 1.0).norm() < 1e-14);
        assert!(s.mode(1).norm() < 1e-14);

        let p = 12;
        let two = PhysicalField {
            samples: (0..p)
                .map(|k| Complex64::from_polar(1.0, 2.0 * 2.0 * std::f64::consts::PI * k as f64 / p as f64))
                .collect(),
            time: 0.0,
        };
        let s = to_fourier(&two, 5).unwrap();
        assert!((s.mode(2) - 1.0).norm() < 1e-14);
        assert!(s.mode(-2).norm() < 1e-14);
    }

    #[test]
    fn undersized_grid_is_rejected() {
        let s = FourierState::zeros(8, 0.0);
        assert!(matches!(
            to_physical(&s, 16),
            Err(Error::UnderResolved { required: 17, .. })
        ));
        assert!(to_physical(&s, 17).is_ok());
    }

    #[test]
    fn friendly_sizes() {
        assert_eq!(fft_friendly_size(1026), 1080);
        assert_eq!(fft_friendly_size(64), 64);
        assert_eq!(fft_friendly_size(17), 18);
        for n in 1..500 {
            let m = fft_friendly_size(n);
            assert!(m >= n && m < 2 * n.max(1) + 1);
        }
    }
}

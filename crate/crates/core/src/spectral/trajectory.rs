use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FourierState;
use crate::error::{Error, Result};

/// Time taper applied before the time-DFT of space-time norms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// Periodic Hann taper `½(1 − cos(2πk/L))` over the `L` samples.
    #[default]
    RaisedCosine,
    Rectangular,
}

impl Window {
    pub fn weights(self, samples: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; samples],
            Window::RaisedCosine => (0..samples)
                .map(|k| 0.5 * (1.0 - (2.0 * PI * k as f64 / samples as f64).cos()))
                .collect(),
        }
    }
}

/// States on a uniform time grid `t_start + k·dt` sharing one cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    states: Vec<FourierState>,
    dt: f64,
    window: Window,
}

impl Trajectory {
    pub fn new(states: Vec<FourierState>, dt: f64, window: Window) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::invalid(format!("trajectory spacing must be positive, got {dt}")));
        }
        let first = states
            .first()
            .ok_or_else(|| Error::invalid("trajectory needs at least one state"))?;
        let (cutoff, t0) = (first.cutoff(), first.time());
        for (k, s) in states.iter().enumerate() {
            if s.cutoff() != cutoff {
                return Err(Error::CutoffMismatch {
                    expected: cutoff,
                    found: s.cutoff(),
                });
            }
            let expected = t0 + k as f64 * dt;
            if (s.time() - expected).abs() > 1e-9 * (1.0 + expected.abs()) {
                return Err(Error::TimeMismatch {
                    expected,
                    found: s.time(),
                });
            }
        }
        Ok(Self { states, dt, window })
    }

    pub fn states(&self) -> &[FourierState] {
        &self.states
    }

    pub fn into_states(self) -> Vec<FourierState> {
        self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn t_start(&self) -> f64 {
        self.states[0].time()
    }

    pub fn t_end(&self) -> f64 {
        self.states[self.states.len() - 1].time()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn cutoff(&self) -> usize {
        self.states[0].cutoff()
    }

    pub fn first(&self) -> &FourierState {
        &self.states[0]
    }

    pub fn last(&self) -> &FourierState {
        &self.states[self.states.len() - 1]
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    /// Multiplies each state by its window weight; the result carries a
    /// rectangular window so it is not tapered twice.
    pub fn windowed(&self) -> Self {
        let weights = self.window.weights(self.len());
        let states = self
            .states
            .iter()
            .zip(weights)
            .map(|(s, w)| s.scale(Complex64::new(w, 0.0)))
            .collect();
        Self {
            states,
            dt: self.dt,
            window: Window::Rectangular,
        }
    }

    /// `(dt Σ_k w_k² ‖u(t_k)‖²_{L²})^{1/2}`.
    pub fn windowed_l2_norm(&self) -> f64 {
        let weights = self.window.weights(self.len());
        (self.dt
            * self
                .states
                .iter()
                .zip(weights)
                .map(|(s, w)| w * w * s.mean_square())
                .sum::<f64>())
        .sqrt()
    }

    pub fn map_states(&self, f: impl FnMut(&FourierState) -> FourierState) -> Result<Self> {
        Self::new(self.states.iter().map(f).collect(), self.dt, self.window)
    }

    /// State closest to time `t`, if `t` lies on the grid within tolerance.
    pub fn state_at(&self, t: f64) -> Option<&FourierState> {
        let k = ((t - self.t_start()) / self.dt).round();
        if k < 0.0 {
            return None;
        }
        let s = self.states.get(k as usize)?;
        ((s.time() - t).abs() <= 1e-9 * (1.0 + t.abs())).then_some(s)
    }
}

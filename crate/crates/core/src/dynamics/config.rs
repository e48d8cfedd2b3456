use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign in front of the nonlinearity in `i u_t − u_xx ± N(u) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    /// `+N(u)`.
    Defocusing,
    /// `−N(u)`.
    Focusing,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Defocusing => 1.0,
            Sign::Focusing => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    /// `N(u) = u|u|²`.
    Nls,
    /// `N(u) = u|u|² − 2u∮|u|²`.
    WickNls,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Exact linear half steps around a Gauss–Legendre solve of the
    /// truncated nonlinear flow; mass-conserving and time-reversible.
    #[default]
    StrangSplit,
    /// Classical RK4 in the interaction picture.
    Rk4InteractionPicture,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub sign: Sign,
    pub equation: Equation,
    pub dt: f64,
    #[serde(default)]
    pub integrator: Integrator,
    /// Physical grid is at least `dealias · (2M + 1)` points.
    #[serde(default = "default_dealias")]
    pub dealias: f64,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    /// Multiplies the nonlinearity; 0 reduces the flow to free propagation.
    #[serde(default = "default_coupling")]
    pub coupling: f64,
}

fn default_dealias() -> f64 {
    2.0
}

fn default_record_every() -> usize {
    1
}

fn default_coupling() -> f64 {
    1.0
}

impl EvolutionConfig {
    pub fn new(sign: Sign, equation: Equation, dt: f64) -> Self {
        Self {
            sign,
            equation,
            dt,
            integrator: Integrator::StrangSplit,
            dealias: default_dealias(),
            record_every: default_record_every(),
            coupling: default_coupling(),
        }
    }

    pub fn wick(dt: f64) -> Self {
        Self::new(Sign::Defocusing, Equation::WickNls, dt)
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }

    pub fn with_record_every(mut self, record_every: usize) -> Self {
        self.record_every = record_every;
        self
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.dealias >= 2.0) {
            return Err(Error::invalid(format!(
                "dealias oversampling must be >= 2 for cubic products, got {}",
                self.dealias
            )));
        }
        if self.record_every == 0 {
            return Err(Error::invalid("record_every must be >= 1"));
        }
        if !self.coupling.is_finite() {
            return Err(Error::invalid("coupling must be finite"));
        }
        Ok(())
    }
}

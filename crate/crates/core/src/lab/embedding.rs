use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::free_trajectory;
use crate::error::{Error, Result};
use crate::random::{sample_initial_data, Quantiles, RandomDataSpec};
use crate::spectral::{sobolev_norm, zsb_norm};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub s: f64,
    pub delta: f64,
    pub time_samples: usize,
    /// `sup_t ‖u(t)‖_{H^s} / ‖u‖_{Z^{s,1/2}}` per sample.
    pub constants: Vec<f64>,
    pub quantiles: Quantiles,
    /// Smallest `C` with `sup_t ‖u(t)‖_{H^s} ≤ C‖u‖_{Z^{s,1/2}}` on the ensemble.
    pub fitted_constant: f64,
}

/// Empirical constant of the embedding `Z^{s,1/2} ⊂ C_t H^s` on random free
/// evolutions over `[0, δ]`.
pub fn embedding_experiment(
    spec: &RandomDataSpec,
    s: f64,
    delta: f64,
    samples: usize,
    time_samples: usize,
) -> Result<EmbeddingReport> {
    spec.validate()?;
    if samples < 1 {
        return Err(Error::invalid("need at least one sample"));
    }
    let constants = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let traj = free_trajectory(&sample_initial_data(&spec.member(i)), delta, time_samples)?;
            let sup = traj.states().iter().map(|st| sobolev_norm(st, s)).fold(0.0, f64::max);
            let z = zsb_norm(&traj, s, 0.5)?;
            Ok(if z > 0.0 { sup / z } else { 0.0 })
        })
        .collect::<Result<Vec<f64>>>()?;
    let quantiles = Quantiles::of(&constants);
    Ok(EmbeddingReport {
        s,
        delta,
        time_samples,
        fitted_constant: quantiles.max,
        quantiles,
        constants,
    })
}

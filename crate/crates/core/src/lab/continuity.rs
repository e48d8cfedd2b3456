use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{plane_wave, Sign};
use crate::error::{Error, Result};
use crate::spectral::sobolev_norm;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub data_distance: f64,
    pub solution_distance: f64,
    /// `None` when the data coincide.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub a: Complex64,
    pub a_prime: Complex64,
    pub s: f64,
    pub t: f64,
    pub sign: Sign,
    pub rows: Vec<ContinuityRow>,
    pub max_ratio: Option<f64>,
    /// `(|a| + |a′|)/|a − a′|`: no pair of data on a common mode can exceed it.
    pub ratio_bound: Option<f64>,
}

/// `H^s` distances between the exact solutions `u_{N,a}` and `u_{N,a′}` at
/// time `0` and `t`, for each `N` of the sweep.
pub fn uniform_continuity_experiment(
    a: Complex64,
    a_prime: Complex64,
    n_sweep: &[u64],
    s: f64,
    t: f64,
    sign: Sign,
) -> Result<ContinuityReport> {
    if !(s < 0.0) {
        return Err(Error::invalid(format!("regularity s = {s} must be negative")));
    }
    let rows: Vec<ContinuityRow> = n_sweep
        .iter()
        .map(|&n| {
            let cutoff = n as usize;
            let mode = n as i64;
            let distance = |time: f64| {
                let u = plane_wave(a, mode, cutoff, sign, time);
                let v = plane_wave(a_prime, mode, cutoff, sign, time);
                sobolev_norm(&u.sub(&v).expect("same cutoff"), s)
            };
            let data_distance = distance(0.0);
            let solution_distance = distance(t);
            ContinuityRow {
                n,
                data_distance,
                solution_distance,
                ratio: (data_distance > 0.0).then(|| solution_distance / data_distance),
            }
        })
        .collect();
    let max_ratio = rows.iter().filter_map(|r| r.ratio).reduce(f64::max);
    let gap = (a - a_prime).norm();
    Ok(ContinuityReport {
        a,
        a_prime,
        s,
        t,
        sign,
        rows,
        max_ratio,
        ratio_bound: (gap > 0.0).then(|| (a.norm() + a_prime.norm()) / gap),
    })
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fourier coefficients of a trigonometric polynomial on the torus, supported
/// on modes `-M..=M`, at a single instant of time.
///
/// Norms on this type use the normalized measure `dx / 2π`, so the `L²` norm
/// of the field equals the `ℓ²` norm of its coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRecord", into = "StateRecord")]
pub struct FourierState {
    cutoff: usize,
    time: f64,
    coeffs: Vec<Complex64>,
}

impl FourierState {
    pub fn zeros(cutoff: usize, time: f64) -> Self {
        Self {
            cutoff,
            time,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * cutoff + 1],
        }
    }

    /// Builds a state from coefficients ordered `n = -M, ..., M`.
    pub fn from_coefficients(cutoff: usize, time: f64, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * cutoff + 1 {
            return Err(Error::invalid(format!(
                "expected {} coefficients for cutoff {cutoff}, got {}",
                2 * cutoff + 1,
                coeffs.len()
            )));
        }
        Ok(Self {
            cutoff,
            time,
            coeffs,
        })
    }

    pub fn from_fn(cutoff: usize, time: f64, mut f: impl FnMut(i64) -> Complex64) -> Self {
        let m = cutoff as i64;
        Self {
            cutoff,
            time,
            coeffs: (-m..=m).map(&mut f).collect(),
        }
    }

    /// `c e^{inx}`; panics if `|n|` exceeds the cutoff.
    pub fn single_mode(cutoff: usize, n: i64, c: Complex64, time: f64) -> Self {
        assert!(n.unsigned_abs() as usize <= cutoff, "mode {n} outside cutoff {cutoff}");
        let mut state = Self::zeros(cutoff, time);
        state.coeffs[(n + cutoff as i64) as usize] = c;
        state
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of mode `n`; zero outside `[-M, M]`.
    pub fn mode(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.cutoff {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + self.cutoff as i64) as usize]
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let m = self.cutoff as i64;
        (-m..=m).zip(self.coeffs.iter().copied())
    }

    pub fn l2_norm(&self) -> f64 {
        self.mean_square().sqrt()
    }

    /// `∮|u|² = (2π)⁻¹ ∫|u|² dx`, i.e. the squared `ℓ²` norm of the coefficients.
    pub fn mean_square(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn map_modes(&self, mut f: impl FnMut(i64, Complex64) -> Complex64) -> Self {
        let m = self.cutoff as i64;
        Self {
            cutoff: self.cutoff,
            time: self.time,
            coeffs: (-m..=m)
                .zip(self.coeffs.iter())
                .map(|(n, &c)| f(n, c))
                .collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.map_modes(|_, c| c * factor)
    }

    fn check_cutoff(&self, other: &Self) -> Result<()> {
        if self.cutoff != other.cutoff {
            return Err(Error::CutoffMismatch {
                expected: self.cutoff,
                found: other.cutoff,
            });
        }
        Ok(())
    }

    /// Coefficient-wise sum; the time stamp of `self` is kept.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_cutoff(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self {
            cutoff: self.cutoff,
            time: self.time,
            coeffs,
        })
    }

    /// Coefficient-wise difference; the time stamp of `self` is kept.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_cutoff(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self {
            cutoff: self.cutoff,
            time: self.time,
            coeffs,
        })
    }

    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        self.check_cutoff(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Highest `|n|` carrying a nonzero coefficient, if any.
    pub fn highest_excited_mode(&self) -> Option<usize> {
        self.modes()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(|(n, _)| n.unsigned_abs() as usize)
            .max()
    }
}

/// JSON layout: `{"M": int, "t": float, "re": [...], "im": [...]}` with
/// arrays indexed `n = -M..M`.
#[derive(Serialize, Deserialize)]
struct StateRecord {
    #[serde(rename = "M")]
    cutoff: usize,
    t: f64,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<FourierState> for StateRecord {
    fn from(state: FourierState) -> Self {
        Self {
            cutoff: state.cutoff,
            t: state.time,
            re: state.coeffs.iter().map(|c| c.re).collect(),
            im: state.coeffs.iter().map(|c| c.im).collect(),
        }
    }
}

impl TryFrom<StateRecord> for FourierState {
    type Error = Error;

    fn try_from(record: StateRecord) -> Result<Self> {
        if record.re.len() != record.im.len() {
            return Err(Error::invalid("re and im arrays differ in length"));
        }
        let coeffs = record
            .re
            .iter()
            .zip(&record.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        FourierState::from_coefficients(record.cutoff, record.t, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_outside_cutoff_read_as_zero() {
        let s = FourierState::single_mode(3, -2, Complex64::new(1.0, 2.0), 0.0);
        assert_eq!(s.mode(-2), Complex64::new(1.0, 2.0));
        assert_eq!(s.mode(4), Complex64::new(0.0, 0.0));
        assert_eq!(s.mode(-100), Complex64::new(0.0, 0.0));
        assert_eq!(s.highest_excited_mode(), Some(2));
    }

    #[test]
    fn json_layout() {
        let s = FourierState::single_mode(1, 1, Complex64::new(0.5, -1.0), 0.25);
        let json = serde_json::to_value(&s).unwrap();
        assert_eq!(json["M"], 1);
        assert_eq!(json["t"], 0.25);
        assert_eq!(json["re"], serde_json::json!([0.0, 0.0, 0.5]));
        assert_eq!(json["im"], serde_json::json!([0.0, 0.0, -1.0]));
        let back: FourierState = serde_json::from_value(json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn json_with_wrong_length_is_rejected() {
        let bad = r#"{"M": 2, "t": 0.0, "re": [0,0,0], "im": [0,0,0]}"#;
        assert!(serde_json::from_str::<FourierState>(bad).is_err());
    }

    #[test]
    fn arithmetic_requires_matching_cutoff() {
        let a = FourierState::zeros(2, 0.0);
        let b = FourierState::zeros(3, 0.0);
        assert!(matches!(a.add(&b), Err(Error::CutoffMismatch { .. })));
    }
}

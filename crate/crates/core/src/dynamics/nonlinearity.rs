use num_complex::Complex64;

use super::Equation;
use crate::error::{Error, Result};
use crate::spectral::{fft_friendly_size, FourierState, SpectralTransform};

/// Evaluates the projected cubic term `P_M(|u|²u)` through a zero-padded
/// physical grid of at least `dealias · (2M+1) ≥ 4M + 2` points, which is
/// alias-free for cubic products of band-limited fields.
pub struct CubicKernel {
    transform: SpectralTransform,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

impl CubicKernel {
    pub fn new(cutoff: usize, dealias: f64) -> Result<Self> {
        if !(dealias >= 2.0) {
            return Err(Error::invalid(format!("dealias factor {dealias} < 2 aliases cubic products")));
        }
        let min_points = ((2 * cutoff + 1) as f64 * dealias).ceil() as usize;
        let points = fft_friendly_size(min_points);
        let transform = SpectralTransform::new(cutoff, points)?;
        Ok(Self {
            transform,
            a: vec![Complex64::new(0.0, 0.0); points],
            b: vec![Complex64::new(0.0, 0.0); points],
        })
    }

    pub fn cutoff(&self) -> usize {
        self.transform.cutoff()
    }

    pub fn points(&self) -> usize {
        self.transform.points()
    }

    /// `out = P_M(|u|²u)`.
    pub fn cubic(&mut self, u: &[Complex64], out: &mut [Complex64]) {
        self.transform.to_physical_into(u, &mut self.a);
        for z in self.a.iter_mut() {
            *z *= z.norm_sqr();
        }
        self.transform.to_fourier_into(&mut self.a, out);
    }

    /// `out = P_M(|u+v|²(u+v) − |u|²u)`, formed pointwise to avoid cancellation.
    pub fn cubic_difference(&mut self, u: &[Complex64], v: &[Complex64], out: &mut [Complex64]) {
        self.transform.to_physical_into(u, &mut self.a);
        self.transform.to_physical_into(v, &mut self.b);
        for (x, y) in self.a.iter().zip(self.b.iter_mut()) {
            let total = x + *y;
            *y = total * total.norm_sqr() - x * x.norm_sqr();
        }
        self.transform.to_fourier_into(&mut self.b, out);
    }
}

pub(crate) fn mean_square(coeffs: &[Complex64]) -> f64 {
    coeffs.iter().map(|c| c.norm_sqr()).sum()
}

/// Fourier coefficients of `N(u)` on modes `|n| ≤ M`.
pub fn nonlinearity_full(state: &FourierState, equation: Equation) -> FourierState {
    let mut kernel = CubicKernel::new(state.cutoff(), 2.0).expect("factor 2 is valid");
    let mut out = vec![Complex64::new(0.0, 0.0); state.coefficients().len()];
    kernel.cubic(state.coefficients(), &mut out);
    if equation == Equation::WickNls {
        let m = mean_square(state.coefficients());
        for (o, u) in out.iter_mut().zip(state.coefficients()) {
            *o -= 2.0 * m * u;
        }
    }
    FourierState::from_coefficients(state.cutoff(), state.time(), out).expect("length preserved")
}

/// Splits the Wick nonlinearity as `N(u) = N₁(u) − N₂(u)` with
///
/// ```text
/// N₁(u)^(n) = Σ_{n = n₁−n₂+n₃, n₂ ∉ {n₁, n₃}} û(n₁) conj(û(n₂)) û(n₃)
/// N₂(u)^(n) = |û(n)|² û(n)
/// ```
///
/// The full triple sum over `n = n₁ − n₂ + n₃` differs from `N₁` by the
/// diagonal terms `n₂ = n₁` and `n₂ = n₃` (each `û(n) Σ|û|²`) minus their
/// doubly counted intersection `n₁ = n₂ = n₃ = n`, which is `N₂`.
pub fn nonlinearity_split(state: &FourierState) -> (FourierState, FourierState) {
    let mut kernel = CubicKernel::new(state.cutoff(), 2.0).expect("factor 2 is valid");
    let coeffs = state.coefficients();
    let mut full = vec![Complex64::new(0.0, 0.0); coeffs.len()];
    kernel.cubic(coeffs, &mut full);
    let m = mean_square(coeffs);
    let resonant: Vec<Complex64> = coeffs.iter().map(|c| c * c.norm_sqr()).collect();
    let non_resonant: Vec<Complex64> = full
        .iter()
        .zip(coeffs)
        .zip(&resonant)
        .map(|((f, u), r)| f - 2.0 * m * u + r)
        .collect();
    let cutoff = state.cutoff();
    let t = state.time();
    (
        FourierState::from_coefficients(cutoff, t, non_resonant).expect("length preserved"),
        FourierState::from_coefficients(cutoff, t, resonant).expect("length preserved"),
    )
}

use super::FourierState;
use crate::error::{Error, Result};

/// Japanese bracket `⟨x⟩ = 1 + |x|`.
#[inline]
pub fn bracket(x: f64) -> f64 {
    1.0 + x.abs()
}

/// `(Σ_n ⟨n⟩^{2s} |û(n)|²)^{1/2}`.
pub fn sobolev_norm(state: &FourierState, s: f64) -> f64 {
    state
        .modes()
        .map(|(n, c)| bracket(n as f64).powf(2.0 * s) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `‖⟨n⟩^s û(n)‖_{ℓᵖ}` for `p ∈ [1, ∞]`.
pub fn fourier_lebesgue_norm(state: &FourierState, s: f64, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::invalid(format!("Fourier-Lebesgue exponent must be >= 1, got {p}")));
    }
    let weighted = state.modes().map(|(n, c)| bracket(n as f64).powf(s) * c.norm());
    if p.is_infinite() {
        return Ok(weighted.fold(0.0, f64::max));
    }
    Ok(weighted.map(|a| a.powf(p)).sum::<f64>().powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn bracket_is_one_plus_abs() {
        assert_eq!(bracket(0.0), 1.0);
        assert_eq!(bracket(-3.0), 4.0);
    }

    #[test]
    fn sobolev_single_modes() {
        let zero = FourierState::single_mode(4, 0, Complex64::new(1.0, 0.0), 0.0);
        for s in [-1.0, 0.0, 0.7, 3.0] {
            assert!((sobolev_norm(&zero, s) - 1.0).abs() < 1e-15);
        }
        let one = FourierState::single_mode(4, 1, Complex64::new(1.0, 0.0), 0.0);
        assert!((sobolev_norm(&one, 1.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sobolev_profile_matches_direct_sum() {
        let alpha: f64 = 0.5;
        let s = FourierState::from_fn(8, 0.0, |n| {
            Complex64::new((1.0 + (n.abs() as f64).powf(2.0 * alpha)).powf(-0.5), 0.0)
        });
        // Σ_{|n|≤8} 1/(1+|n|) = 1 + 2 Σ_{k=1}^{8} 1/(k+1)
        let direct: f64 = 1.0 + 2.0 * (2..=9).map(|k| 1.0 / k as f64).sum::<f64>();
        assert!((sobolev_norm(&s, 0.0) - direct.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn fourier_lebesgue_cases() {
        let one = Complex64::new(1.0, 0.0);
        let s = FourierState::from_fn(3, 0.0, |n| if n == 0 || n == 1 { one } else { one * 0.0 });
        assert!((fourier_lebesgue_norm(&s, 0.0, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((fourier_lebesgue_norm(&s, 0.0, f64::INFINITY).unwrap() - 1.0).abs() < 1e-15);
        assert!(fourier_lebesgue_norm(&s, 0.0, 0.5).is_err());

        // û(n) = ⟨n⟩⁻¹, M = 16, p = 4: Σ ⟨n⟩⁻⁴ = 1 + 2 Σ_{k=2}^{17} k⁻⁴
        let s = FourierState::from_fn(16, 0.0, |n| Complex64::new(1.0 / bracket(n as f64), 0.0));
        let direct: f64 = 1.0 + 2.0 * (2..=17).map(|k| (k as f64).powi(-4)).sum::<f64>();
        let got = fourier_lebesgue_norm(&s, 0.0, 4.0).unwrap();
        assert!((got - direct.powf(0.25)).abs() < 1e-14);
    }
}

//! Fourier-side state representation, transforms, and static and space-time norms.

mod norms;
mod spacetime;
mod state;
mod trajectory;
mod transform;

pub use norms::{bracket, fourier_lebesgue_norm, sobolev_norm};
pub use spacetime::{
    l4_spacetime_norm, xsb_norm, ysb_norm, zsb_norm, SpaceTimeSpectrum, MIN_TIME_SAMPLES,
};
pub use state::FourierState;
pub use trajectory::{Trajectory, Window};
pub use transform::{fft_friendly_size, to_fourier, to_physical, PhysicalField, SpectralTransform};

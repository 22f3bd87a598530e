//! Periodic grids, spectral fields, transforms and discrete Sobolev norms.

pub(crate) mod fft;
mod field;
mod grid;
mod norms;
mod transform;

pub use field::SpectralField;
pub use grid::{GridSpec, MAX_FOURIER_SPACING};
pub use norms::{h1_pair, sobolev_norms, NormReport};
pub use transform::{
    forward_transform, forward_transform_complex, inverse_transform, inverse_transform_complex,
    pointwise_square,
};

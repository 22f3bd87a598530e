//! Pseudo-spectral simulation of the fractional parabolic equation
//!
//! ```text
//! ∂ₜu = −(−Δ)^{α/2} u + ((−Δ)^{1/2} u)² ∗ b,   u(0) = u₀,
//! ```
//!
//! on a periodic box, together with numerical audits of its local
//! well-posedness budget and its finite-time blow-up lower-bound machinery.
//!
//! Modules, bottom-up:
//! - [`spectral`]: grids, Fourier fields, transforms, discrete Sobolev norms.
//! - [`fractional`]: Riesz/Bessel/semigroup multipliers and α-stable kernel checks.
//! - [`coefficient`]: the singular coefficient `b` through its Fourier symbol.
//! - [`mild`]: Duhamel quadrature, global-in-time Picard iteration, existence budget.
//! - [`blowup`]: the `ω_k` sequence, `Φ_k` weights and the blow-up certificate.
//! - [`config`] and [`cli`]: the `fraclap` command-line front end.

pub mod blowup;
pub mod cli;
pub mod coefficient;
pub mod config;
pub mod error;
pub mod fractional;
pub mod mild;
pub mod spectral;

pub use error::{Error, Result};
pub use rustfft::num_complex::Complex64;

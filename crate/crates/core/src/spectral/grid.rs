use std::f64::consts::PI;

use crate::{Error, Result};

/// Periodic box `[0, L)ⁿ` sampled with `N` points per axis.
///
/// The Fourier lattice is `ξ_m = 2π m / L` with `m ∈ {−N/2, …, N/2 − 1}` per
/// axis. Flat storage is row-major over axes, and each axis uses FFT order
/// (`0, 1, …, N/2 − 1, −N/2, …, −1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    length: f64,
    modes: usize,
}

/// Largest admissible Fourier spacing. Keeps at least two lattice points per
/// axis inside the radius-1/2 ball that seeds the `ω_k` sequence.
pub const MAX_FOURIER_SPACING: f64 = 0.25;

impl GridSpec {
    pub fn new(dim: usize, length: f64, modes: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("box length {length} must be > 0")));
        }
        if modes < 8 || modes % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "modes per axis {modes} must be even and >= 8"
            )));
        }
        let grid = GridSpec { dim, length, modes };
        if grid.fourier_spacing() > MAX_FOURIER_SPACING * (1.0 + 1e-12) {
            return Err(Error::InvalidGrid(format!(
                "Fourier spacing 2π/L = {:.4} exceeds {MAX_FOURIER_SPACING}",
                grid.fourier_spacing()
            )));
        }
        modes
            .checked_pow(dim as u32)
            .ok_or_else(|| Error::InvalidGrid("lattice size overflows usize".into()))?;
        Ok(grid)
    }

    /// Solver defaults: `L = 16π` with 512 modes in 1D, 256 per axis above.
    pub fn default_solver(dim: usize) -> Result<Self> {
        let modes = if dim == 1 { 512 } else { 256 };
        GridSpec::new(dim, 16.0 * PI, modes)
    }

    /// Fine Fourier lattices used for the `ω_k` sequence and the certificate.
    ///
    /// The strict indicator of the seed ball loses `O(Δξ)` of its mass on a
    /// lattice, and the loss compounds as `(1 − ε)^{2^k}`; these spacings keep
    /// the level-`k_max` mass error under 1%.
    pub fn default_certificate(dim: usize) -> Result<Self> {
        match dim {
            1 => GridSpec::new(1, 2048.0 * PI, 65536),
            2 => GridSpec::new(2, 256.0 * PI, 4096),
            3 => GridSpec::new(3, 64.0 * PI, 1024),
            _ => Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Number of lattice points, `Nⁿ`.
    pub fn len(&self) -> usize {
        self.modes.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.modes; self.dim]
    }

    /// Physical spacing `L/N`.
    pub fn spacing(&self) -> f64 {
        self.length / self.modes as f64
    }

    /// Fourier spacing `2π/L`.
    pub fn fourier_spacing(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Largest resolved frequency per axis, `πN/L`.
    pub fn max_frequency(&self) -> f64 {
        PI * self.modes as f64 / self.length
    }

    /// Volume of the box, `Lⁿ`.
    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Same box, twice the modes per axis (higher frequency cutoff).
    pub fn with_double_modes(&self) -> Result<Self> {
        GridSpec::new(self.dim, self.length, self.modes * 2)
    }

    /// Halves the Fourier spacing while keeping the frequency cutoff.
    pub fn refined_fourier(&self) -> Result<Self> {
        GridSpec::new(self.dim, self.length * 2.0, self.modes * 2)
    }

    /// Whether the cutoff exceeds `√n · 2^{k_max+1}`, the outer radius of the
    /// level-`k_max` corona.
    pub fn resolves_level(&self, k_max: u32) -> bool {
        self.max_frequency() > (self.dim as f64).sqrt() * 2f64.powi(k_max as i32 + 1)
    }

    /// Signed mode number for a per-axis FFT-order index.
    pub fn signed_mode(&self, index: usize) -> i64 {
        let n = self.modes as i64;
        let i = index as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Per-axis FFT-order index for a signed mode, if it is on the lattice.
    pub fn axis_index(&self, mode: i64) -> Option<usize> {
        let half = (self.modes / 2) as i64;
        if mode < -half || mode >= half {
            None
        } else if mode >= 0 {
            Some(mode as usize)
        } else {
            Some((mode + self.modes as i64) as usize)
        }
    }

    /// Signed mode triple of a flat index (unused trailing axes are zero).
    pub fn mode_triple(&self, flat: usize) -> [i64; 3] {
        let mut out = [0i64; 3];
        let mut rem = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = self.signed_mode(rem % self.modes);
            rem /= self.modes;
        }
        out
    }

    /// Flat index of a signed mode triple.
    pub fn flat_index(&self, modes: &[i64]) -> Option<usize> {
        let mut flat = 0usize;
        for &m in modes.iter().take(self.dim) {
            flat = flat * self.modes + self.axis_index(m)?;
        }
        Some(flat)
    }

    /// Frequency vector of a flat index.
    pub fn xi(&self, flat: usize) -> [f64; 3] {
        let m = self.mode_triple(flat);
        let h = self.fourier_spacing();
        [m[0] as f64 * h, m[1] as f64 * h, m[2] as f64 * h]
    }

    pub fn xi_norm(&self, flat: usize) -> f64 {
        let x = self.xi(flat);
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
    }

    /// `|ξ|` for every lattice point, in storage order.
    pub fn xi_norms(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.xi_norm(i)).collect()
    }

    /// Largest per-axis mode kept by the 2/3 rule: `3K < N`.
    pub fn dealias_cutoff(&self) -> i64 {
        ((self.modes - 1) / 3) as i64
    }

    /// Indicator of the modes that survive 2/3-rule truncation.
    pub fn dealias_mask(&self) -> Vec<bool> {
        let cut = self.dealias_cutoff();
        (0..self.len())
            .map(|i| {
                let m = self.mode_triple(i);
                m.iter().take(self.dim).all(|&v| v.abs() <= cut)
            })
            .collect()
    }

    /// Physical coordinates of a flat index, `x_j = j L / N`.
    pub fn x(&self, flat: usize) -> [f64; 3] {
        let mut out = [0.0; 3];
        let mut rem = flat;
        let h = self.spacing();
        for axis in (0..self.dim).rev() {
            out[axis] = (rem % self.modes) as f64 * h;
            rem /= self.modes;
        }
        out
    }
}

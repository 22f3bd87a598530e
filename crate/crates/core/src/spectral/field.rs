use std::io::Write;

use rustfft::num_complex::Complex64;

use super::GridSpec;
use crate::{Error, Result};

/// Fourier coefficients of a field on a periodic grid.
///
/// Coefficients follow the forward normalization `c_m = N⁻ⁿ Σ_j f(x_j) e^{−iξ_m·x_j}`,
/// so `c_0` is the field mean and the whole-space transform is recovered as
/// `f̂(ξ_m) ≈ Lⁿ c_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
    real: bool,
    overflowed: bool,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec, real: bool) -> Self {
        SpectralField {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
            real,
            overflowed: false,
        }
    }

    /// Wraps a coefficient array. Entries must be finite.
    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>, real: bool) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                actual: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("spectral coefficients"));
        }
        Ok(SpectralField {
            grid,
            coeffs,
            real,
            overflowed: false,
        })
    }

    pub(crate) fn from_coeffs_unchecked(grid: GridSpec, coeffs: Vec<Complex64>, real: bool) -> Self {
        SpectralField {
            grid,
            coeffs,
            real,
            overflowed: false,
        }
    }

    /// Builds coefficients from a function of the frequency vector.
    pub fn from_fn(grid: GridSpec, real: bool, mut f: impl FnMut(&[f64]) -> Complex64) -> Result<Self> {
        let coeffs = (0..grid.len())
            .map(|i| {
                let xi = grid.xi(i);
                f(&xi[..grid.dim()])
            })
            .collect();
        SpectralField::from_coeffs(grid, coeffs, real)
    }

    /// A field marked as numerically blown up; its norms report `+∞`.
    pub fn overflowed(grid: GridSpec, real: bool) -> Self {
        SpectralField {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
            real,
            overflowed: true,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn is_overflowed(&self) -> bool {
        self.overflowed
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Mean of the physical field.
    pub fn dc(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Largest `|c_m − conj(c_{−m})|` over the lattice.
    ///
    /// The mode `−N/2` has no partner on the lattice and is compared with itself.
    pub fn hermitian_defect(&self) -> f64 {
        let g = &self.grid;
        let mut worst = 0.0f64;
        for i in 0..g.len() {
            let m = g.mode_triple(i);
            let neg: Vec<i64> = m[..g.dim()].iter().map(|&v| -v).collect();
            let j = g.flat_index(&neg).unwrap_or(i);
            worst = worst.max((self.coeffs[i] - self.coeffs[j].conj()).norm());
        }
        worst
    }

    /// Coefficient-wise multiplication by a real symbol of `|ξ|`.
    pub fn apply_radial(&self, symbol: impl Fn(f64) -> f64) -> SpectralField {
        let g = &self.grid;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * symbol(g.xi_norm(i)))
            .collect();
        SpectralField {
            grid: self.grid,
            coeffs,
            real: self.real,
            overflowed: self.overflowed,
        }
    }

    pub fn scaled(&self, factor: f64) -> SpectralField {
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
            real: self.real,
            overflowed: self.overflowed,
        }
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Smallest real part over the lattice.
    pub fn min_re(&self) -> f64 {
        self.coeffs.iter().map(|c| c.re).fold(f64::INFINITY, f64::min)
    }

    /// Largest real part over the lattice.
    pub fn max_re(&self) -> f64 {
        self.coeffs.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Sup-norm distance between coefficient arrays on the same grid.
    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Writes `i,j,k,re,im` rows (signed mode indices; unused axes are 0).
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# spectral field: dim={} L={} N={} real={}; columns are signed mode indices and the coefficient c_m = N^-n sum_j f(x_j) exp(-i xi_m x_j)",
            self.grid.dim(),
            self.grid.length(),
            self.grid.modes(),
            self.real
        )?;
        writeln!(out, "i,j,k,re,im")?;
        for (flat, c) in self.coeffs.iter().enumerate() {
            let m = self.grid.mode_triple(flat);
            writeln!(out, "{},{},{},{:e},{:e}", m[0], m[1], m[2], c.re, c.im)?;
        }
        Ok(())
    }
}

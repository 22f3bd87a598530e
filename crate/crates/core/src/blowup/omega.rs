use super::constants::unit_ball_volume;
use super::patch::LatticePatch;
use crate::spectral::{GridSpec, SpectralField};
use crate::{Complex64, Error, Result};

/// The ball `{|ξ − ξ₀| < 1/2}` with `ξ₀ = (3/2, …, 3/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaSeed {
    pub center: f64,
    pub radius: f64,
}

impl Default for OmegaSeed {
    fn default() -> Self {
        OmegaSeed {
            center: 1.5,
            radius: 0.5,
        }
    }
}

impl OmegaSeed {
    /// Strict membership `|ξ − ξ₀| < r`.
    pub fn contains(&self, xi: &[f64]) -> bool {
        let d2: f64 = xi.iter().map(|v| (v - self.center).powi(2)).sum();
        d2 < self.radius * self.radius
    }

    /// `ω̂₀` on the lattice `h·ℤⁿ`.
    pub fn sample(&self, dim: usize, spacing: f64) -> LatticePatch {
        let lo = ((self.center - self.radius) / spacing).floor() as i64;
        let hi = ((self.center + self.radius) / spacing).ceil() as i64;
        let mut lo3 = [0i64; 3];
        let mut hi3 = [0i64; 3];
        for d in 0..dim {
            lo3[d] = lo;
            hi3[d] = hi;
        }
        LatticePatch::sample(dim, spacing, lo3, hi3, |xi| self.contains(xi) as u8 as f64)
    }
}

/// One level `ω̂_k` with its discrete audit.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaLevel {
    pub k: u32,
    pub patch: LatticePatch,
    /// `hⁿ Σ ω̂_k`.
    pub l1: f64,
    /// `(v_n/2ⁿ)^{2^k}`.
    pub l1_expected: f64,
    pub l1_rel_error: f64,
    /// `(√n 2^k, √n 2^{k+1})`.
    pub support_corona: (f64, f64),
    /// Mass outside the open corona over total mass.
    pub out_of_corona: f64,
    /// Mass outside the open cube `(2^k, 2^{k+1})ⁿ` over total mass.
    pub out_of_hypercube: f64,
    /// `|l1(ω̂_k) − l1(ω̂_{k−1})²| / l1(ω̂_k)`; zero at `k = 0`.
    pub doubling_rel_error: f64,
}

/// Tolerance on relative mass outside the corona and the cube.
pub const SUPPORT_TOL: f64 = 1e-10;

impl OmegaLevel {
    fn audit(k: u32, patch: LatticePatch, previous_l1: Option<f64>) -> OmegaLevel {
        let n = patch.dim();
        let sq = (n as f64).sqrt();
        let lo = sq * 2f64.powi(k as i32);
        let hi = sq * 2f64.powi(k as i32 + 1);
        let (clo, chi) = (2f64.powi(k as i32), 2f64.powi(k as i32 + 1));
        let mut total = 0.0;
        let mut outside = 0.0;
        let mut off_cube = 0.0;
        for (i, &v) in patch.values().iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let xi = patch.xi_of(i);
            let r = xi[..n].iter().map(|x| x * x).sum::<f64>().sqrt();
            total += v;
            if !(r > lo && r < hi) {
                outside += v;
            }
            if !xi[..n].iter().all(|&x| x > clo && x < chi) {
                off_cube += v;
            }
        }
        let l1 = patch.l1();
        let l1_expected = (unit_ball_volume(n) / 2f64.powi(n as i32)).powf(2f64.powi(k as i32));
        let frac = |x: f64| if total > 0.0 { x / total } else { 0.0 };
        OmegaLevel {
            k,
            l1,
            l1_expected,
            l1_rel_error: (l1 - l1_expected).abs() / l1_expected,
            support_corona: (lo, hi),
            out_of_corona: frac(outside),
            out_of_hypercube: frac(off_cube),
            doubling_rel_error: previous_l1.map_or(0.0, |p| (l1 - p * p).abs() / l1.max(f64::MIN_POSITIVE)),
            patch,
        }
    }

    pub fn support_ok(&self) -> bool {
        self.out_of_corona <= SUPPORT_TOL
    }

    pub fn hypercube_ok(&self) -> bool {
        self.out_of_hypercube <= SUPPORT_TOL
    }

    /// Places `ω̂_k` on a spectral lattice with the same Fourier spacing.
    pub fn to_field(&self, grid: &GridSpec) -> Result<SpectralField> {
        if grid.dim() != self.patch.dim()
            || (grid.fourier_spacing() - self.patch.spacing()).abs() > 1e-12 * self.patch.spacing()
        {
            return Err(Error::InvalidGrid("grid lattice differs from the ω_k lattice".into()));
        }
        let mut f = SpectralField::zeros(*grid, false);
        for (i, &v) in self.patch.values().iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let m = self.patch.index_of(i);
            let flat = grid
                .flat_index(&m[..grid.dim()])
                .ok_or_else(|| Error::UnderResolved(format!("ω̂_{} leaves the lattice", self.k)))?;
            f.coeffs_mut()[flat] = Complex64::new(v, 0.0);
        }
        Ok(f)
    }
}

/// `ω̂₀, …, ω̂_{k_max}` on the Fourier lattice of `grid`.
pub fn build_omega_sequence(k_max: u32, grid: &GridSpec) -> Result<Vec<OmegaLevel>> {
    if !grid.resolves_level(k_max) {
        return Err(Error::UnderResolved(format!(
            "cutoff πN/L = {:.3} must exceed √n·2^(k_max+1) = {:.3} for k_max = {k_max}",
            grid.max_frequency(),
            (grid.dim() as f64).sqrt() * 2f64.powi(k_max as i32 + 1)
        )));
    }
    let mut levels = Vec::with_capacity(k_max as usize + 1);
    let seed = OmegaSeed::default().sample(grid.dim(), grid.fourier_spacing());
    levels.push(OmegaLevel::audit(0, seed, None));
    for k in 1..=k_max {
        let prev = &levels[k as usize - 1];
        let next = prev.patch.convolve(&prev.patch);
        let p = prev.l1;
        levels.push(OmegaLevel::audit(k, next, Some(p)));
    }
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn one_dimensional_levels() {
        let g = GridSpec::default_certificate(1).unwrap();
        let levels = build_omega_sequence(2, &g).unwrap();
        assert!((levels[0].l1 - 1.0).abs() < 1e-2);
        for lv in &levels {
            assert!(lv.support_ok() && lv.hypercube_ok(), "k = {}", lv.k);
            assert!(lv.l1_rel_error < 1e-2);
            assert!(lv.doubling_rel_error < 1e-12);
        }
        let w1 = &levels[1].patch;
        let h = w1.spacing();
        // triangle 1 − |ξ − 3| on (2, 4), sampled with the strict seed
        let peak = w1.get(&[(3.0 / h).round() as i64]);
        assert!((peak - 1.0).abs() < 2.0 * h);
        assert!(levels[2].patch.values().iter().enumerate().all(|(i, &v)| {
            let x = levels[2].patch.xi_of(i)[0];
            v == 0.0 || (x > 4.0 && x < 8.0)
        }));
    }

    #[test]
    fn resolution_is_checked() {
        let g = GridSpec::default_solver(1).unwrap();
        assert!(matches!(build_omega_sequence(4, &g), Err(Error::UnderResolved(_))));
    }

    #[test]
    fn field_embedding() {
        let g = GridSpec::new(1, 16.0 * PI, 512).unwrap();
        let levels = build_omega_sequence(1, &g).unwrap();
        let f = levels[1].to_field(&g).unwrap();
        let mass: f64 = f.coeffs().iter().map(|c| c.re).sum::<f64>() * g.fourier_spacing();
        assert!((mass - levels[1].l1).abs() < 1e-12);
    }
}

//! Fourier-multiplier realizations of `(−Δ)^{s/2}`, `(Id−Δ)^{s/2}` and the
//! fractional heat semigroup, plus L¹ audits of the α-stable kernel.
//!
//! The kernel `p_t^α` is the inverse transform of `e^{−t|ξ|^α}`. On the box its
//! coefficients are `e^{−t|ξ_m|^α}/Lⁿ`, so the kernel integrates to one and the
//! discrete L¹ norm is `(L/N)ⁿ Σ_j |p_j|`.

use std::io::Write;
use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::spectral::{inverse_transform_complex, GridSpec, SpectralField};
use crate::{Error, Result};

/// Stability exponent and potential order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalParams {
    pub alpha: f64,
    pub s: f64,
}

impl FractionalParams {
    pub fn new(alpha: f64, s: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !s.is_finite() {
            return Err(Error::param("s", s, "s finite"));
        }
        Ok(FractionalParams { alpha, s })
    }
}

pub fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::param("alpha", alpha, "0 < α ≤ 2"))
    }
}

/// Multiplies each coefficient by `|ξ|^s`.
///
/// Negative orders require a mean-zero field; the ξ = 0 mode then stays zero.
pub fn riesz_apply(field: &SpectralField, s: f64) -> Result<SpectralField> {
    if !s.is_finite() {
        return Err(Error::param("s", s, "s finite"));
    }
    if s < 0.0 && field.dc().norm() != 0.0 {
        return Err(Error::NegativeRieszOrder(s));
    }
    if s == 0.0 {
        return Ok(field.clone());
    }
    Ok(field.apply_radial(|r| if r == 0.0 { 0.0 } else { r.powf(s) }))
}

/// Multiplies each coefficient by `(1+|ξ|²)^{s/2}`.
pub fn bessel_apply(field: &SpectralField, s: f64) -> Result<SpectralField> {
    if !s.is_finite() {
        return Err(Error::param("s", s, "s finite"));
    }
    Ok(field.apply_radial(|r| (1.0 + r * r).powf(0.5 * s)))
}

/// Multiplies each coefficient by `e^{−t|ξ|^α}`.
pub fn semigroup_apply(field: &SpectralField, t: f64, alpha: f64) -> Result<SpectralField> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::param("t", t, "t ≥ 0"));
    }
    check_alpha(alpha)?;
    if t == 0.0 {
        return Ok(field.clone());
    }
    Ok(field.apply_radial(|r| (-t * r.powf(alpha)).exp()))
}

/// Coefficients of `p_t^α` on the box: `e^{−t|ξ|^α}/Lⁿ`.
pub fn kernel_field(t: f64, alpha: f64, grid: &GridSpec) -> Result<SpectralField> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param("t", t, "t > 0"));
    }
    check_alpha(alpha)?;
    let vol = grid.volume();
    let coeffs = grid
        .xi_norms()
        .into_iter()
        .map(|r| Complex64::new((-t * r.powf(alpha)).exp() / vol, 0.0))
        .collect();
    SpectralField::from_coeffs(*grid, coeffs, true)
}

/// Physical samples of a field whose coefficients are window-normalized.
pub fn physical_samples(field: &SpectralField) -> Vec<f64> {
    inverse_transform_complex(field).into_iter().map(|c| c.re).collect()
}

/// Discrete integral `(L/N)ⁿ Σ_j p_j`.
pub fn discrete_integral(samples: &[f64], grid: &GridSpec) -> f64 {
    grid.spacing().powi(grid.dim() as i32) * samples.iter().sum::<f64>()
}

/// Discrete L¹ norm `(L/N)ⁿ Σ_j |p_j|`.
pub fn discrete_l1(samples: &[f64], grid: &GridSpec) -> f64 {
    grid.spacing().powi(grid.dim() as i32) * samples.iter().map(|v| v.abs()).sum::<f64>()
}

/// `‖p_t^α‖_{L¹}` on the given grid.
pub fn kernel_l1(t: f64, alpha: f64, grid: &GridSpec) -> Result<f64> {
    Ok(discrete_l1(&physical_samples(&kernel_field(t, alpha, grid)?), grid))
}

/// Largest sample magnitude on the box faces relative to the peak.
pub fn boundary_ratio(samples: &[f64], grid: &GridSpec) -> f64 {
    let half = grid.modes() / 2;
    let n = grid.modes();
    let mut peak = 0.0f64;
    let mut edge = 0.0f64;
    for (flat, v) in samples.iter().enumerate() {
        let a = v.abs();
        peak = peak.max(a);
        let mut rem = flat;
        let mut on_face = false;
        for _ in 0..grid.dim() {
            on_face |= rem % n == half;
            rem /= n;
        }
        if on_face {
            edge = edge.max(a);
        }
    }
    if peak == 0.0 {
        0.0
    } else {
        edge / peak
    }
}

/// Largest boundary-to-peak ratio accepted by the kernel audit.
pub const KERNEL_BOUNDARY_TOL: f64 = 1e-6;
/// Largest weighted multiplier value accepted at the frequency cutoff.
pub const KERNEL_CUTOFF_TOL: f64 = 1e-12;

/// L¹ audit of `(−Δ)^{s/2} p_t^α` and `(Id−Δ)^{s/2} p_t^α` over several times.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelEstimateReport {
    pub s: f64,
    pub alpha: f64,
    pub grid: GridSpec,
    pub t_values: Vec<f64>,
    /// `‖(−Δ)^{s/2} p_t^α‖_{L¹}` per time.
    pub l1_riesz: Vec<f64>,
    /// `‖(Id−Δ)^{s/2} p_t^α‖_{L¹}` per time.
    pub l1_bessel: Vec<f64>,
    /// `l1_riesz · t^{s/α}`; constant in t by scaling.
    pub homogeneity_ratios: Vec<f64>,
    /// `(max − min)/mean` of the homogeneity ratios.
    pub ratio_spread: f64,
    /// Smallest `C` with `l1_bessel ≤ C·max{1, t^{−s/α}}` on the probed times.
    pub bound_constant: f64,
}

impl KernelEstimateReport {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# kernel L1 audit: alpha={} s={} n={} L={} N={}; t in time units, l1 columns dimensionless, ratio = l1_riesz * t^(s/alpha)",
            self.alpha,
            self.s,
            self.grid.dim(),
            self.grid.length(),
            self.grid.modes()
        )?;
        writeln!(out, "t,l1_riesz,l1_bessel,ratio")?;
        for i in 0..self.t_values.len() {
            writeln!(
                out,
                "{:e},{:e},{:e},{:e}",
                self.t_values[i], self.l1_riesz[i], self.l1_bessel[i], self.homogeneity_ratios[i]
            )?;
        }
        Ok(())
    }
}

fn check_kernel_inputs(s: f64, alpha: f64, t_values: &[f64]) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::param("s", s, "s ≥ 0"));
    }
    if t_values.is_empty() {
        return Err(Error::param("t_values", 0.0, "at least one t > 0"));
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &t in t_values {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::param("t", t, "t > 0"));
        }
        lo = lo.min(t);
        hi = hi.max(t);
    }
    Ok((lo, hi))
}

fn cutoff_weight(s: f64, alpha: f64, t_min: f64, grid: &GridSpec) -> f64 {
    let r = grid.max_frequency();
    (-t_min * r.powf(alpha)).exp() * (1.0 + r * r).powf(0.5 * s).max(1.0)
}

fn kernel_boundary(alpha: f64, t_max: f64, grid: &GridSpec) -> Result<f64> {
    Ok(boundary_ratio(&physical_samples(&kernel_field(t_max, alpha, grid)?), grid))
}

/// Checks that `grid` resolves the kernel audit for the given inputs.
fn check_adequate(s: f64, alpha: f64, t_min: f64, t_max: f64, grid: &GridSpec) -> Result<()> {
    let w = cutoff_weight(s, alpha, t_min, grid);
    if w > KERNEL_CUTOFF_TOL {
        return Err(Error::UnderResolved(format!(
            "multiplier at the frequency cutoff is {w:.2e} > {KERNEL_CUTOFF_TOL:e}"
        )));
    }
    let b = kernel_boundary(alpha, t_max, grid)?;
    if b > KERNEL_BOUNDARY_TOL {
        return Err(Error::UnderResolved(format!(
            "kernel at the box boundary is {b:.2e} of its peak (> {KERNEL_BOUNDARY_TOL:e})"
        )));
    }
    Ok(())
}

/// Largest modes per axis the automatic 1D sizing will try.
pub const KERNEL_MAX_MODES: usize = 1 << 22;

/// Kernel audit on an automatically sized 1D grid.
///
/// Starts from `L = 16π, N = 512`, doubles `N` until the weighted multiplier at
/// the cutoff is below [`KERNEL_CUTOFF_TOL`], then doubles `L` and `N` together
/// until the boundary test passes.
pub fn kernel_l1_report(s: f64, alpha: f64, t_values: &[f64]) -> Result<KernelEstimateReport> {
    let (t_min, t_max) = check_kernel_inputs(s, alpha, t_values)?;
    let mut grid = GridSpec::new(1, 16.0 * PI, 512)?;
    let too_big = |g: &GridSpec| {
        Error::UnderResolved(format!(
            "kernel audit needs more than {KERNEL_MAX_MODES} modes (reached L = {:.1}, N = {})",
            g.length(),
            g.modes()
        ))
    };
    while cutoff_weight(s, alpha, t_min, &grid) > KERNEL_CUTOFF_TOL {
        if grid.modes() >= KERNEL_MAX_MODES {
            return Err(too_big(&grid));
        }
        grid = grid.with_double_modes()?;
    }
    while kernel_boundary(alpha, t_max, &grid)? > KERNEL_BOUNDARY_TOL {
        if grid.modes() >= KERNEL_MAX_MODES {
            return Err(too_big(&grid));
        }
        grid = grid.refined_fourier()?;
    }
    kernel_l1_report_on(s, alpha, t_values, &grid)
}

/// Kernel audit on a caller-supplied grid; errors if the grid is inadequate.
pub fn kernel_l1_report_on(
    s: f64,
    alpha: f64,
    t_values: &[f64],
    grid: &GridSpec,
) -> Result<KernelEstimateReport> {
    let (t_min, t_max) = check_kernel_inputs(s, alpha, t_values)?;
    check_adequate(s, alpha, t_min, t_max, grid)?;
    let mut l1_riesz = Vec::with_capacity(t_values.len());
    let mut l1_bessel = Vec::with_capacity(t_values.len());
    for &t in t_values {
        let p = kernel_field(t, alpha, grid)?;
        let riesz = riesz_apply(&p, s)?;
        let bessel = bessel_apply(&p, s)?;
        l1_riesz.push(discrete_l1(&physical_samples(&riesz), grid));
        l1_bessel.push(discrete_l1(&physical_samples(&bessel), grid));
    }
    let ratios: Vec<f64> = t_values
        .iter()
        .zip(&l1_riesz)
        .map(|(&t, &l)| l * t.powf(s / alpha))
        .collect();
    let (lo, hi, sum) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64, 0.0), |(lo, hi, sum), &r| (lo.min(r), hi.max(r), sum + r));
    let mean = sum / ratios.len() as f64;
    let ratio_spread = if mean > 0.0 { (hi - lo) / mean } else { 0.0 };
    let bound_constant = t_values
        .iter()
        .zip(&l1_bessel)
        .map(|(&t, &l)| l / t.powf(-s / alpha).max(1.0))
        .fold(0.0, f64::max);
    Ok(KernelEstimateReport {
        s,
        alpha,
        grid: *grid,
        t_values: t_values.to_vec(),
        l1_riesz,
        l1_bessel,
        homogeneity_ratios: ratios,
        ratio_spread,
        bound_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::default_solver(1).unwrap()
    }

    fn mode_field(m: i64) -> SpectralField {
        let g = grid();
        let mut f = SpectralField::zeros(g, false);
        f.coeffs_mut()[g.flat_index(&[m]).unwrap()] = Complex64::new(1.0, 0.0);
        f
    }

    fn wavy(g: GridSpec) -> SpectralField {
        SpectralField::from_fn(g, false, |xi| {
            Complex64::new((-xi[0] * xi[0]).exp(), 0.3 * (xi[0]).sin())
        })
        .unwrap()
    }

    #[test]
    fn riesz_examples() {
        let f = wavy(grid());
        assert_eq!(riesz_apply(&f, 0.0).unwrap(), f);
        // ξ = 16/8 = 2
        let d = riesz_apply(&mode_field(16), 1.0).unwrap();
        assert!((d.coeffs()[16].re - 2.0).abs() < 1e-15);
        let twice = riesz_apply(&riesz_apply(&f, 0.5).unwrap(), 0.5).unwrap();
        assert!(twice.max_abs_diff(&riesz_apply(&f, 1.0).unwrap()) < 1e-12);
    }

    #[test]
    fn negative_riesz_needs_mean_zero() {
        let f = wavy(grid());
        assert!(matches!(riesz_apply(&f, -0.5), Err(Error::NegativeRieszOrder(_))));
        let mut g = f.clone();
        g.coeffs_mut()[0] = Complex64::default();
        let back = riesz_apply(&riesz_apply(&g, -0.5).unwrap(), 0.5).unwrap();
        assert!(back.max_abs_diff(&g) < 1e-12);
    }

    #[test]
    fn bessel_examples() {
        let f = wavy(grid());
        let b = bessel_apply(&f, 3.7).unwrap();
        assert_eq!(b.dc(), f.dc());
        // ξ = 1 at mode 8
        let two = bessel_apply(&mode_field(8), 2.0).unwrap();
        assert!((two.coeffs()[8].re - 2.0).abs() < 1e-15);
        let rt = bessel_apply(&bessel_apply(&f, -0.7).unwrap(), 0.7).unwrap();
        assert!(rt.max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn semigroup_examples() {
        let f = wavy(grid());
        assert_eq!(semigroup_apply(&f, 0.0, 1.3).unwrap(), f);
        let s = semigroup_apply(&f, 5.0, 1.3).unwrap();
        assert_eq!(s.dc(), f.dc());
        let ab = semigroup_apply(&semigroup_apply(&f, 0.3, 1.3).unwrap(), 0.45, 1.3).unwrap();
        assert!(ab.max_abs_diff(&semigroup_apply(&f, 0.75, 1.3).unwrap()) < 1e-12);
        assert!(semigroup_apply(&f, -1.0, 1.0).is_err());
        assert!(semigroup_apply(&f, 1.0, 2.5).is_err());
    }

    #[test]
    fn kernel_has_unit_integral_and_is_nonnegative() {
        let g = grid();
        for alpha in [0.8, 1.0, 1.5, 2.0] {
            let p = physical_samples(&kernel_field(1.0, alpha, &g).unwrap());
            assert!((discrete_integral(&p, &g) - 1.0).abs() < 1e-8);
            let max = p.iter().cloned().fold(0.0, f64::max);
            let min = p.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-8 * max, "alpha {alpha}: min {min}");
        }
        assert!(kernel_field(0.0, 1.0, &g).is_err());
    }

    #[test]
    fn heat_kernel_matches_periodized_gaussian() {
        let g = grid();
        for t in [0.25, 1.0, 4.0] {
            let p = physical_samples(&kernel_field(t, 2.0, &g).unwrap());
            let l = g.length();
            for (j, &v) in p.iter().enumerate() {
                let x = g.x(j)[0];
                let exact: f64 = (-6i32..=6)
                    .map(|w| {
                        let y = x - w as f64 * l;
                        (-(y * y) / (4.0 * t)).exp()
                    })
                    .sum::<f64>()
                    / (4.0 * PI * t).sqrt();
                assert!((v - exact).abs() < 1e-8, "t {t} x {x}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn order_zero_report_has_unit_norms() {
        let r = kernel_l1_report(0.0, 1.5, &[0.5, 1.0, 2.0]).unwrap();
        for (&a, &b) in r.l1_riesz.iter().zip(&r.l1_bessel) {
            assert!((a - 1.0).abs() < 1e-8 && (b - 1.0).abs() < 1e-8);
        }
        assert!(r.ratio_spread < 1e-8);
    }

    #[test]
    fn inadequate_grid_is_rejected() {
        let g = grid();
        assert!(matches!(
            kernel_l1_report_on(0.5, 1.0, &[0.5, 1.0, 2.0], &g),
            Err(Error::UnderResolved(_))
        ));
    }

    #[test]
    fn report_csv_layout() {
        let r = kernel_l1_report(1.0, 2.0, &[0.5, 1.0]).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with('#'));
        assert_eq!(lines[1], "t,l1_riesz,l1_bessel,ratio");
        assert_eq!(lines.len(), 4);
    }
}

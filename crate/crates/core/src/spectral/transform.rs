use rustfft::num_complex::Complex64;
use rustfft::FftDirection;

use super::fft::fft_nd;
use super::{GridSpec, SpectralField};
use crate::{Error, Result};

fn check_len(grid: &GridSpec, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(Error::ShapeMismatch {
            expected: grid.len(),
            actual: len,
        });
    }
    Ok(())
}

/// Coefficients of a real physical field sampled at `x_j = jL/N`.
///
/// The result is flagged real. Normalization is `1/Nⁿ` on the forward side.
pub fn forward_transform(values: &[f64], grid: &GridSpec) -> Result<SpectralField> {
    check_len(grid, values.len())?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("physical field"));
    }
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&mut buf, &grid.shape(), FftDirection::Forward);
    let scale = 1.0 / grid.len() as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    Ok(SpectralField::from_coeffs_unchecked(*grid, buf, true))
}

/// Complex physical field to coefficients; the result is not flagged real.
pub fn forward_transform_complex(values: &[Complex64], grid: &GridSpec) -> Result<SpectralField> {
    check_len(grid, values.len())?;
    if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite("physical field"));
    }
    let mut buf = values.to_vec();
    fft_nd(&mut buf, &grid.shape(), FftDirection::Forward);
    let scale = 1.0 / grid.len() as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    Ok(SpectralField::from_coeffs_unchecked(*grid, buf, false))
}

/// Physical samples of a field (no normalization on the inverse side).
pub fn inverse_transform_complex(field: &SpectralField) -> Vec<Complex64> {
    let mut buf = field.coeffs().to_vec();
    fft_nd(&mut buf, &field.grid().shape(), FftDirection::Inverse);
    buf
}

/// Real physical samples of a field flagged real.
pub fn inverse_transform(field: &SpectralField) -> Result<Vec<f64>> {
    if !field.is_real() {
        return Err(Error::NotReal);
    }
    Ok(inverse_transform_complex(field).into_iter().map(|c| c.re).collect())
}

/// Coefficients of the pointwise square of a real field, 2/3-rule dealiased.
///
/// Modes outside the dealiasing cutoff are dropped from the input and from the
/// output, so the result equals the discrete autoconvolution
/// `Σ_{p+q=m} c_p c_q` of the truncated input on every kept mode.
pub fn pointwise_square(field: &SpectralField) -> Result<SpectralField> {
    if !field.is_real() {
        return Err(Error::NotReal);
    }
    let grid = *field.grid();
    let mask = grid.dealias_mask();
    let mut buf: Vec<Complex64> = field
        .coeffs()
        .iter()
        .zip(&mask)
        .map(|(&c, &keep)| if keep { c } else { Complex64::default() })
        .collect();
    let shape = grid.shape();
    fft_nd(&mut buf, &shape, FftDirection::Inverse);
    buf.iter_mut().for_each(|c| *c = Complex64::new(c.re * c.re, 0.0));
    fft_nd(&mut buf, &shape, FftDirection::Forward);
    let scale = 1.0 / grid.len() as f64;
    for (c, &keep) in buf.iter_mut().zip(&mask) {
        *c = if keep { *c * scale } else { Complex64::default() };
    }
    Ok(SpectralField::from_coeffs_unchecked(grid, buf, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid1(n: usize) -> GridSpec {
        GridSpec::new(1, 16.0 * PI, n).unwrap()
    }

    #[test]
    fn constant_field_is_pure_dc() {
        let g = grid1(32);
        let f = forward_transform(&vec![1.0; 32], &g).unwrap();
        assert!((f.dc().re - 1.0).abs() < 1e-15);
        assert!(f.coeffs()[1..].iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn cosine_is_a_fourier_pair() {
        let g = grid1(64);
        let xi = 3.0 * g.fourier_spacing();
        let vals: Vec<f64> = (0..64).map(|j| (xi * g.x(j)[0]).cos()).collect();
        let f = forward_transform(&vals, &g).unwrap();
        for (i, c) in f.coeffs().iter().enumerate() {
            let m = g.signed_mode(i);
            let want = if m.abs() == 3 { 0.5 } else { 0.0 };
            assert!((c.re - want).abs() < 1e-14 && c.im.abs() < 1e-14, "mode {m}");
        }
    }

    #[test]
    fn round_trip() {
        let g = GridSpec::new(2, 16.0 * PI, 16).unwrap();
        let vals: Vec<f64> = (0..g.len()).map(|i| ((i * 7919) % 101) as f64 / 50.0 - 1.0).collect();
        let back = inverse_transform(&forward_transform(&vals, &g).unwrap()).unwrap();
        let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for (a, b) in vals.iter().zip(&back) {
            assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn rejects_shape_and_nan() {
        let g = grid1(16);
        assert!(matches!(
            forward_transform(&[0.0; 15], &g),
            Err(Error::ShapeMismatch { .. })
        ));
        let mut v = vec![0.0; 16];
        v[2] = f64::INFINITY;
        assert!(matches!(forward_transform(&v, &g), Err(Error::NonFinite(_))));
    }

    #[test]
    fn square_of_constant() {
        let g = grid1(16);
        let f = forward_transform(&vec![3.0; 16], &g).unwrap();
        let sq = pointwise_square(&f).unwrap();
        assert!((sq.dc().re - 9.0).abs() < 1e-13);
        assert!(sq.coeffs()[1..].iter().all(|c| c.norm() < 1e-13));
        let z = pointwise_square(&SpectralField::zeros(g, true)).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn square_rejects_complex_field() {
        let g = grid1(16);
        assert!(matches!(
            pointwise_square(&SpectralField::zeros(g, false)),
            Err(Error::NotReal)
        ));
    }
}

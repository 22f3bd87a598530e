use std::f64::consts::PI;

use super::SpectralField;
use crate::{Error, Result};

/// Discrete Sobolev norms of one field.
///
/// Quadrature: `‖f‖²_{H^s} = Lⁿ Σ_m (1+|ξ_m|²)^s |c_m|²`, which is exact
/// Parseval for the periodic field and converges to the whole-space norm for
/// band-limited data. `l1_fourier = (2π)ⁿ Σ_m |c_m|` approximates
/// `∫ |f̂(ξ)| dξ` with `f̂(ξ_m) ≈ Lⁿ c_m`. All entries are `+∞` for an
/// overflowed field.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub l2: f64,
    pub orders: Vec<f64>,
    pub hs: Vec<f64>,
    pub hs_dot: Vec<f64>,
    pub l1_fourier: f64,
}

impl NormReport {
    fn position(&self, s: f64) -> Option<usize> {
        self.orders.iter().position(|&o| o == s)
    }

    /// Inhomogeneous norm for a requested order.
    pub fn hs(&self, s: f64) -> Option<f64> {
        self.position(s).map(|i| self.hs[i])
    }

    /// Homogeneous seminorm for a requested order.
    pub fn hs_dot(&self, s: f64) -> Option<f64> {
        self.position(s).map(|i| self.hs_dot[i])
    }
}

pub fn sobolev_norms(field: &SpectralField, orders: &[f64]) -> Result<NormReport> {
    if field.is_overflowed() {
        let inf = vec![f64::INFINITY; orders.len()];
        return Ok(NormReport {
            l2: f64::INFINITY,
            orders: orders.to_vec(),
            hs: inf.clone(),
            hs_dot: inf,
            l1_fourier: f64::INFINITY,
        });
    }
    if !field.is_finite() {
        return Err(Error::NonFinite("field passed to sobolev_norms"));
    }
    let g = field.grid();
    let vol = g.volume();
    let mut l2 = 0.0;
    let mut l1 = 0.0;
    let mut hs = vec![0.0; orders.len()];
    let mut hs_dot = vec![0.0; orders.len()];
    for (i, c) in field.coeffs().iter().enumerate() {
        let a2 = c.norm_sqr();
        if a2 == 0.0 {
            continue;
        }
        let r = g.xi_norm(i);
        l2 += a2;
        l1 += a2.sqrt();
        for (k, &s) in orders.iter().enumerate() {
            hs[k] += (1.0 + r * r).powf(s) * a2;
            if r > 0.0 {
                hs_dot[k] += r.powf(2.0 * s) * a2;
            } else if s == 0.0 {
                hs_dot[k] += a2;
            }
        }
    }
    let fin = |x: f64| (vol * x).sqrt();
    Ok(NormReport {
        l2: fin(l2),
        orders: orders.to_vec(),
        hs: hs.into_iter().map(fin).collect(),
        hs_dot: hs_dot.into_iter().map(fin).collect(),
        l1_fourier: (2.0 * PI).powi(g.dim() as i32) * l1,
    })
}

/// `(‖f‖_{H¹}, ‖f‖_{Ḣ¹})`, with `+∞` for overflowed or non-finite fields.
pub fn h1_pair(field: &SpectralField) -> (f64, f64) {
    if field.is_overflowed() || !field.is_finite() {
        return (f64::INFINITY, f64::INFINITY);
    }
    let g = field.grid();
    let (mut h1, mut h1d) = (0.0, 0.0);
    for (i, c) in field.coeffs().iter().enumerate() {
        let a2 = c.norm_sqr();
        let r2 = g.xi_norm(i).powi(2);
        h1 += (1.0 + r2) * a2;
        h1d += r2 * a2;
    }
    let vol = g.volume();
    ((vol * h1).sqrt(), (vol * h1d).sqrt())
}

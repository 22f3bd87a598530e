use std::io::Write;

use rustfft::num_complex::Complex64;
use rustfft::FftDirection;

use crate::spectral::fft::fft_nd;
use crate::Result;

/// Nonnegative samples on a rectangular window of the lattice `h·ℤⁿ`.
///
/// `origin` is the integer index of the first stored point; storage is
/// row-major over the first `dim` axes, unused axes have extent 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePatch {
    dim: usize,
    spacing: f64,
    origin: [i64; 3],
    shape: [usize; 3],
    values: Vec<f64>,
}

/// Work bound above which convolutions switch from direct sums to FFTs.
const DIRECT_WORK_LIMIT: usize = 1 << 28;

impl LatticePatch {
    pub fn new(dim: usize, spacing: f64, origin: [i64; 3], shape: [usize; 3], values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), shape.iter().product::<usize>());
        debug_assert!(shape[dim..].iter().all(|&s| s == 1));
        LatticePatch {
            dim,
            spacing,
            origin,
            shape,
            values,
        }
    }

    /// Samples `f` on every lattice point of the box `[lo, hi]` (index bounds, inclusive).
    pub fn sample(dim: usize, spacing: f64, lo: [i64; 3], hi: [i64; 3], f: impl Fn(&[f64]) -> f64) -> Self {
        let mut shape = [1usize; 3];
        for d in 0..dim {
            shape[d] = (hi[d] - lo[d] + 1).max(0) as usize;
        }
        let mut origin = [0i64; 3];
        origin[..dim].copy_from_slice(&lo[..dim]);
        let len = shape.iter().product();
        let mut values = Vec::with_capacity(len);
        let mut xi = [0.0; 3];
        for flat in 0..len {
            let idx = Self::unravel(&shape, flat);
            for d in 0..dim {
                xi[d] = (origin[d] + idx[d] as i64) as f64 * spacing;
            }
            values.push(f(&xi[..dim]));
        }
        LatticePatch::new(dim, spacing, origin, shape, values).trimmed()
    }

    fn unravel(shape: &[usize; 3], flat: usize) -> [usize; 3] {
        [flat / (shape[1] * shape[2]), (flat / shape[2]) % shape[1], flat % shape[2]]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn origin(&self) -> [i64; 3] {
        self.origin
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Lattice index of a stored position.
    pub fn index_of(&self, flat: usize) -> [i64; 3] {
        let l = Self::unravel(&self.shape, flat);
        [
            self.origin[0] + l[0] as i64,
            self.origin[1] + l[1] as i64,
            self.origin[2] + l[2] as i64,
        ]
    }

    pub fn xi_of(&self, flat: usize) -> [f64; 3] {
        let m = self.index_of(flat);
        let h = self.spacing;
        [m[0] as f64 * h, m[1] as f64 * h, m[2] as f64 * h]
    }

    /// Value at a lattice index (zero outside the window).
    pub fn get(&self, index: &[i64]) -> f64 {
        let mut flat = 0usize;
        for d in 0..3 {
            let m = if d < self.dim { index[d] } else { self.origin[d] };
            let l = m - self.origin[d];
            if l < 0 || l as usize >= self.shape[d] {
                return 0.0;
            }
            flat = flat * self.shape[d] + l as usize;
        }
        self.values[flat]
    }

    pub fn nnz(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0.0).count()
    }

    /// `Σ v · hⁿ`.
    pub fn l1(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.cell()
    }

    /// Cell volume `hⁿ`.
    pub fn cell(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Pointwise product with a function of `ξ`.
    pub fn weighted(&self, f: impl Fn(&[f64]) -> f64) -> LatticePatch {
        let values = (0..self.values.len())
            .map(|i| {
                let v = self.values[i];
                if v == 0.0 {
                    0.0
                } else {
                    v * f(&self.xi_of(i)[..self.dim])
                }
            })
            .collect();
        LatticePatch { values, ..self.clone() }
    }

    /// Shrinks the window to the bounding box of the nonzero values.
    pub fn trimmed(self) -> LatticePatch {
        let mut lo = [usize::MAX; 3];
        let mut hi = [0usize; 3];
        let mut any = false;
        for (flat, &v) in self.values.iter().enumerate() {
            if v != 0.0 {
                any = true;
                let l = Self::unravel(&self.shape, flat);
                for d in 0..3 {
                    lo[d] = lo[d].min(l[d]);
                    hi[d] = hi[d].max(l[d]);
                }
            }
        }
        if !any {
            return LatticePatch {
                origin: self.origin,
                shape: [1; 3],
                values: vec![0.0],
                ..self
            };
        }
        if lo == [0; 3] && (0..3).all(|d| hi[d] + 1 == self.shape[d]) {
            return self;
        }
        let shape = [hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1];
        let mut values = Vec::with_capacity(shape.iter().product());
        for a in lo[0]..=hi[0] {
            for b in lo[1]..=hi[1] {
                let start = (a * self.shape[1] + b) * self.shape[2];
                values.extend_from_slice(&self.values[start + lo[2]..=start + hi[2]]);
            }
        }
        let origin = [
            self.origin[0] + lo[0] as i64,
            self.origin[1] + lo[1] as i64,
            self.origin[2] + lo[2] as i64,
        ];
        LatticePatch {
            origin,
            shape,
            values,
            ..self
        }
    }

    /// Discrete convolution `(a ∗ b)_m = hⁿ Σ_p a_p b_{m−p}`.
    ///
    /// Large products go through an FFT; the result is then zeroed outside the
    /// exact sumset of the two supports and clamped at zero, so support and
    /// sign match the direct sum.
    pub fn convolve(&self, other: &LatticePatch) -> LatticePatch {
        assert_eq!(self.dim, other.dim);
        let mut shape = [1usize; 3];
        let mut origin = [0i64; 3];
        for d in 0..3 {
            shape[d] = self.shape[d] + other.shape[d] - 1;
            origin[d] = self.origin[d] + other.origin[d];
        }
        let work = self.nnz().saturating_mul(other.nnz());
        let values = if work <= DIRECT_WORK_LIMIT {
            self.convolve_direct(other, &shape)
        } else {
            self.convolve_fft(other, &shape)
        };
        LatticePatch::new(self.dim, self.spacing, origin, shape, values).trimmed()
    }

    fn nonzeros(&self) -> Vec<([usize; 3], f64)> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (Self::unravel(&self.shape, i), v))
            .collect()
    }

    fn convolve_direct(&self, other: &LatticePatch, shape: &[usize; 3]) -> Vec<f64> {
        let mut out = vec![0.0; shape.iter().product()];
        let a = self.nonzeros();
        let b = other.nonzeros();
        let cell = self.cell();
        for (ia, va) in &a {
            for (ib, vb) in &b {
                let flat = ((ia[0] + ib[0]) * shape[1] + ia[1] + ib[1]) * shape[2] + ia[2] + ib[2];
                out[flat] += va * vb;
            }
        }
        out.iter_mut().for_each(|v| *v *= cell);
        out
    }

    fn embed(&self, shape: &[usize; 3], indicator: bool) -> Vec<Complex64> {
        let mut buf = vec![Complex64::default(); shape.iter().product()];
        for (flat, &v) in self.values.iter().enumerate() {
            let l = Self::unravel(&self.shape, flat);
            let dst = (l[0] * shape[1] + l[1]) * shape[2] + l[2];
            let x = if indicator { (v != 0.0) as u8 as f64 } else { v };
            buf[dst] = Complex64::new(x, 0.0);
        }
        buf
    }

    fn fft_product(a: Vec<Complex64>, b: Vec<Complex64>, shape: &[usize; 3], dims: usize) -> Vec<f64> {
        let axes: Vec<usize> = shape[..dims].to_vec();
        let (mut a, mut b) = (a, b);
        fft_nd(&mut a, &axes, FftDirection::Forward);
        fft_nd(&mut b, &axes, FftDirection::Forward);
        for (x, y) in a.iter_mut().zip(&b) {
            *x *= y;
        }
        fft_nd(&mut a, &axes, FftDirection::Inverse);
        let scale = 1.0 / a.len() as f64;
        a.into_iter().map(|c| c.re * scale).collect()
    }

    fn convolve_fft(&self, other: &LatticePatch, shape: &[usize; 3]) -> Vec<f64> {
        let values = Self::fft_product(self.embed(shape, false), other.embed(shape, false), shape, self.dim);
        let counts = Self::fft_product(self.embed(shape, true), other.embed(shape, true), shape, self.dim);
        let cell = self.cell();
        values
            .into_iter()
            .zip(counts)
            .map(|(v, c)| if c < 0.5 { 0.0 } else { v.max(0.0) * cell })
            .collect()
    }

    /// Writes the nonzero entries as `i,j,k,xi1,xi2,xi3,value` rows.
    pub fn write_csv<W: Write>(&self, mut out: W, title: &str) -> Result<()> {
        writeln!(
            out,
            "# {title}: dim={} spacing={}; i,j,k are lattice indices (xi = index * spacing, frequency units), value is dimensionless; unused axes are 0",
            self.dim, self.spacing
        )?;
        writeln!(out, "i,j,k,xi1,xi2,xi3,value")?;
        for (flat, &v) in self.values.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let m = self.index_of(flat);
            let mut m3 = [0i64; 3];
            m3[..self.dim].copy_from_slice(&m[..self.dim]);
            let h = self.spacing;
            writeln!(
                out,
                "{},{},{},{:e},{:e},{:e},{:e}",
                m3[0],
                m3[1],
                m3[2],
                m3[0] as f64 * h,
                m3[1] as f64 * h,
                m3[2] as f64 * h,
                v
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(a: &LatticePatch, b: &LatticePatch, m: &[i64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..a.values().len() {
            let p = a.index_of(i);
            let q: Vec<i64> = (0..a.dim()).map(|d| m[d] - p[d]).collect();
            acc += a.values()[i] * b.get(&q);
        }
        acc * a.cell()
    }

    #[test]
    fn direct_and_fft_routes_agree_with_brute_force() {
        let a = LatticePatch::sample(2, 0.25, [3, -2, 0], [8, 4, 0], |x| (x[0] + 2.0 * x[1]).sin().abs());
        let b = LatticePatch::sample(2, 0.25, [-1, 0, 0], [4, 6, 0], |x| 1.0 + x[0] * x[1]);
        let direct = a.convolve(&b);
        let fft = LatticePatch::new(
            2,
            0.25,
            [a.origin()[0] + b.origin()[0], a.origin()[1] + b.origin()[1], 0],
            [a.shape()[0] + b.shape()[0] - 1, a.shape()[1] + b.shape()[1] - 1, 1],
            a.convolve_fft(&b, &[a.shape()[0] + b.shape()[0] - 1, a.shape()[1] + b.shape()[1] - 1, 1]),
        )
        .trimmed();
        for i in 0..direct.values().len() {
            let m = direct.index_of(i);
            let want = brute(&a, &b, &m);
            assert!((direct.values()[i] - want).abs() < 1e-12);
            assert!((fft.get(&m) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn convolution_multiplies_l1() {
        let a = LatticePatch::sample(1, 0.125, [0, 0, 0], [20, 0, 0], |x| x[0] * (3.0 - x[0]).max(0.0));
        let c = a.convolve(&a);
        assert!((c.l1() - a.l1() * a.l1()).abs() < 1e-12 * c.l1());
    }

    #[test]
    fn trimming_keeps_values() {
        let a = LatticePatch::sample(1, 0.5, [-10, 0, 0], [10, 0, 0], |x| if x[0] > 1.0 && x[0] < 2.5 { 1.0 } else { 0.0 });
        assert_eq!(a.origin()[0], 3);
        assert_eq!(a.shape()[0], 2);
        assert_eq!(a.get(&[4]), 1.0);
        assert_eq!(a.get(&[5]), 0.0);
    }
}

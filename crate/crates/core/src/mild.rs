//! Mild solutions by global-in-time Picard iteration.
//!
//! In coefficient units (`û(ξ_m) ≈ Lⁿ c_m`) the fixed-point map is
//!
//! ```text
//! c(t) = e^{−t|ξ|^α} c₀ + ∫₀ᵗ e^{−(t−s)|ξ|^α} g(c(s)) ds,
//! g(c) = (2π)ⁿ b̂(s, ξ) · Σ_{p+q=m} |ξ_p| c_p |ξ_q| c_q,
//! ```
//!
//! which is the Fourier-side equation with the Lebesgue convolution
//! `|ξ|û ∗ |ξ|û`. The time integral is a trapezoid rule on a uniform lattice
//! with the semigroup factor applied exactly at each node.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::blowup::OmegaSeed;
use crate::coefficient::{
    case_for, gamma_condition, gamma_in_range, sobolev_norm_of_b, CoefficientSpec,
};
use crate::fractional::check_alpha;
use crate::spectral::{h1_pair, pointwise_square, GridSpec, SpectralField};
use crate::{Error, Result};

/// Largest Hermitian defect, relative to the largest coefficient, accepted for `u₀`.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ProblemConfig {
    pub grid: GridSpec,
    pub alpha: f64,
    pub gamma: f64,
    pub coefficient: CoefficientSpec,
    pub u0: SpectralField,
    /// Horizon `T₀`.
    pub t0: f64,
    /// Requested step; the lattice uses `T₀/round(T₀/dt)`.
    pub dt: f64,
    /// Relative sup-in-time H¹ change that stops the iteration.
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    /// Discrete H¹ value treated as numerical blow-up.
    pub overflow_threshold: f64,
    /// Absolute constant of the contraction estimates (not quantified analytically).
    pub c_abs: f64,
}

impl ProblemConfig {
    /// Config with solver defaults: `picard_tol = 1e−10`, 200 iterations,
    /// overflow at `H¹ = 1e12`, `C_abs = 1`.
    pub fn new(coefficient: CoefficientSpec, u0: SpectralField, t0: f64, dt: f64) -> Self {
        ProblemConfig {
            grid: *u0.grid(),
            alpha: coefficient.alpha,
            gamma: coefficient.gamma,
            coefficient,
            u0,
            t0,
            dt,
            picard_tol: 1e-10,
            picard_max_iter: 200,
            overflow_threshold: 1e12,
            c_abs: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(Error::param("T0", self.t0, "T₀ > 0"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::param("dt", self.dt, "dt > 0"));
        }
        if !(self.picard_tol > 0.0) {
            return Err(Error::param("picard_tol", self.picard_tol, "picard_tol > 0"));
        }
        if self.picard_max_iter == 0 {
            return Err(Error::param("picard_max_iter", 0.0, "picard_max_iter ≥ 1"));
        }
        if !(self.overflow_threshold > 0.0) {
            return Err(Error::param(
                "overflow_threshold",
                self.overflow_threshold,
                "overflow_threshold > 0",
            ));
        }
        if !(self.c_abs > 0.0 && self.c_abs.is_finite()) {
            return Err(Error::param("C_abs", self.c_abs, "C_abs > 0"));
        }
        if self.u0.grid() != &self.grid {
            return Err(Error::InvalidGrid("u0 lives on a different grid".into()));
        }
        if self.coefficient.n != self.grid.dim() {
            return Err(Error::InvalidGrid(format!(
                "coefficient is {}-dimensional, grid is {}-dimensional",
                self.coefficient.n,
                self.grid.dim()
            )));
        }
        if self.coefficient.alpha != self.alpha || self.coefficient.gamma != self.gamma {
            return Err(Error::param(
                "alpha",
                self.coefficient.alpha,
                "coefficient α, γ equal the problem α, γ",
            ));
        }
        self.coefficient.validate()?;
        if !self.u0.is_finite() {
            return Err(Error::NonFinite("u0"));
        }
        if !self.u0.is_real() {
            return Err(Error::NotReal);
        }
        let defect = self.u0.hermitian_defect();
        if defect > HERMITIAN_TOL * self.u0.max_abs().max(f64::MIN_POSITIVE) {
            return Err(Error::param(
                "u0 Hermitian defect",
                defect,
                "c(−m) = conj c(m) for a real field",
            ));
        }
        Ok(())
    }

    /// Number of steps `M`; nodes are `t_i = i·T₀/M` for `i = 0..=M`.
    pub fn steps(&self) -> usize {
        ((self.t0 / self.dt).round() as usize).max(1)
    }

    /// Effective step `T₀/M`.
    pub fn step(&self) -> f64 {
        self.t0 / self.steps() as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let h = self.step();
        (0..=self.steps()).map(|i| i as f64 * h).collect()
    }
}

/// Lattice data reused across all nodes and iterations.
struct Workspace {
    grid: GridSpec,
    xi: Vec<f64>,
    xi_alpha: Vec<f64>,
    /// `e^{−dt|ξ|^α}`.
    step_decay: Vec<f64>,
    dt: f64,
    times: Vec<f64>,
    symbol: Symbol,
    prefactor: f64,
}

enum Symbol {
    Zero,
    /// `b̂(t, ξ) = f(t) σ(ξ)` with `f` sampled at the nodes.
    Separable { base: Vec<f64>, factors: Vec<f64> },
    PerNode(CoefficientSpec),
}

impl Workspace {
    fn new(config: &ProblemConfig) -> Result<Self> {
        let grid = config.grid;
        let xi = grid.xi_norms();
        let xi_alpha: Vec<f64> = xi.iter().map(|r| r.powf(config.alpha)).collect();
        let dt = config.step();
        let step_decay = xi_alpha.iter().map(|a| (-dt * a).exp()).collect();
        let times = config.times();
        let spec = &config.coefficient;
        let symbol = if spec.is_zero() {
            Symbol::Zero
        } else if spec.is_separable() {
            let base: Vec<f64> = crate::coefficient::build_symbol(
                &spec.clone().with_modulation(crate::coefficient::TimeModulation::Constant(1.0)),
                0.0,
                &grid,
            )?
            .coeffs()
            .iter()
            .map(|c| c.re)
            .collect();
            let factors = times
                .iter()
                .map(|&t| spec.time_modulation.eval(t))
                .collect::<Result<Vec<_>>>()?;
            Symbol::Separable { base, factors }
        } else {
            for &t in &times {
                spec.time_modulation.eval(t)?;
            }
            Symbol::PerNode(spec.clone())
        };
        Ok(Workspace {
            grid,
            xi,
            xi_alpha,
            step_decay,
            dt,
            times,
            symbol,
            prefactor: (2.0 * PI).powi(grid.dim() as i32),
        })
    }

    fn decay(&self, t: f64) -> Vec<f64> {
        self.xi_alpha.iter().map(|a| (-t * a).exp()).collect()
    }

    fn semigroup(&self, c: &[Complex64], t: f64) -> Vec<Complex64> {
        c.iter()
            .zip(&self.xi_alpha)
            .map(|(v, a)| v * (-t * a).exp())
            .collect()
    }

    /// `g(c)` at node `node`.
    fn nonlinear(&self, c: &[Complex64], node: usize) -> Result<Vec<Complex64>> {
        let n = c.len();
        if let Symbol::Zero = self.symbol {
            return Ok(vec![Complex64::default(); n]);
        }
        let grad: Vec<Complex64> = c.iter().zip(&self.xi).map(|(v, r)| v * *r).collect();
        let sq = pointwise_square(&SpectralField::from_coeffs_unchecked(self.grid, grad, true))?
            .into_coeffs();
        let out = match &self.symbol {
            Symbol::Zero => unreachable!(),
            Symbol::Separable { base, factors } => {
                let k = self.prefactor * factors[node];
                sq.iter().zip(base).map(|(v, b)| v * (k * b)).collect()
            }
            Symbol::PerNode(spec) => {
                let t = self.times[node];
                let b = crate::coefficient::build_symbol(spec, t, &self.grid)?;
                sq.iter()
                    .zip(b.coeffs())
                    .map(|(v, b)| v * (self.prefactor * b.re))
                    .collect()
            }
        };
        Ok(out)
    }

    fn field(&self, c: Vec<Complex64>) -> SpectralField {
        SpectralField::from_coeffs_unchecked(self.grid, c, true)
    }
}

fn finite(c: &[Complex64]) -> bool {
    c.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

/// Right side of the mild equation at lattice time `t`, by direct quadrature.
///
/// `history[j]` is the iterate at node `j`; nodes `0..=t/dt` must be present.
/// An overflowed or non-finite history entry yields an overflow-flagged result.
/// This is the O(step) reference route; [`picard_solve`] uses an equivalent
/// recursion over all nodes at once.
pub fn duhamel_step(history: &[SpectralField], t: f64, config: &ProblemConfig) -> Result<SpectralField> {
    config.validate()?;
    let ws = Workspace::new(config)?;
    let h = ws.dt;
    let step = (t / h).round();
    if !(t >= 0.0) || (step * h - t).abs() > 1e-9 * h.max(t) || step as usize > config.steps() {
        return Err(Error::param("t", t, "t on the time lattice within [0, T₀]"));
    }
    let step = step as usize;
    if history.len() < step + 1 {
        return Err(Error::HistoryGap {
            available: history.len(),
            requested: step,
            needed: step + 1,
        });
    }
    let tn = ws.times[step];
    let mut acc = ws.semigroup(config.u0.coeffs(), tn);
    if step == 0 {
        return Ok(ws.field(acc));
    }
    for (j, u) in history.iter().take(step + 1).enumerate() {
        if u.is_overflowed() || !u.is_finite() {
            return Ok(SpectralField::overflowed(ws.grid, true));
        }
        let w = if j == 0 || j == step { 0.5 * h } else { h };
        let g = ws.nonlinear(u.coeffs(), j)?;
        let lag = tn - ws.times[j];
        for ((a, v), ea) in acc.iter_mut().zip(&g).zip(&ws.xi_alpha) {
            *a += v * (w * (-lag * ea).exp());
        }
    }
    if !finite(&acc) {
        return Ok(SpectralField::overflowed(ws.grid, true));
    }
    Ok(ws.field(acc))
}

/// Solver output on the time lattice.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub fields: Vec<SpectralField>,
    pub h1_norms: Vec<f64>,
    pub h1_dot_norms: Vec<f64>,
    /// First lattice time whose H¹ norm exceeded the threshold or was non-finite.
    pub overflow_at: Option<f64>,
    /// Relative sup-in-time H¹ change per iteration.
    pub picard_residuals: Vec<f64>,
    /// Absolute sup-in-time H¹ change per iteration.
    pub picard_abs_residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl Trajectory {
    /// Writes `t,h1,h1_dot,max_abs` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# trajectory: t in time units; h1 and h1_dot are the discrete H^1 norm and homogeneous H^1 seminorm (L^n sum (1+|xi|^2)|c|^2, L^n sum |xi|^2 |c|^2, square-rooted); max_abs is max_m |c_m| in field units; overflow_at = {}",
            self.overflow_at.map_or("none".to_string(), |t| format!("{t:e}"))
        )?;
        writeln!(out, "t,h1,h1_dot,max_abs")?;
        for i in 0..self.times.len() {
            writeln!(
                out,
                "{:e},{:e},{:e},{:e}",
                self.times[i],
                self.h1_norms[i],
                self.h1_dot_norms[i],
                self.fields[i].max_abs()
            )?;
        }
        Ok(())
    }
}

/// Index of the first node whose iterate fails the overflow test.
fn first_overflow(iterate: &[Vec<Complex64>], ws: &Workspace, threshold: f64) -> Option<usize> {
    iterate.iter().position(|c| {
        if !finite(c) {
            return true;
        }
        let (h1, _) = h1_pair(&SpectralField::from_coeffs_unchecked(ws.grid, c.clone(), true));
        !(h1 <= threshold)
    })
}

/// Applies one Picard map to `iterate` over its nodes.
fn picard_map(iterate: &[Vec<Complex64>], ws: &Workspace, u0: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
    let g: Vec<Vec<Complex64>> = iterate
        .par_iter()
        .enumerate()
        .map(|(j, c)| ws.nonlinear(c, j))
        .collect::<Result<_>>()?;
    let half = 0.5 * ws.dt;
    let mut out = Vec::with_capacity(iterate.len());
    let mut running: Vec<Complex64> = g[0].iter().map(|v| v * ws.dt).collect();
    out.push(u0.to_vec());
    for i in 1..iterate.len() {
        for ((r, v), e) in running.iter_mut().zip(&g[i]).zip(&ws.step_decay) {
            *r = *r * *e + v * ws.dt;
        }
        let ti = ws.times[i];
        let decay = ws.decay(ti);
        let node: Vec<Complex64> = running
            .iter()
            .zip(&g[0])
            .zip(&g[i])
            .zip(u0)
            .zip(&decay)
            .map(|((((r, g0), gi), c0), e)| c0 * *e + r - (g0 * *e + gi) * half)
            .collect();
        out.push(node);
    }
    Ok(out)
}

fn sup_h1(iterate: &[Vec<Complex64>], ws: &Workspace) -> f64 {
    iterate
        .iter()
        .map(|c| h1_pair(&SpectralField::from_coeffs_unchecked(ws.grid, c.clone(), true)).0)
        .fold(0.0, f64::max)
}

fn sup_h1_diff(a: &[Vec<Complex64>], b: &[Vec<Complex64>], ws: &Workspace) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d: Vec<Complex64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
            h1_pair(&SpectralField::from_coeffs_unchecked(ws.grid, d, true)).0
        })
        .fold(0.0, f64::max)
}

/// Global-in-time Picard iteration starting from `U₀(t) = e^{−t|ξ|^α} u₀`.
pub fn picard_solve(config: &ProblemConfig) -> Result<Trajectory> {
    picard_solve_with(config, |_, _| {})
}

/// [`picard_solve`] with a hook that sees every iterate, including `U₀`.
///
/// If a node crosses `overflow_threshold`, the horizon is cut just before it
/// and later iterations run on the shorter lattice. Reaching
/// `picard_max_iter` is an error only when no overflow was seen.
pub fn picard_solve_with(
    config: &ProblemConfig,
    mut observer: impl FnMut(usize, &[SpectralField]),
) -> Result<Trajectory> {
    config.validate()?;
    let ws = Workspace::new(config)?;
    let u0 = config.u0.coeffs();
    let mut iterate: Vec<Vec<Complex64>> = ws.times.iter().map(|&t| ws.semigroup(u0, t)).collect();
    let mut overflow_at = None;
    let cut = |it: &mut Vec<Vec<Complex64>>, overflow_at: &mut Option<f64>| {
        if let Some(k) = first_overflow(it, &ws, config.overflow_threshold) {
            it.truncate(k);
            *overflow_at = Some(ws.times[k]);
        }
    };
    cut(&mut iterate, &mut overflow_at);
    let notify = |obs: &mut dyn FnMut(usize, &[SpectralField]), j: usize, it: &[Vec<Complex64>]| {
        let fields: Vec<SpectralField> = it.iter().map(|c| ws.field(c.clone())).collect();
        obs(j, &fields);
    };
    notify(&mut observer, 0, &iterate);

    let mut rel = Vec::new();
    let mut abs = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.picard_max_iter && !iterate.is_empty() {
        iterations += 1;
        let mut next = picard_map(&iterate, &ws, u0)?;
        cut(&mut next, &mut overflow_at);
        let common = next.len().min(iterate.len());
        let diff = sup_h1_diff(&next[..common], &iterate[..common], &ws);
        let scale = sup_h1(&next[..common], &ws);
        let r = if scale > 0.0 { diff / scale } else { 0.0 };
        rel.push(r);
        abs.push(diff);
        iterate = next;
        notify(&mut observer, iterations, &iterate);
        if r <= config.picard_tol {
            converged = true;
            break;
        }
    }
    if !converged && overflow_at.is_none() {
        return Err(Error::NonConvergence {
            iterations,
            last: rel.last().copied().unwrap_or(f64::NAN),
            residuals: rel,
        });
    }
    let fields: Vec<SpectralField> = iterate.into_iter().map(|c| ws.field(c)).collect();
    let (h1_norms, h1_dot_norms): (Vec<f64>, Vec<f64>) = fields.iter().map(h1_pair).unzip();
    Ok(Trajectory {
        times: ws.times[..fields.len()].to_vec(),
        fields,
        h1_norms,
        h1_dot_norms,
        overflow_at,
        picard_residuals: rel,
        picard_abs_residuals: abs,
        iterations,
        converged,
    })
}

/// Contraction budget of the existence argument.
#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceBudget {
    pub case: u8,
    /// `‖u₀‖_{H¹}`.
    pub delta: f64,
    pub c_abs: f64,
    /// `sup_t ‖b(t)‖` in `H^{−γ}` (case 1) or `H^{γ}` (case 2).
    pub b_norm: f64,
    /// The discrete norm of `b` did not settle under mode doubling.
    pub b_norm_divergent: bool,
    /// `1 − (1+γ)/α` (case 1) or `1 − (1−γ)/α` (case 2).
    pub time_exponent: f64,
    /// `C_abs · T₀^{time_exponent} · ‖b‖`.
    pub c_b: f64,
    /// `4 C_B δ < 1` with a finite `‖b‖`.
    pub contraction_ok: bool,
    /// Horizon at which `4 C_B δ = 1`; `+∞` for `δ = 0` or `b ≡ 0`.
    pub t0_max: f64,
}

impl ExistenceBudget {
    pub fn contraction_product(&self) -> f64 {
        4.0 * self.c_b * self.delta
    }
}

pub fn existence_budget(config: &ProblemConfig) -> Result<ExistenceBudget> {
    config.validate()?;
    let (alpha, gamma) = (config.alpha, config.gamma);
    let case = case_for(alpha);
    if !gamma_in_range(alpha, gamma) {
        return Err(Error::param("gamma", gamma, gamma_condition(case)));
    }
    let delta = h1_pair(&config.u0).0;
    let (order, time_exponent) = if case == 1 {
        (-gamma, 1.0 - (1.0 + gamma) / alpha)
    } else {
        (gamma, 1.0 - (1.0 - gamma) / alpha)
    };
    let spec = &config.coefficient;
    let (b_norm, b_norm_divergent) = if spec.is_zero() {
        (0.0, false)
    } else {
        let norm = sobolev_norm_of_b(spec, order, &config.grid)?;
        let sup_f = spec.time_modulation.sup_over(&config.times())?;
        (sup_f * norm.value, norm.divergent)
    };
    let c_b = config.c_abs * config.t0.powf(time_exponent) * b_norm;
    let contraction_ok = !b_norm_divergent && 4.0 * c_b * delta < 1.0;
    let t0_max = if delta == 0.0 || b_norm == 0.0 {
        f64::INFINITY
    } else {
        (4.0 * config.c_abs * delta * b_norm).powf(-1.0 / time_exponent)
    };
    Ok(ExistenceBudget {
        case,
        delta,
        c_abs: config.c_abs,
        b_norm,
        b_norm_divergent,
        time_exponent,
        c_b,
        contraction_ok,
        t0_max,
    })
}

/// `A(𝟙_{|ξ−ξ₀|<1/2} + 𝟙_{|ξ+ξ₀|<1/2})` in coefficient units, `c = û/Lⁿ`.
///
/// The mirrored ball makes the datum real; its Fourier transform dominates the
/// one-sided `A ω̂₀` pointwise.
pub fn omega_datum(grid: &GridSpec, amplitude: f64) -> Result<SpectralField> {
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::param("u0_amplitude", amplitude, "A ≥ 0"));
    }
    let seed = OmegaSeed::default();
    let n = grid.dim();
    let c = amplitude / grid.volume();
    SpectralField::from_fn(*grid, true, |xi| {
        let plus = seed.contains(xi);
        let neg: Vec<f64> = xi.iter().map(|v| -v).collect();
        let minus = seed.contains(&neg[..n]);
        Complex64::new(c * (plus as u8 + minus as u8) as f64, 0.0)
    })
}

/// Seeded nonnegative real Hermitian datum supported in `|ξ| ≤ radius`,
/// scaled so that `‖u₀‖_{H¹} = h1`.
pub fn random_datum(grid: &GridSpec, seed: u64, radius: f64, h1: f64) -> Result<SpectralField> {
    if !(radius > 0.0) {
        return Err(Error::param("radius", radius, "radius > 0"));
    }
    if !(h1 >= 0.0 && h1.is_finite()) {
        return Err(Error::param("u0_amplitude", h1, "amplitude ≥ 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![Complex64::default(); grid.len()];
    let half = (grid.modes() / 2) as i64;
    let cut = grid.dealias_cutoff();
    for i in 0..grid.len() {
        let m = grid.mode_triple(i);
        let ms = &m[..grid.dim()];
        if ms.iter().any(|&v| v == -half || v.abs() > cut) || grid.xi_norm(i) > radius {
            continue;
        }
        let neg: Vec<i64> = ms.iter().map(|v| -v).collect();
        let j = grid.flat_index(&neg).expect("mirror of an interior mode");
        if j < i {
            continue;
        }
        let v: f64 = rng.gen();
        coeffs[i] = Complex64::new(v, 0.0);
        coeffs[j] = Complex64::new(v, 0.0);
    }
    let field = SpectralField::from_coeffs(*grid, coeffs, true)?;
    let norm = h1_pair(&field).0;
    Ok(if norm > 0.0 { field.scaled(h1 / norm) } else { field })
}

/// `amplitude · cos(ξ₁ x₁)` with `ξ₁` the lattice frequency nearest to 1.
pub fn cosine_datum(grid: &GridSpec, amplitude: f64) -> Result<SpectralField> {
    let m = (1.0 / grid.fourier_spacing()).round().max(1.0) as i64;
    let mut f = SpectralField::zeros(*grid, true);
    for s in [m, -m] {
        let mut idx = vec![0i64; grid.dim()];
        idx[0] = s;
        let flat = grid
            .flat_index(&idx)
            .ok_or_else(|| Error::InvalidGrid("cosine mode not on lattice".into()))?;
        f.coeffs_mut()[flat] = Complex64::new(0.5 * amplitude, 0.0);
    }
    Ok(f)
}

//! The singular coefficient `b`, described through its Fourier symbol
//! `b̂(t, ξ) = f(t)·C·σ(ξ)`, and the admissibility conditions of the
//! existence and blow-up results.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;

use crate::fractional::check_alpha;
use crate::spectral::{GridSpec, SpectralField};
use crate::{Error, Result};

/// Radial-or-not symbol `σ(ξ)` supplied by the caller; `(t, ξ) ↦ σ`.
pub type SymbolFn = Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;
/// Time factor `t ↦ f(t)`.
pub type ModulationFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum CoefficientKind {
    /// `b = C δ₀`, symbol `C`.
    Dirac,
    /// Symbol `C (1+|ξ|²)^{−ρ/2}`.
    BesselSymbol { rho: f64 },
    /// Symbol `C σ(t, ξ)`; `rho` is the decay order claimed in the lower bound
    /// `C₁(1+|ξ|²)^{−ρ/2} ≤ b̂`.
    CustomSymbol { symbol: SymbolFn, rho: f64, label: String },
}

impl fmt::Debug for CoefficientKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientKind::Dirac => write!(f, "Dirac"),
            CoefficientKind::BesselSymbol { rho } => write!(f, "BesselSymbol {{ rho: {rho} }}"),
            CoefficientKind::CustomSymbol { rho, label, .. } => {
                write!(f, "CustomSymbol {{ label: {label:?}, rho: {rho} }}")
            }
        }
    }
}

/// `f(t) ∈ (0, 1]`.
#[derive(Clone)]
pub enum TimeModulation {
    Constant(f64),
    /// `lower_bound` is a claimed `inf_t f(t)`; values below it are rejected.
    Custom { func: ModulationFn, lower_bound: f64 },
}

impl fmt::Debug for TimeModulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeModulation::Constant(v) => write!(f, "Constant({v})"),
            TimeModulation::Custom { lower_bound, .. } => {
                write!(f, "Custom {{ lower_bound: {lower_bound} }}")
            }
        }
    }
}

impl Default for TimeModulation {
    fn default() -> Self {
        TimeModulation::Constant(1.0)
    }
}

impl TimeModulation {
    pub fn eval(&self, t: f64) -> Result<f64> {
        let v = match self {
            TimeModulation::Constant(v) => *v,
            TimeModulation::Custom { func, lower_bound } => {
                let v = func(t);
                if v < *lower_bound {
                    return Err(Error::param("f(t)", v, format!("f(t) ≥ declared lower bound {lower_bound}")));
                }
                v
            }
        };
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::param("f(t)", v, "0 < f(t) ≤ 1"));
        }
        Ok(v)
    }

    /// `inf_t f(t)` as declared.
    pub fn infimum(&self) -> f64 {
        match self {
            TimeModulation::Constant(v) => *v,
            TimeModulation::Custom { lower_bound, .. } => *lower_bound,
        }
    }

    /// `sup f` over the given times.
    pub fn sup_over(&self, times: &[f64]) -> Result<f64> {
        match self {
            TimeModulation::Constant(v) => self.eval(0.0).map(|_| *v),
            TimeModulation::Custom { .. } => {
                let mut best = 0.0f64;
                for &t in times {
                    best = best.max(self.eval(t)?);
                }
                Ok(best)
            }
        }
    }
}

/// Description of `b` together with the problem parameters it is checked against.
#[derive(Debug, Clone)]
pub struct CoefficientSpec {
    pub kind: CoefficientKind,
    /// Amplitude `C ≥ 0`; `C = 0` is the linear problem `b ≡ 0`.
    pub amplitude: f64,
    pub time_modulation: TimeModulation,
    pub n: usize,
    pub alpha: f64,
    pub gamma: f64,
}

impl CoefficientSpec {
    pub fn dirac(amplitude: f64, n: usize, alpha: f64, gamma: f64) -> Self {
        CoefficientSpec {
            kind: CoefficientKind::Dirac,
            amplitude,
            time_modulation: TimeModulation::default(),
            n,
            alpha,
            gamma,
        }
    }

    pub fn bessel(amplitude: f64, rho: f64, n: usize, alpha: f64, gamma: f64) -> Self {
        CoefficientSpec {
            kind: CoefficientKind::BesselSymbol { rho },
            amplitude,
            time_modulation: TimeModulation::default(),
            n,
            alpha,
            gamma,
        }
    }

    pub fn with_modulation(mut self, m: TimeModulation) -> Self {
        self.time_modulation = m;
        self
    }

    /// Decay order `ρ` of the symbol (0 for the Dirac mass).
    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0
    }

    /// Whether `b̂(t, ξ) = f(t)·b̂(0, ξ)`, so one lattice symbol serves all times.
    pub fn is_separable(&self) -> bool {
        !matches!(self.kind, CoefficientKind::CustomSymbol { .. })
    }

    pub fn rho(&self) -> f64 {
        match &self.kind {
            CoefficientKind::Dirac => 0.0,
            CoefficientKind::BesselSymbol { rho } | CoefficientKind::CustomSymbol { rho, .. } => *rho,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::param("C", self.amplitude, "C ≥ 0"));
        }
        let rho = self.rho();
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::param("rho", rho, "ρ ≥ 0"));
        }
        if !(1..=3).contains(&self.n) {
            return Err(Error::param("n", self.n as f64, "n ∈ {1, 2, 3}"));
        }
        check_alpha(self.alpha)?;
        if !self.gamma.is_finite() {
            return Err(Error::param("gamma", self.gamma, "γ finite"));
        }
        self.time_modulation.eval(0.0)?;
        Ok(())
    }

    /// `σ(t, ξ)` without the amplitude or the time factor.
    fn shape(&self, t: f64, xi: &[f64]) -> f64 {
        match &self.kind {
            CoefficientKind::Dirac => 1.0,
            CoefficientKind::BesselSymbol { rho } => {
                let r2: f64 = xi.iter().map(|v| v * v).sum();
                (1.0 + r2).powf(-0.5 * rho)
            }
            CoefficientKind::CustomSymbol { symbol, .. } => symbol(t, xi),
        }
    }

    /// `b̂(t, ξ)` at a single frequency.
    pub fn symbol_at(&self, t: f64, xi: &[f64]) -> Result<f64> {
        let v = self.time_modulation.eval(t)? * self.amplitude * self.shape(t, xi);
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::param("b̂(t, ξ)", v, "b̂(t, ξ) ≥ 0"));
        }
        Ok(v)
    }
}

/// `b̂(t, ξ_m)` on the lattice, flagged real.
pub fn build_symbol(spec: &CoefficientSpec, t: f64, grid: &GridSpec) -> Result<SpectralField> {
    spec.validate()?;
    if grid.dim() != spec.n {
        return Err(Error::InvalidGrid(format!(
            "coefficient is {}-dimensional, grid is {}-dimensional",
            spec.n,
            grid.dim()
        )));
    }
    let f = spec.time_modulation.eval(t)?;
    let c = spec.amplitude * f;
    let mut coeffs = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let xi = grid.xi(i);
        let v = c * spec.shape(t, &xi[..grid.dim()]);
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::param("b̂(t, ξ)", v, "b̂(t, ξ) ≥ 0"));
        }
        coeffs.push(Complex64::new(v, 0.0));
    }
    SpectralField::from_coeffs(*grid, coeffs, true)
}

/// Which existence regime `α` selects: 1 for `1 < α ≤ 2`, 2 for `0 < α ≤ 1`.
pub fn case_for(alpha: f64) -> u8 {
    if alpha > 1.0 {
        1
    } else {
        2
    }
}

/// Condition on `γ` for the selected case, as quoted in reports.
pub fn gamma_condition(case: u8) -> &'static str {
    if case == 1 {
        "0 ≤ γ < α − 1 (case 1, 1 < α ≤ 2)"
    } else {
        "1 − α < γ < 1 with γ > 0 (case 2, 0 < α ≤ 1)"
    }
}

pub fn gamma_in_range(alpha: f64, gamma: f64) -> bool {
    if case_for(alpha) == 1 {
        gamma >= 0.0 && gamma < alpha - 1.0
    } else {
        gamma > 0.0 && gamma > 1.0 - alpha && gamma < 1.0
    }
}

/// Smallest `C₁` allowed by the blow-up result:
/// `max{1, 2^{ρ/2−1}} n^{(ρ+α)/2} 2^{10n−1+ρ+α}`.
pub fn c1_threshold(n: usize, rho: f64, alpha: f64) -> f64 {
    c1_threshold_ln(n, rho, alpha).exp()
}

pub fn c1_threshold_ln(n: usize, rho: f64, alpha: f64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    (0.5 * rho - 1.0).max(0.0) * ln2
        + 0.5 * (rho + alpha) * (n as f64).ln()
        + (10.0 * n as f64 - 1.0 + rho + alpha) * ln2
}

/// Results of the hypothesis checks on `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub case: u8,
    pub gamma_ok: bool,
    /// `b(t) ∈ H^{−γ}` (case 1) or `H^{γ}` (case 2).
    pub sobolev_ok: bool,
    pub dimension_ok: bool,
    pub c1_ok: bool,
    pub rho_alpha_ok: bool,
    pub c1_threshold: f64,
    /// `C · inf f`, the largest `C₁` the symbol supports.
    pub c1_effective: f64,
    /// Whether the parameters fall in the worked admissible windows
    /// (Dirac: `n = 1`, `3/2 < α ≤ 2`; Bessel: `1 + n/2 < ρ ≤ 5n`).
    pub example_window: Option<bool>,
    pub messages: Vec<String>,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.gamma_ok
            && self.sobolev_ok
            && self.dimension_ok
            && self.c1_ok
            && self.rho_alpha_ok
    }
}

/// Evaluates the existence hypotheses, plus the blow-up ones when requested.
pub fn check_admissibility(spec: &CoefficientSpec, for_blowup: bool) -> AdmissibilityReport {
    let mut messages = Vec::new();
    if let Err(e) = spec.validate() {
        messages.push(format!("invalid coefficient: {e}"));
        return AdmissibilityReport {
            case: case_for(spec.alpha),
            gamma_ok: false,
            sobolev_ok: false,
            dimension_ok: false,
            c1_ok: false,
            rho_alpha_ok: false,
            c1_threshold: f64::NAN,
            c1_effective: f64::NAN,
            example_window: None,
            messages,
        };
    }
    let (n, alpha, gamma, rho) = (spec.n, spec.alpha, spec.gamma, spec.rho());
    let nf = n as f64;
    let case = case_for(alpha);

    let gamma_ok = gamma_in_range(alpha, gamma);
    if !gamma_ok {
        messages.push(format!("γ = {gamma} violates {}", gamma_condition(case)));
    }

    let sobolev_ok = match (&spec.kind, case) {
        (CoefficientKind::Dirac, 1) => gamma > nf / 2.0,
        (CoefficientKind::Dirac, _) => false,
        (CoefficientKind::BesselSymbol { .. }, 1) => 2.0 * (gamma + rho) > nf,
        (CoefficientKind::BesselSymbol { .. }, _) => 2.0 * (rho - gamma) > nf,
        (CoefficientKind::CustomSymbol { .. }, _) => {
            let order = if case == 1 { -gamma } else { gamma };
            match GridSpec::default_solver(n).and_then(|g| sobolev_norm_of_b(spec, order, &g)) {
                Ok(norm) => !norm.divergent && norm.value.is_finite(),
                Err(e) => {
                    messages.push(format!("symbol norm evaluation failed: {e}"));
                    false
                }
            }
        }
    };
    if !sobolev_ok {
        let space = if case == 1 { "H^{−γ}" } else { "H^{γ}" };
        let why = match (&spec.kind, case) {
            (CoefficientKind::Dirac, 1) => "δ₀ ∈ H^{−γ} iff γ > n/2".to_string(),
            (CoefficientKind::Dirac, _) => "δ₀ has no positive Sobolev regularity".to_string(),
            (CoefficientKind::BesselSymbol { .. }, 1) => "requires 2(γ + ρ) > n".to_string(),
            (CoefficientKind::BesselSymbol { .. }, _) => "requires 2(ρ − γ) > n".to_string(),
            _ => "discrete norm is not refinement-stable".to_string(),
        };
        messages.push(format!("b(t) ∉ {space}: {why}"));
    }

    let threshold = c1_threshold(n, rho, alpha);
    let c1_effective = spec.amplitude * spec.time_modulation.infimum();
    let (mut dimension_ok, mut c1_ok, mut rho_alpha_ok) = (true, true, true);
    if for_blowup {
        dimension_ok = if case == 1 {
            2.0 * (gamma + rho) > nf
        } else {
            2.0 * (rho - gamma) > nf
        };
        if !dimension_ok {
            if case == 1 {
                messages.push(format!("dimension condition 2(γ + ρ) > n fails: 2({gamma} + {rho}) ≤ {n}"));
            } else {
                messages.push(format!(
                    "dimension condition 2(ρ − γ) > n fails: 2({rho} − {gamma}) ≤ {n} \
                     (the upper-bound variant is printed with the opposite sign, 2(γ − ρ) > n)"
                ));
            }
        }
        let lhs = match &spec.kind {
            CoefficientKind::CustomSymbol { .. } => custom_lower_constant(spec).unwrap_or(0.0),
            _ => c1_effective,
        };
        c1_ok = lhs > 0.0 && lhs.ln() >= c1_threshold_ln(n, rho, alpha) - 1e-12 * c1_threshold_ln(n, rho, alpha).abs().max(1.0);
        if !c1_ok {
            messages.push(format!(
                "C₁ = {lhs:.6e} below max{{1, 2^(ρ/2−1)}} n^((ρ+α)/2) 2^(10n−1+ρ+α) = {threshold:.6e}"
            ));
        }
        rho_alpha_ok = rho >= 0.0 && rho + alpha <= 5.0 * nf + 2.0;
        if !rho_alpha_ok {
            messages.push(format!("ρ + α ≤ 5n + 2 fails: {rho} + {alpha} > {}", 5 * n + 2));
        }
    }

    let example_window = match spec.kind {
        CoefficientKind::Dirac => Some(n == 1 && alpha > 1.5 && alpha <= 2.0),
        CoefficientKind::BesselSymbol { rho } => Some(1.0 + nf / 2.0 < rho && rho <= 5.0 * nf),
        CoefficientKind::CustomSymbol { .. } => None,
    };

    AdmissibilityReport {
        case,
        gamma_ok,
        sobolev_ok,
        dimension_ok,
        c1_ok,
        rho_alpha_ok,
        c1_threshold: threshold,
        c1_effective,
        example_window,
        messages,
    }
}

/// `inf_ξ b̂(0, ξ)(1+|ξ|²)^{ρ/2} · inf f` over the default solver lattice.
fn custom_lower_constant(spec: &CoefficientSpec) -> Result<f64> {
    let g = GridSpec::default_solver(spec.n)?;
    let rho = spec.rho();
    let mut lo = f64::INFINITY;
    for i in 0..g.len() {
        let xi = g.xi(i);
        let r2: f64 = xi.iter().map(|v| v * v).sum();
        lo = lo.min(spec.amplitude * spec.shape(0.0, &xi[..g.dim()]) * (1.0 + r2).powf(0.5 * rho));
    }
    Ok(lo * spec.time_modulation.infimum())
}

/// Discrete `‖b(0, ·)‖_{H^{order}}` with its refinement check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolNorm {
    /// Value on the supplied grid.
    pub value: f64,
    /// Value on the grid with twice the modes per axis.
    pub refined_value: f64,
    /// Relative change more than 10% under mode doubling.
    pub divergent: bool,
}

/// Relative change under mode doubling that flags a divergent norm.
pub const DIVERGENCE_THRESHOLD: f64 = 0.10;

fn symbol_norm_on(spec: &CoefficientSpec, order: f64, grid: &GridSpec) -> Result<f64> {
    let dxi = grid.fourier_spacing().powi(grid.dim() as i32);
    let mut acc = 0.0;
    for i in 0..grid.len() {
        let xi = grid.xi(i);
        let r2: f64 = xi.iter().take(grid.dim()).map(|v| v * v).sum();
        let b = spec.symbol_at(0.0, &xi[..grid.dim()])?;
        acc += (1.0 + r2).powf(order) * b * b;
    }
    Ok((acc * dxi).sqrt())
}

/// `‖b(0,·)‖²_{H^s} = ∫ (1+|ξ|²)^s b̂(0,ξ)² dξ`, sampled on the lattice.
///
/// The flag compares against the mode-doubled grid; it is a heuristic and
/// reports growth that has not saturated, not a proof of divergence.
pub fn sobolev_norm_of_b(spec: &CoefficientSpec, order: f64, grid: &GridSpec) -> Result<SymbolNorm> {
    spec.validate()?;
    if grid.dim() != spec.n {
        return Err(Error::InvalidGrid(format!(
            "coefficient is {}-dimensional, grid is {}-dimensional",
            spec.n,
            grid.dim()
        )));
    }
    let value = symbol_norm_on(spec, order, grid)?;
    let refined_value = symbol_norm_on(spec, order, &grid.with_double_modes()?)?;
    let divergent = value == 0.0 && refined_value > 0.0
        || (refined_value - value).abs() > DIVERGENCE_THRESHOLD * value;
    Ok(SymbolNorm {
        value,
        refined_value,
        divergent,
    })
}

/// `(π/2)^{1/2}`: `‖(1+|ξ|²)^{−1}‖_{L²(ℝ)}`.
pub const BESSEL_RHO2_L2_1D: f64 = 1.253_314_137_315_500_3;

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn g1() -> GridSpec {
        GridSpec::default_solver(1).unwrap()
    }

    #[test]
    fn dirac_symbol_is_constant() {
        let s = build_symbol(&CoefficientSpec::dirac(1.0, 1, 2.0, 0.9), 0.0, &g1()).unwrap();
        assert!(s.coeffs().iter().all(|c| c.re == 1.0 && c.im == 0.0));
    }

    #[test]
    fn bessel_symbol_values() {
        let flat = build_symbol(&CoefficientSpec::bessel(3.0, 0.0, 1, 2.0, 0.0), 0.0, &g1()).unwrap();
        assert!(flat.coeffs().iter().all(|c| c.re == 3.0));
        let s = build_symbol(&CoefficientSpec::bessel(1.0, 2.0, 1, 2.0, 0.0), 0.0, &g1()).unwrap();
        // ξ = 1 at mode 8 on the 16π box
        assert!((s.coeffs()[8].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn invalid_amplitude_or_rho() {
        assert!(build_symbol(&CoefficientSpec::dirac(-1.0, 1, 2.0, 0.9), 0.0, &g1()).is_err());
        assert!(build_symbol(&CoefficientSpec::bessel(1.0, -0.5, 1, 2.0, 0.0), 0.0, &g1()).is_err());
    }

    #[test]
    fn modulation_scales_symbol() {
        let spec = CoefficientSpec::dirac(2.0, 1, 2.0, 0.9).with_modulation(TimeModulation::Custom {
            func: Arc::new(|t| 0.5 + 0.5 * (-t).exp()),
            lower_bound: 0.5,
        });
        let s = build_symbol(&spec, 1.0, &g1()).unwrap();
        assert!((s.dc().re - 2.0 * (0.5 + 0.5 * (-1f64).exp())).abs() < 1e-15);
        let bad = CoefficientSpec::dirac(1.0, 1, 2.0, 0.9).with_modulation(TimeModulation::Constant(1.5));
        assert!(build_symbol(&bad, 0.0, &g1()).is_err());
    }

    #[test]
    fn dirac_example_is_case_one() {
        let r = check_admissibility(&CoefficientSpec::dirac(1.0, 1, 2.0, 0.9), false);
        assert_eq!(r.case, 1);
        assert!(r.gamma_ok && r.sobolev_ok && r.admissible());
        assert_eq!(r.example_window, Some(true));
        let blow = check_admissibility(&CoefficientSpec::dirac(2048.0, 1, 2.0, 0.9), true);
        assert!(blow.dimension_ok && blow.c1_ok && blow.rho_alpha_ok && blow.admissible());
        let weak = check_admissibility(&CoefficientSpec::dirac(2047.0, 1, 2.0, 0.9), true);
        assert!(!weak.c1_ok);
    }

    #[test]
    fn bessel_example_window() {
        let r = check_admissibility(&CoefficientSpec::bessel(1.0, 3.0, 2, 2.0, 0.5), false);
        assert_eq!(r.example_window, Some(true));
        let out = check_admissibility(&CoefficientSpec::bessel(1.0, 2.0, 2, 2.0, 0.5), false);
        assert_eq!(out.example_window, Some(false));
    }

    #[test]
    fn c1_threshold_reference_value() {
        // max{1, 2^{-1}} · 1 · 2^{10 − 1 + 2}
        assert!((c1_threshold(1, 0.0, 2.0) - 2048.0).abs() < 1e-9);
        // n = 2, ρ = 4, α = 1: 2^{1} · 2^{5/2} · 2^{24}
        let want = 2f64.powf(1.0 + 2.5 + 24.0);
        assert!((c1_threshold(2, 4.0, 1.0) / want - 1.0).abs() < 1e-13);
    }

    #[test]
    fn gamma_ranges() {
        let r = check_admissibility(&CoefficientSpec::dirac(1.0, 1, 2.0, 1.5), false);
        assert!(!r.gamma_ok);
        assert!(r.messages.iter().any(|m| m.contains("0 ≤ γ < α − 1")));
        let c2 = check_admissibility(&CoefficientSpec::bessel(1.0, 2.0, 1, 0.5, 0.6), false);
        assert_eq!(c2.case, 2);
        assert!(c2.gamma_ok && c2.sobolev_ok);
        let edge = check_admissibility(&CoefficientSpec::bessel(1.0, 2.0, 1, 0.5, 0.5), true);
        assert!(!edge.gamma_ok);
        let dirac2 = check_admissibility(&CoefficientSpec::dirac(1.0, 1, 0.5, 0.6), false);
        assert!(!dirac2.sobolev_ok);
    }

    #[test]
    fn rho_alpha_bound() {
        let r = check_admissibility(&CoefficientSpec::bessel(1e30, 6.5, 1, 2.0, 0.0), true);
        assert!(!r.rho_alpha_ok);
    }

    #[test]
    fn dirac_norms() {
        let spec = CoefficientSpec::dirac(1.0, 1, 2.0, 0.9);
        let neg = sobolev_norm_of_b(&spec, -0.9, &g1()).unwrap();
        assert!(!neg.divergent, "{neg:?}");
        let l2 = sobolev_norm_of_b(&spec, 0.0, &g1()).unwrap();
        assert!(l2.divergent);
    }

    #[test]
    fn bessel_l2_norm() {
        let spec = CoefficientSpec::bessel(1.0, 2.0, 1, 2.0, 0.0);
        let r = sobolev_norm_of_b(&spec, 0.0, &g1()).unwrap();
        assert!(!r.divergent);
        // the cutoff |ξ| ≤ 32 drops ∫_{|ξ|>32} ξ^{−4} ≈ 2·10⁻⁵ of the squared norm
        assert!((r.value - BESSEL_RHO2_L2_1D).abs() < 1e-4, "{}", r.value);
        assert!((r.refined_value - BESSEL_RHO2_L2_1D).abs() < (r.value - BESSEL_RHO2_L2_1D).abs());
        assert!((BESSEL_RHO2_L2_1D - (PI / 2.0).sqrt()).abs() < 1e-15);
    }
}

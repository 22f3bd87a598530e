//! Flat `key = value` configuration.
//!
//! One assignment per line, `#` starts a comment, keys are case-sensitive and
//! unknown keys are rejected. Real values accept a `pi` suffix (`16pi`,
//! `2*pi`, `pi`); lists are comma-separated.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use crate::blowup::{a_min, default_k_max, CertificateParams, DEFAULT_SERIES_TERMS};
use crate::coefficient::{
    c1_threshold, case_for, gamma_condition, gamma_in_range, CoefficientSpec, TimeModulation,
};
use crate::fractional::check_alpha;
use crate::mild::{cosine_datum, omega_datum, random_datum, ProblemConfig};
use crate::spectral::{GridSpec, SpectralField};
use crate::{Error, Result};

/// Every recognized key with its documented default.
pub const KEYS: &[(&str, &str)] = &[
    ("n", "1"),
    ("L", "16pi"),
    ("N", "512 for n = 1, 256 otherwise"),
    ("cert_L", "2048pi (n = 1), 256pi (n = 2), 64pi (n = 3)"),
    ("cert_N", "65536 (n = 1), 4096 (n = 2), 1024 (n = 3)"),
    ("alpha", "2"),
    ("gamma", "0.9(α − 1) if α > 1, else (max(0, 1 − α) + 1)/2"),
    ("kind", "dirac"),
    ("C", "2048"),
    ("rho", "0"),
    ("modulation", "1"),
    ("C1", "max{1, 2^(ρ/2−1)} n^((ρ+α)/2) 2^(10n−1+ρ+α)"),
    ("A", "2^(6+n)"),
    ("u0", "omega"),
    ("u0_amplitude", "A for omega, 0.1 otherwise"),
    ("u0_radius", "4"),
    ("seed", "0"),
    ("T0", "1e-6"),
    ("dt", "2e-9"),
    ("picard_tol", "1e-10"),
    ("picard_max_iter", "2000"),
    ("overflow_threshold", "1e12"),
    ("C_abs", "1"),
    ("k_max", "3 (n = 1), 2 otherwise"),
    ("series_terms", "12"),
    ("s", "0.5"),
    ("t_values", "0.5,1,2"),
    ("snapshots", "(none)"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientChoice {
    Dirac,
    Bessel,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialDatum {
    Omega,
    Random,
    Zero,
    Cosine,
}

/// Parsed and validated parameters with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub n: usize,
    pub length: f64,
    pub modes: usize,
    pub cert_length: f64,
    pub cert_modes: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub kind: CoefficientChoice,
    pub amplitude: f64,
    pub rho: f64,
    pub modulation: f64,
    pub c1: f64,
    pub a: f64,
    pub u0: InitialDatum,
    pub u0_amplitude: f64,
    pub u0_radius: f64,
    pub seed: u64,
    pub t0: f64,
    pub dt: f64,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub overflow_threshold: f64,
    pub c_abs: f64,
    pub k_max: u32,
    pub series_terms: u32,
    pub s: f64,
    pub t_values: Vec<f64>,
    pub snapshots: Vec<f64>,
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

/// Parses a real, allowing `pi`, `<x>pi` and `<x>*pi`.
pub fn parse_real(text: &str) -> Option<f64> {
    let t = text.trim();
    if let Some(head) = t.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        let k = if head.is_empty() { 1.0 } else { head.parse::<f64>().ok()? };
        return Some(k * PI);
    }
    t.parse::<f64>().ok()
}

/// Raw assignments with the line each came from.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, (usize, String)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            raw.assign(line, i + 1)?;
        }
        Ok(raw)
    }

    /// Adds one `key = value` assignment; later assignments win.
    pub fn assign(&mut self, line: &str, line_no: usize) -> Result<()> {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            return Ok(());
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| syntax(line_no, format!("expected `key = value`, found `{body}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(syntax(line_no, format!("malformed key `{key}`")));
        }
        if value.is_empty() {
            return Err(syntax(line_no, format!("missing value for `{key}`")));
        }
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(syntax(line_no, format!("unknown key `{key}`")));
        }
        self.entries.insert(key.to_string(), (line_no, value.to_string()));
        Ok(())
    }

    fn real(&self, key: &str) -> Result<Option<f64>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => parse_real(v)
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| syntax(*line, format!("`{key}` expects a real number, found `{v}`"))),
        }
    }

    fn int(&self, key: &str) -> Result<Option<u64>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse::<u64>()
                .map(Some)
                .map_err(|_| syntax(*line, format!("`{key}` expects a nonnegative integer, found `{v}`"))),
        }
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .split(',')
                .map(|p| parse_real(p).filter(|x| x.is_finite()))
                .collect::<Option<Vec<f64>>>()
                .map(Some)
                .ok_or_else(|| syntax(*line, format!("`{key}` expects a comma-separated list of reals, found `{v}`"))),
        }
    }

    fn word(&self, key: &str) -> Option<(usize, &str)> {
        self.entries.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    /// Fills defaults and checks every domain condition.
    pub fn resolve(&self) -> Result<Settings> {
        let n = self.int("n")?.unwrap_or(1) as usize;
        if !(1..=3).contains(&n) {
            return Err(Error::param("n", n as f64, "n ∈ {1, 2, 3}"));
        }
        let length = self.real("L")?.unwrap_or(16.0 * PI);
        let modes = self.int("N")?.map(|v| v as usize).unwrap_or(if n == 1 { 512 } else { 256 });
        let cert = GridSpec::default_certificate(n)?;
        let cert_length = self.real("cert_L")?.unwrap_or(cert.length());
        let cert_modes = self.int("cert_N")?.map(|v| v as usize).unwrap_or(cert.modes());

        let alpha = self.real("alpha")?.unwrap_or(2.0);
        check_alpha(alpha)?;
        let case = case_for(alpha);
        let gamma = self.real("gamma")?.unwrap_or(if case == 1 {
            0.9 * (alpha - 1.0)
        } else {
            ((1.0 - alpha).max(0.0) + 1.0) / 2.0
        });
        if !gamma_in_range(alpha, gamma) {
            return Err(Error::param("gamma", gamma, gamma_condition(case)));
        }

        let kind = match self.word("kind") {
            None => CoefficientChoice::Dirac,
            Some((_, "dirac")) => CoefficientChoice::Dirac,
            Some((_, "bessel")) => CoefficientChoice::Bessel,
            Some((_, "zero")) => CoefficientChoice::Zero,
            Some((l, v)) => return Err(syntax(l, format!("`kind` must be dirac, bessel or zero, found `{v}`"))),
        };
        let amplitude = self.real("C")?.unwrap_or(2048.0);
        if !(amplitude >= 0.0) {
            return Err(Error::param("C", amplitude, "C ≥ 0"));
        }
        let rho = self.real("rho")?.unwrap_or(0.0);
        if !(rho >= 0.0) {
            return Err(Error::param("rho", rho, "ρ ≥ 0"));
        }
        let modulation = self.real("modulation")?.unwrap_or(1.0);
        if !(modulation > 0.0 && modulation <= 1.0) {
            return Err(Error::param("modulation", modulation, "0 < f(t) ≤ 1"));
        }
        let c1 = self.real("C1")?.unwrap_or_else(|| c1_threshold(n, rho, alpha));
        let a = self.real("A")?.unwrap_or_else(|| a_min(n));

        let u0 = match self.word("u0") {
            None => InitialDatum::Omega,
            Some((_, "omega")) => InitialDatum::Omega,
            Some((_, "random")) => InitialDatum::Random,
            Some((_, "zero")) => InitialDatum::Zero,
            Some((_, "cosine")) => InitialDatum::Cosine,
            Some((l, v)) => {
                return Err(syntax(l, format!("`u0` must be omega, random, zero or cosine, found `{v}`")))
            }
        };
        let u0_amplitude = self.real("u0_amplitude")?.unwrap_or(if u0 == InitialDatum::Omega { a } else { 0.1 });
        if !(u0_amplitude >= 0.0) {
            return Err(Error::param("u0_amplitude", u0_amplitude, "u0_amplitude ≥ 0"));
        }
        let u0_radius = self.real("u0_radius")?.unwrap_or(4.0);
        if !(u0_radius > 0.0) {
            return Err(Error::param("u0_radius", u0_radius, "u0_radius > 0"));
        }
        let seed = self.int("seed")?.unwrap_or(0);
        let t0 = self.real("T0")?.unwrap_or(1e-6);
        if !(t0 > 0.0) {
            return Err(Error::param("T0", t0, "T₀ > 0"));
        }
        let dt = self.real("dt")?.unwrap_or(2e-9);
        if !(dt > 0.0) {
            return Err(Error::param("dt", dt, "dt > 0"));
        }
        let picard_tol = self.real("picard_tol")?.unwrap_or(1e-10);
        if !(picard_tol > 0.0) {
            return Err(Error::param("picard_tol", picard_tol, "picard_tol > 0"));
        }
        let picard_max_iter = self.int("picard_max_iter")?.unwrap_or(2000) as usize;
        if picard_max_iter == 0 {
            return Err(Error::param("picard_max_iter", 0.0, "picard_max_iter ≥ 1"));
        }
        let overflow_threshold = self.real("overflow_threshold")?.unwrap_or(1e12);
        if !(overflow_threshold > 0.0) {
            return Err(Error::param("overflow_threshold", overflow_threshold, "overflow_threshold > 0"));
        }
        let c_abs = self.real("C_abs")?.unwrap_or(1.0);
        if !(c_abs > 0.0) {
            return Err(Error::param("C_abs", c_abs, "C_abs > 0"));
        }
        let k_max = self.int("k_max")?.map(|v| v as u32).unwrap_or(default_k_max(n));
        let series_terms = self.int("series_terms")?.map(|v| v as u32).unwrap_or(DEFAULT_SERIES_TERMS);
        if series_terms == 0 {
            return Err(Error::param("series_terms", 0.0, "series_terms ≥ 1"));
        }
        let s = self.real("s")?.unwrap_or(0.5);
        if !(s >= 0.0) {
            return Err(Error::param("s", s, "s ≥ 0"));
        }
        let t_values = self.list("t_values")?.unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
        if let Some(&t) = t_values.iter().find(|&&t| !(t > 0.0)) {
            return Err(Error::param("t_values", t, "t > 0"));
        }
        let snapshots = self.list("snapshots")?.unwrap_or_default();
        Ok(Settings {
            n,
            length,
            modes,
            cert_length,
            cert_modes,
            alpha,
            gamma,
            kind,
            amplitude,
            rho,
            modulation,
            c1,
            a,
            u0,
            u0_amplitude,
            u0_radius,
            seed,
            t0,
            dt,
            picard_tol,
            picard_max_iter,
            overflow_threshold,
            c_abs,
            k_max,
            series_terms,
            s,
            t_values,
            snapshots,
        })
    }
}

/// Reads and resolves a config file.
pub fn parse_config(path: &Path) -> Result<Settings> {
    let text = std::fs::read_to_string(path)?;
    RawConfig::parse(&text)?.resolve()
}

impl Settings {
    pub fn defaults() -> Settings {
        RawConfig::default().resolve().expect("defaults are valid")
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.n, self.length, self.modes)
    }

    pub fn certificate_grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.n, self.cert_length, self.cert_modes)
    }

    pub fn coefficient(&self) -> CoefficientSpec {
        let spec = match self.kind {
            CoefficientChoice::Dirac => CoefficientSpec::dirac(self.amplitude, self.n, self.alpha, self.gamma),
            CoefficientChoice::Bessel => {
                CoefficientSpec::bessel(self.amplitude, self.rho, self.n, self.alpha, self.gamma)
            }
            CoefficientChoice::Zero => CoefficientSpec::dirac(0.0, self.n, self.alpha, self.gamma),
        };
        spec.with_modulation(TimeModulation::Constant(self.modulation))
    }

    pub fn initial_datum(&self, grid: &GridSpec) -> Result<SpectralField> {
        match self.u0 {
            InitialDatum::Omega => omega_datum(grid, self.u0_amplitude),
            InitialDatum::Random => random_datum(grid, self.seed, self.u0_radius, self.u0_amplitude),
            InitialDatum::Zero => Ok(SpectralField::zeros(*grid, true)),
            InitialDatum::Cosine => cosine_datum(grid, self.u0_amplitude),
        }
    }

    pub fn problem(&self) -> Result<ProblemConfig> {
        let grid = self.grid()?;
        let mut cfg = ProblemConfig::new(self.coefficient(), self.initial_datum(&grid)?, self.t0, self.dt);
        cfg.picard_tol = self.picard_tol;
        cfg.picard_max_iter = self.picard_max_iter;
        cfg.overflow_threshold = self.overflow_threshold;
        cfg.c_abs = self.c_abs;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Blow-up parameters; `ρ` is taken as 0 for the Dirac mass.
    pub fn certificate_params(&self) -> Result<CertificateParams> {
        let rho = if self.kind == CoefficientChoice::Dirac { 0.0 } else { self.rho };
        CertificateParams::new(self.n, self.alpha, self.gamma, rho, self.c1, self.a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(text: &str) -> Result<Settings> {
        RawConfig::parse(text)?.resolve()
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let s = resolve("n = 1\nalpha = 2\n").unwrap();
        assert_eq!(s, Settings::defaults());
        assert!((s.length - 16.0 * PI).abs() < 1e-12);
        assert!((s.c1 - 2048.0).abs() < 1e-9);
        assert_eq!(s.a, 128.0);
        s.problem().unwrap();
    }

    #[test]
    fn alpha_out_of_range() {
        match resolve("alpha = 3") {
            Err(Error::InvalidParameter { condition, .. }) => assert!(condition.contains("0 < α ≤ 2")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gamma_out_of_range_for_case_one() {
        match resolve("alpha = 2\ngamma = 1.5") {
            Err(Error::InvalidParameter { condition, .. }) => {
                assert!(condition.contains("0 ≤ γ < α − 1"));
                assert!(condition.contains("case 1"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        assert!(matches!(resolve("# c\nn = 1\nbogus = 2"), Err(Error::Config { line: 3, .. })));
        assert!(matches!(resolve("n 1"), Err(Error::Config { line: 1, .. })));
        assert!(matches!(resolve("alpha = two"), Err(Error::Config { line: 1, .. })));
        assert!(matches!(resolve("kind = gauss"), Err(Error::Config { line: 1, .. })));
    }

    #[test]
    fn real_values_accept_pi() {
        assert!((parse_real("16pi").unwrap() - 16.0 * PI).abs() < 1e-12);
        assert!((parse_real("2*pi").unwrap() - 2.0 * PI).abs() < 1e-12);
        assert!((parse_real("pi").unwrap() - PI).abs() < 1e-15);
        assert_eq!(parse_real("1e-3"), Some(1e-3));
        let s = resolve("t_values = 0.25, 1, 4 # comment").unwrap();
        assert_eq!(s.t_values, vec![0.25, 1.0, 4.0]);
    }

    #[test]
    fn default_gamma_follows_alpha() {
        let s = resolve("alpha = 1.5").unwrap();
        assert!((s.gamma - 0.45).abs() < 1e-15);
        let s = resolve("alpha = 0.8").unwrap();
        assert!((s.gamma - 0.6).abs() < 1e-15);
    }
}

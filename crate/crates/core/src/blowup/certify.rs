use std::fmt::Write as _;
use std::io::Write;

use super::chain::{verify_induction_chain, InductionRecord};
use super::constants::{divergence_partial_sums, blowup_constants, CertificateParams, SeriesReport, BlowupConstants};
use super::omega::{build_omega_sequence, OmegaLevel};
use crate::spectral::GridSpec;
use crate::Result;

/// Relative L¹ error allowed between `ω̂_k` and `(v_n/2ⁿ)^{2^k}`.
pub const L1_TOL: f64 = 1e-2;
/// Number of series terms in a default certificate.
pub const DEFAULT_SERIES_TERMS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    CertifiedDivergent,
    NotCertified,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::CertifiedDivergent => "certified-divergent",
            Verdict::NotCertified => "not-certified",
        })
    }
}

/// Everything checked for one level `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecord {
    pub k: u32,
    pub support_ok: bool,
    pub hypercube_ok: bool,
    pub l1: f64,
    pub l1_expected: f64,
    pub l1_error: f64,
    pub l1_ok: bool,
    pub doubling_error: f64,
    pub induction: InductionRecord,
}

impl LevelRecord {
    pub fn all_ok(&self) -> bool {
        self.support_ok && self.hypercube_ok && self.l1_ok && self.doubling_error <= 1e-10 && self.induction.all_ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub params: CertificateParams,
    pub grid: GridSpec,
    pub k_max: u32,
    /// Time at which the chain is audited.
    pub t: f64,
    pub violations: Vec<String>,
    pub levels: Vec<LevelRecord>,
    pub constants: BlowupConstants,
    pub series: SeriesReport,
    pub verdict: Verdict,
}

/// Audit of `ω̂_k`, the induction chain at `t*`, the constant and the series.
pub fn certify(params: &CertificateParams, grid: &GridSpec, k_max: u32) -> Result<CertificateReport> {
    certify_with_terms(params, grid, k_max, DEFAULT_SERIES_TERMS)
}

pub fn certify_with_terms(
    params: &CertificateParams,
    grid: &GridSpec,
    k_max: u32,
    series_terms: u32,
) -> Result<CertificateReport> {
    let mut violations = params.violations();
    if grid.dim() != params.n {
        violations.push(format!("grid dimension {} differs from n = {}", grid.dim(), params.n));
    }
    let omega = build_omega_sequence(k_max, grid)?;
    let t = params.t_star;
    let chain = verify_induction_chain(&omega, params, t);
    let levels: Vec<LevelRecord> = omega.iter().zip(chain).map(|(o, c)| level_record(o, c)).collect();
    let constants = blowup_constants(params);
    let series = divergence_partial_sums(params, series_terms)?;
    let certified = violations.is_empty()
        && levels.iter().all(LevelRecord::all_ok)
        && constants.ratio_ok
        && series.geometric_growth;
    Ok(CertificateReport {
        params: *params,
        grid: *grid,
        k_max,
        t,
        violations,
        levels,
        constants,
        series,
        verdict: if certified {
            Verdict::CertifiedDivergent
        } else {
            Verdict::NotCertified
        },
    })
}

fn level_record(o: &OmegaLevel, c: InductionRecord) -> LevelRecord {
    LevelRecord {
        k: o.k,
        support_ok: o.support_ok(),
        hypercube_ok: o.hypercube_ok(),
        l1: o.l1,
        l1_expected: o.l1_expected,
        l1_error: o.l1_rel_error,
        l1_ok: o.l1_rel_error <= L1_TOL,
        doubling_error: o.doubling_rel_error,
        induction: c,
    }
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "NO"
    }
}

impl CertificateReport {
    /// Human-readable report: parameters, per-level table, constants, partial sums.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let _ = writeln!(s, "blow-up certificate");
        let _ = writeln!(s, "verdict: {}", self.verdict);
        let _ = writeln!(s);
        let _ = writeln!(s, "parameters");
        let _ = writeln!(s, "  n = {}  alpha = {}  gamma = {}  rho = {}", p.n, p.alpha, p.gamma, p.rho);
        let _ = writeln!(s, "  C1 = {:.6e}  A = {:.6e}  A_min = {:.6e}", p.c1, p.a, p.a_min);
        let _ = writeln!(s, "  t* = ln2/2^alpha = {:.12}  (chain audited at t = {:.12})", p.t_star, self.t);
        let _ = writeln!(
            s,
            "  lattice: L = {:.6}  N = {}  spacing = {:.6e}  k_max = {}",
            self.grid.length(),
            self.grid.modes(),
            self.grid.fourier_spacing(),
            self.k_max
        );
        if self.violations.is_empty() {
            let _ = writeln!(s, "  hypotheses: all satisfied");
        } else {
            for v in &self.violations {
                let _ = writeln!(s, "  violated: {v}");
            }
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "levels");
        let _ = writeln!(
            s,
            "  {:>2} {:>8} {:>8} {:>14} {:>14} {:>11} {:>10} {:>6} {:>6} {:>6} {:>6} {:>12}",
            "k", "corona", "cube", "l1", "l1 expected", "l1 rel err", "doubling", "(a)", "(b)", "(c)", "(d)", "log margin"
        );
        for l in &self.levels {
            let i = &l.induction;
            let _ = writeln!(
                s,
                "  {:>2} {:>8} {:>8} {:>14.8e} {:>14.8e} {:>11.3e} {:>10.2e} {:>6} {:>6} {:>6} {:>6} {:>12.4e}",
                l.k,
                yn(l.support_ok),
                yn(l.hypercube_ok),
                l.l1,
                l.l1_expected,
                l.l1_error,
                l.doubling_error,
                yn(i.conv_bound_ok),
                yn(i.bessel_bound_ok),
                yn(i.time_integral_ok),
                yn(i.induction_ok),
                i.log_margin
            );
        }
        for l in &self.levels {
            if let Some(j) = l.induction.first_failed_link {
                let what = if l.k == 0 {
                    "initial step |xi|^alpha <= 2^alpha on supp omega_0".to_string()
                } else {
                    format!("chain link L{j} >= L{}", j + 1)
                };
                let _ = writeln!(s, "  level {} fails: {what}", l.k);
            }
        }
        let _ = writeln!(s);
        let c = &self.constants;
        let _ = writeln!(s, "constants");
        let _ = writeln!(s, "  ratio = A^2 / (e^(t* 2^(alpha+1)) 2^(10+2n)) = {:.15}", c.ratio);
        let _ = writeln!(s, "  ln ratio = {:.3e}  ratio >= 1: {}", c.ln_ratio, yn(c.ratio_ok));
        let _ = writeln!(s);
        let sr = &self.series;
        let _ = writeln!(s, "series lower bound for |u(t*)|^2 in homogeneous H^1");
        let _ = writeln!(
            s,
            "  growth rate log2 ratio + 2 log2 v_n = {:.6}  geometric growth: {}  terms unbounded: {}",
            sr.growth_rate,
            yn(sr.geometric_growth),
            yn(sr.diverges)
        );
        let _ = writeln!(s, "  {:>3} {:>16} {:>16}", "K", "log2 term_K", "log2 S_K");
        for (k, (t, ps)) in sr.log2_terms.iter().zip(&sr.log2_partial_sums).enumerate() {
            let _ = writeln!(s, "  {:>3} {:>16.6} {:>16.6}", k, t, ps);
        }
        s
    }

    /// One row per level.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# certificate levels: n={} alpha={} rho={} C1={:e} A={:e} t={:e}; l1 and l1_expected are frequency-space L1 masses (dimensionless), log_margin in natural-log units; verdict={}",
            self.params.n, self.params.alpha, self.params.rho, self.params.c1, self.params.a, self.t, self.verdict
        )?;
        writeln!(
            out,
            "k,support_ok,hypercube_ok,l1,l1_expected,l1_rel_error,doubling_error,conv_bound_ok,bessel_bound_ok,time_integral_ok,induction_ok,log_margin"
        )?;
        for l in &self.levels {
            let i = &l.induction;
            writeln!(
                out,
                "{},{},{},{:e},{:e},{:e},{:e},{},{},{},{},{:e}",
                l.k,
                l.support_ok,
                l.hypercube_ok,
                l.l1,
                l.l1_expected,
                l.l1_error,
                l.doubling_error,
                i.conv_bound_ok,
                i.bessel_bound_ok,
                i.time_integral_ok,
                i.induction_ok,
                i.log_margin
            )?;
        }
        Ok(())
    }
}

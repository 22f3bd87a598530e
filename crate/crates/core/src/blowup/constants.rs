use std::f64::consts::{LN_2, PI};

use crate::coefficient::c1_threshold_ln;
use crate::fractional::check_alpha;
use crate::{Error, Result};

/// Volume of the unit ball in `ℝⁿ`: `v₀ = 1`, `v₁ = 2`, `v_n = (2π/n) v_{n−2}`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// `C(n) = v_n n^{n/2} (2ⁿ − 1)`, the corona volume factor.
pub fn corona_constant(n: usize) -> f64 {
    unit_ball_volume(n) * (n as f64).powf(n as f64 / 2.0) * (2f64.powi(n as i32) - 1.0)
}

/// Relative tolerance used for log-domain comparisons.
pub const LOG_TOL: f64 = 1e-12;

/// Parameters of the blow-up lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateParams {
    pub n: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub rho: f64,
    pub c1: f64,
    pub a: f64,
    /// `ln 2 / 2^α`.
    pub t_star: f64,
    /// `e^{ln 2} 2^{5+n}`.
    pub a_min: f64,
}

impl CertificateParams {
    pub fn new(n: usize, alpha: f64, gamma: f64, rho: f64, c1: f64, a: f64) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::param("n", n as f64, "n ∈ {1, 2, 3}"));
        }
        check_alpha(alpha)?;
        Ok(CertificateParams {
            n,
            alpha,
            gamma,
            rho,
            c1,
            a,
            t_star: t_star(alpha),
            a_min: a_min(n),
        })
    }

    /// Parameters with `C₁` at its threshold and `A = A_min`.
    pub fn minimal(n: usize, alpha: f64, gamma: f64, rho: f64) -> Result<Self> {
        let c1 = c1_threshold_ln(n, rho, alpha).exp();
        CertificateParams::new(n, alpha, gamma, rho, c1, a_min(n))
    }

    /// Violated hypotheses, each quoting its inequality; empty when valid.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.n as f64;
        if !(self.a.is_finite() && self.a > 0.0 && self.a.ln() >= self.a_min.ln() - LOG_TOL * self.a_min.ln()) {
            out.push(format!("A = {} violates A ≥ e^(ln 2) 2^(5+n) = {}", self.a, self.a_min));
        }
        let ln_thr = c1_threshold_ln(self.n, self.rho, self.alpha);
        if !(self.c1.is_finite() && self.c1 > 0.0 && self.c1.ln() >= ln_thr - LOG_TOL * ln_thr.abs()) {
            out.push(format!(
                "C1 = {} violates max{{1, 2^(ρ/2−1)}} n^((ρ+α)/2) 2^(10n−1+ρ+α) ≤ C1 (= {:.6e})",
                self.c1,
                ln_thr.exp()
            ));
        }
        if !(self.rho >= 0.0) {
            out.push(format!("ρ = {} violates ρ ≥ 0", self.rho));
        }
        if !(self.rho + self.alpha <= 5.0 * n + 2.0) {
            out.push(format!(
                "ρ + α = {} violates ρ + α ≤ 5n + 2 = {}",
                self.rho + self.alpha,
                5 * self.n + 2
            ));
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.violations().is_empty()
    }
}

pub fn t_star(alpha: f64) -> f64 {
    LN_2 / 2f64.powf(alpha)
}

/// `e^{ln 2} 2^{5+n} = 2^{6+n}`.
pub fn a_min(n: usize) -> f64 {
    2f64.powi(6 + n as i32)
}

/// `ln Φ_k(t) = −t 2^{k+α} − 5(2^k − 1) ln 2 + 5nk ln 2`.
pub fn log_phi(k: u32, t: f64, alpha: f64, n: usize) -> f64 {
    let p = 2f64.powi(k as i32);
    -t * 2f64.powf(k as f64 + alpha) - 5.0 * (p - 1.0) * LN_2 + 5.0 * (n as f64) * (k as f64) * LN_2
}

/// `Φ_k(t)`; underflows to zero for large `k`, where [`log_phi`] stays exact.
pub fn phi(k: u32, t: f64, params: &CertificateParams) -> f64 {
    log_phi(k, t, params.alpha, params.n).exp()
}

/// The constant whose size decides divergence of the lower-bound series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupConstants {
    /// `A² / (e^{t* 2^{α+1}} 2^{10+2n})`.
    pub ratio: f64,
    pub ln_ratio: f64,
    pub t_star: f64,
    pub a_min: f64,
    /// `ratio ≥ 1` up to rounding.
    pub ratio_ok: bool,
}

pub fn blowup_constants(params: &CertificateParams) -> BlowupConstants {
    let ln_ratio = 2.0 * params.a.ln()
        - params.t_star * 2f64.powf(params.alpha + 1.0)
        - (10 + 2 * params.n) as f64 * LN_2;
    BlowupConstants {
        ratio: ln_ratio.exp(),
        ln_ratio,
        t_star: params.t_star,
        a_min: params.a_min,
        ratio_ok: ln_ratio >= -1e-13,
    }
}

/// Partial sums of the lower bound for `‖u(t*)‖²_{Ḣ¹}`:
/// `n 2^{10} C(n)^{−1} Σ_k ratio^{2^k} v_n^{2^{k+1}} 2^{k(9n+2)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesReport {
    /// `log₂` of the k-th term (prefactor included), `k = 0..=K`.
    pub log2_terms: Vec<f64>,
    /// `log₂ S_K` with `S_K = Σ_{k ≤ K}`, for `K = 0..=K`.
    pub log2_partial_sums: Vec<f64>,
    /// `log₂ ratio + 2 log₂ v_n`: coefficient of `2^k` in `log₂ term_k`.
    pub growth_rate: f64,
    /// `growth_rate > 0` and `log₂ S_K ≥ 2^K · growth_rate` for every `K`.
    pub geometric_growth: bool,
    /// The last term exceeds the first (terms do not tend to zero).
    pub diverges: bool,
    /// Largest gap between the simplified and the unsimplified `log₂ term_k`.
    pub dual_route_gap: f64,
}

fn log2_sum_exp2(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (1.0 + (lo - hi).exp2()).log2()
}

pub fn divergence_partial_sums(params: &CertificateParams, k_terms: u32) -> Result<SeriesReport> {
    if k_terms < 1 {
        return Err(Error::param("K", k_terms as f64, "K ≥ 1"));
    }
    let n = params.n;
    let nf = n as f64;
    let consts = blowup_constants(params);
    let log2_ratio = consts.ln_ratio / LN_2;
    let log2_v = unit_ball_volume(n).log2();
    let log2_pref = nf.log2() + 10.0 - corona_constant(n).log2();
    let log2_a = params.a.log2();
    let mut terms = Vec::new();
    let mut sums = Vec::new();
    let mut acc = f64::NEG_INFINITY;
    let mut gap = 0.0f64;
    for k in 0..=k_terms {
        let kf = k as f64;
        let p = 2f64.powi(k as i32);
        let simplified = log2_pref + p * log2_ratio + 2.0 * p * log2_v + kf * (9.0 * nf + 2.0);
        // n 2^{2k} A^{2^{k+1}} e^{−t* 2^{k+α+1}} 2^{−10(2^k−1)} 2^{10nk} C(n)^{−1} 2^{−nk} v_n^{2^{k+1}} 2^{−n 2^{k+1}}
        let raw = nf.log2() + 2.0 * kf + 2.0 * p * log2_a
            - params.t_star * 2f64.powf(kf + params.alpha + 1.0) / LN_2
            - 10.0 * (p - 1.0)
            + 10.0 * nf * kf
            - corona_constant(n).log2()
            - nf * kf
            + 2.0 * p * log2_v
            - nf * 2.0 * p;
        gap = gap.max((simplified - raw).abs() / simplified.abs().max(1.0));
        acc = log2_sum_exp2(acc, simplified);
        terms.push(simplified);
        sums.push(acc);
    }
    let growth_rate = log2_ratio + 2.0 * log2_v;
    let geometric_growth = growth_rate > 0.0
        && sums
            .iter()
            .enumerate()
            .all(|(k, &s)| s >= 2f64.powi(k as i32) * growth_rate);
    let diverges = terms.last().copied().unwrap_or(f64::NEG_INFINITY) > terms[0];
    Ok(SeriesReport {
        log2_terms: terms,
        log2_partial_sums: sums,
        growth_rate,
        geometric_growth,
        diverges,
        dual_route_gap: gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, alpha: f64) -> CertificateParams {
        CertificateParams::minimal(n, alpha, 0.9, 0.0).unwrap()
    }

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn phi_examples() {
        let p = params(1, 1.0);
        assert_eq!(phi(0, 0.0, &p), 1.0);
        assert!((phi(1, 0.0, &p) - 1.0).abs() < 1e-15);
        let p3 = params(3, 1.0);
        assert!((phi(1, 0.0, &p3) - 2f64.powi(10)).abs() < 1e-10);
        assert!((phi(0, p.t_star, &p) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn log_phi_matches_direct_evaluation() {
        for n in 1..=3 {
            for k in 0..=4u32 {
                for t in [0.0, 0.1, 0.7] {
                    let direct = (-t * 2f64.powf(k as f64 + 1.5)).exp()
                        * 2f64.powf(-5.0 * (2f64.powi(k as i32) - 1.0))
                        * 2f64.powf(5.0 * (n * k as usize) as f64);
                    let viaexp = log_phi(k, t, 1.5, n).exp();
                    assert!((viaexp / direct - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn constant_identity_at_minimal_amplitude() {
        assert_eq!(a_min(1), 128.0);
        assert!((a_min(2) - 256.0).abs() < 1e-12);
        for n in 1..=3 {
            for alpha in [0.8, 1.0, 1.5, 2.0] {
                let c = blowup_constants(&params(n, alpha));
                assert!((c.ratio - 1.0).abs() < 1e-14, "n {n} α {alpha}: {}", c.ratio);
                assert!(c.ratio_ok);
            }
        }
        let mut p = params(1, 2.0);
        p.a *= 2.0;
        assert!((blowup_constants(&p).ratio - 4.0).abs() < 1e-13);
    }

    #[test]
    fn series_grows_geometrically_at_threshold() {
        let r = divergence_partial_sums(&params(1, 2.0), 12).unwrap();
        assert!(r.geometric_growth && r.diverges);
        assert!(r.dual_route_gap < 1e-12);
        for (k, w) in r.log2_partial_sums.windows(2).enumerate() {
            assert!(w[1] > w[0]);
            assert!(w[1] >= 2f64.powi(k as i32 + 2));
        }
        // log₂ term_k = 9 + 2^{k+1} + 11k for n = 1
        for (k, &t) in r.log2_terms.iter().enumerate() {
            let want = 9.0 + 2f64.powi(k as i32 + 1) + 11.0 * k as f64;
            assert!((t - want).abs() < 1e-9, "k {k}: {t} vs {want}");
        }
    }

    #[test]
    fn quarter_ratio_still_diverges_in_one_dimension() {
        let mut p = params(1, 2.0);
        p.a = p.a_min / 2.0;
        let r = divergence_partial_sums(&p, 6).unwrap();
        for (k, &t) in r.log2_terms.iter().take(3).enumerate() {
            assert!((t - (9.0 + 11.0 * k as f64)).abs() < 1e-9);
        }
        assert!(r.diverges);
        assert!(!r.geometric_growth);
    }

    #[test]
    fn violations_quote_conditions() {
        let mut p = params(1, 2.0);
        p.a = 1.0;
        assert!(p.violations().iter().any(|m| m.contains("A ≥")));
        let mut q = params(1, 2.0);
        q.rho = 6.5;
        assert!(q.violations().iter().any(|m| m.contains("ρ + α ≤ 5n + 2")));
    }
}

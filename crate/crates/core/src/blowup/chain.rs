use std::f64::consts::LN_2;

use super::constants::{log_phi, CertificateParams, LOG_TOL};
use super::omega::OmegaLevel;

/// Slack on the convolution bound, relative to the largest `W_k`.
pub const CONV_TOL: f64 = 1e-10;
/// Slack on the time-integral bound `1 − e^{…} ≥ 1/2`.
pub const TIME_TOL: f64 = 1e-14;

/// Per-level audit of the induction step; `k = 0` records the initial step.
#[derive(Debug, Clone, PartialEq)]
pub struct InductionRecord {
    pub k: u32,
    /// Lattice points of `supp ω̂_k` that were checked.
    pub points: usize,
    /// (a) `(|ξ|ω̂_{k−1}) ∗ (|ξ|ω̂_{k−1}) ≥ 2^{2(k−1)} ω̂_k`.
    pub conv_bound_ok: bool,
    /// Smallest `W_k − 2^{2(k−1)} ω̂_k` over the support.
    pub conv_margin: f64,
    /// (b) `(1+|ξ|²)^{ρ/2} ≤ max{1, 2^{ρ/2−1}} n^{ρ/2} 2^{(k+1)ρ+1}` on the support.
    pub bessel_bound_ok: bool,
    /// Largest `(1+|ξ|²)^{ρ/2}` over the support and the bound it is compared with.
    pub bessel_max: f64,
    pub bessel_bound: f64,
    /// (c) `1 − e^{−t 2^{α(k+1)} n^{α/2}} ≥ 1/2`.
    pub time_integral_ok: bool,
    pub time_factor: f64,
    /// (d) every link of the assembled chain holds at every support point;
    /// at `k = 0` this is the initial step `|ξ|^α ≤ 2^α` on `supp ω̂₀`.
    pub induction_ok: bool,
    /// Index of the first failing link (1-based, `L_i ≥ L_{i+1}`), if any.
    pub first_failed_link: Option<usize>,
    /// Smallest `ln(û lower bound) − ln(A^{2^k} Φ_k(t) ω̂_k)` over the support.
    pub log_margin: f64,
}

impl InductionRecord {
    pub fn all_ok(&self) -> bool {
        self.conv_bound_ok && self.bessel_bound_ok && self.time_integral_ok && self.induction_ok
    }
}

/// `φ(z) = (1 − e^{−z})/z`, with `φ(0) = 1`.
fn phi1(z: f64) -> f64 {
    if z < 1e-8 {
        1.0 - 0.5 * z
    } else {
        -(-z).exp_m1() / z
    }
}

fn geq(a: f64, b: f64) -> bool {
    a >= b - LOG_TOL * a.abs().max(b.abs()).max(1.0)
}

fn time_factor(k: u32, t: f64, params: &CertificateParams) -> f64 {
    let e = t * 2f64.powf(params.alpha * (k as f64 + 1.0)) * (params.n as f64).powf(params.alpha / 2.0);
    -(-e).exp_m1()
}

fn initial_step(level: &OmegaLevel, params: &CertificateParams, t: f64) -> InductionRecord {
    let n = params.n;
    let bound = 2f64.powf(params.alpha);
    let mut ok = true;
    let mut worst = f64::INFINITY;
    let mut points = 0;
    for (i, &v) in level.patch.values().iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        points += 1;
        let xi = level.patch.xi_of(i);
        let r = xi[..n].iter().map(|x| x * x).sum::<f64>().sqrt();
        let ra = r.powf(params.alpha);
        ok &= ra <= bound * (1.0 + LOG_TOL);
        // ln(e^{−t|ξ|^α} A ω̂₀) − ln(A Φ₀(t) ω̂₀)
        worst = worst.min(t * (bound - ra));
    }
    let tf = time_factor(0, t, params);
    InductionRecord {
        k: 0,
        points,
        conv_bound_ok: true,
        conv_margin: 0.0,
        bessel_bound_ok: true,
        bessel_max: 1.0,
        bessel_bound: 1.0,
        time_integral_ok: tf >= 0.5 - TIME_TOL,
        time_factor: tf,
        induction_ok: ok,
        first_failed_link: if ok { None } else { Some(1) },
        log_margin: worst,
    }
}

/// Audits the lower-bound induction on every lattice point of `supp ω̂_k`
/// for `k = 1..levels.len()−1`, at time `t`.
///
/// The chain `L1 ≥ … ≥ L7` is evaluated in natural logs, where
/// - `L1` uses the exact time integral and `W_k = (|ξ|ω̂_{k−1})∗(|ξ|ω̂_{k−1})`,
/// - `L2` replaces `W_k` by `2^{2(k−1)} ω̂_k`,
/// - `L3` replaces `(1+|ξ|²)^{−ρ/2}` by its corona bound,
/// - `L4` bounds `Φ_{k−1}(s)²` by its value at `s = t` and `|ξ|^α` by the
///   corona radius,
/// - `L5` replaces `1 − e^{−t n^{α/2} 2^{α(k+1)}}` by `1/2`, and must agree
///   with the closed form `L5′`,
/// - `L6` lowers `2^{k(10n+2−ρ−α)}` to `2^{5nk}`,
/// - `L7 = ln(A^{2^k} Φ_k(t) ω̂_k)`.
pub fn verify_induction_chain(levels: &[OmegaLevel], params: &CertificateParams, t: f64) -> Vec<InductionRecord> {
    let mut out = Vec::with_capacity(levels.len());
    if let Some(first) = levels.first() {
        out.push(initial_step(first, params, t));
    }
    for k in 1..levels.len() as u32 {
        out.push(induction_step(&levels[k as usize - 1], &levels[k as usize], params, t));
    }
    out
}

fn induction_step(prev: &OmegaLevel, level: &OmegaLevel, params: &CertificateParams, t: f64) -> InductionRecord {
    let n = params.n;
    let nf = n as f64;
    let (alpha, rho) = (params.alpha, params.rho);
    let kf = level.k as f64;
    let p = 2f64.powi(level.k as i32);
    let norm = |xi: &[f64]| xi.iter().map(|x| x * x).sum::<f64>().sqrt();

    let weighted = prev.patch.weighted(norm);
    let w = weighted.convolve(&weighted);
    let w_max = w.max();
    let four = 2f64.powf(2.0 * (kf - 1.0));

    let mx = (0.5 * rho - 1.0).max(0.0) * LN_2;
    let ln_bessel_bound = mx + 0.5 * rho * nf.ln() + ((kf + 1.0) * rho + 1.0) * LN_2;
    let tf = time_factor(level.k, t, params);

    let ln_c1 = params.c1.ln();
    let ln_a = params.a.ln();
    let ln_k = -5.0 * (p / 2.0 - 1.0) * LN_2 + 5.0 * nf * (kf - 1.0) * LN_2;
    let b = 2f64.powf(kf + alpha);
    let ln_rate = alpha * (kf + 1.0) * LN_2 + 0.5 * alpha * nf.ln();
    let rate = ln_rate.exp();
    let ln_phi_k = log_phi(level.k, t, alpha, n);

    let mut rec = InductionRecord {
        k: level.k,
        points: 0,
        conv_bound_ok: true,
        conv_margin: f64::INFINITY,
        bessel_bound_ok: true,
        bessel_max: 0.0,
        bessel_bound: ln_bessel_bound.exp(),
        time_integral_ok: tf >= 0.5 - TIME_TOL,
        time_factor: tf,
        induction_ok: true,
        first_failed_link: None,
        log_margin: f64::INFINITY,
    };

    for (i, &om) in level.patch.values().iter().enumerate() {
        if om == 0.0 {
            continue;
        }
        rec.points += 1;
        let xi = level.patch.xi_of(i);
        let m = level.patch.index_of(i);
        let r = norm(&xi[..n]);
        let r2 = r * r;
        let wk = w.get(&m[..n]);

        let margin = wk - four * om;
        rec.conv_margin = rec.conv_margin.min(margin);
        if margin < -CONV_TOL * w_max {
            rec.conv_bound_ok = false;
        }
        let ln_bessel = 0.5 * rho * (1.0 + r2).ln();
        rec.bessel_max = rec.bessel_max.max(ln_bessel.exp());
        if !geq(ln_bessel_bound, ln_bessel) {
            rec.bessel_bound_ok = false;
        }

        let a_sym = r.powf(alpha);
        let ln_int = 2.0 * ln_k + t.ln() - t * a_sym.min(b) + phi1(t * (b - a_sym).abs()).ln();
        let ln_om = om.ln();
        let l1 = ln_c1 + p * ln_a + ln_int + wk.max(f64::MIN_POSITIVE).ln() - ln_bessel;
        let l2 = ln_c1 + p * ln_a + ln_int + four.ln() + ln_om - ln_bessel;
        let l3 = ln_c1 + p * ln_a + ln_int + four.ln() + ln_om - ln_bessel_bound;
        let ln_int4 = 2.0 * ln_k - t * b - ln_rate + (-t * rate).exp_m1().neg_ln();
        let l4 = ln_c1 + p * ln_a + ln_int4 + four.ln() + ln_om - ln_bessel_bound;
        let l5 = l4 - (-t * rate).exp_m1().neg_ln() - LN_2;
        let l5c = ln_c1 - 0.5 * (rho + alpha) * nf.ln() - mx
            + (1.0 - 10.0 * nf - rho - alpha) * LN_2
            + p * ln_a
            - t * b
            - 5.0 * (p - 1.0) * LN_2
            + kf * (10.0 * nf + 2.0 - rho - alpha) * LN_2
            + ln_om;
        let l6 = l5c - kf * (10.0 * nf + 2.0 - rho - alpha) * LN_2 + 5.0 * nf * kf * LN_2;
        let l7 = p * ln_a + ln_phi_k + ln_om;

        let links = [
            geq(l1, l2),
            geq(l2, l3),
            geq(l3, l4),
            geq(l4, l5),
            (l5 - l5c).abs() <= LOG_TOL * l5.abs().max(1.0),
            geq(l5c, l6),
            geq(l6, l7),
        ];
        if let Some(j) = links.iter().position(|ok| !ok) {
            rec.induction_ok = false;
            if rec.first_failed_link.is_none() {
                rec.first_failed_link = Some(j + 1);
            }
        }
        rec.log_margin = rec.log_margin.min(l1 - l7);
    }
    rec
}

trait NegLn {
    /// `ln(−x)` for `x < 0`, i.e. `ln(1 − e^{−z})` from `expm1(−z)`.
    fn neg_ln(self) -> f64;
}

impl NegLn for f64 {
    fn neg_ln(self) -> f64 {
        (-self).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::build_omega_sequence;
    use crate::spectral::GridSpec;

    #[test]
    fn time_factor_ties_at_level_zero() {
        let p = CertificateParams::minimal(1, 1.0, 0.5, 0.0).unwrap();
        assert!((time_factor(0, p.t_star, &p) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn first_level_checks_in_one_dimension() {
        let g = GridSpec::default_certificate(1).unwrap();
        let levels = build_omega_sequence(1, &g).unwrap();
        let p = CertificateParams::minimal(1, 2.0, 0.9, 2.0).unwrap();
        let recs = verify_induction_chain(&levels, &p, p.t_star);
        let r1 = &recs[1];
        assert!(r1.conv_bound_ok && r1.conv_margin >= -1e-10);
        // max of 1 + ξ² on (2, 4) stays below 17; the bound is 2^{2·2+1}
        assert!(r1.bessel_max < 17.0 && r1.bessel_max > 16.9);
        assert!((r1.bessel_bound - 32.0).abs() < 1e-12);
        assert!(r1.all_ok());
        assert!(recs[0].all_ok());
    }

    #[test]
    fn initial_step_fails_beyond_one_dimension() {
        let g = GridSpec::new(2, 64.0 * std::f64::consts::PI, 512).unwrap();
        let levels = build_omega_sequence(0, &g).unwrap();
        let p = CertificateParams::minimal(2, 2.0, 0.9, 2.0).unwrap();
        let recs = verify_induction_chain(&levels, &p, p.t_star);
        assert!(!recs[0].induction_ok);
    }
}

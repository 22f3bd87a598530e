//! The `ω_k` sequence, the weights `Φ_k` and the blow-up certificate.
//!
//! `ω̂₀` is the indicator of `{|ξ − ξ₀| < 1/2}` and `ω̂_k = ω̂_{k−1} ∗ ω̂_{k−1}`.
//! Levels live on `Δξ·ℤⁿ` as compact [`LatticePatch`]es with convolution weight
//! `Δξⁿ`, so the discrete L¹ mass obeys `l1(ω̂_k) = l1(ω̂_{k−1})²` exactly.

mod certify;
mod chain;
mod constants;
mod omega;
mod patch;

pub use certify::{certify, certify_with_terms, CertificateReport, LevelRecord, Verdict, DEFAULT_SERIES_TERMS, L1_TOL};
pub use chain::{verify_induction_chain, InductionRecord, CONV_TOL, TIME_TOL};
pub use constants::{
    a_min, corona_constant, divergence_partial_sums, log_phi, phi, t_star, blowup_constants,
    unit_ball_volume, CertificateParams, SeriesReport, BlowupConstants, LOG_TOL,
};
pub use omega::{build_omega_sequence, OmegaLevel, OmegaSeed, SUPPORT_TOL};
pub use patch::LatticePatch;

/// Default deepest level: 3 in one dimension, 2 above.
pub fn default_k_max(n: usize) -> u32 {
    if n == 1 {
        3
    } else {
        2
    }
}

//! Cooperative spectrum sensing for cognitive radio networks.
//!
//! Secondary users run energy detectors and report their normalized energies
//! to a band manager, which fuses them either by equal-gain combining (EGC,
//! a plain sum) or by weighted combining (WC), where each report is weighted
//! by its dB-normalized energy over its dB path loss. This crate provides:
//!
//! - [`specfun`]: incomplete gamma, generalized Marcum Q, Bessel I, Laguerre,
//!   Kummer's ₁F₁ and Gauss–Hermite rules,
//! - [`channel`]: single-user energy statistics and SNR sampling for AWGN,
//!   Rayleigh, Nakagami-m and lognormal channels,
//! - [`fusion`]: EGC and WC combining rules,
//! - [`analytic`]: closed-form cooperative detection / false-alarm probabilities
//!   and a numeric-integration cross-check,
//! - [`montecarlo`]: a seeded, parallel simulation oracle.

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// reference constants keep every digit they were published or computed with
#![allow(clippy::excessive_precision)]

pub mod analytic;
pub mod channel;
mod error;
pub mod fusion;
pub mod montecarlo;
pub mod specfun;

pub use analytic::{
    psi_d_awgn, psi_d_lognormal, psi_d_nakagami, psi_d_numeric, psi_d_numeric_iid, psi_d_rayleigh,
    psi_f, threshold_for_pf, CooperativeScenario, GammaDensity, LognormalDensity, SnrDensity,
    DEFAULT_HERMITE_ORDER,
};
pub use channel::{ChannelModel, Hypothesis, SensingParams};
pub use error::{Error, Result};
pub use fusion::{UserReport, WeightVector};
pub use montecarlo::{simulate, simulate_curve, SimEstimate, SimScenario, WeightMode};

/// Converts a dB value to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

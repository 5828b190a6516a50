//! Special functions behind the closed-form detection probabilities.
//!
//! Everything here is a pure function of its arguments.

mod bessel;
mod gamma;
mod hermite;
mod hypergeometric;
mod laguerre;
mod marcum;
pub mod quad;

pub use bessel::log_bessel_i;
pub use gamma::{
    inverse_regularized_upper_gamma, ln_gamma, regularized_lower_gamma, regularized_upper_gamma,
};
pub use hermite::{gauss_hermite, QuadratureRule, MAX_HERMITE_ORDER};
pub use hypergeometric::{kummer_1f1, ln_kummer_1f1_positive};
pub use laguerre::{laguerre, ln_laguerre_negative, ln_laguerre_negative_all};
pub use marcum::marcum_q;

/// `ln(exp(a) + exp(b))` without overflow.
pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

use super::gamma::ln_gamma;
use crate::error::{domain, Result};

/// Natural log of the modified Bessel function of the first kind, `ln I_ν(x)`.
///
/// Uses the ascending power series summed in log domain with a running
/// scale, and the Hankel large-argument expansion once `x` dominates `ν²`.
pub fn log_bessel_i(order: f64, x: f64) -> Result<f64> {
    const OP: &str = "log_bessel_i";
    if !(order >= 0.0) {
        return domain(OP, format!("order must be nonnegative, got {order}"));
    }
    if !(x >= 0.0) {
        return domain(OP, format!("argument must be nonnegative, got {x}"));
    }
    if x == 0.0 {
        return Ok(if order == 0.0 { 0.0 } else { f64::NEG_INFINITY });
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x > 1000.0_f64.max(25.0 * order * order) {
        Ok(ln_asymptotic(order, x))
    } else {
        ln_series(order, x)
    }
}

fn ln_series(nu: f64, x: f64) -> Result<f64> {
    // I_ν(x) = (x/2)^ν Σ_k (x²/4)^k / (k! Γ(k+ν+1))
    let q = 0.25 * x * x;
    let lead = nu * (0.5 * x).ln() - ln_gamma(nu + 1.0);
    // terms relative to t_0 = 1; rescale whenever the partial sum grows large
    let mut ln_scale = 0.0;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let max_terms = 100 + (2.0 * x) as usize;
    for k in 0..max_terms {
        let kf = k as f64;
        term *= q / ((kf + 1.0) * (kf + nu + 1.0));
        sum += term;
        if sum > 1e200 {
            ln_scale += sum.ln();
            term /= sum;
            sum = 1.0;
        }
        if kf + 1.0 > 0.5 * x && term < sum * 1e-17 {
            return Ok(lead + ln_scale + sum.ln());
        }
    }
    Err(crate::Error::SeriesNotConverged {
        op: "log_bessel_i",
        terms: max_terms,
    })
}

fn ln_asymptotic(nu: f64, x: f64) -> f64 {
    // I_ν(x) ~ e^x / sqrt(2πx) Σ_k (-1)^k a_k(ν) / x^k
    let mu = 4.0 * nu * nu;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    x - 0.5 * (2.0 * std::f64::consts::PI * x).ln() + sum.ln()
}

use crate::error::{domain, Error, Result};

const MAX_TERMS: usize = 100_000;

/// Kummer's confluent hypergeometric function `₁F₁(a; b; x)`.
///
/// Negative arguments go through Kummer's transformation
/// `₁F₁(a; b; x) = e^x ₁F₁(b-a; b; -x)` so the series is always summed at a
/// nonnegative argument; the series itself is kept as (log-magnitude, sign).
pub fn kummer_1f1(a: f64, b: f64, x: f64) -> Result<f64> {
    check_b(b)?;
    let (ln_mag, sign) = if x < 0.0 {
        let (l, s) = ln_series(b - a, b, -x)?;
        (l + x, s)
    } else {
        ln_series(a, b, x)?
    };
    if sign == 0.0 {
        return Ok(0.0);
    }
    let v = ln_mag.exp();
    if v.is_infinite() {
        return Err(Error::Overflow { op: "kummer_1f1" });
    }
    Ok(sign * v)
}

/// `ln ₁F₁(a; b; x)` for `a > 0`, `b > 0`, `x ≥ 0`, where every series term
/// is positive.
pub fn ln_kummer_1f1_positive(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && x >= 0.0) {
        return domain(
            "ln_kummer_1f1_positive",
            format!("requires a > 0, b > 0, x >= 0; got a={a}, b={b}, x={x}"),
        );
    }
    Ok(ln_series(a, b, x)?.0)
}

fn check_b(b: f64) -> Result<()> {
    if b.is_nan() || (b <= 0.0 && b == b.floor()) {
        return domain(
            "kummer_1f1",
            format!("b must not be a nonpositive integer, got {b}"),
        );
    }
    Ok(())
}

/// Sums `Σ_k (a)_k x^k / ((b)_k k!)` for `x ≥ 0`, returning `(ln|S|, sign S)`.
fn ln_series(a: f64, b: f64, x: f64) -> Result<(f64, f64)> {
    let mut ln_scale = 0.0;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * x / ((b + kf) * (kf + 1.0));
        if term == 0.0 {
            // terminating polynomial (a a nonpositive integer)
            break;
        }
        sum += term;
        let mag = sum.abs();
        if mag > 1e200 {
            ln_scale += mag.ln();
            term /= mag;
            sum /= mag;
        }
        // past the peak the ratio is below one and terms shrink geometrically
        let ratio = ((a + kf + 1.0) * x / ((b + kf + 1.0) * (kf + 2.0))).abs();
        if ratio < 1.0 && term.abs() < 1e-17 * sum.abs() {
            break;
        }
        if k + 1 == MAX_TERMS {
            return Err(Error::SeriesNotConverged {
                op: "kummer_1f1",
                terms: MAX_TERMS,
            });
        }
    }
    if sum == 0.0 {
        return Ok((f64::NEG_INFINITY, 0.0));
    }
    Ok((ln_scale + sum.abs().ln(), sum.signum()))
}

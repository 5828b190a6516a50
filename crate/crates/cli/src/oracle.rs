//! Independent reference evaluations of the special functions, built on
//! integral representations rather than the series the library uses.

use coopsense::specfun::quad::{integrate, integrate_to_infinity, Tolerance};
use coopsense::specfun::{ln_gamma, log_bessel_i};
use coopsense::Result;

const TIGHT: Tolerance = Tolerance {
    abs: 0.0,
    rel: 1e-13,
    max_intervals: 20_000,
};

/// `Q(s, x) = ∫_x^∞ t^{s-1} e^{-t} dt / Γ(s)`.
pub fn upper_gamma(s: f64, x: f64) -> Result<f64> {
    let lg = ln_gamma(s);
    let f = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        ((s - 1.0) * t.ln() - t - lg).exp()
    };
    // split at the mode so the substitution sees a smooth bump
    let mode = (s - 1.0).max(0.0);
    if x < mode {
        Ok(integrate(f, x, mode, TIGHT)?.value + integrate_to_infinity(f, mode, TIGHT)?.value)
    } else {
        Ok(integrate_to_infinity(f, x, TIGHT)?.value)
    }
}

/// `Q_M(a, b) = ∫_b^∞ x (x/a)^{M-1} e^{-(x²+a²)/2} I_{M-1}(a x) dx`, with
/// the central chi density when `a = 0`.
pub fn marcum_q(m: u32, a: f64, b: f64) -> Result<f64> {
    let nu = m as f64 - 1.0;
    let f = move |x: f64| {
        if x <= 0.0 {
            return 0.0;
        }
        let ln = if a == 0.0 {
            (2.0 * nu + 1.0) * x.ln()
                - 0.5 * x * x
                - nu * std::f64::consts::LN_2
                - ln_gamma(nu + 1.0)
        } else {
            x.ln() + nu * (x / a).ln() - 0.5 * (x * x + a * a)
                + log_bessel_i(nu, a * x).expect("positive argument")
        };
        ln.exp()
    };
    let peak = a.max((2.0 * nu + 1.0).sqrt());
    if b < peak {
        Ok(integrate(f, b, peak, TIGHT)?.value + integrate_to_infinity(f, peak, TIGHT)?.value)
    } else {
        Ok(integrate_to_infinity(f, b, TIGHT)?.value)
    }
}

/// Euler integral `₁F₁(a; b; z) = Γ(b)/(Γ(a)Γ(b-a)) ∫_0^1 e^{zt} t^{a-1} (1-t)^{b-a-1} dt`,
/// valid for `b > a > 0`. Exponents below one give integrable endpoint
/// singularities, so callers should keep `a ≥ 1` and `b - a ≥ 1`.
pub fn kummer_euler(a: f64, b: f64, z: f64) -> Result<f64> {
    assert!(b > a && a > 0.0);
    let norm = ln_gamma(b) - ln_gamma(a) - ln_gamma(b - a);
    // factor out the peak of e^{zt} to keep the integrand O(1)
    let shift = z.max(0.0);
    let f = |t: f64| {
        if t <= 0.0 || t >= 1.0 {
            let at_zero = if a == 1.0 { (-shift).exp() } else { 0.0 };
            let at_one = if b - a == 1.0 { (z - shift).exp() } else { 0.0 };
            return if t <= 0.0 { at_zero } else { at_one };
        }
        (z * t - shift + (a - 1.0) * t.ln() + (b - a - 1.0) * (-t).ln_1p()).exp()
    };
    let v = integrate(f, 0.0, 1.0, TIGHT)?.value;
    Ok((norm + shift + v.ln()).exp())
}

/// Plain term-by-term sum of `Σ (a)_k/(b)_k z^k/k!` for `z ≥ 0`.
pub fn kummer_naive(a: f64, b: f64, z: f64) -> f64 {
    assert!(z >= 0.0);
    let (mut term, mut sum) = (1.0f64, 1.0f64);
    let mut k = 0.0;
    while term > 1e-18 * sum || k < z {
        term *= (a + k) / (b + k) * z / (k + 1.0);
        sum += term;
        k += 1.0;
    }
    sum
}

/// `I_ν(x) = (1/π) ∫_0^π e^{x cos θ} cos(νθ) dθ` for integer `ν`, returned
/// as a logarithm.
pub fn ln_bessel_i_integer(nu: u32, x: f64) -> Result<f64> {
    let v = nu as f64;
    let f = |th: f64| (x * (th.cos() - 1.0)).exp() * (v * th).cos();
    let tol = Tolerance {
        abs: 1e-300,
        rel: 1e-14,
        max_intervals: 20_000,
    };
    // split off the e^{x(cosθ-1)} peak at θ = 0
    let cut = (8.0 / x.max(1.0)).sqrt().min(std::f64::consts::PI);
    let mut val = integrate(f, 0.0, cut, tol)?.value;
    if cut < std::f64::consts::PI {
        val += integrate(f, cut, std::f64::consts::PI, tol)?.value;
    }
    Ok(x + (val / std::f64::consts::PI).ln())
}

/// `∫ x^k e^{-x²} dx` over the real line.
pub fn hermite_moment(k: u32) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        ln_gamma((k as f64 + 1.0) / 2.0).exp()
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

/// Worst relative disagreement of a library function with its oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSweep {
    pub name: &'static str,
    pub points: usize,
    pub worst: f64,
    pub worst_at: String,
}

impl OracleSweep {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            points: 0,
            worst: 0.0,
            worst_at: String::new(),
        }
    }

    fn record(&mut self, lib: f64, reference: f64, at: impl FnOnce() -> String) {
        self.points += 1;
        let e = rel_err(lib, reference);
        if e > self.worst || e.is_nan() {
            self.worst = e;
            self.worst_at = at();
        }
    }
}

/// `Q_M(a, b)` for `M ∈ {1, 2, 5, 10}`, `a ∈ {0, 0.5, 2, 5}`, `b ∈ {0.5, 2, 4, 8}`.
pub fn sweep_marcum() -> Result<OracleSweep> {
    let mut s = OracleSweep::new("marcum_q");
    for m in [1u32, 2, 5, 10] {
        for a in [0.0, 0.5, 2.0, 5.0] {
            for b in [0.5, 2.0, 4.0, 8.0] {
                let lib = coopsense::specfun::marcum_q(m, a, b)?;
                s.record(lib, marcum_q(m, a, b)?, || format!("M={m} a={a} b={b}"));
            }
        }
    }
    Ok(s)
}

/// `Q(s, x)` for `s ∈ {0.5, 1, 3, 7.5, 20}`, `x ∈ {0.1, 1, 5, 15, 40}`.
pub fn sweep_upper_gamma() -> Result<OracleSweep> {
    let mut sw = OracleSweep::new("regularized_upper_gamma");
    for s in [0.5, 1.0, 3.0, 7.5, 20.0] {
        for x in [0.1, 1.0, 5.0, 15.0, 40.0] {
            let lib = coopsense::specfun::regularized_upper_gamma(s, x)?;
            sw.record(lib, upper_gamma(s, x)?, || format!("s={s} x={x}"));
        }
    }
    Ok(sw)
}

/// `₁F₁(a; b; z)`: Euler integral for `(a, b) ∈ {(1,2), (2,5), (3,4), (1,7.5)}`,
/// `z ∈ {-20, -3, 0.5, 5, 30}`; direct summation for `(a, b) ∈ {(3,1), (6,2), (10,4)}`,
/// `z ∈ {0.5, 5, 30}`.
pub fn sweep_kummer() -> Result<OracleSweep> {
    let mut s = OracleSweep::new("kummer_1f1");
    for (a, b) in [(1.0, 2.0), (2.0, 5.0), (3.0, 4.0), (1.0, 7.5)] {
        for z in [-20.0, -3.0, 0.5, 5.0, 30.0] {
            let lib = coopsense::specfun::kummer_1f1(a, b, z)?;
            s.record(lib, kummer_euler(a, b, z)?, || format!("a={a} b={b} z={z}"));
        }
    }
    for (a, b) in [(3.0, 1.0), (6.0, 2.0), (10.0, 4.0)] {
        for z in [0.5, 5.0, 30.0] {
            let lib = coopsense::specfun::kummer_1f1(a, b, z)?;
            s.record(lib, kummer_naive(a, b, z), || format!("a={a} b={b} z={z}"));
        }
    }
    Ok(s)
}

/// `I_ν(x)` for `ν ∈ {0, 1, 3, 6}`, `x ∈ {0.5, 2, 10, 50, 300, 2000}`,
/// compared on the linear scale.
pub fn sweep_bessel() -> Result<OracleSweep> {
    let mut s = OracleSweep::new("log_bessel_i");
    for nu in [0u32, 1, 3, 6] {
        for x in [0.5, 2.0, 10.0, 50.0, 300.0, 2000.0] {
            let lib = log_bessel_i(nu as f64, x)?;
            let reference = ln_bessel_i_integer(nu, x)?;
            // relative error of I from the log difference
            s.points += 1;
            let e = (lib - reference).exp_m1().abs();
            if e > s.worst {
                s.worst = e;
                s.worst_at = format!("nu={nu} x={x}");
            }
        }
    }
    Ok(s)
}

/// Gauss–Hermite rules of every order against exact moments of degree
/// `≤ 2l - 1`. Errors are relative to `Σ w_i |x_i|^k`, the scale of the
/// terms being summed.
pub fn sweep_hermite() -> Result<OracleSweep> {
    let mut s = OracleSweep::new("gauss_hermite");
    for l in 1..=coopsense::specfun::MAX_HERMITE_ORDER {
        let rule = coopsense::specfun::gauss_hermite(l)?;
        for k in 0..(2 * l as u32) {
            let q = rule.integrate(|x| x.powi(k as i32));
            let scale = rule.integrate(|x| x.abs().powi(k as i32));
            let e = (q - hermite_moment(k)).abs() / scale;
            s.points += 1;
            if e > s.worst {
                s.worst = e;
                s.worst_at = format!("l={l} k={k}");
            }
        }
    }
    Ok(s)
}

//! Closed-form cooperative detection and false-alarm probabilities.
//!
//! With `n` users each observing `2r` real degrees of freedom, the combined
//! statistic is chi-square with `2nr` degrees of freedom and, under H1,
//! noncentrality `2rγ_t` for the effective SNR `γ_t`. False alarm is
//! therefore `Γ(nr, λ/2)/Γ(nr)` for every channel, while detection averages
//! the generalized Marcum Q function `Q_{nr}(√(2rγ_t), √λ)` over the
//! distribution of `γ_t`:
//!
//! - AWGN: `γ_t = a γ` is deterministic.
//! - Rayleigh / Nakagami-m: `γ_t` is gamma distributed, giving a finite
//!   Laguerre sum plus a finite sum of Kummer functions.
//! - Lognormal: per-user lognormal SNRs averaged by a product Gauss–Hermite
//!   rule.
//!
//! `a` is the sum of the combining weights; `a = n` is equal-gain combining.

use crate::channel::{check_lambda, ChannelModel, SensingParams};
use crate::channel::{energy_density, Hypothesis};
use crate::error::{domain, Error, Result};
use crate::specfun::quad::{integrate_with_breakpoints, Tolerance};
use crate::specfun::{
    gauss_hermite, inverse_regularized_upper_gamma, ln_gamma, ln_kummer_1f1_positive,
    ln_laguerre_negative_all, marcum_q, regularized_upper_gamma,
};
use rayon::prelude::*;

/// Gauss–Hermite order used for lognormal shadowing unless overridden.
pub const DEFAULT_HERMITE_ORDER: usize = 5;

/// Upper bound on product-rule evaluation points for lognormal shadowing.
pub const MAX_LOGNORMAL_POINTS: u64 = 4_000_000;

/// A fully specified cooperative detection problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CooperativeScenario {
    params: SensingParams,
    model: ChannelModel,
    sum_a: f64,
    hermite_order: usize,
}

impl CooperativeScenario {
    /// `sum_a` is the combining-weight sum; pass `n` for equal-gain combining.
    pub fn new(params: SensingParams, model: ChannelModel, sum_a: f64) -> Result<Self> {
        model.validate()?;
        check_sum_a("CooperativeScenario::new", sum_a)?;
        Ok(Self {
            params,
            model,
            sum_a,
            hermite_order: DEFAULT_HERMITE_ORDER,
        })
    }

    /// Equal-gain combining scenario.
    pub fn egc(params: SensingParams, model: ChannelModel) -> Result<Self> {
        Self::new(params, model, params.n() as f64)
    }

    pub fn with_hermite_order(self, order: usize) -> Result<Self> {
        gauss_hermite(order)?;
        Ok(Self {
            hermite_order: order,
            ..self
        })
    }

    pub fn params(&self) -> &SensingParams {
        &self.params
    }

    pub fn model(&self) -> &ChannelModel {
        &self.model
    }

    pub fn sum_a(&self) -> f64 {
        self.sum_a
    }

    pub fn hermite_order(&self) -> usize {
        self.hermite_order
    }

    pub fn psi_f(&self) -> Result<f64> {
        psi_f(self.params.lambda(), self.params.n(), self.params.r())
    }

    pub fn psi_d(&self) -> Result<f64> {
        self.psi_d_at(self.params.lambda())
    }

    /// Detection probability at threshold `lambda`, other parameters fixed.
    pub fn psi_d_at(&self, lambda: f64) -> Result<f64> {
        let (n, r, a) = (self.params.n(), self.params.r(), self.sum_a);
        match self.model {
            ChannelModel::Awgn { gamma } => psi_d_awgn(lambda, n, r, a * gamma),
            ChannelModel::Rayleigh { mean_gamma } => psi_d_rayleigh(lambda, n, r, mean_gamma, a),
            ChannelModel::Nakagami { m, mean_gamma } => {
                psi_d_nakagami(lambda, n, r, m, mean_gamma, a)
            }
            ChannelModel::Lognormal { mu_db, sigma_db } => {
                psi_d_lognormal(lambda, n, r, mu_db, sigma_db, a, self.hermite_order)
            }
        }
    }
}

fn check_sum_a(op: &'static str, sum_a: f64) -> Result<()> {
    if !(sum_a > 0.0) || !sum_a.is_finite() {
        return domain(op, format!("weight sum must be positive, got {sum_a}"));
    }
    Ok(())
}

fn check_nr(op: &'static str, n: u32, r: u32) -> Result<u32> {
    if n == 0 || r == 0 {
        return domain(op, format!("n and r must be at least 1, got n={n}, r={r}"));
    }
    n.checked_mul(r).ok_or_else(|| Error::Domain {
        op,
        msg: "n*r overflows".into(),
    })
}

/// Cooperative false-alarm probability `Γ(nr, λ/2) / Γ(nr)`.
///
/// Independent of the channel and of the combining weights.
pub fn psi_f(lambda: f64, n: u32, r: u32) -> Result<f64> {
    let order = check_nr("psi_f", n, r)?;
    check_lambda("psi_f", lambda)?;
    regularized_upper_gamma(order as f64, 0.5 * lambda)
}

/// Threshold `λ` at which [`psi_f`] equals `target_pf`.
pub fn threshold_for_pf(target_pf: f64, n: u32, r: u32) -> Result<f64> {
    let order = check_nr("threshold_for_pf", n, r)?;
    if !(target_pf > 0.0 && target_pf <= 1.0) {
        return domain(
            "threshold_for_pf",
            format!("target false-alarm probability must lie in (0, 1], got {target_pf}"),
        );
    }
    Ok(2.0 * inverse_regularized_upper_gamma(order as f64, target_pf)?)
}

/// AWGN detection probability `Q_{nr}(√(2rγ_t), √λ)` for effective SNR `gamma_t`.
pub fn psi_d_awgn(lambda: f64, n: u32, r: u32, gamma_t: f64) -> Result<f64> {
    let order = check_nr("psi_d_awgn", n, r)?;
    check_lambda("psi_d_awgn", lambda)?;
    if !(gamma_t >= 0.0) {
        return domain(
            "psi_d_awgn",
            format!("effective SNR must be nonnegative, got {gamma_t}"),
        );
    }
    marcum_q(order, (2.0 * r as f64 * gamma_t).sqrt(), lambda.sqrt())
}

/// Rayleigh-fading detection probability.
///
/// `γ_t` is taken as gamma distributed with shape `n` and mean `a γ̄`, i.e.
/// each of the `n` virtual branches has mean SNR `γ̄_w = a γ̄ / n`.
pub fn psi_d_rayleigh(lambda: f64, n: u32, r: u32, mean_gamma: f64, sum_a: f64) -> Result<f64> {
    const OP: &str = "psi_d_rayleigh";
    let order = check_nr(OP, n, r)?;
    check_fading_args(OP, lambda, mean_gamma, sum_a)?;
    let branch = r as f64 * sum_a * mean_gamma / n as f64;
    gamma_mixture_tail(OP, lambda, order, n, branch)
}

/// Nakagami-m detection probability: the Rayleigh expression with the
/// gamma shape `n` replaced by `m·n` and per-branch mean `γ̄_w / m`.
pub fn psi_d_nakagami(
    lambda: f64,
    n: u32,
    r: u32,
    m: u32,
    mean_gamma: f64,
    sum_a: f64,
) -> Result<f64> {
    const OP: &str = "psi_d_nakagami";
    let order = check_nr(OP, n, r)?;
    if m == 0 {
        return domain(OP, "Nakagami m must be at least 1");
    }
    check_fading_args(OP, lambda, mean_gamma, sum_a)?;
    let shape = m.checked_mul(n).ok_or_else(|| Error::Domain {
        op: OP,
        msg: "m*n overflows".into(),
    })?;
    let branch = r as f64 * sum_a * mean_gamma / shape as f64;
    gamma_mixture_tail(OP, lambda, order, shape, branch)
}

fn check_fading_args(op: &'static str, lambda: f64, mean_gamma: f64, sum_a: f64) -> Result<()> {
    check_lambda(op, lambda)?;
    if !(mean_gamma > 0.0) || !mean_gamma.is_finite() {
        return domain(op, format!("mean SNR must be positive, got {mean_gamma}"));
    }
    check_sum_a(op, sum_a)
}

/// `E[Q_u(√(2X), √λ)]` for `X ~ Gamma(shape, branch)` with integer shape.
///
/// Writing `g = branch`, `α = g/(1+g)`, `β = 1/(1+g)`, `z = λα/2`:
///
/// ```text
/// C = e^{-λβ/2} [ β^{L-1} L_{L-1}(-z) + α Σ_{k=0}^{L-2} β^k L_k(-z) ]
/// P = C + β^L e^{-λ/2} Σ_{i=1}^{u-1} (λ/2)^i / i! · ₁F₁(L; i+1; z)
/// ```
///
/// `C` is the `u = 1` average, and each Kummer term adds the step from
/// Marcum order `i` to `i + 1`. Every term is positive, so the sums are
/// accumulated as log-sum-exp.
fn gamma_mixture_tail(
    op: &'static str,
    lambda: f64,
    u: u32,
    shape: u32,
    branch: f64,
) -> Result<f64> {
    if lambda == 0.0 {
        return Ok(1.0);
    }
    let g = branch;
    let ln_alpha = (g / (1.0 + g)).ln();
    let ln_beta = -g.ln_1p();
    let beta = (-g.ln_1p()).exp();
    let z = 0.5 * lambda * (g / (1.0 + g));
    let lf = shape as f64;

    let lag = ln_laguerre_negative_all(shape - 1, z);
    let mut ln_c = (lf - 1.0) * ln_beta + lag[shape as usize - 1];
    for (k, ln_lk) in lag.iter().enumerate().take(shape as usize - 1) {
        ln_c = crate::specfun::log_add_exp(ln_c, ln_alpha + k as f64 * ln_beta + ln_lk);
    }
    ln_c -= 0.5 * lambda * beta;

    let mut ln_total = ln_c;
    if u > 1 && lambda > 0.0 {
        let ln_half_lambda = (0.5 * lambda).ln();
        let lead = lf * ln_beta - 0.5 * lambda;
        for i in 1..u {
            let fi = i as f64;
            let term = lead + fi * ln_half_lambda - ln_gamma(fi + 1.0)
                + ln_kummer_1f1_positive(lf, fi + 1.0, z)?;
            ln_total = crate::specfun::log_add_exp(ln_total, term);
        }
    }
    let p = ln_total.exp();
    if !p.is_finite() {
        return Err(Error::Overflow { op });
    }
    // round-off can push a saturated value a hair past one
    Ok(p.min(1.0))
}

/// Lognormal-shadowing detection probability.
///
/// Each of the `n` users has an independent SNR with `10 log10 γ_i ~
/// N(mu_db, sigma_db²)`; the effective SNR is `γ_t = (a/n) Σ γ_i`. The
/// expectation of `Q_{nr}(√(2rγ_t), √λ)` is taken with the `order`-point
/// Gauss–Hermite rule in each user's variable. The product rule is
/// symmetric, so only multisets of node indices are visited, weighted by
/// their multinomial counts. For `n = 1` this is the usual one-dimensional
/// rule `(1/√π) Σ w_i Q(√(2 r a 10^{(√2 σ x_i + μ)/10}), √λ)`.
pub fn psi_d_lognormal(
    lambda: f64,
    n: u32,
    r: u32,
    mu_db: f64,
    sigma_db: f64,
    sum_a: f64,
    order: usize,
) -> Result<f64> {
    const OP: &str = "psi_d_lognormal";
    let marcum_order = check_nr(OP, n, r)?;
    check_lambda(OP, lambda)?;
    check_sum_a(OP, sum_a)?;
    if !mu_db.is_finite() {
        return domain(OP, format!("mu must be finite, got {mu_db}"));
    }
    if !(sigma_db > 0.0) || !sigma_db.is_finite() {
        return domain(OP, format!("sigma must be positive, got {sigma_db}"));
    }
    let rule = gauss_hermite(order)?;
    if lambda == 0.0 {
        return Ok(1.0);
    }
    let points = multiset_count(order as u64, n as u64);
    if points > MAX_LOGNORMAL_POINTS {
        return domain(
            OP,
            format!(
                "product rule needs {points} points for n={n}, order={order} (limit {MAX_LOGNORMAL_POINTS})"
            ),
        );
    }
    let total_w: f64 = rule.weights().iter().sum();
    let probs: Vec<f64> = rule.weights().iter().map(|w| w / total_w).collect();
    let snrs: Vec<f64> = rule
        .nodes()
        .iter()
        .map(|x| crate::db_to_linear(std::f64::consts::SQRT_2 * sigma_db * x + mu_db))
        .collect();
    let scale = 2.0 * r as f64 * sum_a / n as f64;
    let b = lambda.sqrt();
    let eval =
        |snr_sum: f64| -> Result<f64> { marcum_q(marcum_order, (scale * snr_sum).sqrt(), b) };

    let l = snrs.len();
    let n_us = n as usize;
    let ln_n_fact = ln_gamma(n as f64 + 1.0);
    // split on the multiplicity of the first node and recurse over the rest
    let parts: Result<Vec<f64>> = (0..=n_us)
        .into_par_iter()
        .map(|c0| {
            let ln_w0 = c0 as f64 * probs[0].ln() - ln_gamma(c0 as f64 + 1.0);
            let mut acc = 0.0;
            product_rule(
                1,
                n_us - c0,
                ln_w0,
                c0 as f64 * snrs[0],
                &probs,
                &snrs,
                l,
                &mut |ln_w, snr_sum| {
                    acc += (ln_n_fact + ln_w).exp() * eval(snr_sum)?;
                    Ok(())
                },
            )?;
            Ok(acc)
        })
        .collect();
    let p: f64 = parts?.iter().sum();
    Ok(p.clamp(0.0, 1.0))
}

#[allow(clippy::too_many_arguments)]
fn product_rule(
    j: usize,
    remaining: usize,
    ln_w: f64,
    snr_sum: f64,
    probs: &[f64],
    snrs: &[f64],
    l: usize,
    visit: &mut dyn FnMut(f64, f64) -> Result<()>,
) -> Result<()> {
    if remaining == 0 {
        return visit(ln_w, snr_sum);
    }
    if j >= l {
        return Ok(());
    }
    if j == l - 1 {
        let c = remaining as f64;
        return visit(
            ln_w + c * probs[j].ln() - ln_gamma(c + 1.0),
            snr_sum + c * snrs[j],
        );
    }
    for c in 0..=remaining {
        let cf = c as f64;
        product_rule(
            j + 1,
            remaining - c,
            ln_w + cf * probs[j].ln() - ln_gamma(cf + 1.0),
            snr_sum + cf * snrs[j],
            probs,
            snrs,
            l,
            visit,
        )?;
    }
    Ok(())
}

/// Number of size-`n` multisets drawn from `l` items, saturating.
fn multiset_count(l: u64, n: u64) -> u64 {
    // C(l + n - 1, n)
    let mut acc: u128 = 1;
    for i in 0..n {
        acc = acc * (l + i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// A probability density over nonnegative SNR values.
pub trait SnrDensity: Sync {
    fn pdf(&self, x: f64) -> f64;

    /// Points where the density changes scale; adaptive integration splits
    /// its domain there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Gamma density with integer-or-real `shape` and `scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaDensity {
    pub shape: f64,
    pub scale: f64,
}

impl GammaDensity {
    /// Density of the effective SNR under Rayleigh fading with `n` users,
    /// mean SNR `mean_gamma` and weight sum `sum_a`.
    pub fn rayleigh(n: u32, mean_gamma: f64, sum_a: f64) -> Self {
        Self {
            shape: n as f64,
            scale: sum_a * mean_gamma / n as f64,
        }
    }

    /// Same for Nakagami-m fading.
    pub fn nakagami(n: u32, m: u32, mean_gamma: f64, sum_a: f64) -> Self {
        Self {
            shape: (m * n) as f64,
            scale: sum_a * mean_gamma / (m * n) as f64,
        }
    }
}

impl SnrDensity for GammaDensity {
    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return match self.shape.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Equal) => 1.0 / self.scale,
                Some(std::cmp::Ordering::Greater) => 0.0,
                _ => f64::INFINITY,
            };
        }
        let t = x / self.scale;
        ((self.shape - 1.0) * t.ln() - t - ln_gamma(self.shape)).exp() / self.scale
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mean = self.shape * self.scale;
        let sd = self.shape.sqrt() * self.scale;
        (-4..=12)
            .map(|k| mean + k as f64 * sd)
            .filter(|x| *x > 0.0)
            .collect()
    }
}

/// Lognormal SNR density: `10 log10 γ ~ N(mu_db, sigma_db²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LognormalDensity {
    pub mu_db: f64,
    pub sigma_db: f64,
}

impl SnrDensity for LognormalDensity {
    fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let xi = 10.0 / std::f64::consts::LN_10;
        let z = (10.0 * x.log10() - self.mu_db) / self.sigma_db;
        xi / ((2.0 * std::f64::consts::PI).sqrt() * self.sigma_db * x) * (-0.5 * z * z).exp()
    }

    fn breakpoints(&self) -> Vec<f64> {
        (-9..=9)
            .map(|k| crate::db_to_linear(self.mu_db + k as f64 * self.sigma_db))
            .collect()
    }
}

/// Wraps a closure as an [`SnrDensity`] with explicit breakpoints.
pub struct FnDensity<F> {
    pdf: F,
    breakpoints: Vec<f64>,
}

impl<F: Fn(f64) -> f64 + Sync> FnDensity<F> {
    pub fn new(pdf: F, breakpoints: Vec<f64>) -> Self {
        Self { pdf, breakpoints }
    }
}

impl<F: Fn(f64) -> f64 + Sync> SnrDensity for FnDensity<F> {
    fn pdf(&self, x: f64) -> f64 {
        (self.pdf)(x)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints.clone()
    }
}

const NUMERIC_TOL: Tolerance = Tolerance {
    abs: 1e-11,
    rel: 0.0,
    max_intervals: 20_000,
};

/// Detection probability by direct numeric averaging of
/// `Q_{nr}(√(2rx), √λ)` against the density of the effective SNR `x`.
///
/// Adaptive Gauss–Kronrod over `[0, ∞)`, split at the density's breakpoints.
/// Used as an independent check on the closed forms.
pub fn psi_d_numeric(lambda: f64, n: u32, r: u32, snr_density: &dyn SnrDensity) -> Result<f64> {
    let order = check_nr("psi_d_numeric", n, r)?;
    check_lambda("psi_d_numeric", lambda)?;
    let b = lambda.sqrt();
    let two_r = 2.0 * r as f64;
    let mut breaks = snr_density.breakpoints();
    breaks.push(lambda / two_r);
    let integrand = |x: f64| {
        let f = snr_density.pdf(x);
        if f == 0.0 {
            return 0.0;
        }
        let q = marcum_q(order, (two_r * x).sqrt(), b).expect("arguments are nonnegative");
        q * f
    };
    let res = integrate_with_breakpoints(integrand, 0.0, &breaks, NUMERIC_TOL)?;
    Ok(res.value.clamp(0.0, 1.0))
}

/// Grid intervals on `[0, λ]` for the coarse pass of [`psi_d_numeric_iid`];
/// the fine pass doubles it.
const CONVOLUTION_GRID: usize = 1024;

/// Detection probability for `n` users with independent, identically
/// distributed SNRs drawn from `per_user`, equal weights.
///
/// Works in the energy domain: the per-user H1 energy density
/// `∫ f(y | γ) p(γ) dγ` is tabulated on `[0, λ]`, convolved `n - 1` times
/// with the trapezoid rule, and the resulting CDF at `λ` is refined by one
/// Richardson step. This does not go through the effective-SNR
/// distribution at all, which makes it an independent check for channels
/// where the SNR sum has no closed-form density.
pub fn psi_d_numeric_iid(lambda: f64, n: u32, r: u32, per_user: &dyn SnrDensity) -> Result<f64> {
    check_nr("psi_d_numeric_iid", n, r)?;
    check_lambda("psi_d_numeric_iid", lambda)?;
    if n == 1 {
        return psi_d_numeric(lambda, 1, r, per_user);
    }
    if lambda == 0.0 {
        return Ok(1.0);
    }
    let fine = 2 * CONVOLUTION_GRID;
    let h = lambda / fine as f64;
    let breaks = per_user.breakpoints();
    let tol = Tolerance {
        abs: 1e-13,
        rel: 1e-12,
        max_intervals: 20_000,
    };
    let density: Result<Vec<f64>> = (0..=fine)
        .into_par_iter()
        .map(|k| {
            let y = k as f64 * h;
            let integrand = |g: f64| {
                let p = per_user.pdf(g);
                if p == 0.0 {
                    return 0.0;
                }
                p * energy_density(y, r, g, Hypothesis::H1).expect("arguments are nonnegative")
            };
            Ok(integrate_with_breakpoints(integrand, 0.0, &breaks, tol)?.value)
        })
        .collect();
    let density = density?;
    let coarse: Vec<f64> = density.iter().step_by(2).copied().collect();
    let cdf_fine = convolved_cdf(&density, n, h);
    let cdf_coarse = convolved_cdf(&coarse, n, 2.0 * h);
    let cdf = (4.0 * cdf_fine - cdf_coarse) / 3.0;
    Ok((1.0 - cdf).clamp(0.0, 1.0))
}

/// `∫_0^λ (g * g * ... * g)(s) ds` with `n` factors, trapezoid rule.
fn convolved_cdf(g: &[f64], n: u32, h: f64) -> f64 {
    let mut cur = g.to_vec();
    for _ in 1..n {
        cur = (0..g.len())
            .into_par_iter()
            .map(|k| {
                if k == 0 {
                    return 0.0;
                }
                let inner: f64 = (0..=k).map(|j| g[k - j] * cur[j]).sum();
                h * (inner - 0.5 * (g[k] * cur[0] + g[0] * cur[k]))
            })
            .collect();
    }
    let last = cur.len() - 1;
    h * (cur.iter().sum::<f64>() - 0.5 * (cur[0] + cur[last]))
}

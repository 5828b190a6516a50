//! Single-user energy-detector statistics.
//!
//! The detector output `Y` (energy normalized by the noise spectral density)
//! is central chi-square with `2r` degrees of freedom under H0 and
//! noncentral chi-square with noncentrality `2rγ` under H1, where `r` is the
//! time-bandwidth product and `γ` the received SNR.

use crate::error::{domain, Result};
use crate::specfun::{ln_gamma, log_bessel_i, marcum_q, regularized_upper_gamma};
use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, StandardNormal};

/// Band state being tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// White space: noise only.
    H0,
    /// Primary user present.
    H1,
}

/// Detector and cooperation parameters shared by every user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingParams {
    r: u32,
    n: u32,
    nu: f64,
    lambda: f64,
}

impl SensingParams {
    /// `r`: time-bandwidth product, `n`: cooperating users, `nu`: path-loss
    /// exponent, `lambda`: decision threshold on the combined energy.
    pub fn new(r: u32, n: u32, nu: f64, lambda: f64) -> Result<Self> {
        const OP: &str = "SensingParams::new";
        if r == 0 {
            return domain(OP, "time-bandwidth product r must be at least 1");
        }
        if n == 0 {
            return domain(OP, "user count n must be at least 1");
        }
        if !(nu > 0.0) || !nu.is_finite() {
            return domain(OP, format!("path-loss exponent must be positive, got {nu}"));
        }
        check_lambda(OP, lambda)?;
        Ok(Self { r, n, nu, lambda })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Chi-square half degrees of freedom of the combined statistic, `n·r`.
    pub fn order(&self) -> u32 {
        self.n * self.r
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        check_lambda("SensingParams::with_lambda", lambda)?;
        Ok(Self { lambda, ..self })
    }

    pub fn with_users(self, n: u32) -> Result<Self> {
        Self::new(self.r, n, self.nu, self.lambda)
    }
}

pub(crate) fn check_lambda(op: &'static str, lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) {
        return domain(op, format!("threshold must be nonnegative, got {lambda}"));
    }
    Ok(())
}

/// Per-user SNR statistics. All users are independent and identically
/// distributed; SNRs are stored linear, except the lognormal parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelModel {
    /// Deterministic SNR `gamma` on every branch.
    Awgn { gamma: f64 },
    /// Exponential SNR with mean `mean_gamma`.
    Rayleigh { mean_gamma: f64 },
    /// Gamma-distributed SNR with integer shape `m` and mean `mean_gamma`.
    Nakagami { m: u32, mean_gamma: f64 },
    /// `10 log10 γ` is normal with mean `mu_db` and deviation `sigma_db`.
    Lognormal { mu_db: f64, sigma_db: f64 },
}

impl ChannelModel {
    pub fn validate(&self) -> Result<()> {
        const OP: &str = "ChannelModel";
        match *self {
            ChannelModel::Awgn { gamma } => {
                if !(gamma >= 0.0) || !gamma.is_finite() {
                    return domain(OP, format!("AWGN SNR must be nonnegative, got {gamma}"));
                }
            }
            ChannelModel::Rayleigh { mean_gamma } => check_mean(OP, mean_gamma)?,
            ChannelModel::Nakagami { m, mean_gamma } => {
                if m == 0 {
                    return domain(OP, "Nakagami m must be a positive integer");
                }
                check_mean(OP, mean_gamma)?;
            }
            ChannelModel::Lognormal { mu_db, sigma_db } => {
                if !mu_db.is_finite() {
                    return domain(OP, format!("lognormal mu must be finite, got {mu_db}"));
                }
                if !(sigma_db > 0.0) || !sigma_db.is_finite() {
                    return domain(
                        OP,
                        format!("lognormal sigma must be positive, got {sigma_db}"),
                    );
                }
            }
        }
        Ok(())
    }

    /// Mean per-user SNR (linear).
    pub fn mean_snr(&self) -> f64 {
        match *self {
            ChannelModel::Awgn { gamma } => gamma,
            ChannelModel::Rayleigh { mean_gamma } | ChannelModel::Nakagami { mean_gamma, .. } => {
                mean_gamma
            }
            ChannelModel::Lognormal { mu_db, sigma_db } => {
                let s = sigma_db * std::f64::consts::LN_10 / 10.0;
                crate::db_to_linear(mu_db) * (0.5 * s * s).exp()
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ChannelModel::Awgn { .. } => "awgn",
            ChannelModel::Rayleigh { .. } => "rayleigh",
            ChannelModel::Nakagami { .. } => "nakagami",
            ChannelModel::Lognormal { .. } => "lognormal",
        }
    }
}

fn check_mean(op: &'static str, mean_gamma: f64) -> Result<()> {
    if !(mean_gamma > 0.0) || !mean_gamma.is_finite() {
        return domain(op, format!("mean SNR must be positive, got {mean_gamma}"));
    }
    Ok(())
}

/// Density of the normalized energy `Y` under hypothesis `h`.
///
/// The H1 density is assembled in log domain so large noncentralities do not
/// overflow the Bessel factor.
pub fn energy_density(y: f64, r: u32, gamma: f64, h: Hypothesis) -> Result<f64> {
    const OP: &str = "energy_density";
    if !(y >= 0.0) {
        return domain(OP, format!("energy must be nonnegative, got {y}"));
    }
    if r == 0 {
        return domain(OP, "r must be at least 1");
    }
    if !(gamma >= 0.0) {
        return domain(OP, format!("SNR must be nonnegative, got {gamma}"));
    }
    let rf = r as f64;
    let delta = 2.0 * rf * gamma;
    if h == Hypothesis::H0 || delta == 0.0 {
        if y == 0.0 {
            return Ok(if r == 1 { 0.5 } else { 0.0 });
        }
        let ln_f = (rf - 1.0) * y.ln() - 0.5 * y - rf * std::f64::consts::LN_2 - ln_gamma(rf);
        return Ok(ln_f.exp());
    }
    if y == 0.0 {
        return Ok(if r == 1 {
            0.5 * (-0.5 * delta).exp()
        } else {
            0.0
        });
    }
    let nu = rf - 1.0;
    let ln_f = -std::f64::consts::LN_2 + 0.5 * nu * (y.ln() - delta.ln()) - 0.5 * (delta + y)
        + log_bessel_i(nu, (delta * y).sqrt())?;
    Ok(ln_f.exp())
}

/// Single-user false-alarm probability `Γ(r, λ/2) / Γ(r)`.
pub fn single_pf(lambda: f64, r: u32) -> Result<f64> {
    check_lambda("single_pf", lambda)?;
    if r == 0 {
        return domain("single_pf", "r must be at least 1");
    }
    regularized_upper_gamma(r as f64, 0.5 * lambda)
}

/// Single-user AWGN detection probability `Q_r(√(2rγ), √λ)`.
pub fn single_pd_awgn(lambda: f64, r: u32, gamma: f64) -> Result<f64> {
    check_lambda("single_pd_awgn", lambda)?;
    if !(gamma >= 0.0) {
        return domain(
            "single_pd_awgn",
            format!("SNR must be nonnegative, got {gamma}"),
        );
    }
    marcum_q(r, (2.0 * r as f64 * gamma).sqrt(), lambda.sqrt())
}

/// Draws one normalized energy.
///
/// Built as a sum of `2r` squared unit-variance Gaussians; under H1 each
/// component has mean `√γ`, giving total noncentrality `2rγ`.
pub fn sample_energy<R: Rng + ?Sized>(rng: &mut R, r: u32, gamma: f64, h: Hypothesis) -> f64 {
    let shift = match h {
        Hypothesis::H0 => 0.0,
        Hypothesis::H1 => gamma.sqrt(),
    };
    (0..2 * r)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            let v = z + shift;
            v * v
        })
        .sum()
}

/// Draws one per-user SNR (linear) from `model`.
///
/// The model is assumed valid; see [`ChannelModel::validate`].
pub fn sample_snr<R: Rng + ?Sized>(rng: &mut R, model: &ChannelModel) -> f64 {
    match *model {
        ChannelModel::Awgn { gamma } => gamma,
        ChannelModel::Rayleigh { mean_gamma } => Exp::new(1.0 / mean_gamma)
            .expect("validated mean")
            .sample(rng),
        ChannelModel::Nakagami { m, mean_gamma } => Gamma::new(m as f64, mean_gamma / m as f64)
            .expect("validated Nakagami parameters")
            .sample(rng),
        ChannelModel::Lognormal { mu_db, sigma_db } => {
            let z: f64 = StandardNormal.sample(rng);
            crate::db_to_linear(mu_db + sigma_db * z)
        }
    }
}

//! Run configuration: a flat TOML file of typed keys with unit suffixes.

use coopsense::ChannelModel;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Awgn,
    Rayleigh,
    Nakagami,
    Lognormal,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::Awgn,
        ModelKind::Rayleigh,
        ModelKind::Nakagami,
        ModelKind::Lognormal,
    ];
}

/// Every knob the subcommands read. Unset keys take the defaults below,
/// which follow the reference figure setups (r = 1, ν = 4, 6 dB mean SNR;
/// 1 dB / 6 dB lognormal shadowing).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelKind,
    pub r: u32,
    pub users: Vec<u32>,
    pub nu: f64,
    pub mean_snr_db: f64,
    pub nakagami_m: u32,
    pub mu_db: f64,
    pub sigma_db: f64,
    pub quadrature_order: usize,
    /// Mean WC weight `a/n`; WC rows are emitted when set.
    pub wc_mean_weight: Option<f64>,
    /// User distances to the primary transmitter; a run with `n` users takes
    /// the first `n`.
    pub distances_m: Vec<f64>,
    pub pf_min: f64,
    pub pf_max: f64,
    pub pf_points: usize,
    pub target_pd: Vec<f64>,
    pub target_pf: Vec<f64>,
    pub validate_models: Vec<ModelKind>,
    pub validate_r: Vec<u32>,
    pub validate_pf: Vec<f64>,
    /// Mean SNR for the AWGN, Rayleigh and Nakagami validation cells.
    pub validate_snr_db: f64,
    /// Hermite order for the lognormal validation cells.
    pub validate_quadrature_order: usize,
    pub trials: u64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Rayleigh,
            r: 1,
            users: vec![1, 2, 3, 4, 5],
            nu: 4.0,
            mean_snr_db: 6.0,
            nakagami_m: 2,
            mu_db: 1.0,
            sigma_db: 6.0,
            quadrature_order: coopsense::DEFAULT_HERMITE_ORDER,
            wc_mean_weight: None,
            distances_m: vec![200.0, 350.0, 500.0, 650.0, 800.0],
            pf_min: 1e-4,
            pf_max: 1.0,
            pf_points: 40,
            target_pd: vec![0.9],
            target_pf: vec![0.1],
            validate_models: ModelKind::ALL.to_vec(),
            validate_r: vec![1, 2],
            validate_pf: vec![0.01, 0.1, 0.5],
            validate_snr_db: 0.0,
            validate_quadrature_order: 31,
            trials: 100_000,
            seed: 0x5eed_c0de,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every field against the library preconditions.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, msg: String| Err(CliError::Config(format!("{field}: {msg}")));
        if self.r == 0 {
            return bad("r", "must be at least 1".into());
        }
        if self.users.is_empty() || self.users.contains(&0) {
            return bad("users", "must be a nonempty list of positive counts".into());
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return bad("nu", format!("must be positive, got {}", self.nu));
        }
        for (field, v) in [
            ("mean_snr_db", self.mean_snr_db),
            ("mu_db", self.mu_db),
            ("validate_snr_db", self.validate_snr_db),
        ] {
            if !v.is_finite() {
                return bad(field, format!("must be finite, got {v}"));
            }
        }
        if self.nakagami_m == 0 {
            return bad("nakagami_m", "must be at least 1".into());
        }
        if !(self.sigma_db > 0.0 && self.sigma_db.is_finite()) {
            return bad(
                "sigma_db",
                format!("must be positive, got {}", self.sigma_db),
            );
        }
        for (field, order) in [
            ("quadrature_order", self.quadrature_order),
            ("validate_quadrature_order", self.validate_quadrature_order),
        ] {
            if !(1..=coopsense::specfun::MAX_HERMITE_ORDER).contains(&order) {
                return bad(
                    field,
                    format!(
                        "must lie in [1, {}], got {order}",
                        coopsense::specfun::MAX_HERMITE_ORDER
                    ),
                );
            }
        }
        if let Some(w) = self.wc_mean_weight {
            if !(w > 0.0 && w.is_finite()) {
                return bad("wc_mean_weight", format!("must be positive, got {w}"));
            }
        }
        if let Some(d) = self
            .distances_m
            .iter()
            .find(|d| !(**d > 0.0 && d.is_finite()))
        {
            return bad(
                "distances_m",
                format!("distances must be positive, got {d}"),
            );
        }
        if !(self.pf_min > 0.0 && self.pf_min < self.pf_max && self.pf_max <= 1.0) {
            return bad(
                "pf_min/pf_max",
                format!(
                    "need 0 < pf_min < pf_max <= 1, got {} and {}",
                    self.pf_min, self.pf_max
                ),
            );
        }
        if self.pf_points < 2 {
            return bad("pf_points", "must be at least 2".into());
        }
        for (field, list) in [
            ("target_pd", &self.target_pd),
            ("target_pf", &self.target_pf),
            ("validate_pf", &self.validate_pf),
        ] {
            if list.is_empty() {
                return bad(field, "must not be empty".into());
            }
            if let Some(p) = list.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
                return bad(field, format!("probabilities must lie in (0, 1), got {p}"));
            }
        }
        if self.validate_models.is_empty() {
            return bad("validate_models", "must not be empty".into());
        }
        if self.validate_r.is_empty() || self.validate_r.contains(&0) {
            return bad(
                "validate_r",
                "must be a nonempty list of positive values".into(),
            );
        }
        if self.trials == 0 {
            return bad("trials", "must be at least 1".into());
        }
        Ok(())
    }

    /// Channel model of the configured kind at mean SNR `snr_db`. For the
    /// lognormal model `snr_db` replaces `mu_db`.
    pub fn channel(&self, kind: ModelKind, snr_db: f64) -> ChannelModel {
        let g = coopsense::db_to_linear(snr_db);
        match kind {
            ModelKind::Awgn => ChannelModel::Awgn { gamma: g },
            ModelKind::Rayleigh => ChannelModel::Rayleigh { mean_gamma: g },
            ModelKind::Nakagami => ChannelModel::Nakagami {
                m: self.nakagami_m,
                mean_gamma: g,
            },
            ModelKind::Lognormal => ChannelModel::Lognormal {
                mu_db: snr_db,
                sigma_db: self.sigma_db,
            },
        }
    }

    /// The configured model at its configured mean SNR.
    pub fn base_channel(&self) -> ChannelModel {
        self.channel(self.model, self.base_snr_db(self.model))
    }

    pub fn base_snr_db(&self, kind: ModelKind) -> f64 {
        match kind {
            ModelKind::Lognormal => self.mu_db,
            _ => self.mean_snr_db,
        }
    }

    /// First `n` configured distances.
    pub fn distances_for(&self, n: u32) -> Result<Vec<f64>, CliError> {
        let n = n as usize;
        if self.distances_m.len() < n {
            return Err(CliError::Config(format!(
                "distances_m: {n} users need {n} distances, only {} given",
                self.distances_m.len()
            )));
        }
        Ok(self.distances_m[..n].to_vec())
    }

    /// Logarithmic false-alarm grid from `pf_min` to `pf_max`, ascending.
    pub fn pf_grid(&self) -> Vec<f64> {
        let (lo, hi) = (self.pf_min.ln(), self.pf_max.ln());
        let last = self.pf_points - 1;
        (0..self.pf_points)
            .map(|i| match i {
                0 => self.pf_min,
                i if i == last => self.pf_max,
                i => (lo + (hi - lo) * i as f64 / last as f64).exp(),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn round_trip() {
        let cfg = RunConfig {
            model: ModelKind::Lognormal,
            wc_mean_weight: Some(1.25),
            users: vec![2, 7],
            seed: u64::MAX,
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::parse(&cfg.to_toml()).unwrap(), cfg);
        let d = RunConfig::default();
        assert_eq!(RunConfig::parse(&d.to_toml()).unwrap(), d);
    }

    #[test]
    fn field_level_errors() {
        let msg = |text: &str| match RunConfig::parse(text) {
            Err(CliError::Config(m)) => m,
            other => panic!("expected config error, got {other:?}"),
        };
        assert!(msg("r = 0").starts_with("r:"));
        assert!(msg("pf_min = -1.0").starts_with("pf_min"));
        assert!(msg("target_pd = [1.5]").starts_with("target_pd"));
        assert!(msg("model = \"rician\"").contains("model"));
        assert!(msg("bogus = 1").contains("bogus"));
    }

    #[test]
    fn pf_grid_hits_endpoints() {
        let g = RunConfig::default().pf_grid();
        assert_eq!(g.len(), 40);
        assert_eq!((g[0], g[39]), (1e-4, 1.0));
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}

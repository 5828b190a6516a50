//! Seeded Monte Carlo estimates of cooperative detection and false alarm.
//!
//! Each trial draws per-user SNRs and energies, fuses them the way a band
//! manager would and compares the combined statistic with the threshold.
//! Trial `k` under hypothesis `h` uses its own ChaCha stream derived from
//! `(seed, k, h)`, so the result does not depend on how trials are spread
//! across threads. Counts are integers and are aggregated exactly.

use crate::channel::{sample_energy, sample_snr, ChannelModel, Hypothesis, SensingParams};
use crate::error::{domain, Error, Result};
use crate::fusion::{combine, egc_weights, wc_weights, UserReport, WeightVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// How the band manager weights the users' reports.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightMode {
    /// Plain sum of the reports.
    Egc,
    /// A weight vector fixed for the whole run.
    WcFixed { weights: WeightVector },
    /// Weights recomputed every trial from that trial's energies and the
    /// scenario distances.
    WcAdaptive,
}

impl WeightMode {
    pub fn name(&self) -> &'static str {
        match self {
            WeightMode::Egc => "egc",
            WeightMode::WcFixed { .. } => "wc-fixed",
            WeightMode::WcAdaptive => "wc-adaptive",
        }
    }
}

/// A simulation run description.
#[derive(Debug, Clone, PartialEq)]
pub struct SimScenario {
    params: SensingParams,
    model: ChannelModel,
    distances: Vec<f64>,
    weight_mode: WeightMode,
    trials: u64,
    seed: u64,
}

impl SimScenario {
    pub fn new(
        params: SensingParams,
        model: ChannelModel,
        distances: Vec<f64>,
        weight_mode: WeightMode,
        trials: u64,
        seed: u64,
    ) -> Result<Self> {
        const OP: &str = "SimScenario::new";
        model.validate()?;
        let n = params.n() as usize;
        if distances.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: distances.len(),
            });
        }
        if let Some(d) = distances.iter().find(|d| !(**d > 0.0) || !d.is_finite()) {
            return domain(OP, format!("distances must be positive, got {d}"));
        }
        if let WeightMode::WcFixed { weights } = &weight_mode {
            if weights.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: weights.len(),
                });
            }
        }
        if trials == 0 {
            return domain(OP, "trials must be at least 1");
        }
        if trials > 1 << 62 {
            return domain(OP, format!("too many trials: {trials}"));
        }
        Ok(Self {
            params,
            model,
            distances,
            weight_mode,
            trials,
            seed,
        })
    }

    pub fn params(&self) -> &SensingParams {
        &self.params
    }

    pub fn model(&self) -> &ChannelModel {
        &self.model
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn weight_mode(&self) -> &WeightMode {
        &self.weight_mode
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_params(self, params: SensingParams) -> Result<Self> {
        Self::new(
            params,
            self.model,
            self.distances,
            self.weight_mode,
            self.trials,
            self.seed,
        )
    }
}

/// Detection and false-alarm estimates with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub psi_d_hat: f64,
    pub psi_f_hat: f64,
    pub stderr_d: f64,
    pub stderr_f: f64,
    /// Trials per hypothesis.
    pub trials: u64,
    /// Trials (both hypotheses) where adaptive weighting fell back to equal
    /// weights.
    pub degenerate_fallbacks: u64,
}

impl SimEstimate {
    fn from_counts(detections: u64, false_alarms: u64, trials: u64, fallbacks: u64) -> Self {
        let t = trials as f64;
        let pd = detections as f64 / t;
        let pf = false_alarms as f64 / t;
        Self {
            psi_d_hat: pd,
            psi_f_hat: pf,
            stderr_d: (pd * (1.0 - pd) / t).sqrt(),
            stderr_f: (pf * (1.0 - pf) / t).sqrt(),
            trials,
            degenerate_fallbacks: fallbacks,
        }
    }
}

/// Runs the scenario at its own threshold.
pub fn simulate(scenario: &SimScenario) -> Result<SimEstimate> {
    let lambda = scenario.params.lambda();
    let mut curve = simulate_curve(scenario, &[lambda])?;
    Ok(curve.pop().expect("one threshold").1)
}

/// Runs the scenario once and evaluates every threshold in `lambda_grid`
/// on the same samples, so both estimates are nonincreasing along the grid.
pub fn simulate_curve(
    scenario: &SimScenario,
    lambda_grid: &[f64],
) -> Result<Vec<(f64, SimEstimate)>> {
    const OP: &str = "simulate_curve";
    if lambda_grid.is_empty() {
        return domain(OP, "threshold grid is empty");
    }
    for (i, &l) in lambda_grid.iter().enumerate() {
        crate::channel::check_lambda(OP, l)?;
        if i > 0 && l <= lambda_grid[i - 1] {
            return domain(OP, "threshold grid must be strictly increasing");
        }
    }
    let egc = egc_weights(scenario.params.n() as usize)?;
    let (h1, fb1) = run_hypothesis(scenario, &egc, Hypothesis::H1)?;
    let (h0, fb0) = run_hypothesis(scenario, &egc, Hypothesis::H0)?;
    let fallbacks = fb0 + fb1;
    Ok(lambda_grid
        .iter()
        .map(|&l| {
            let det = exceed_count(&h1, l);
            let fa = exceed_count(&h0, l);
            (
                l,
                SimEstimate::from_counts(det, fa, scenario.trials, fallbacks),
            )
        })
        .collect())
}

/// Number of sorted statistics strictly above `lambda`.
fn exceed_count(sorted: &[f64], lambda: f64) -> u64 {
    (sorted.len() - sorted.partition_point(|&y| y <= lambda)) as u64
}

/// Combined statistics of every trial under `h`, sorted, plus the number
/// of weighting fallbacks.
fn run_hypothesis(sc: &SimScenario, egc: &WeightVector, h: Hypothesis) -> Result<(Vec<f64>, u64)> {
    let tag = match h {
        Hypothesis::H0 => 0,
        Hypothesis::H1 => 1,
    };
    let results: Result<Vec<(f64, bool)>> = (0..sc.trials)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(sc.params.n() as usize),
            |energies, k| {
                let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
                rng.set_stream((k << 1) | tag);
                trial_statistic(sc, egc, h, &mut rng, energies)
            },
        )
        .collect();
    let results = results?;
    let fallbacks = results.iter().filter(|(_, fb)| *fb).count() as u64;
    let mut stats: Vec<f64> = results.into_iter().map(|(y, _)| y).collect();
    stats.sort_unstable_by(f64::total_cmp);
    Ok((stats, fallbacks))
}

fn trial_statistic(
    sc: &SimScenario,
    egc: &WeightVector,
    h: Hypothesis,
    rng: &mut ChaCha8Rng,
    energies: &mut Vec<f64>,
) -> Result<(f64, bool)> {
    let r = sc.params.r();
    energies.clear();
    for _ in 0..sc.params.n() {
        let gamma = match h {
            Hypothesis::H0 => 0.0,
            Hypothesis::H1 => sample_snr(rng, &sc.model),
        };
        energies.push(sample_energy(rng, r, gamma, h));
    }
    match &sc.weight_mode {
        WeightMode::Egc => Ok((combine(egc, energies)?, false)),
        WeightMode::WcFixed { weights } => Ok((combine(weights, energies)?, false)),
        WeightMode::WcAdaptive => {
            let reports: Result<Vec<UserReport>> = energies
                .iter()
                .zip(&sc.distances)
                .map(|(&y, &d)| UserReport::new(y, d))
                .collect();
            match wc_weights(&reports?, sc.params.nu()) {
                Ok(w) => Ok((combine(&w, energies)?, w.degenerate_fallback())),
                Err(Error::NoSignal) => Ok((combine(egc, energies)?, true)),
                Err(e) => Err(e),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{psi_d_awgn, psi_f, threshold_for_pf};

    fn scenario(mode: WeightMode, model: ChannelModel, lambda: f64, trials: u64) -> SimScenario {
        let p = SensingParams::new(1, 3, 4.0, lambda).unwrap();
        SimScenario::new(p, model, vec![100.0, 200.0, 400.0], mode, trials, 7).unwrap()
    }

    #[test]
    fn rejects_bad_scenarios() {
        let p = SensingParams::new(1, 3, 4.0, 1.0).unwrap();
        let m = ChannelModel::Awgn { gamma: 1.0 };
        assert!(SimScenario::new(p, m, vec![1.0; 2], WeightMode::Egc, 10, 0).is_err());
        assert!(SimScenario::new(p, m, vec![1.0, 2.0, -1.0], WeightMode::Egc, 10, 0).is_err());
        assert!(SimScenario::new(p, m, vec![1.0; 3], WeightMode::Egc, 0, 0).is_err());
        let w = WeightMode::WcFixed {
            weights: WeightVector::new(vec![1.0, 1.0]).unwrap(),
        };
        assert!(SimScenario::new(p, m, vec![1.0; 3], w, 10, 0).is_err());
    }

    #[test]
    fn zero_threshold_always_fires() {
        let sc = scenario(
            WeightMode::Egc,
            ChannelModel::Rayleigh { mean_gamma: 2.0 },
            0.0,
            500,
        );
        let e = simulate(&sc).unwrap();
        assert_eq!((e.psi_d_hat, e.psi_f_hat), (1.0, 1.0));
        assert_eq!((e.stderr_d, e.stderr_f), (0.0, 0.0));
    }

    #[test]
    fn unit_fixed_weights_match_egc_exactly() {
        let m = ChannelModel::Nakagami {
            m: 2,
            mean_gamma: 3.0,
        };
        let a = simulate(&scenario(WeightMode::Egc, m, 9.0, 4000)).unwrap();
        let w = WeightMode::WcFixed {
            weights: WeightVector::new(vec![1.0; 3]).unwrap(),
        };
        let b = simulate(&scenario(w, m, 9.0, 4000)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn awgn_agrees_with_closed_form() {
        let gamma = crate::db_to_linear(6.0);
        let lam = threshold_for_pf(0.063, 3, 1).unwrap();
        let e = simulate(&scenario(
            WeightMode::Egc,
            ChannelModel::Awgn { gamma },
            lam,
            100_000,
        ))
        .unwrap();
        let pd = psi_d_awgn(lam, 3, 1, 3.0 * gamma).unwrap();
        let pf = psi_f(lam, 3, 1).unwrap();
        assert!(
            (e.psi_d_hat - pd).abs() <= 3.0 * e.stderr_d,
            "{e:?} vs {pd}"
        );
        assert!(
            (e.psi_f_hat - pf).abs() <= 3.0 * e.stderr_f,
            "{e:?} vs {pf}"
        );
    }

    #[test]
    fn same_seed_same_result_any_pool_size() {
        let sc = scenario(
            WeightMode::WcAdaptive,
            ChannelModel::Lognormal {
                mu_db: 1.0,
                sigma_db: 6.0,
            },
            6.0,
            3000,
        );
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_curve(&sc, &[2.0, 6.0, 12.0]).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(3));
        assert_eq!(one, run(8));
    }

    #[test]
    fn curve_is_monotone_and_matches_single_runs() {
        let m = ChannelModel::Rayleigh { mean_gamma: 4.0 };
        let sc = scenario(WeightMode::Egc, m, 5.0, 5000);
        let grid = [1.0, 3.0, 5.0, 8.0, 13.0];
        let curve = simulate_curve(&sc, &grid).unwrap();
        for w in curve.windows(2) {
            assert!(w[1].1.psi_d_hat <= w[0].1.psi_d_hat);
            assert!(w[1].1.psi_f_hat <= w[0].1.psi_f_hat);
        }
        assert_eq!(curve[2].1, simulate(&sc).unwrap());
        assert!(simulate_curve(&sc, &[2.0, 2.0]).is_err());
        assert!(simulate_curve(&sc, &[]).is_err());
    }

    #[test]
    fn seeds_change_samples() {
        let m = ChannelModel::Rayleigh { mean_gamma: 4.0 };
        let a = scenario(WeightMode::Egc, m, 6.0, 2000);
        let mut b = a.clone();
        b.seed = 8;
        assert_ne!(simulate(&a).unwrap(), simulate(&b).unwrap());
    }
}

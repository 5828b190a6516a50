//! Quick identity and oracle checks across every module.

use coopsense::analytic::{psi_d_lognormal, psi_d_nakagami, psi_d_rayleigh};
use coopsense::fusion::{egc_weights, wc_weights};
use coopsense::montecarlo::{simulate, simulate_curve, SimScenario, WeightMode};
use coopsense::specfun::{inverse_regularized_upper_gamma, ln_gamma, regularized_upper_gamma};
use coopsense::{
    psi_d_awgn, psi_f, threshold_for_pf, ChannelModel, SensingParams, UserReport, WeightVector,
};

use crate::config::RunConfig;
use crate::oracle;
use crate::output::Cell;
use crate::Report;

type Check = (&'static str, &'static str, fn() -> Result<bool, String>);

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn sweep(s: coopsense::Result<oracle::OracleSweep>, tol: f64) -> Result<bool, String> {
    let s = s.map_err(e)?;
    if s.worst <= tol {
        Ok(true)
    } else {
        Err(format!(
            "worst relative error {:e} at {}",
            s.worst, s.worst_at
        ))
    }
}

const CHECKS: &[Check] = &[
    ("specfun", "ln_gamma matches factorials", || {
        Ok((1..20).all(|k| {
            let f: f64 = (1..k).map(|i| i as f64).product();
            close(ln_gamma(k as f64), f.ln(), 1e-12)
        }))
    }),
    ("specfun", "upper gamma inverse round trip", || {
        let x = inverse_regularized_upper_gamma(3.0, 0.1).map_err(e)?;
        Ok(close(
            regularized_upper_gamma(3.0, x).map_err(e)?,
            0.1,
            1e-13,
        ))
    }),
    ("specfun", "marcum_q against integral", || {
        sweep(oracle::sweep_marcum(), 1e-8)
    }),
    ("specfun", "upper gamma against integral", || {
        sweep(oracle::sweep_upper_gamma(), 1e-8)
    }),
    ("specfun", "kummer_1f1 against integral and series", || {
        sweep(oracle::sweep_kummer(), 1e-8)
    }),
    ("specfun", "log_bessel_i against integral", || {
        sweep(oracle::sweep_bessel(), 1e-8)
    }),
    ("specfun", "gauss_hermite moments", || {
        sweep(oracle::sweep_hermite(), 1e-10)
    }),
    (
        "channel",
        "single-user false alarm is exp(-lambda/2)",
        || {
            Ok(close(
                coopsense::channel::single_pf(3.0, 1).map_err(e)?,
                (-1.5f64).exp(),
                1e-15,
            ))
        },
    ),
    ("fusion", "two-user weighted combining example", || {
        let reps = [
            UserReport::new(10.0, 100.0).map_err(e)?,
            UserReport::new(1000.0, 1000.0).map_err(e)?,
        ];
        let w = wc_weights(&reps, 4.0).map_err(e)?;
        Ok(close(w.weights()[0], 0.575_154_381_186_541_4, 1e-12)
            && close(w.weights()[1], 0.285_695_285_187_797_2, 1e-12))
    }),
    ("fusion", "single user falls back to unit weight", || {
        let w = wc_weights(&[UserReport::new(3.0, 100.0).map_err(e)?], 4.0).map_err(e)?;
        Ok(w.weights() == [1.0] && egc_weights(1).map_err(e)?.weights() == [1.0])
    }),
    ("analytic", "zero threshold gives certainty", || {
        Ok(psi_f(0.0, 3, 2).map_err(e)? == 1.0 && threshold_for_pf(1.0, 3, 2).map_err(e)? == 0.0)
    }),
    ("analytic", "zero SNR detection equals false alarm", || {
        Ok([0.5, 4.0, 12.0].iter().all(|&l| {
            close(
                psi_d_awgn(l, 3, 2, 0.0).unwrap(),
                psi_f(l, 3, 2).unwrap(),
                1e-10,
            )
        }))
    }),
    ("analytic", "Nakagami m=1 equals Rayleigh", || {
        Ok([1.0, 6.0, 15.0].iter().all(|&l| {
            close(
                psi_d_nakagami(l, 3, 2, 1, 4.0, 3.0).unwrap(),
                psi_d_rayleigh(l, 3, 2, 4.0, 3.0).unwrap(),
                1e-12,
            )
        }))
    }),
    (
        "analytic",
        "lognormal with vanishing spread is AWGN",
        || {
            let v = psi_d_lognormal(8.0, 3, 1, 1.0, 1e-4, 3.0, 5).map_err(e)?;
            let awgn = psi_d_awgn(8.0, 3, 1, 3.0 * coopsense::db_to_linear(1.0)).map_err(e)?;
            Ok(close(v, awgn, 1e-4))
        },
    ),
    ("montecarlo", "zero threshold always fires", || {
        let p = SensingParams::new(1, 3, 4.0, 0.0).map_err(e)?;
        let sc = SimScenario::new(
            p,
            ChannelModel::Rayleigh { mean_gamma: 2.0 },
            vec![100.0, 200.0, 300.0],
            WeightMode::Egc,
            1000,
            1,
        )
        .map_err(e)?;
        let est = simulate(&sc).map_err(e)?;
        Ok(est.psi_d_hat == 1.0 && est.psi_f_hat == 1.0)
    }),
    (
        "montecarlo",
        "unit fixed weights reproduce EGC exactly",
        || {
            let p = SensingParams::new(1, 3, 4.0, 6.0).map_err(e)?;
            let model = ChannelModel::Nakagami {
                m: 2,
                mean_gamma: 2.0,
            };
            let d = vec![100.0, 200.0, 300.0];
            let egc = SimScenario::new(p, model, d.clone(), WeightMode::Egc, 2000, 3).map_err(e)?;
            let wc = SimScenario::new(
                p,
                model,
                d,
                WeightMode::WcFixed {
                    weights: WeightVector::new(vec![1.0; 3]).map_err(e)?,
                },
                2000,
                3,
            )
            .map_err(e)?;
            Ok(simulate(&egc).map_err(e)? == simulate(&wc).map_err(e)?)
        },
    ),
    ("montecarlo", "one-point curve equals simulate", || {
        let p = SensingParams::new(2, 2, 4.0, 7.0).map_err(e)?;
        let sc = SimScenario::new(
            p,
            ChannelModel::Lognormal {
                mu_db: 1.0,
                sigma_db: 6.0,
            },
            vec![100.0, 300.0],
            WeightMode::WcAdaptive,
            2000,
            5,
        )
        .map_err(e)?;
        Ok(simulate_curve(&sc, &[7.0]).map_err(e)?[0].1 == simulate(&sc).map_err(e)?)
    }),
    ("cli", "config round trip", || {
        let cfg = RunConfig {
            wc_mean_weight: Some(1.5),
            ..RunConfig::default()
        };
        Ok(RunConfig::parse(&cfg.to_toml()).map_err(e)? == cfg)
    }),
    ("cli", "ROC ends at psi_f = 1, psi_m = 0", || {
        let cfg = RunConfig {
            users: vec![3],
            pf_points: 5,
            ..RunConfig::default()
        };
        let t = crate::commands::roc(&cfg, None).map_err(e)?;
        let last = t.rows.last().ok_or("empty table")?;
        Ok(last[t.column("psi_f")] == Cell::Num(1.0) && last[t.column("psi_m")] == Cell::Num(0.0))
    }),
    ("cli", "near-chance SNR requirement is near zero", || {
        let cfg = RunConfig {
            users: vec![1, 5],
            target_pd: vec![0.101],
            target_pf: vec![0.1],
            ..RunConfig::default()
        };
        let t = crate::commands::snr_requirement(&cfg, None).map_err(e)?;
        let c = t.column("required_snr_db");
        Ok(t.rows
            .iter()
            .all(|r| r[c].as_num().is_some_and(|db| db < -20.0)))
    }),
    (
        "cli",
        "chance-level SNR requirement clamps at the floor",
        || {
            let cfg = RunConfig {
                users: vec![1, 5],
                target_pd: vec![0.1 + 1e-9],
                target_pf: vec![0.1],
                ..RunConfig::default()
            };
            let t = crate::commands::snr_requirement(&cfg, None).map_err(e)?;
            let c = t.column("required_snr_db");
            Ok(t.rows
                .iter()
                .all(|r| r[c] == Cell::Num(crate::commands::SNR_FLOOR_DB)))
        },
    ),
];

/// Runs every check and returns a per-module summary.
pub fn run() -> Report {
    let mut text = String::new();
    let mut failures = Vec::new();
    let mut modules: Vec<(&str, usize, usize)> = Vec::new();
    for (module, name, check) in CHECKS {
        let outcome = check();
        let ok = matches!(outcome, Ok(true));
        let detail = match outcome {
            Ok(true) => "ok".to_string(),
            Ok(false) => "FAILED".to_string(),
            Err(msg) => format!("FAILED ({msg})"),
        };
        text.push_str(&format!("{module}: {name} ... {detail}\n"));
        if !ok {
            failures.push(format!("{module}: {name}"));
        }
        match modules.iter_mut().find(|(m, _, _)| m == module) {
            Some(entry) => {
                entry.1 += ok as usize;
                entry.2 += 1;
            }
            None => modules.push((module, ok as usize, 1)),
        }
    }
    text.push('\n');
    for (module, passed, total) in &modules {
        text.push_str(&format!("{module}: {passed}/{total} passed\n"));
    }
    let total: usize = modules.iter().map(|m| m.2).sum();
    text.push_str(&format!(
        "selftest: {} of {total} checks passed\n",
        total - failures.len()
    ));
    Report { text, failures }
}

//! Sweep and validation commands.

use coopsense::montecarlo::{simulate_curve, SimScenario, WeightMode};
use coopsense::{
    psi_f, threshold_for_pf, ChannelModel, CooperativeScenario, SensingParams, WeightVector,
};
use rayon::prelude::*;

use crate::config::{ModelKind, RunConfig};
use crate::output::{Cell, Table};
use crate::{CliError, Scheme};

/// Slack for monotonicity checks on closed-form curves.
const MONOTONE_SLACK: f64 = 1e-12;
/// Required agreement of a solved detection probability with its target.
pub const PD_TOLERANCE: f64 = 1e-6;
pub const SNR_FLOOR_DB: f64 = -60.0;
pub const SNR_CEIL_DB: f64 = 60.0;

/// Closed-form schemes to emit and their weight-sum factor `a/n`.
fn closed_form_schemes(
    cfg: &RunConfig,
    scheme: Option<Scheme>,
) -> Result<Vec<(Scheme, f64)>, CliError> {
    let wc = || {
        cfg.wc_mean_weight.ok_or_else(|| {
            CliError::Config("wc_mean_weight: required for the wc-fixed scheme".into())
        })
    };
    match scheme {
        None => {
            let mut out = vec![(Scheme::Egc, 1.0)];
            if let Some(c) = cfg.wc_mean_weight {
                out.push((Scheme::WcFixed, c));
            }
            Ok(out)
        }
        Some(Scheme::Egc) => Ok(vec![(Scheme::Egc, 1.0)]),
        Some(Scheme::WcFixed) => Ok(vec![(Scheme::WcFixed, wc()?)]),
        Some(Scheme::WcAdaptive) => Err(CliError::Config(
            "scheme: wc-adaptive has no closed form; use roc or validate".into(),
        )),
    }
}

/// Closed-form detection probability for `n` users at threshold `lambda`.
pub fn closed_form_pd(
    cfg: &RunConfig,
    model: ChannelModel,
    n: u32,
    r: u32,
    lambda: f64,
    sum_a: f64,
) -> Result<f64, CliError> {
    let params = SensingParams::new(r, n, cfg.nu, lambda)?;
    let sc =
        CooperativeScenario::new(params, model, sum_a)?.with_hermite_order(cfg.quadrature_order)?;
    Ok(sc.psi_d()?)
}

/// Threshold at which the closed-form detection probability equals `target`.
pub fn solve_lambda(
    mut pd: impl FnMut(f64) -> Result<f64, CliError>,
    target: f64,
) -> Result<f64, CliError> {
    let mut hi = 1.0;
    while pd(hi)? > target {
        hi *= 2.0;
        if hi > 1e7 {
            return Err(CliError::Infeasible(format!(
                "detection probability {target} not reachable below threshold {hi}"
            )));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if pd(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Complementary ROC rows `(psi_f, psi_m)` over the configured false-alarm grid.
pub fn roc(cfg: &RunConfig, scheme: Option<Scheme>) -> Result<Table, CliError> {
    let mut table = Table::new(vec![
        "scheme", "n", "r", "psi_f", "psi_m", "lambda", "stderr_f", "stderr_m",
    ]);
    let model = cfg.base_channel();
    let grid = cfg.pf_grid();
    if scheme == Some(Scheme::WcAdaptive) {
        for &n in &cfg.users {
            roc_adaptive(cfg, n, model, &grid, &mut table)?;
        }
    } else {
        for (s, factor) in closed_form_schemes(cfg, scheme)? {
            for &n in &cfg.users {
                let rows: Result<Vec<(f64, f64, f64)>, CliError> = grid
                    .par_iter()
                    .map(|&pf| {
                        let lambda = threshold_for_pf(pf, n, cfg.r)?;
                        let pd = closed_form_pd(cfg, model, n, cfg.r, lambda, factor * n as f64)?;
                        Ok((pf, 1.0 - pd, lambda))
                    })
                    .collect();
                for (pf, pm, lambda) in rows? {
                    table.push(vec![
                        s.label().into(),
                        n.into(),
                        cfg.r.into(),
                        pf.into(),
                        pm.into(),
                        lambda.into(),
                        0.0.into(),
                        0.0.into(),
                    ]);
                }
            }
        }
    }
    check_roc(&table)?;
    Ok(table)
}

fn roc_adaptive(
    cfg: &RunConfig,
    n: u32,
    model: ChannelModel,
    pf_grid: &[f64],
    table: &mut Table,
) -> Result<(), CliError> {
    let mut lambdas = pf_grid
        .iter()
        .map(|&pf| threshold_for_pf(pf, n, cfg.r))
        .collect::<Result<Vec<f64>, _>>()?;
    lambdas.reverse();
    let params = SensingParams::new(cfg.r, n, cfg.nu, lambdas[0])?;
    let sc = SimScenario::new(
        params,
        model,
        cfg.distances_for(n)?,
        WeightMode::WcAdaptive,
        cfg.trials,
        cfg.seed,
    )?;
    for (lambda, est) in simulate_curve(&sc, &lambdas)?.into_iter().rev() {
        table.push(vec![
            Scheme::WcAdaptive.label().into(),
            n.into(),
            cfg.r.into(),
            est.psi_f_hat.into(),
            (1.0 - est.psi_d_hat).into(),
            lambda.into(),
            est.stderr_f.into(),
            est.stderr_d.into(),
        ]);
    }
    Ok(())
}

fn check_probabilities(table: &Table, cols: &[&str]) -> Result<(), CliError> {
    for name in cols {
        let c = table.column(name);
        for row in &table.rows {
            let v = row[c].as_num().expect("numeric column");
            if !(0.0..=1.0).contains(&v) {
                return Err(CliError::Validation(format!("{name} = {v} outside [0, 1]")));
            }
        }
    }
    Ok(())
}

/// Groups consecutive rows by the text/integer key columns.
fn runs<'a>(table: &'a Table, keys: &[usize]) -> Vec<&'a [Vec<Cell>]> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=table.rows.len() {
        if i == table.rows.len()
            || keys
                .iter()
                .any(|&k| table.rows[i][k] != table.rows[start][k])
        {
            out.push(&table.rows[start..i]);
            start = i;
        }
    }
    out
}

fn check_roc(table: &Table) -> Result<(), CliError> {
    check_probabilities(table, &["psi_f", "psi_m"])?;
    let (pf, pm) = (table.column("psi_f"), table.column("psi_m"));
    for run in runs(table, &[table.column("scheme"), table.column("n")]) {
        for w in run.windows(2) {
            let (f0, f1) = (w[0][pf].as_num().unwrap(), w[1][pf].as_num().unwrap());
            let (m0, m1) = (w[0][pm].as_num().unwrap(), w[1][pm].as_num().unwrap());
            if f1 < f0 || m1 > m0 + MONOTONE_SLACK {
                return Err(CliError::Validation(format!(
                    "ROC not monotone between psi_f {f0} and {f1}"
                )));
            }
        }
    }
    Ok(())
}

/// Spectrum utilization `1 - psi_f` at each target detection probability.
pub fn utilization(cfg: &RunConfig, scheme: Option<Scheme>) -> Result<Table, CliError> {
    let mut table = Table::new(vec![
        "scheme",
        "n",
        "r",
        "target_pd",
        "lambda",
        "psi_f",
        "utilization",
    ]);
    let model = cfg.base_channel();
    let mut users = cfg.users.clone();
    users.sort_unstable();
    users.dedup();
    for (s, factor) in closed_form_schemes(cfg, scheme)? {
        for &target in &cfg.target_pd {
            let rows: Result<Vec<(u32, f64, f64)>, CliError> = users
                .par_iter()
                .map(|&n| {
                    let sum_a = factor * n as f64;
                    let lambda =
                        solve_lambda(|l| closed_form_pd(cfg, model, n, cfg.r, l, sum_a), target)?;
                    Ok((n, lambda, psi_f(lambda, n, cfg.r)?))
                })
                .collect();
            let rows = rows?;
            for w in rows.windows(2) {
                if w[1].2 > w[0].2 + MONOTONE_SLACK {
                    return Err(CliError::Validation(format!(
                        "utilization decreases from n={} to n={} at target {target}",
                        w[0].0, w[1].0
                    )));
                }
            }
            for (n, lambda, pf) in rows {
                table.push(vec![
                    s.label().into(),
                    n.into(),
                    cfg.r.into(),
                    target.into(),
                    lambda.into(),
                    pf.into(),
                    (1.0 - pf).into(),
                ]);
            }
        }
    }
    check_probabilities(&table, &["psi_f", "utilization"])?;
    Ok(table)
}

/// Result of a mean-SNR search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrSolution {
    pub snr_db: f64,
    /// `psi_d - target` at the returned SNR.
    pub residual: f64,
    /// The floor already meets the target.
    pub clamped: bool,
}

/// Smallest mean SNR (dB) in `[-60, 60]` at which the closed form reaches
/// `target_pd` at threshold `lambda`.
pub fn required_snr(
    cfg: &RunConfig,
    kind: ModelKind,
    n: u32,
    r: u32,
    lambda: f64,
    sum_a: f64,
    target_pd: f64,
) -> Result<SnrSolution, CliError> {
    let pd = |db: f64| closed_form_pd(cfg, cfg.channel(kind, db), n, r, lambda, sum_a);
    let floor = pd(SNR_FLOOR_DB)?;
    if floor >= target_pd {
        return Ok(SnrSolution {
            snr_db: SNR_FLOOR_DB,
            residual: floor - target_pd,
            clamped: true,
        });
    }
    if pd(SNR_CEIL_DB)? < target_pd {
        return Err(CliError::Infeasible(format!(
            "n={n}: detection probability {target_pd} needs more than {SNR_CEIL_DB} dB"
        )));
    }
    let (mut lo, mut hi) = (SNR_FLOOR_DB, SNR_CEIL_DB);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if pd(mid)? < target_pd {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let snr_db = 0.5 * (lo + hi);
    let residual = pd(snr_db)? - target_pd;
    if residual.abs() > PD_TOLERANCE {
        return Err(CliError::Validation(format!(
            "n={n}: SNR search stalled {residual:e} away from the target"
        )));
    }
    Ok(SnrSolution {
        snr_db,
        residual,
        clamped: false,
    })
}

/// Required mean SNR per user count and target pair.
pub fn snr_requirement(cfg: &RunConfig, scheme: Option<Scheme>) -> Result<Table, CliError> {
    let mut table = Table::new(vec![
        "scheme",
        "n",
        "r",
        "target_pd",
        "target_pf",
        "lambda",
        "required_snr_db",
        "residual_pd",
    ]);
    let mut users = cfg.users.clone();
    users.sort_unstable();
    users.dedup();
    for (s, factor) in closed_form_schemes(cfg, scheme)? {
        for &tpd in &cfg.target_pd {
            for &tpf in &cfg.target_pf {
                if tpd <= tpf {
                    return Err(CliError::Config(format!(
                        "target_pd: {tpd} must exceed target_pf {tpf}"
                    )));
                }
                let rows: Result<Vec<(u32, f64, SnrSolution)>, CliError> = users
                    .par_iter()
                    .map(|&n| {
                        let lambda = threshold_for_pf(tpf, n, cfg.r)?;
                        let sol =
                            required_snr(cfg, cfg.model, n, cfg.r, lambda, factor * n as f64, tpd)?;
                        Ok((n, lambda, sol))
                    })
                    .collect();
                let rows = rows?;
                for w in rows.windows(2) {
                    let (a, b) = (w[0].2, w[1].2);
                    if !(b.snr_db < a.snr_db || (a.clamped && b.clamped)) {
                        return Err(CliError::Validation(format!(
                            "required SNR does not decrease from n={} to n={}",
                            w[0].0, w[1].0
                        )));
                    }
                }
                for (n, lambda, sol) in rows {
                    table.push(vec![
                        s.label().into(),
                        n.into(),
                        cfg.r.into(),
                        tpd.into(),
                        tpf.into(),
                        lambda.into(),
                        sol.snr_db.into(),
                        sol.residual.into(),
                    ]);
                }
            }
        }
    }
    Ok(table)
}

/// Validation report and the descriptions of failed checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Validation {
    pub table: Table,
    pub failures: Vec<String>,
    pub checks: usize,
    pub informational: usize,
}

/// Monte Carlo seed for grid cell `index`.
fn cell_seed(seed: u64, index: u64) -> u64 {
    seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Closed forms against simulation on the (model, n, r, threshold) grid.
///
/// A closed-form value passes when it lies within three standard errors
/// of the estimate. Rows whose closed form is only an approximation
/// (non-unit fixed weights, adaptive weights) are reported as
/// `informational`.
pub fn validate(cfg: &RunConfig, scheme: Scheme) -> Result<Validation, CliError> {
    let mut table = Table::new(vec![
        "model",
        "scheme",
        "n",
        "r",
        "lambda",
        "quantity",
        "closed_form",
        "estimate",
        "stderr",
        "status",
    ]);
    let mut failures = Vec::new();
    let (mut checks, mut informational) = (0, 0);
    let unit = cfg.wc_mean_weight.unwrap_or(1.0);
    let mut index = 0u64;
    let cf_cfg = RunConfig {
        quadrature_order: cfg.validate_quadrature_order,
        ..cfg.clone()
    };
    for &kind in &cfg.validate_models {
        let snr_db = match kind {
            ModelKind::Lognormal => cfg.mu_db,
            _ => cfg.validate_snr_db,
        };
        let model = cfg.channel(kind, snr_db);
        for &n in &cfg.users {
            for &r in &cfg.validate_r {
                let mut lambdas = cfg
                    .validate_pf
                    .iter()
                    .map(|&pf| threshold_for_pf(pf, n, r))
                    .collect::<Result<Vec<f64>, _>>()?;
                lambdas.sort_by(f64::total_cmp);
                lambdas.dedup();
                let (mode, sum_a, exact) = match scheme {
                    Scheme::Egc => (WeightMode::Egc, n as f64, true),
                    Scheme::WcFixed => (
                        WeightMode::WcFixed {
                            weights: WeightVector::new(vec![unit; n as usize])?,
                        },
                        unit * n as f64,
                        unit == 1.0,
                    ),
                    Scheme::WcAdaptive => (WeightMode::WcAdaptive, n as f64, false),
                };
                let params = SensingParams::new(r, n, cfg.nu, lambdas[0])?;
                let sc = SimScenario::new(
                    params,
                    model,
                    cfg.distances_for(n)?,
                    mode,
                    cfg.trials,
                    cell_seed(cfg.seed, index),
                )?;
                index += 1;
                let curve = simulate_curve(&sc, &lambdas)?;
                let pds = lambdas
                    .par_iter()
                    .map(|&l| closed_form_pd(&cf_cfg, model, n, r, l, sum_a))
                    .collect::<Result<Vec<f64>, _>>()?;
                for ((lambda, est), pd) in curve.into_iter().zip(pds) {
                    let pf = psi_f(lambda, n, r)?;
                    for (quantity, closed, hat, se) in [
                        ("psi_d", pd, est.psi_d_hat, est.stderr_d),
                        ("psi_f", pf, est.psi_f_hat, est.stderr_f),
                    ] {
                        let status = if !exact {
                            informational += 1;
                            "informational"
                        } else {
                            checks += 1;
                            if (closed - hat).abs() <= 3.0 * se {
                                "pass"
                            } else {
                                failures.push(format!(
                                    "{} n={n} r={r} lambda={lambda}: {quantity} closed form {closed} vs estimate {hat} (stderr {se})",
                                    model.name()
                                ));
                                "fail"
                            }
                        };
                        table.push(vec![
                            model_label(kind).into(),
                            scheme.label().into(),
                            n.into(),
                            r.into(),
                            lambda.into(),
                            quantity.into(),
                            closed.into(),
                            hat.into(),
                            se.into(),
                            status.into(),
                        ]);
                    }
                }
            }
        }
    }
    Ok(Validation {
        table,
        failures,
        checks,
        informational,
    })
}

fn model_label(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Awgn => "awgn",
        ModelKind::Rayleigh => "rayleigh",
        ModelKind::Nakagami => "nakagami",
        ModelKind::Lognormal => "lognormal",
    }
}

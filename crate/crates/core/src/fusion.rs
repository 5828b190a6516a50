//! Band-manager combining rules.
//!
//! Equal-gain combining sums the reported energies. Weighted combining
//! scales each report by
//!
//! ```text
//! a_i = 10 log10(Y_i / Y_m) / (10 ν log10(d_i / d_m))
//! ```
//!
//! where `Y_m` is the mean reported energy and `d_m` the arithmetic mean
//! distance to the primary transmitter.

use crate::error::{domain, Error, Result};

/// Users whose distance ratio is within this of one (in log10) are treated
/// as sitting at the mean distance.
const MEAN_DISTANCE_EPS: f64 = 1e-9;
/// Weight sums below this trigger the equal-gain fallback.
const MIN_WEIGHT_SUM: f64 = 1e-9;

/// One user's report to the band manager.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserReport {
    energy: f64,
    distance: f64,
}

impl UserReport {
    /// `energy` is the measured normalized energy, `distance` the distance
    /// to the primary transmitter in meters.
    pub fn new(energy: f64, distance: f64) -> Result<Self> {
        if !(energy >= 0.0) || !energy.is_finite() {
            return domain(
                "UserReport::new",
                format!("energy must be nonnegative, got {energy}"),
            );
        }
        if !(distance > 0.0) || !distance.is_finite() {
            return domain(
                "UserReport::new",
                format!("distance must be positive, got {distance}"),
            );
        }
        Ok(Self { energy, distance })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }
}

/// Per-user combining weights and their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
    sum_a: f64,
    degenerate_fallback: bool,
}

impl WeightVector {
    /// Wraps explicit weights. They must be finite, nonnegative and have a
    /// positive sum.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        const OP: &str = "WeightVector::new";
        if weights.is_empty() {
            return domain(OP, "at least one weight is required");
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return domain(
                OP,
                format!("weights must be finite and nonnegative, got {w}"),
            );
        }
        let sum_a: f64 = weights.iter().sum();
        if sum_a < MIN_WEIGHT_SUM {
            return domain(OP, "weights must have a positive sum");
        }
        Ok(Self {
            weights,
            sum_a,
            degenerate_fallback: false,
        })
    }

    fn fallback(n: usize) -> Self {
        Self {
            weights: vec![1.0; n],
            sum_a: n as f64,
            degenerate_fallback: true,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `a = Σ a_i`.
    pub fn sum_a(&self) -> f64 {
        self.sum_a
    }

    /// True when weighted combining degenerated and equal weights were used.
    pub fn degenerate_fallback(&self) -> bool {
        self.degenerate_fallback
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }
}

/// Weighted-combining weights from the users' reports.
///
/// Raw weights follow the formula in the module docs, with these guards:
/// a negative raw weight (or a zero-energy report) is clamped to 0, a user
/// at the mean distance gets the neutral weight 1, and when no user ends up
/// with a positive raw weight every weight is reset to 1 and
/// `degenerate_fallback` is set.
pub fn wc_weights(reports: &[UserReport], nu: f64) -> Result<WeightVector> {
    const OP: &str = "wc_weights";
    if reports.is_empty() {
        return domain(OP, "at least one report is required");
    }
    if !(nu > 0.0) || !nu.is_finite() {
        return domain(OP, format!("path-loss exponent must be positive, got {nu}"));
    }
    let n = reports.len() as f64;
    let mean_energy = reports.iter().map(|r| r.energy).sum::<f64>() / n;
    if mean_energy == 0.0 {
        return Err(Error::NoSignal);
    }
    let mean_distance = reports.iter().map(|r| r.distance).sum::<f64>() / n;

    let mut informative = 0usize;
    let weights: Vec<f64> = reports
        .iter()
        .map(|rep| {
            let path = (rep.distance / mean_distance).log10();
            if path.abs() <= MEAN_DISTANCE_EPS {
                return 1.0;
            }
            if rep.energy == 0.0 {
                return 0.0;
            }
            let raw = 10.0 * (rep.energy / mean_energy).log10() / (10.0 * nu * path);
            if raw > 0.0 {
                informative += 1;
                raw
            } else {
                0.0
            }
        })
        .collect();
    let sum_a: f64 = weights.iter().sum();
    if informative == 0 || sum_a < MIN_WEIGHT_SUM {
        return Ok(WeightVector::fallback(reports.len()));
    }
    Ok(WeightVector {
        weights,
        sum_a,
        degenerate_fallback: false,
    })
}

/// Equal-gain weights: all ones.
pub fn egc_weights(n: usize) -> Result<WeightVector> {
    if n == 0 {
        return domain("egc_weights", "n must be at least 1");
    }
    Ok(WeightVector {
        weights: vec![1.0; n],
        sum_a: n as f64,
        degenerate_fallback: false,
    })
}

/// Combined statistic `Σ a_i Y_i`.
pub fn combine(w: &WeightVector, energies: &[f64]) -> Result<f64> {
    dot(w, energies)
}

/// Effective SNR of the combiner output, `γ_t = Σ a_i γ_i`.
pub fn effective_snr(w: &WeightVector, snrs: &[f64]) -> Result<f64> {
    dot(w, snrs)
}

fn dot(w: &WeightVector, values: &[f64]) -> Result<f64> {
    if values.len() != w.weights.len() {
        return Err(Error::LengthMismatch {
            expected: w.weights.len(),
            actual: values.len(),
        });
    }
    Ok(w.weights.iter().zip(values).map(|(a, y)| a * y).sum())
}

/// Mean per-branch SNR seen by the closed forms under weighted combining,
/// `γ̄_w = a γ̄ / n`.
pub fn mean_snr_wc(sum_a: f64, mean_gamma: f64, n: u32) -> Result<f64> {
    const OP: &str = "mean_snr_wc";
    if !(sum_a > 0.0) {
        return domain(OP, format!("weight sum must be positive, got {sum_a}"));
    }
    if !(mean_gamma > 0.0) {
        return domain(OP, format!("mean SNR must be positive, got {mean_gamma}"));
    }
    if n == 0 {
        return domain(OP, "n must be at least 1");
    }
    Ok(sum_a * mean_gamma / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reports(e: &[f64], d: &[f64]) -> Vec<UserReport> {
        e.iter()
            .zip(d)
            .map(|(&e, &d)| UserReport::new(e, d).unwrap())
            .collect()
    }

    #[test]
    fn two_user_example() {
        let w = wc_weights(&reports(&[10.0, 1000.0], &[100.0, 1000.0]), 4.0).unwrap();
        // hand evaluation, 30-digit reference
        assert!((w.weights()[0] - 0.575_154_381_186_541_4).abs() < 1e-12);
        assert!((w.weights()[1] - 0.285_695_285_187_797_2).abs() < 1e-12);
        assert!((w.sum_a() - 0.860_849_666_374_338_6).abs() < 1e-12);
        assert!(!w.degenerate_fallback());
    }

    #[test]
    fn equal_energies_fall_back() {
        let w = wc_weights(&reports(&[5.0, 5.0, 5.0], &[10.0, 200.0, 900.0]), 3.0).unwrap();
        assert!(w.degenerate_fallback());
        assert_eq!(w.weights(), &[1.0, 1.0, 1.0]);
        assert_eq!(w.sum_a(), 3.0);
    }

    #[test]
    fn single_user_falls_back() {
        let w = wc_weights(&reports(&[3.0], &[50.0]), 4.0).unwrap();
        assert!(w.degenerate_fallback());
        assert_eq!(w.weights(), &[1.0]);
    }

    #[test]
    fn guards() {
        // weak far user and strong near user both have negative raw weights
        let w = wc_weights(&reports(&[1.0, 50.0, 20.0], &[900.0, 100.0, 200.0]), 4.0).unwrap();
        assert_eq!(w.weights()[0], 0.0);
        assert_eq!(w.weights()[1], 0.0);
        assert!(w.weights()[2] > 0.0);
        assert!(!w.degenerate_fallback());
        // zero-energy report gets weight zero
        let w = wc_weights(&reports(&[0.0, 50.0, 2.0], &[900.0, 800.0, 100.0]), 4.0).unwrap();
        assert_eq!(w.weights()[0], 0.0);
        // user at the mean distance is neutral
        let w = wc_weights(&reports(&[40.0, 1.0, 10.0], &[600.0, 100.0, 350.0]), 4.0).unwrap();
        assert_eq!(w.weights()[2], 1.0);
        assert!(matches!(
            wc_weights(&reports(&[0.0, 0.0], &[1.0, 2.0]), 4.0),
            Err(Error::NoSignal)
        ));
        assert!(wc_weights(&[], 4.0).is_err());
        assert!(UserReport::new(-1.0, 1.0).is_err());
        assert!(UserReport::new(1.0, 0.0).is_err());
    }

    #[test]
    fn egc_and_combine() {
        let w = egc_weights(3).unwrap();
        assert_eq!(w.weights(), &[1.0, 1.0, 1.0]);
        assert_eq!(w.sum_a(), 3.0);
        assert!(!w.degenerate_fallback());
        assert_eq!(egc_weights(1).unwrap().sum_a(), 1.0);
        assert!(egc_weights(0).is_err());
        assert_eq!(combine(&w, &[2.0, 3.0, 4.0]).unwrap(), 9.0);
        let w = WeightVector::new(vec![0.5, 2.0]).unwrap();
        assert_eq!(combine(&w, &[4.0, 1.0]).unwrap(), 4.0);
        assert!(matches!(
            combine(&w, &[1.0]),
            Err(Error::LengthMismatch {
                expected: 2,
                actual: 1
            })
        ));
        assert!(WeightVector::new(vec![0.0, 0.0]).is_err());
        assert!(WeightVector::new(vec![-1.0, 2.0]).is_err());
    }

    #[test]
    fn effective_and_mean_snr() {
        let w = WeightVector::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(effective_snr(&w, &[2.0, 3.0]).unwrap(), 5.0);
        let w = WeightVector::new(vec![0.575, 0.286]).unwrap();
        assert!((effective_snr(&w, &[1.0, 4.0]).unwrap() - 1.719).abs() < 1e-12);
        assert_eq!(effective_snr(&w, &[0.0, 0.0]).unwrap(), 0.0);

        assert!((mean_snr_wc(3.0, 3.981, 3).unwrap() - 3.981).abs() < 1e-15);
        assert!((mean_snr_wc(4.5, 2.0, 3).unwrap() - 3.0).abs() < 1e-15);
        let g = crate::db_to_linear(6.0);
        assert!(
            (mean_snr_wc(0.860_849_666_374_338_6, g, 2).unwrap() - 1.713_552_124_761_05).abs()
                < 1e-12
        );
        assert!(mean_snr_wc(0.0, 1.0, 2).is_err());
    }
}

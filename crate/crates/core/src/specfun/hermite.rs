use crate::error::{domain, Result};

pub const MAX_HERMITE_ORDER: usize = 64;

/// Gauss–Hermite rule for `∫ f(x) e^{-x²} dx ≈ Σ w_i f(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Abscissae in strictly increasing order, symmetric about zero.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Applies the rule to `f`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Builds the `order`-point Gauss–Hermite rule (physicists' weight `e^{-x²}`).
///
/// Roots of `H_l` are polished by Newton iteration on the orthonormal
/// three-term recurrence, starting from the usual asymptotic guesses for the
/// largest roots and extrapolating inward from there.
pub fn gauss_hermite(order: usize) -> Result<QuadratureRule> {
    if !(1..=MAX_HERMITE_ORDER).contains(&order) {
        return domain(
            "gauss_hermite",
            format!("order must lie in [1, {MAX_HERMITE_ORDER}], got {order}"),
        );
    }
    let n = order;
    let nf = n as f64;
    let half = n.div_ceil(2);
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut roots = vec![0.0; half];
    let mut wts = vec![0.0; half];
    let mut z = 0.0f64;
    for i in 0..half {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * roots[0],
            3 => 1.91 * z - 0.91 * roots[1],
            _ => 2.0 * z - roots[i - 2],
        };
        for _ in 0..100 {
            let (p1, p2) = orthonormal_hermite(n, z, pim4);
            let step = p1 / ((2.0 * nf).sqrt() * p2);
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, p2) = orthonormal_hermite(n, z, pim4);
        let pp = (2.0 * nf).sqrt() * p2;
        roots[i] = z;
        wts[i] = 2.0 / (pp * pp);
    }
    if n % 2 == 1 {
        roots[half - 1] = 0.0;
    }
    // roots[] holds the nonnegative roots in decreasing order
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n / 2 {
        nodes.push(-roots[i]);
        weights.push(wts[i]);
    }
    for i in (0..half).rev() {
        nodes.push(roots[i]);
        weights.push(wts[i]);
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Returns the orthonormal Hermite values `(h_n(z), h_{n-1}(z))`.
fn orthonormal_hermite(n: usize, z: f64, pim4: f64) -> (f64, f64) {
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, p2)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    #[test]
    fn low_orders_closed_form() {
        let r1 = gauss_hermite(1).unwrap();
        assert_eq!(r1.nodes(), &[0.0]);
        assert!((r1.weights()[0] - SQRT_PI).abs() < 1e-14);

        let r2 = gauss_hermite(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r2.nodes()[0] + h).abs() < 1e-15 && (r2.nodes()[1] - h).abs() < 1e-15);
        for w in r2.weights() {
            assert!((w - SQRT_PI / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn invariants_hold_for_every_order() {
        for l in 1..=MAX_HERMITE_ORDER {
            let rule = gauss_hermite(l).unwrap();
            assert_eq!(rule.order(), l);
            assert_eq!(rule.weights().len(), l);
            let x = rule.nodes();
            for i in 1..l {
                assert!(x[i] > x[i - 1], "order {l} not increasing");
            }
            for i in 0..l {
                assert!((x[i] + x[l - 1 - i]).abs() < 1e-13 * x[i].abs().max(1.0));
                assert!(rule.weights()[i] > 0.0);
            }
            let total: f64 = rule.weights().iter().sum();
            assert!((total - SQRT_PI).abs() < 1e-12, "order {l}: {total}");
        }
    }

    #[test]
    fn out_of_range_orders_rejected() {
        assert!(gauss_hermite(0).is_err());
        assert!(gauss_hermite(65).is_err());
    }
}

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math::{abs, cos, PI, TAU};

/// Nodes and positive weights approximating `∫_a^b f(x) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: (f64, f64),
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// `n`-point Gauss–Legendre rule on `[a, b]`, exact for polynomials of degree
/// `2n - 1`. Nodes are found by Newton iteration on the three-term recurrence
/// and returned in ascending order.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(invalid("Gauss–Legendre rule needs at least one node"));
    }
    if !(a < b) {
        return Err(invalid("Gauss–Legendre interval must satisfy a < b"));
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = cos(PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if abs(dx) <= 1e-16 * (1.0 + abs(x)) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // i-th largest root
        nodes[n - 1 - i] = mid + half * x;
        nodes[i] = mid - half * x;
        weights[n - 1 - i] = half * w;
        weights[i] = half * w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = mid;
    }
    Ok(QuadratureRule { nodes, weights, interval: (a, b) })
}

/// `(P_n(x), P_n'(x))` by the Bonnet recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `n` equispaced angles `2πj/n` in `[0, 2π)`; with weight `2π/n` each they
/// form the periodic trapezoid rule, exact for trigonometric polynomials of
/// degree below `n`.
pub fn periodic_nodes(n: usize) -> Vec<f64> {
    (0..n).map(|j| TAU * j as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::legendre::legendre_p;

    #[test]
    fn one_point_rule() {
        let r = gauss_legendre(1, -1.0, 1.0).unwrap();
        assert_eq!(r.nodes, alloc::vec![0.0]);
        assert!((r.weights[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_point_rule_integrates_square() {
        let r = gauss_legendre(2, -1.0, 1.0).unwrap();
        assert!((r.integrate(|x| x * x) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn p6_norm_with_eight_nodes() {
        // oracle: 200-node rule of the same polynomial
        let reference = gauss_legendre(200, -1.0, 1.0).unwrap().integrate(|x| legendre_p(6, x).unwrap().powi(2));
        assert!((reference - 2.0 / 13.0).abs() < 1e-14);
        let r = gauss_legendre(8, -1.0, 1.0).unwrap();
        assert!((r.integrate(|x| legendre_p(6, x).unwrap().powi(2)) - reference).abs() < 1e-14);
    }

    #[test]
    fn monomial_exactness_up_to_32_nodes() {
        for n in 1..=32 {
            let r = gauss_legendre(n, -0.5, 2.0).unwrap();
            assert!(r.weights.iter().all(|&w| w > 0.0));
            assert!(((r.weights.iter().sum::<f64>() - 2.5) / 2.5).abs() < 1e-12);
            for j in 0..2 * n {
                let exact = (2.0f64.powi(j as i32 + 1) - (-0.5f64).powi(j as i32 + 1)) / (j as f64 + 1.0);
                let got = r.integrate(|x| x.powi(j as i32));
                assert!(((got - exact) / exact.abs().max(1.0)).abs() < 1e-12, "n={n} j={j}");
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(gauss_legendre(0, 0.0, 1.0).is_err());
        assert!(gauss_legendre(3, 1.0, 1.0).is_err());
        assert!(gauss_legendre(3, 2.0, 1.0).is_err());
    }

    #[test]
    fn large_rule_is_sorted_and_normalized() {
        let r = gauss_legendre(600, -1.0, 1.0).unwrap();
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-12);
    }
}

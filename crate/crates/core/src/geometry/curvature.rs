//! Gaussian curvature from the coefficient jets.

use crate::error::{Error, Result};
use crate::geometry::metric::{Chart, MetricJet, MetricPatch};

/// Determinants below this are treated as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// Gaussian curvature from `A`, `B`, `C` and their partials, written as the
/// explicit sixteen-term polynomial over `4 (B² - AC)²`.
pub fn curvature_from_jet(g: &MetricJet) -> f64 {
    let (a, b, c) = (g.a.v, g.b.v, g.c.v);
    let (a1, a2) = (g.a.d[0], g.a.d[1]);
    let (b1, b2) = (g.b.d[0], g.b.d[1]);
    let (c1, c2) = (g.c.d[0], g.c.d[1]);
    let a22 = g.a.hess(1, 1);
    let b12 = g.b.hess(0, 1);
    let c11 = g.c.hess(0, 0);
    let ac = a * c;
    let bb = b * b;
    let numerator = c * a2 * a2 - 2.0 * b * a2 * b2 + a * a2 * c2 + 2.0 * bb * a22 - 2.0 * ac * a22 - 2.0 * c * b2 * a1
        + b * c2 * a1
        + 4.0 * b * b2 * b1
        - 2.0 * a * c2 * b1
        - b * a2 * c1
        + c * a1 * c1
        - 2.0 * b * b1 * c1
        + a * c1 * c1
        - 4.0 * bb * b12
        + 4.0 * ac * b12
        + 2.0 * bb * c11
        - 2.0 * ac * c11;
    let d = bb - ac;
    numerator / (4.0 * d * d)
}

/// `K` at chart coordinates `u`.
pub fn gauss_curvature(metric: &MetricPatch, chart: Chart, u: [f64; 2]) -> Result<f64> {
    let g = metric.coefficients(chart, u)?;
    let det = g.det();
    if !(abs_gt(det, DEGENERACY_THRESHOLD)) {
        return Err(Error::DegenerateMetric { u1: u[0], u2: u[1], det });
    }
    Ok(curvature_from_jet(&g))
}

/// `K` at an ambient point, evaluated in whichever chart keeps it farthest
/// from a coordinate pole.
pub fn gauss_curvature_at(metric: &MetricPatch, x: [f64; 3]) -> Result<f64> {
    let (chart, u) = if metric.has_rotated_chart() { Chart::best_for(x) } else { (Chart::North, Chart::North.from_ambient(x)) };
    gauss_curvature(metric, chart, u)
}

fn abs_gt(x: f64, t: f64) -> bool {
    x > t || x < -t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::metric::{builtin_metric, MetricFamily, Profile};
    use core::f64::consts::{PI, TAU};
    use proptest::prelude::*;

    /// Brioschi's determinant formula, an independent route to `K`.
    fn brioschi(g: &MetricJet) -> f64 {
        let (e, f, gg) = (g.a.v, g.b.v, g.c.v);
        let (eu, ev) = (g.a.d[0], g.a.d[1]);
        let (fu, fv) = (g.b.d[0], g.b.d[1]);
        let (gu, gv) = (g.c.d[0], g.c.d[1]);
        let evv = g.a.hess(1, 1);
        let fuv = g.b.hess(0, 1);
        let guu = g.c.hess(0, 0);
        let det3 = |m: [[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let m1 = [
            [-0.5 * evv + fuv - 0.5 * guu, 0.5 * eu, fu - 0.5 * ev],
            [fv - 0.5 * gu, e, f],
            [0.5 * gv, f, gg],
        ];
        let m2 = [[0.0, 0.5 * ev, 0.5 * gu], [0.5 * ev, e, f], [0.5 * gu, f, gg]];
        (det3(m1) - det3(m2)) / ((e * gg - f * f) * (e * gg - f * f))
    }

    #[test]
    fn round_sphere_is_unit() {
        let m = MetricPatch::round();
        for chart in [Chart::North, Chart::East] {
            for i in 1..16 {
                let k = gauss_curvature(&m, chart, [PI * i as f64 / 16.0, 0.37 * i as f64]).unwrap();
                assert!((k - 1.0).abs() < 1e-12, "{k}");
            }
        }
    }

    #[test]
    fn agrees_with_brioschi_on_builtin_metrics() {
        for eps in [0.0, 0.05, 0.1, 0.2] {
            let m = MetricPatch::zoll(eps).unwrap();
            for chart in [Chart::North, Chart::East] {
                for i in 0..32 {
                    for j in 0..32 {
                        let u = [PI * (i as f64 + 0.5) / 32.0, TAU * j as f64 / 32.0];
                        let g = m.coefficients(chart, u).unwrap();
                        let (k, kb) = (curvature_from_jet(&g), brioschi(&g));
                        assert!((k - kb).abs() < 1e-8 * (1.0 + kb.abs()), "{eps} {chart:?} {u:?} {k} {kb}");
                    }
                }
            }
        }
    }

    #[test]
    fn zoll_equator_value() {
        // K = (1 + h - x h')/(1 + h)³ for a surface of revolution; at x = 0, h = 0, h' = ε
        let m = MetricPatch::zoll(0.1).unwrap();
        let k = gauss_curvature(&m, Chart::North, [PI / 2.0, 0.0]).unwrap();
        let g = m.coefficients(Chart::North, [PI / 2.0, 0.0]).unwrap();
        assert!((k - brioschi(&g)).abs() < 1e-8);
        assert!((k - 1.0).abs() < 1e-12);
        for &t in &[0.4, 1.2, 2.0] {
            let p = m.profile().unwrap();
            let (h, hp) = p.h(f64::cos(t));
            let expect = (1.0 + h - t.cos() * hp) / (1.0 + h).powi(3);
            let k = gauss_curvature(&m, Chart::North, [t, 1.0]).unwrap();
            assert!((k - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn agrees_with_brioschi_with_cross_term() {
        // a metric with B ≠ 0 and non-constant A: pull back the round metric
        // under (θ, φ) ↦ (θ, φ + s(θ)) and add a smooth conformal factor
        let m = MetricPatch::from_coefficients(|t, p| {
            let s2 = t.sin().powi(2);
            let sp = 0.3 * t.cos();
            let conf = 1.0 + 0.2 * t.sin() * p.cos();
            [conf * (1.0 + s2 * sp * sp), conf * s2 * sp, conf * s2]
        })
        .unwrap();
        for &(t, p) in &[(0.7, 0.3), (1.3, 2.0), (2.2, 4.5)] {
            let g = m.coefficients(Chart::North, [t, p]).unwrap();
            assert!(g.b.v.abs() > 1e-3);
            assert!((curvature_from_jet(&g) - brioschi(&g)).abs() < 1e-8);
        }
    }

    #[test]
    fn degenerate_point_rejected() {
        let m = MetricPatch::round();
        assert!(matches!(gauss_curvature(&m, Chart::North, [0.0, 0.0]), Err(Error::DegenerateMetric { .. })));
    }

    proptest! {
        #[test]
        fn scaling_law(c in 0.2f64..5.0, t in 0.2f64..2.9, p in 0.0f64..6.2, eps in -0.3f64..0.3) {
            let m = builtin_metric(MetricFamily::ZollOfRevolution(Profile::zoll(eps))).unwrap();
            let g = m.coefficients(Chart::East, [t, p]).unwrap();
            let k = curvature_from_jet(&g);
            let ks = curvature_from_jet(&g.scaled(c));
            prop_assert!((ks - k / c).abs() < 1e-10 * (1.0 + k.abs()));
        }
    }
}

//! Jacobi fields, the normal derivative of the curvature, and the averaged
//! curvature symbol `σ`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geodesics::flow::{geodesic_flow, GeodesicPath, PathSample, PhasePoint};
use crate::geometry::curvature::gauss_curvature;
use crate::geometry::metric::MetricPatch;
use crate::math::{abs, sqrt, TAU};

/// Residual below which a path counts as closed.
pub const CLOSURE_THRESHOLD: f64 = 1e-6;
/// Samples per period used for `σ`.
pub const SIGMA_SAMPLES: usize = 2048;
/// Finite-difference step (chart units) for the curvature gradient.
pub const NORMAL_DERIVATIVE_STEP: f64 = 1e-5;

/// Fundamental solutions of `y'' + K y = 0` along a path. `J`, the volume
/// density in geodesic polar coordinates, is `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiData {
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
    /// `max |u v' - u' v - 1|`.
    pub wronskian_drift: f64,
}

impl JacobiData {
    pub fn j(&self) -> &[f64] {
        &self.v
    }
}

/// Extract the Jacobi solutions carried by `path`.
pub fn jacobi_solve(path: &GeodesicPath) -> JacobiData {
    let n = path.samples.len();
    let mut d = JacobiData {
        r: Vec::with_capacity(n),
        u: Vec::with_capacity(n),
        du: Vec::with_capacity(n),
        v: Vec::with_capacity(n),
        dv: Vec::with_capacity(n),
        wronskian_drift: 0.0,
    };
    for s in &path.samples {
        let [u, du, v, dv] = s.jacobi;
        d.r.push(s.r);
        d.u.push(u);
        d.du.push(du);
        d.v.push(v);
        d.dv.push(dv);
        d.wronskian_drift = d.wronskian_drift.max(abs(u * dv - du * v - 1.0));
    }
    d
}

/// `∇K · ν` at a path sample, `ν` the unit normal to the geodesic, with the
/// gradient taken by centered differences of step `step` in chart units.
pub fn normal_curvature_derivative_with_step(metric: &MetricPatch, sample: &PathSample, step: f64) -> Result<f64> {
    let PhasePoint { chart, u, p } = sample.point;
    let g = metric.coefficients(chart, u)?;
    let sd = sqrt(g.det());
    let normal = [p[1] / sd, -p[0] / sd];
    let mut grad = [0.0; 2];
    for (i, gi) in grad.iter_mut().enumerate() {
        let (mut up, mut dn) = (u, u);
        up[i] += step;
        dn[i] -= step;
        *gi = (gauss_curvature(metric, chart, up)? - gauss_curvature(metric, chart, dn)?) / (2.0 * step);
    }
    Ok(grad[0] * normal[0] + grad[1] * normal[1])
}

pub fn normal_curvature_derivative(metric: &MetricPatch, sample: &PathSample) -> Result<f64> {
    normal_curvature_derivative_with_step(metric, sample, NORMAL_DERIVATIVE_STEP)
}

/// `σ` sampled along one period of a closed geodesic, with its ingredients.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSamples {
    pub r: Vec<f64>,
    pub sigma: Vec<f64>,
    pub curvature: Vec<f64>,
    pub normal_derivative: Vec<f64>,
    /// `(1/2π) ∫₀^{2π} σ dr` by the trapezoid rule.
    pub average: f64,
    pub closure_residual: f64,
    pub wronskian_drift: f64,
    /// Positions subsampled from the dense path, for reuse by flow averages.
    pub path: GeodesicPath,
}

/// `σ = ¼(K - 1 + ⅓ K_ν u³ ∫₀^r K_ν J³ - K_ν u² J ∫₀^r K_ν u J²)` along the
/// geodesic through `start`; refuses paths that do not close.
pub fn zelditch_sigma(metric: &MetricPatch, start: PhasePoint) -> Result<SigmaSamples> {
    zelditch_sigma_with(metric, start, SIGMA_SAMPLES)
}

pub fn zelditch_sigma_with(metric: &MetricPatch, start: PhasePoint, samples: usize) -> Result<SigmaSamples> {
    let path = geodesic_flow(metric, start, TAU, samples)?;
    if !path.is_closed(CLOSURE_THRESHOLD) {
        return Err(Error::NotClosed { residual: path.closure_residual });
    }
    let jac = jacobi_solve(&path);
    let n = path.samples.len();
    let flat = metric.is_round();
    let mut kv = Vec::with_capacity(n);
    for s in &path.samples {
        kv.push(if flat { 0.0 } else { normal_curvature_derivative(metric, s)? });
    }
    let h = TAU / (n - 1) as f64;
    let (u, j) = (&jac.u, &jac.v);
    let f1: Vec<f64> = (0..n).map(|i| kv[i] * j[i] * j[i] * j[i]).collect();
    let f2: Vec<f64> = (0..n).map(|i| kv[i] * u[i] * j[i] * j[i]).collect();
    let (mut i1, mut i2) = (0.0, 0.0);
    let mut sigma = Vec::with_capacity(n);
    let curvature: Vec<f64> = path.samples.iter().map(|s| s.curvature).collect();
    for i in 0..n {
        if i > 0 {
            i1 += 0.5 * h * (f1[i - 1] + f1[i]);
            i2 += 0.5 * h * (f2[i - 1] + f2[i]);
        }
        let bracket = kv[i] * u[i] * u[i] * u[i] * i1 / 3.0 - kv[i] * u[i] * u[i] * j[i] * i2;
        sigma.push(0.25 * (curvature[i] - 1.0 + bracket));
    }
    let mut avg = 0.0;
    for i in 0..n {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        avg += w * sigma[i];
    }
    avg *= h / TAU;
    Ok(SigmaSamples {
        r: jac.r.clone(),
        sigma,
        curvature,
        normal_derivative: kv,
        average: avg,
        closure_residual: path.closure_residual,
        wronskian_drift: jac.wronskian_drift,
        path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::flow::{lift_at, lift_to_cosphere};
    use crate::geometry::metric::{builtin_metric, Chart, MetricFamily, Profile};
    use core::f64::consts::FRAC_PI_2;

    #[test]
    fn round_sphere_jacobi_fields() {
        let m = MetricPatch::round();
        let start = lift_to_cosphere(&m, Chart::North, [1.2, 0.4], 0.9).unwrap();
        let path = geodesic_flow(&m, start, TAU, 128).unwrap();
        let j = jacobi_solve(&path);
        for i in 0..j.r.len() {
            assert!((j.u[i] - j.r[i].cos()).abs() < 1e-9);
            assert!((j.v[i] - j.r[i].sin()).abs() < 1e-9);
        }
        assert!(j.wronskian_drift < 1e-7);
    }

    #[test]
    fn wronskian_on_zoll() {
        let m = MetricPatch::zoll(0.2).unwrap();
        let start = lift_to_cosphere(&m, Chart::North, [0.7, 0.0], 0.3).unwrap();
        let j = jacobi_solve(&geodesic_flow(&m, start, TAU, 64).unwrap());
        assert!(j.wronskian_drift < 1e-7, "{}", j.wronskian_drift);
    }

    #[test]
    fn v_is_the_geodesic_variation() {
        // |∂γ/∂α| for the fan of geodesics leaving one point equals |v(r)|
        let m = MetricPatch::zoll(0.1).unwrap();
        let (u0, a, d) = ([1.0, 0.3], 0.6, 1e-5);
        let paths: Vec<_> = [a - d, a, a + d]
            .iter()
            .map(|&b| geodesic_flow(&m, lift_to_cosphere(&m, Chart::North, u0, b).unwrap(), TAU, 16).unwrap())
            .collect();
        let jac = jacobi_solve(&paths[1]);
        for i in 1..16 {
            let s = &paths[1].samples[i];
            let w: Vec<f64> = (0..3).map(|k| (paths[2].samples[i].position[k] - paths[0].samples[i].position[k]) / (2.0 * d)).collect();
            // metric length of the ambient vector w
            let chart = s.point.chart;
            let f = chart.frame(s.point.u);
            let s2 = s.point.u[0].sin().powi(2);
            let c1: f64 = (0..3).map(|k| f[0][k] * w[k]).sum();
            let c2: f64 = (0..3).map(|k| f[1][k] * w[k]).sum::<f64>() / s2;
            let g = m.coefficients(chart, s.point.u).unwrap();
            let len = (g.a.v * c1 * c1 + 2.0 * g.b.v * c1 * c2 + g.c.v * c2 * c2).sqrt();
            assert!((len - jac.v[i].abs()).abs() < 1e-4, "{i} {len} {}", jac.v[i]);
        }
    }

    #[test]
    fn normal_derivative_cases() {
        let round = MetricPatch::round();
        let p = geodesic_flow(&round, lift_to_cosphere(&round, Chart::North, [1.0, 0.0], 0.4).unwrap(), TAU, 8).unwrap();
        for s in &p.samples {
            assert!(normal_curvature_derivative(&round, s).unwrap().abs() < 1e-9);
        }
        // on the equator K = 1 - 3εz + O(z²) and the unit normal is ∓∂_z, so
        // |K_ν| = 3ε all the way round (h odd breaks the z ↦ -z symmetry)
        let m = MetricPatch::zoll(0.1).unwrap();
        let eq = geodesic_flow(&m, lift_to_cosphere(&m, Chart::North, [FRAC_PI_2, 0.0], FRAC_PI_2).unwrap(), TAU, 8).unwrap();
        for s in &eq.samples {
            assert!((normal_curvature_derivative(&m, s).unwrap().abs() - 0.3).abs() < 1e-8);
        }
        let g = geodesic_flow(&m, lift_to_cosphere(&m, Chart::North, [0.8, 0.0], 0.5).unwrap(), 1.0, 1).unwrap();
        let s = &g.samples[1];
        let a = normal_curvature_derivative(&m, s).unwrap();
        let b = normal_curvature_derivative_with_step(&m, s, 1e-4).unwrap();
        assert!(a.abs() > 1e-3);
        assert!((a - b).abs() < 1e-5, "{a} {b}");
    }

    #[test]
    fn sigma_vanishes_on_round_sphere() {
        let m = MetricPatch::round();
        let s = zelditch_sigma_with(&m, lift_at(&m, [0.6, 0.0, 0.8], 1.0).unwrap(), 256).unwrap();
        assert!(s.sigma.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn sigma_on_the_equator_matches_closed_form() {
        // along the equator K ≡ 1, u = cos r, J = sin r and K_ν ≡ 3ε, so the
        // bracket integrates in closed form
        let eps = 0.1;
        let m = MetricPatch::zoll(eps).unwrap();
        let s = zelditch_sigma(&m, lift_to_cosphere(&m, Chart::North, [FRAC_PI_2, 0.0], FRAC_PI_2).unwrap()).unwrap();
        let kv2 = 9.0 * eps * eps;
        for (i, &r) in s.r.iter().enumerate() {
            let (c, sn) = (r.cos(), r.sin());
            let int_j3 = 2.0 / 3.0 - c + c * c * c / 3.0;
            let int_uj2 = sn * sn * sn / 3.0;
            let expect = 0.25 * kv2 * (c * c * c * int_j3 / 3.0 - c * c * sn * int_uj2);
            assert!((s.curvature[i] - 1.0).abs() < 1e-12);
            assert!((s.sigma[i] - expect).abs() < 1e-6, "{r} {} {expect}", s.sigma[i]);
        }
    }

    #[test]
    fn sigma_scales_linearly() {
        let ratios: Vec<f64> = [0.02, 0.04, 0.08]
            .iter()
            .map(|&e| {
                let m = MetricPatch::zoll(e).unwrap();
                let s = zelditch_sigma_with(&m, lift_to_cosphere(&m, Chart::North, [1.0, 0.0], 0.7).unwrap(), 512).unwrap();
                s.sigma.iter().fold(0.0f64, |a, v| a.max(v.abs())) / e
            })
            .collect();
        for r in &ratios {
            assert!((r / ratios[0] - 1.0).abs() < 0.2, "{ratios:?}");
        }
    }

    #[test]
    fn refuses_open_geodesics() {
        let m = builtin_metric(MetricFamily::Revolution(Profile::even_bump(0.1))).unwrap();
        let r = zelditch_sigma_with(&m, lift_to_cosphere(&m, Chart::North, [1.0, 0.0], 0.7).unwrap(), 256);
        assert!(matches!(r, Err(Error::NotClosed { .. })));
    }
}

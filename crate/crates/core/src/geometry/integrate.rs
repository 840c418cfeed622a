//! Surface integrals `∬ f dS`.
//!
//! The north chart is used with `x = cos θ`: Gauss–Legendre in `x`, the
//! periodic trapezoid rule in `φ`. No node ever sits on a pole. Resolution is
//! doubled until two consecutive levels agree.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::field::ScalarField;
use crate::geometry::metric::{Chart, MetricPatch};
use crate::math::{abs, acos, TAU};
use crate::numerics::quadrature::gauss_legendre;
use crate::par::map_range;

/// Result of an adaptive surface integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceIntegral {
    pub value: f64,
    /// `|I_2n - I_n|` at the accepted level.
    pub error_estimate: f64,
    /// `∬ |f| dS`, the scale the tolerance is relative to.
    pub magnitude: f64,
    /// Gauss–Legendre order in `x` at the accepted level.
    pub order: usize,
}

/// Requested relative accuracy.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
const START_ORDER: usize = 16;
const MAX_ORDER: usize = 1024;

/// Integrate `f(x)` against the area element of `metric`, where `f` receives
/// the ambient point. `zonal` declares that the integrand and the metric are
/// both independent of `φ`.
pub fn integrate_points<F>(metric: &MetricPatch, zonal: bool, tol: f64, f: F) -> Result<SurfaceIntegral>
where
    F: Fn([f64; 3]) -> Result<f64> + Sync,
{
    let zonal = zonal && metric.profile().is_some();
    let mut prev: Option<(f64, f64)> = None;
    let mut prev_est = f64::INFINITY;
    let mut n = START_ORDER;
    while n <= MAX_ORDER {
        let (value, magnitude) = level(metric, zonal, n, &f)?;
        if let Some((pv, _)) = prev {
            let est = abs(value - pv);
            let scale = magnitude.max(1e-300);
            if est <= tol * scale || est == 0.0 {
                return Ok(SurfaceIntegral { value, error_estimate: est, magnitude, order: n });
            }
            // refinement that stops helping is a failure, but allow the
            // first levels to be pre-asymptotic
            if n >= 8 * START_ORDER && est >= prev_est {
                return Err(Error::QuadratureFailure { estimate: est / scale });
            }
            prev_est = est;
        }
        prev = Some((value, magnitude));
        n *= 2;
    }
    Err(Error::QuadratureFailure { estimate: prev_est })
}

fn level<F>(metric: &MetricPatch, zonal: bool, n: usize, f: &F) -> Result<(f64, f64)>
where
    F: Fn([f64; 3]) -> Result<f64> + Sync,
{
    let rule = gauss_legendre(n, -1.0, 1.0)?;
    let m = if zonal { 1 } else { 2 * n };
    let dphi = TAU / m as f64;
    let rows: Vec<Result<(f64, f64)>> = map_range(n, |i| {
        let x = rule.nodes[i];
        let theta = acos(x);
        let (mut s, mut sa) = (0.0, 0.0);
        for j in 0..m {
            let phi = dphi * j as f64;
            let u = [theta, phi];
            let density = metric.area_density_cos(u)?;
            let v = f(Chart::North.to_ambient(u))? * density;
            s += v;
            sa += abs(v);
        }
        Ok((rule.weights[i] * dphi * s, rule.weights[i] * dphi * sa))
    });
    let (mut total, mut mag) = (0.0, 0.0);
    for r in rows {
        let (a, b) = r?;
        total += a;
        mag += b;
    }
    Ok((total, mag))
}

/// `∬ f dS` for a scalar field.
pub fn integrate_scalar(metric: &MetricPatch, field: &ScalarField) -> Result<f64> {
    Ok(integrate_points(metric, field.is_zonal(), DEFAULT_TOLERANCE, |x| field.value(x))?.value)
}

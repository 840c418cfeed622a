//! The Laplace–Beltrami operator on scalar fields.

use crate::error::{Error, Result};
use crate::geometry::field::ScalarField;
use crate::geometry::metric::{Chart, MetricJet, MetricPatch, POLE_EXCLUSION};
use crate::jet::Jet;
use crate::math::{abs, sin};

/// `Δf = (1/√det g) ∂_i(√det g g^{ij} ∂_j f)` from the metric and field jets.
pub fn laplacian_from_jets(g: &MetricJet, f: &Jet) -> f64 {
    let det = g.a * g.c - g.b * g.b;
    let s = det.sqrt();
    let rs = s.recip();
    let (m11, m12, m22) = (g.c * rs, -(g.b * rs), g.a * rs);
    let div1 = m11.d[0] + m12.d[1];
    let div2 = m12.d[0] + m22.d[1];
    let [g11, g12, g22] = g.inverse();
    (div1 * f.d[0] + div2 * f.d[1]) / s.v + g11 * f.h[0] + 2.0 * g12 * f.h[1] + g22 * f.h[2]
}

/// `Δf` at chart coordinates `u`.
pub fn laplace_beltrami(metric: &MetricPatch, field: &ScalarField, chart: Chart, u: [f64; 2]) -> Result<f64> {
    if abs(sin(u[0])) < POLE_EXCLUSION {
        return Err(Error::PoleProximity { u1: u[0], u2: u[1], radius: POLE_EXCLUSION });
    }
    let g = metric.coefficients(chart, u)?;
    let f = field.jet(chart, u)?;
    Ok(laplacian_from_jets(&g, &f))
}

/// `Δf` at an ambient point, in the chart farthest from a pole.
pub fn laplace_beltrami_at(metric: &MetricPatch, field: &ScalarField, x: [f64; 3]) -> Result<f64> {
    let (chart, u) = if metric.has_rotated_chart() { Chart::best_for(x) } else { (Chart::North, Chart::North.from_ambient(x)) };
    laplace_beltrami(metric, field, chart, u)
}

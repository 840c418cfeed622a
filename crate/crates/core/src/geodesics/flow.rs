//! Geodesic flow on the unit cosphere bundle.
//!
//! Hamilton's equations for `H = ½ g^{ij} p_i p_j` are integrated together
//! with the scalar Jacobi equation `y'' + K y = 0` for the two fundamental
//! solutions, so every path carries its Jacobi data. Paths hop between the
//! north and east charts whenever they come within `0.3` rad of a pole.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::curvature::curvature_from_jet;
use crate::geometry::metric::{Chart, MetricJet, MetricPatch};
use crate::math::{abs, ceil, cos, dot3, norm3, sin, sqrt};
use crate::numerics::ode::Stepper;

/// Local tolerance of the flow integrator (per unit length).
pub const FLOW_TOLERANCE: f64 = 1e-11;
/// Polar distance at which a path switches to the other chart.
pub const CHART_SWITCH: f64 = 0.3;
const MAX_SEGMENT: f64 = 0.05;

/// A covector in the unit cosphere bundle, in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub chart: Chart,
    pub u: [f64; 2],
    pub p: [f64; 2],
}

impl PhasePoint {
    /// `H = ½ g^{ij} p_i p_j`.
    pub fn hamiltonian(&self, metric: &MetricPatch) -> Result<f64> {
        let g = metric.coefficients(self.chart, self.u)?;
        Ok(hamiltonian(&g, self.p))
    }

    pub fn position(&self) -> [f64; 3] {
        self.chart.to_ambient(self.u)
    }

    /// Unit tangent vector in ambient coordinates.
    pub fn velocity(&self, metric: &MetricPatch) -> Result<[f64; 3]> {
        let g = metric.coefficients(self.chart, self.u)?;
        Ok(ambient_velocity(self.chart, self.u, raise(&g, self.p)))
    }

    /// The same phase point expressed in `chart`.
    pub fn to_chart(&self, metric: &MetricPatch, chart: Chart) -> Result<PhasePoint> {
        if chart == self.chart {
            return Ok(*self);
        }
        let g = metric.coefficients(self.chart, self.u)?;
        let v = ambient_velocity(self.chart, self.u, raise(&g, self.p));
        let x = self.chart.to_ambient(self.u);
        let u = chart.from_ambient(x);
        let frame = chart.frame(u);
        let s2 = sin(u[0]) * sin(u[0]);
        let ud = [dot3(frame[0], v), dot3(frame[1], v) / s2];
        let g2 = metric.coefficients(chart, u)?;
        Ok(PhasePoint { chart, u, p: lower(&g2, ud) })
    }

    /// Rotate the point about the `z` axis by `angle` (an isometry of every
    /// surface of revolution).
    pub fn rotated_about_z(&self, metric: &MetricPatch, angle: f64) -> Result<PhasePoint> {
        let north = self.to_chart(metric, Chart::North)?;
        Ok(PhasePoint { u: [north.u[0], north.u[1] + angle], ..north })
    }
}

fn hamiltonian(g: &MetricJet, p: [f64; 2]) -> f64 {
    let [i11, i12, i22] = g.inverse();
    0.5 * (i11 * p[0] * p[0] + 2.0 * i12 * p[0] * p[1] + i22 * p[1] * p[1])
}

fn raise(g: &MetricJet, p: [f64; 2]) -> [f64; 2] {
    let [i11, i12, i22] = g.inverse();
    [i11 * p[0] + i12 * p[1], i12 * p[0] + i22 * p[1]]
}

fn lower(g: &MetricJet, v: [f64; 2]) -> [f64; 2] {
    [g.a.v * v[0] + g.b.v * v[1], g.b.v * v[0] + g.c.v * v[1]]
}

fn ambient_velocity(chart: Chart, u: [f64; 2], ud: [f64; 2]) -> [f64; 3] {
    let f = chart.frame(u);
    [ud[0] * f[0][0] + ud[1] * f[1][0], ud[0] * f[0][1] + ud[1] * f[1][1], ud[0] * f[0][2] + ud[1] * f[1][2]]
}

/// Unit covector at `u` making angle `direction` with `∂/∂u₁`, measured
/// towards the positively oriented orthonormal completion.
pub fn lift_to_cosphere(metric: &MetricPatch, chart: Chart, u: [f64; 2], direction: f64) -> Result<PhasePoint> {
    let g = metric.coefficients(chart, u)?;
    let det = g.det();
    if !(det > 1e-12) || !(g.a.v > 0.0) {
        return Err(Error::DegenerateMetric { u1: u[0], u2: u[1], det });
    }
    let sa = sqrt(g.a.v);
    let e1 = [1.0 / sa, 0.0];
    let e2 = [-g.b.v / (sa * sqrt(det)), g.a.v / (sa * sqrt(det))];
    let (c, s) = (cos(direction), sin(direction));
    let t = [c * e1[0] + s * e2[0], c * e1[1] + s * e2[1]];
    Ok(PhasePoint { chart, u, p: lower(&g, t) })
}

/// Lift at an ambient point, in the chart farthest from a pole.
pub fn lift_at(metric: &MetricPatch, x: [f64; 3], direction: f64) -> Result<PhasePoint> {
    let (chart, u) = if metric.has_rotated_chart() { Chart::best_for(x) } else { (Chart::North, Chart::North.from_ambient(x)) };
    lift_to_cosphere(metric, chart, u, direction)
}

/// One sample of an integrated path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    /// Arc length from the start.
    pub r: f64,
    pub point: PhasePoint,
    pub position: [f64; 3],
    pub velocity: [f64; 3],
    /// `(u, u', v, v')` of the fundamental Jacobi solutions.
    pub jacobi: [f64; 4],
    pub curvature: f64,
}

/// A geodesic sampled at uniform arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPath {
    pub samples: Vec<PathSample>,
    pub total_length: f64,
    /// `|X(L) - X(0)| + |Ẋ(L) - Ẋ(0)|` in ambient coordinates.
    pub closure_residual: f64,
    /// `max |H - ½|` over the samples.
    pub energy_drift: f64,
    pub steps: usize,
}

impl GeodesicPath {
    pub fn start(&self) -> &PathSample {
        &self.samples[0]
    }

    /// Whether the path closes to within `threshold`.
    pub fn is_closed(&self, threshold: f64) -> bool {
        self.closure_residual < threshold
    }
}

fn flow_field(metric: &MetricPatch, chart: Chart) -> impl Fn(&[f64; 8]) -> [f64; 8] + '_ {
    move |y: &[f64; 8]| {
        let g = match metric.coefficients(chart, [y[0], y[1]]) {
            Ok(g) => g,
            Err(_) => return [f64::NAN; 8],
        };
        let ud = raise(&g, [y[2], y[3]]);
        let dp = |k: usize| 0.5 * (g.a.d[k] * ud[0] * ud[0] + 2.0 * g.b.d[k] * ud[0] * ud[1] + g.c.d[k] * ud[1] * ud[1]);
        let k = curvature_from_jet(&g);
        [ud[0], ud[1], dp(0), dp(1), y[5], -k * y[4], y[7], -k * y[6]]
    }
}

fn sample_at(metric: &MetricPatch, chart: Chart, y: &[f64; 8], r: f64) -> Result<(PathSample, f64)> {
    let u = [y[0], y[1]];
    let g = metric.coefficients(chart, u)?;
    let p = [y[2], y[3]];
    let ud = raise(&g, p);
    let sample = PathSample {
        r,
        point: PhasePoint { chart, u, p },
        position: chart.to_ambient(u),
        velocity: ambient_velocity(chart, u, ud),
        jacobi: [y[4], y[5], y[6], y[7]],
        curvature: curvature_from_jet(&g),
    };
    Ok((sample, hamiltonian(&g, p) - 0.5))
}

/// Integrate the flow from `start` over `length`, recording `samples + 1`
/// uniformly spaced points (both ends included).
pub fn geodesic_flow(metric: &MetricPatch, start: PhasePoint, length: f64, samples: usize) -> Result<GeodesicPath> {
    if samples == 0 || !(length > 0.0) {
        return Err(crate::error::invalid("geodesic_flow needs a positive length and at least one sample"));
    }
    let mut point = start;
    if metric.has_rotated_chart() && sin(point.u[0]) < sin(CHART_SWITCH) {
        point = point.to_chart(metric, point.chart.other())?;
    }
    let mut chart = point.chart;
    let mut y = [point.u[0], point.u[1], point.p[0], point.p[1], 1.0, 0.0, 0.0, 1.0];
    let mut stepper = Stepper::new(FLOW_TOLERANCE, length)?;
    let (first, e0) = sample_at(metric, chart, &y, 0.0)?;
    let mut out = Vec::with_capacity(samples + 1);
    out.push(first);
    let mut drift = abs(e0);
    let dr = length / samples as f64;
    let pieces = ceil(dr / MAX_SEGMENT).max(1.0) as usize;
    for j in 0..samples {
        let r0 = dr * j as f64;
        for s in 0..pieces {
            let a = r0 + dr * s as f64 / pieces as f64;
            let b = if s + 1 == pieces { dr * (j + 1) as f64 } else { r0 + dr * (s + 1) as f64 / pieces as f64 };
            let field = flow_field(metric, chart);
            stepper.advance(&field, &mut y, a, b)?;
            if metric.has_rotated_chart() && sin(y[0]) < sin(CHART_SWITCH) {
                let here = PhasePoint { chart, u: [y[0], y[1]], p: [y[2], y[3]] };
                let there = here.to_chart(metric, chart.other())?;
                chart = there.chart;
                y[0] = there.u[0];
                y[1] = there.u[1];
                y[2] = there.p[0];
                y[3] = there.p[1];
            }
        }
        let (s, e) = sample_at(metric, chart, &y, dr * (j + 1) as f64)?;
        drift = drift.max(abs(e));
        out.push(s);
    }
    let (a, b) = (out[0], out[samples]);
    let dx = [b.position[0] - a.position[0], b.position[1] - a.position[1], b.position[2] - a.position[2]];
    let dv = [b.velocity[0] - a.velocity[0], b.velocity[1] - a.velocity[1], b.velocity[2] - a.velocity[2]];
    Ok(GeodesicPath {
        samples: out,
        total_length: length,
        closure_residual: norm3(dx) + norm3(dv),
        energy_drift: drift,
        steps: stepper.accepted,
    })
}

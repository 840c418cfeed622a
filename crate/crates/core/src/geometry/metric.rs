//! Metric patches on the two-sphere.
//!
//! Points of the surface are identified with points of the unit sphere in
//! `R³`; a metric is a smooth Riemannian tensor on that sphere. Two polar
//! charts cover it:
//!
//! - [`Chart::North`]: `X = (sin θ cos φ, sin θ sin φ, cos θ)`, poles on the
//!   `z` axis;
//! - [`Chart::East`]: `X = (cos θ, sin θ cos φ, sin θ sin φ)`, poles on the
//!   `x` axis, which lie on the equator of the north chart.
//!
//! Surfaces of revolution about the `z` axis are stored in ambient form
//! `g = g_round + w(z) dz ⊗ dz`. With the profile written as
//! `h(x) = (1 - x²) r(x)` the polar metric `(1 + h(cos θ))² dθ² + sin²θ dφ²`
//! corresponds to `w = 2r + (1 - z²) r²`, a polynomial, so both charts get
//! exact coefficient jets and nothing is singular at the poles.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{invalid, Error, Result};
use crate::jet::Jet;
use crate::math::{abs, acos, atan2, cos, sin, sqrt, PI, TAU};

/// Polar coordinate chart on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chart {
    North,
    East,
}

impl Chart {
    pub fn other(self) -> Chart {
        match self {
            Chart::North => Chart::East,
            Chart::East => Chart::North,
        }
    }

    /// Ambient position of chart coordinates `u = (θ, φ)`.
    pub fn to_ambient(self, u: [f64; 2]) -> [f64; 3] {
        let (st, ct, sp, cp) = (sin(u[0]), cos(u[0]), sin(u[1]), cos(u[1]));
        match self {
            Chart::North => [st * cp, st * sp, ct],
            Chart::East => [ct, st * cp, st * sp],
        }
    }

    /// Chart coordinates of an ambient unit vector.
    pub fn from_ambient(self, x: [f64; 3]) -> [f64; 2] {
        let (axis, a, b) = match self {
            Chart::North => (x[2], x[0], x[1]),
            Chart::East => (x[0], x[1], x[2]),
        };
        let phi = atan2(b, a);
        [acos(axis.clamp(-1.0, 1.0)), if phi < 0.0 { phi + TAU } else { phi }]
    }

    /// The chart in which `x` is farthest from a pole, with its coordinates.
    pub fn best_for(x: [f64; 3]) -> (Chart, [f64; 2]) {
        let chart = if abs(x[2]) <= abs(x[0]) { Chart::North } else { Chart::East };
        (chart, chart.from_ambient(x))
    }

    /// Ambient coordinate functions as jets in the chart coordinates.
    pub fn ambient_jets(self, u: [f64; 2]) -> [Jet; 3] {
        let (t, p) = (Jet::variable(u[0], 0), Jet::variable(u[1], 1));
        let (st, ct, sp, cp) = (t.sin(), t.cos(), p.sin(), p.cos());
        match self {
            Chart::North => [st * cp, st * sp, ct],
            Chart::East => [ct, st * cp, st * sp],
        }
    }

    /// Ambient tangent vectors `∂X/∂θ`, `∂X/∂φ`.
    pub fn frame(self, u: [f64; 2]) -> [[f64; 3]; 2] {
        let (st, ct, sp, cp) = (sin(u[0]), cos(u[0]), sin(u[1]), cos(u[1]));
        match self {
            Chart::North => [[ct * cp, ct * sp, -st], [-st * sp, st * cp, 0.0]],
            Chart::East => [[-st, ct * cp, ct * sp], [0.0, -st * sp, st * cp]],
        }
    }
}

/// Coefficients `A`, `B`, `C` of `A du₁² + 2B du₁du₂ + C du₂²` with first
/// and second partials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricJet {
    pub a: Jet,
    pub b: Jet,
    pub c: Jet,
}

impl MetricJet {
    pub fn det(&self) -> f64 {
        self.a.v * self.c.v - self.b.v * self.b.v
    }

    /// `g⁻¹` entries `(g¹¹, g¹², g²²)`.
    pub fn inverse(&self) -> [f64; 3] {
        let d = self.det();
        [self.c.v / d, -self.b.v / d, self.a.v / d]
    }

    pub fn scaled(&self, s: f64) -> MetricJet {
        MetricJet { a: self.a * s, b: self.b * s, c: self.c * s }
    }
}

/// Polynomial with ascending coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    /// `(p, p', p'')` at `x` by Horner's scheme.
    pub fn eval3(&self, x: f64) -> (f64, f64, f64) {
        let (mut p, mut d, mut dd) = (0.0, 0.0, 0.0);
        for &c in self.0.iter().rev() {
            dd = dd * x + 2.0 * d;
            d = d * x + p;
            p = p * x + c;
        }
        (p, d, dd)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval3(x).0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    fn mul(&self, o: &Polynomial) -> Polynomial {
        if self.0.is_empty() || o.0.is_empty() {
            return Polynomial(Vec::new());
        }
        let mut out = vec![0.0; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial(out)
    }

    fn add(&self, o: &Polynomial) -> Polynomial {
        let n = self.0.len().max(o.0.len());
        Polynomial((0..n).map(|i| self.0.get(i).unwrap_or(&0.0) + o.0.get(i).unwrap_or(&0.0)).collect())
    }

    fn scale(&self, s: f64) -> Polynomial {
        Polynomial(self.0.iter().map(|c| c * s).collect())
    }

    fn is_odd(&self) -> bool {
        self.0.iter().step_by(2).all(|&c| c == 0.0)
    }
}

/// Profile `h(x) = (1 - x²) r(x)` of a surface of revolution
/// `(1 + h(cos θ))² dθ² + sin²θ dφ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    r: Polynomial,
    w: Polynomial,
}

impl Profile {
    pub fn new(r_coefficients: Vec<f64>) -> Result<Profile> {
        if r_coefficients.iter().any(|c| !c.is_finite()) {
            return Err(invalid("profile coefficients must be finite"));
        }
        let r = Polynomial(r_coefficients);
        let one_minus_x2 = Polynomial(vec![1.0, 0.0, -1.0]);
        let w = r.scale(2.0).add(&one_minus_x2.mul(&r.mul(&r)));
        Ok(Profile { r, w })
    }

    /// `h(x) = ε x (1 - x²)`.
    pub fn zoll(epsilon: f64) -> Profile {
        Profile::new(vec![0.0, epsilon]).expect("finite")
    }

    /// `h(x) = amplitude (1 - x²)`, i.e. `amplitude · sin²θ`; not Zoll.
    pub fn even_bump(amplitude: f64) -> Profile {
        Profile::new(vec![amplitude]).expect("finite")
    }

    pub fn r_coefficients(&self) -> &[f64] {
        &self.r.0
    }

    pub fn is_odd(&self) -> bool {
        self.r.is_odd()
    }

    pub fn is_flat(&self) -> bool {
        self.r.0.iter().all(|&c| c == 0.0)
    }

    /// `(h, h')` at `x`.
    pub fn h(&self, x: f64) -> (f64, f64) {
        let (r, rp, _) = self.r.eval3(x);
        ((1.0 - x * x) * r, -2.0 * x * r + (1.0 - x * x) * rp)
    }

    /// `(w, w', w'')` of the ambient form at height `z`.
    pub fn w(&self, z: f64) -> (f64, f64, f64) {
        self.w.eval3(z)
    }

    /// `sup |h|` on `[-1, 1]`, sampled densely and refined around the maximum.
    pub fn sup_abs_h(&self) -> f64 {
        let n = 4000;
        let mut best = (0.0, 0.0);
        for i in 0..=n {
            let x = -1.0 + 2.0 * i as f64 / n as f64;
            let v = abs(self.h(x).0);
            if v > best.0 {
                best = (v, x);
            }
        }
        let (mut lo, mut hi) = ((best.1 - 1e-3).max(-1.0), (best.1 + 1e-3).min(1.0));
        for _ in 0..60 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if abs(self.h(m1).0) < abs(self.h(m2).0) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        best.0.max(abs(self.h(0.5 * (lo + hi)).0))
    }
}

/// How coefficient partials are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference,
}

/// Metric families with built-in analytic coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricFamily {
    RoundSphere,
    /// Zoll surface of revolution; the profile must be odd.
    ZollOfRevolution(Profile),
    /// Any surface of revolution in the same profile form (negative controls).
    Revolution(Profile),
}

type CoefficientFn = dyn Fn(f64, f64) -> [f64; 3] + Send + Sync;

#[derive(Clone)]
enum Repr {
    Revolution(Profile),
    Coefficients(Arc<CoefficientFn>),
}

/// A metric on the sphere together with its chart machinery.
#[derive(Clone)]
pub struct MetricPatch {
    repr: Repr,
    zoll: bool,
    label: &'static str,
}

impl fmt::Debug for MetricPatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("MetricPatch");
        d.field("family", &self.label);
        if let Repr::Revolution(p) = &self.repr {
            d.field("r", &p.r_coefficients());
        }
        d.finish()
    }
}

/// Polar coordinate singularities are kept at least this far away when
/// sampling or evaluating in a single chart.
pub const POLE_EXCLUSION: f64 = 1e-6;

/// Build one of the built-in metrics, validating that it is Riemannian.
pub fn builtin_metric(family: MetricFamily) -> Result<MetricPatch> {
    let (profile, zoll, label) = match family {
        MetricFamily::RoundSphere => (Profile::new(Vec::new())?, true, "round-sphere"),
        MetricFamily::ZollOfRevolution(p) => {
            if !p.is_odd() {
                return Err(invalid("a Zoll profile h must be odd"));
            }
            (p, true, "zoll-of-revolution")
        }
        MetricFamily::Revolution(p) => {
            let odd = p.is_odd();
            (p, odd, "revolution")
        }
    };
    let sup = profile.sup_abs_h();
    if !(sup < 1.0) {
        return Err(Error::DegenerateMetric { u1: f64::NAN, u2: f64::NAN, det: 1.0 - sup });
    }
    let m = MetricPatch { repr: Repr::Revolution(profile), zoll, label };
    m.check_riemannian()?;
    Ok(m)
}

impl MetricPatch {
    /// Metric given by user coefficients `(A, B, C)` in north-chart
    /// coordinates `(θ, φ)`; partials by centered differences with relative
    /// step `1e-5`. Only the north chart is available.
    pub fn from_coefficients(f: impl Fn(f64, f64) -> [f64; 3] + Send + Sync + 'static) -> Result<MetricPatch> {
        let m = MetricPatch { repr: Repr::Coefficients(Arc::new(f)), zoll: false, label: "coefficients" };
        m.check_riemannian()?;
        Ok(m)
    }

    pub fn round() -> MetricPatch {
        builtin_metric(MetricFamily::RoundSphere).expect("round sphere is valid")
    }

    pub fn zoll(epsilon: f64) -> Result<MetricPatch> {
        builtin_metric(MetricFamily::ZollOfRevolution(Profile::zoll(epsilon)))
    }

    pub fn family_label(&self) -> &'static str {
        self.label
    }

    pub fn derivative_mode(&self) -> DerivativeMode {
        match self.repr {
            Repr::Revolution(_) => DerivativeMode::Analytic,
            Repr::Coefficients(_) => DerivativeMode::FiniteDifference,
        }
    }

    /// Profile of a surface of revolution about the `z` axis.
    pub fn profile(&self) -> Option<&Profile> {
        match &self.repr {
            Repr::Revolution(p) => Some(p),
            Repr::Coefficients(_) => None,
        }
    }

    /// Exactly the round metric.
    pub fn is_round(&self) -> bool {
        self.profile().is_some_and(Profile::is_flat)
    }

    /// Whether the metric is a member of a family known to be SC₂π. Closure
    /// is still certified numerically by the geodesic module.
    pub fn claims_zoll(&self) -> bool {
        self.zoll
    }

    /// Whether the east chart is available.
    pub fn has_rotated_chart(&self) -> bool {
        matches!(self.repr, Repr::Revolution(_))
    }

    /// Coefficient jets at `u` in `chart`.
    pub fn coefficients(&self, chart: Chart, u: [f64; 2]) -> Result<MetricJet> {
        match &self.repr {
            Repr::Revolution(p) => Ok(revolution_jet(p, chart, u)),
            Repr::Coefficients(f) => {
                if chart != Chart::North {
                    return Err(Error::PoleProximity { u1: u[0], u2: u[1], radius: 0.0 });
                }
                Ok(fd_metric_jet(f.as_ref(), u))
            }
        }
    }

    fn check_riemannian(&self) -> Result<()> {
        let n = 64;
        for i in 0..n {
            let theta = PI * (i as f64 + 0.5) / n as f64;
            for j in 0..n {
                let phi = TAU * j as f64 / n as f64;
                let g = self.coefficients(Chart::North, [theta, phi])?;
                let det = g.det();
                if !(g.a.v > 0.0) || !(det > 0.0) {
                    return Err(Error::DegenerateMetric { u1: theta, u2: phi, det });
                }
            }
        }
        Ok(())
    }

    /// Riemannian area element `√det g` with respect to `dθ dφ` in the north
    /// chart, divided by `sin θ` (the `dx dφ` density with `x = cos θ`).
    pub fn area_density_cos(&self, u: [f64; 2]) -> Result<f64> {
        match &self.repr {
            Repr::Revolution(p) => Ok(1.0 + p.h(cos(u[0])).0),
            Repr::Coefficients(_) => {
                let g = self.coefficients(Chart::North, u)?;
                Ok(sqrt(g.det()) / sin(u[0]))
            }
        }
    }
}

fn revolution_jet(p: &Profile, chart: Chart, u: [f64; 2]) -> MetricJet {
    let (t, ph) = (Jet::variable(u[0], 0), Jet::variable(u[1], 1));
    let (st, ct) = (t.sin(), t.cos());
    let (z, z_t, z_p) = match chart {
        Chart::North => (ct, -st, Jet::constant(0.0)),
        Chart::East => {
            let (sp, cp) = (ph.sin(), ph.cos());
            (st * sp, ct * sp, st * cp)
        }
    };
    let (w0, w1, w2) = p.w(z.v);
    let w = z.lift(w0, w1, w2);
    MetricJet { a: w * z_t * z_t + 1.0, b: w * z_t * z_p, c: st * st + w * z_p * z_p }
}

fn fd_metric_jet(f: &CoefficientFn, u: [f64; 2]) -> MetricJet {
    let h = [1e-5 * abs(u[0]).max(1.0), 1e-5 * abs(u[1]).max(1.0)];
    let at = |d0: f64, d1: f64| f(u[0] + d0 * h[0], u[1] + d1 * h[1]);
    let c0 = at(0.0, 0.0);
    let (p0, m0, p1, m1) = (at(1.0, 0.0), at(-1.0, 0.0), at(0.0, 1.0), at(0.0, -1.0));
    let (pp, pm, mp, mm) = (at(1.0, 1.0), at(1.0, -1.0), at(-1.0, 1.0), at(-1.0, -1.0));
    let comp = |k: usize| Jet {
        v: c0[k],
        d: [(p0[k] - m0[k]) / (2.0 * h[0]), (p1[k] - m1[k]) / (2.0 * h[1])],
        h: [
            (p0[k] - 2.0 * c0[k] + m0[k]) / (h[0] * h[0]),
            (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * h[0] * h[1]),
            (p1[k] - 2.0 * c0[k] + m1[k]) / (h[1] * h[1]),
        ],
    };
    MetricJet { a: comp(0), b: comp(1), c: comp(2) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_coefficients() {
        let m = MetricPatch::round();
        for &(t, p) in &[(0.3, 1.0), (1.5, 4.0), (2.9, 0.1)] {
            let g = m.coefficients(Chart::North, [t, p]).unwrap();
            assert!((g.a.v - 1.0).abs() < 1e-15);
            assert_eq!(g.b.v, 0.0);
            assert!((g.c.v - f64::sin(t).powi(2)).abs() < 1e-15);
        }
    }

    #[test]
    fn zoll_with_zero_amplitude_is_round() {
        let z = MetricPatch::zoll(0.0).unwrap();
        let r = MetricPatch::round();
        for chart in [Chart::North, Chart::East] {
            for i in 1..20 {
                let u = [0.15 * i as f64, 0.4 * i as f64];
                assert_eq!(z.coefficients(chart, u).unwrap(), r.coefficients(chart, u).unwrap());
            }
        }
    }

    #[test]
    fn ambient_form_reproduces_polar_profile() {
        let m = MetricPatch::zoll(0.2).unwrap();
        let p = m.profile().unwrap();
        for i in 1..30 {
            let t = PI * i as f64 / 30.0;
            let g = m.coefficients(Chart::North, [t, 0.7]).unwrap();
            let one_h = 1.0 + p.h(t.cos()).0;
            assert!((g.a.v - one_h * one_h).abs() < 1e-13);
        }
    }

    #[test]
    fn charts_describe_the_same_metric() {
        // the same tangent vector must have the same length in both charts
        let m = MetricPatch::zoll(0.15).unwrap();
        let x = Chart::North.to_ambient([1.1, 0.6]);
        let un = Chart::North.from_ambient(x);
        let ue = Chart::East.from_ambient(x);
        assert!((Chart::East.to_ambient(ue)[1] - x[1]).abs() < 1e-14);
        let v = {
            let f = Chart::North.frame(un);
            [0.3 * f[0][0] + 0.8 * f[1][0], 0.3 * f[0][1] + 0.8 * f[1][1], 0.3 * f[0][2] + 0.8 * f[1][2]]
        };
        let len2 = |chart: Chart, u: [f64; 2]| {
            let f = chart.frame(u);
            let s2 = f64::sin(u[0]).powi(2);
            let d1 = f[0][0] * v[0] + f[0][1] * v[1] + f[0][2] * v[2];
            let d2 = (f[1][0] * v[0] + f[1][1] * v[1] + f[1][2] * v[2]) / s2;
            let g = m.coefficients(chart, u).unwrap();
            g.a.v * d1 * d1 + 2.0 * g.b.v * d1 * d2 + g.c.v * d2 * d2
        };
        assert!((len2(Chart::North, un) - len2(Chart::East, ue)).abs() < 1e-13);
    }

    #[test]
    fn degenerate_profiles_rejected() {
        assert!(matches!(builtin_metric(MetricFamily::ZollOfRevolution(Profile::zoll(2.7))), Err(Error::DegenerateMetric { .. })));
        assert!(builtin_metric(MetricFamily::ZollOfRevolution(Profile::zoll(2.5))).is_ok());
        assert!(builtin_metric(MetricFamily::ZollOfRevolution(Profile::even_bump(0.1))).is_err());
        assert!(builtin_metric(MetricFamily::Revolution(Profile::even_bump(-1.0))).is_err());
        assert!(MetricPatch::from_coefficients(|_, t| [1.0, 0.0, f64::cos(t)]).is_err());
    }

    #[test]
    fn riemannian_on_sample_grid() {
        for eps in [0.0, 0.05, 0.1, 0.2, 0.3] {
            let m = MetricPatch::zoll(eps).unwrap();
            for chart in [Chart::North, Chart::East] {
                for i in 0..64 {
                    for j in 0..64 {
                        let u = [PI * (i as f64 + 0.5) / 64.0, TAU * j as f64 / 64.0];
                        let g = m.coefficients(chart, u).unwrap();
                        assert!(g.a.v > 0.0 && g.det() > 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn finite_difference_mode_matches_analytic() {
        let m = MetricPatch::zoll(0.1).unwrap();
        let p = m.profile().unwrap().clone();
        let fd = MetricPatch::from_coefficients(move |t, _| {
            let one_h = 1.0 + p.h(t.cos()).0;
            [one_h * one_h, 0.0, t.sin().powi(2)]
        })
        .unwrap();
        assert_eq!(fd.derivative_mode(), DerivativeMode::FiniteDifference);
        let u = [0.9, 2.0];
        let (a, b) = (m.coefficients(Chart::North, u).unwrap(), fd.coefficients(Chart::North, u).unwrap());
        assert!((a.a.d[0] - b.a.d[0]).abs() < 1e-8);
        assert!((a.a.h[0] - b.a.h[0]).abs() < 1e-4);
        assert!((a.c.h[0] - b.c.h[0]).abs() < 1e-4);
        assert!(fd.coefficients(Chart::East, u).is_err());
    }

    #[test]
    fn polynomial_derivatives() {
        let p = Polynomial(vec![1.0, -2.0, 0.5, 3.0]);
        let (v, d, dd) = p.eval3(0.7);
        assert!((v - (1.0 - 1.4 + 0.5 * 0.49 + 3.0 * 0.343)).abs() < 1e-14);
        assert!((d - (-2.0 + 0.7 + 9.0 * 0.49)).abs() < 1e-14);
        assert!((dd - (1.0 + 18.0 * 0.7)).abs() < 1e-13);
        assert_eq!(p.degree(), 3);
    }
}

//! Surface invariants feeding `ζ(0)`, `ζ(1)` and the heat coefficients.

use crate::error::Result;
use crate::geometry::curvature::gauss_curvature_at;
use crate::geometry::field::ScalarField;
use crate::geometry::integrate::{integrate_points, DEFAULT_TOLERANCE};
use crate::geometry::laplacian::laplace_beltrami_at;
use crate::geometry::metric::MetricPatch;
use crate::math::PI;

/// The function multiplying `-2q` in the potential part of `ζ(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum GammaConvention {
    /// `γ = K`. With it `-ζ(1)` is the `t¹` coefficient of `t·Σe^{-μt}`
    /// (for `q = c` on the round sphere, `1/15 - c/3 + c²/2`).
    #[default]
    Curvature,
    /// `γ = K - 1`, the form the trace identity's right side uses.
    CurvatureMinusOne,
}

/// Integrals over the surface from which every zeta value and every term of
/// the trace identity's right side is assembled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceInvariants {
    pub area: f64,
    /// `∬ K dS`.
    pub curvature: f64,
    /// `∬ (ΔK + K²) dS`.
    pub curvature_quadratic: f64,
    /// `∬ q dS`.
    pub potential: f64,
    /// `∬ (-Δq + 3q²) dS`.
    pub potential_quadratic: f64,
    /// `∬ q K dS`.
    pub potential_curvature: f64,
}

impl SurfaceInvariants {
    /// `∬ (-Δq + 3q² - 2qγ) dS`.
    pub fn potential_term(&self, gamma: GammaConvention) -> f64 {
        let q_gamma = match gamma {
            GammaConvention::Curvature => self.potential_curvature,
            GammaConvention::CurvatureMinusOne => self.potential_curvature - self.potential,
        };
        self.potential_quadratic - 2.0 * q_gamma
    }
}

/// Compute all surface integrals for `(metric, q)`.
pub fn surface_invariants(metric: &MetricPatch, q: &ScalarField) -> Result<SurfaceInvariants> {
    let tol = DEFAULT_TOLERANCE;
    let metric_zonal = metric.profile().is_some();
    let area = integrate_points(metric, metric_zonal, tol, |_| Ok(1.0))?.value;
    let curvature = integrate_points(metric, metric_zonal, tol, |x| gauss_curvature_at(metric, x))?.value;
    let kfield = ScalarField::Curvature(metric.clone());
    let curvature_quadratic = integrate_points(metric, metric_zonal, tol, |x| {
        let k = gauss_curvature_at(metric, x)?;
        Ok(laplace_beltrami_at(metric, &kfield, x)? + k * k)
    })?
    .value;
    let (potential, potential_quadratic, potential_curvature) = if q.is_zero() {
        (0.0, 0.0, 0.0)
    } else {
        let zonal = metric_zonal && q.is_zonal();
        let p = integrate_points(metric, zonal, tol, |x| q.value(x))?.value;
        let pq = integrate_points(metric, zonal, tol, |x| {
            let v = q.value(x)?;
            Ok(-laplace_beltrami_at(metric, q, x)? + 3.0 * v * v)
        })?
        .value;
        let pk = integrate_points(metric, zonal, tol, |x| Ok(q.value(x)? * gauss_curvature_at(metric, x)?))?.value;
        (p, pq, pk)
    };
    Ok(SurfaceInvariants { area, curvature, curvature_quadratic, potential, potential_quadratic, potential_curvature })
}

/// `ζ(0)` and `ζ(1)` of `-Δ + q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaValues {
    pub zeta0: f64,
    pub zeta1: f64,
    pub gamma: GammaConvention,
    pub invariants: SurfaceInvariants,
}

impl ZetaValues {
    pub fn from_invariants(inv: SurfaceInvariants, gamma: GammaConvention) -> Self {
        let zeta0 = (inv.curvature / 3.0 - inv.potential) / (4.0 * PI);
        let zeta1 = -inv.curvature_quadratic / (60.0 * PI) - inv.potential_term(gamma) / (24.0 * PI);
        ZetaValues { zeta0, zeta1, gamma, invariants: inv }
    }

    /// The values with every `q` term dropped, i.e. those of `-Δ` alone.
    pub fn without_potential(&self) -> ZetaValues {
        let inv = SurfaceInvariants { potential: 0.0, potential_quadratic: 0.0, potential_curvature: 0.0, ..self.invariants };
        ZetaValues::from_invariants(inv, self.gamma)
    }
}

pub fn zeta_values(metric: &MetricPatch, q: &ScalarField, gamma: GammaConvention) -> Result<ZetaValues> {
    Ok(ZetaValues::from_invariants(surface_invariants(metric, q)?, gamma))
}

/// Which theta series a coefficient triple belongs to: the round-sphere
/// series `F`, the metric-only series `L`, or `M` with the potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThetaKind {
    F,
    L,
    M,
}

/// Coefficients of `θ(t) = h₀/t + h₁ + h₂ t + O(t²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatCoefficients {
    pub h0: f64,
    pub h1: f64,
    pub h2: f64,
    pub which: ThetaKind,
}

impl HeatCoefficients {
    pub const ROUND: HeatCoefficients = HeatCoefficients { h0: 1.0, h1: 1.0 / 3.0, h2: 1.0 / 15.0, which: ThetaKind::F };
}

/// `(1, ζ(0), -ζ(1))` of the relevant operator; `F` is the fixed round triple.
pub fn heat_coefficients_from_zeta(metric: &MetricPatch, q: &ScalarField, which: ThetaKind, gamma: GammaConvention) -> Result<HeatCoefficients> {
    let q_used = match which {
        ThetaKind::F => return Ok(HeatCoefficients::ROUND),
        ThetaKind::L => ScalarField::zero(),
        ThetaKind::M => q.clone(),
    };
    let z = zeta_values(metric, &q_used, gamma)?;
    Ok(heat_coefficients_from_values(&z, which))
}

pub fn heat_coefficients_from_values(z: &ZetaValues, which: ThetaKind) -> HeatCoefficients {
    let area_ratio = z.invariants.area / (4.0 * PI);
    HeatCoefficients { h0: area_ratio, h1: z.zeta0, h2: -z.zeta1, which }
}

//! Metrics on the sphere, Gaussian curvature, the Laplace–Beltrami operator,
//! surface integrals and the `ζ(0)`, `ζ(1)` invariants.

pub mod curvature;
pub mod field;
pub mod integrate;
pub mod laplacian;
pub mod metric;
pub mod zeta;

pub use curvature::{gauss_curvature, gauss_curvature_at};
pub use field::{HarmonicExpansion, ScalarField};
pub use integrate::{integrate_points, integrate_scalar, SurfaceIntegral};
pub use laplacian::{laplace_beltrami, laplace_beltrami_at};
pub use metric::{builtin_metric, Chart, DerivativeMode, MetricFamily, MetricJet, MetricPatch, Profile};
pub use zeta::{
    heat_coefficients_from_zeta, surface_invariants, zeta_values, GammaConvention, HeatCoefficients, SurfaceInvariants, ThetaKind,
    ZetaValues,
};

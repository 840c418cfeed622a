//! The right side of the regularized trace identity, term by term.

use crate::error::{invalid, Result};
use crate::geodesics::{liouville_mean_square_on, sigma_mean_square, LiouvilleGrid, MeanSquare};
use crate::geometry::field::ScalarField;
use crate::geometry::metric::MetricPatch;
use crate::geometry::zeta::{surface_invariants, GammaConvention, SurfaceInvariants};
use crate::math::PI;

/// Itemized right side. `value` is the left-to-right sum of [`items`].
///
/// [`items`]: TheoremRhs::items
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremRhs {
    /// `V2(q)/2`.
    pub potential_mean_square: f64,
    /// `V2(σ)/2`.
    pub sigma_mean_square: f64,
    /// `1/15`.
    pub constant: f64,
    /// `-(1/60π) ∬ (ΔK + K²) dS`.
    pub curvature_term: f64,
    /// `-(1/24π) ∬ (-Δq + 3q² - 2q(K - 1)) dS`.
    pub potential_term: f64,
    pub value: f64,
    /// Grid-halving error estimates of the two mean squares.
    pub v2_q: MeanSquare,
    pub v2_sigma: MeanSquare,
    /// Liouville mean of the averaged curvature symbol.
    pub sigma_mean: f64,
    pub invariants: SurfaceInvariants,
}

pub const RHS_ITEM_NAMES: [&str; 5] = ["v2_q_half", "v2_sigma_half", "constant", "curvature", "potential"];

impl TheoremRhs {
    pub fn items(&self) -> [(&'static str, f64); 5] {
        let v = [self.potential_mean_square, self.sigma_mean_square, self.constant, self.curvature_term, self.potential_term];
        core::array::from_fn(|i| (RHS_ITEM_NAMES[i], v[i]))
    }

    fn sum_items(&self) -> f64 {
        self.items().iter().fold(0.0, |acc, (_, v)| acc + v)
    }
}

/// Assemble the right side for `(metric, q)`. The metric must claim closed
/// geodesics of length `2π`; the orbit bank re-checks closure.
pub fn theorem_rhs(metric: &MetricPatch, q: &ScalarField, grid: LiouvilleGrid) -> Result<TheoremRhs> {
    if !metric.claims_zoll() {
        return Err(invalid("the trace identity needs a metric with all geodesics closed of length 2π"));
    }
    let invariants = surface_invariants(metric, q)?;
    let v2_q = if q.is_zero() { MeanSquare { value: 0.0, coarse_value: 0.0, error_estimate: 0.0 } } else { liouville_mean_square_on(metric, q, grid)? };
    let (v2_sigma, sigma_mean) = sigma_mean_square(metric, grid)?;
    let mut rhs = TheoremRhs {
        potential_mean_square: v2_q.value / 2.0,
        sigma_mean_square: v2_sigma.value / 2.0,
        constant: 1.0 / 15.0,
        curvature_term: -invariants.curvature_quadratic / (60.0 * PI),
        potential_term: -invariants.potential_term(GammaConvention::CurvatureMinusOne) / (24.0 * PI),
        value: 0.0,
        v2_q,
        v2_sigma,
        sigma_mean,
        invariants,
    };
    rhs.value = rhs.sum_items();
    Ok(rhs)
}

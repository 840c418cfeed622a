//! Closure census: how far geodesics of length `2π` end from where they
//! started.

use alloc::vec::Vec;

use crate::error::Result;
use crate::geodesics::flow::{geodesic_flow, lift_at};
use crate::geometry::metric::MetricPatch;
use crate::math::TAU;
use crate::par::map_range;

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureCensus {
    /// One residual per start, in input order.
    pub residuals: Vec<f64>,
    pub threshold: f64,
}

impl ClosureCensus {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn failures(&self) -> usize {
        self.residuals.iter().filter(|&&r| !(r < self.threshold)).count()
    }

    /// Every tested geodesic closed below the threshold.
    pub fn certified(&self) -> bool {
        !self.residuals.is_empty() && self.failures() == 0
    }
}

/// Flow each `(point, direction)` start for length `2π` and record the
/// phase-space closure residual.
pub fn closure_census(metric: &MetricPatch, starts: &[([f64; 3], f64)], threshold: f64) -> Result<ClosureCensus> {
    let residuals = map_range(starts.len(), |i| {
        let (x, a) = starts[i];
        Ok(geodesic_flow(metric, lift_at(metric, x, a)?, TAU, 16)?.closure_residual)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    Ok(ClosureCensus { residuals, threshold })
}

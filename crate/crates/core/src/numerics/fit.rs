//! Linear least-squares fits of small-parameter asymptotic models.
//!
//! Every model is linear in its coefficients. The heat models are fitted on
//! the transformed data `t·θ(t)`, which removes the `1/t` pole from the
//! design matrix.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::linalg::least_squares;
use crate::math::{ln, sqrt};

/// Asymptotic models understood by [`fit_asymptotic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitModel {
    /// `h₀/t + h₁ + h₂ t`.
    HeatTriple,
    /// `h₀/t + h₁ + h₂ t + h₃ t²`; the last coefficient only absorbs the
    /// next order of the expansion.
    HeatTripleCorrected,
    /// `S + α t + β t²`.
    QuadraticInT,
    /// `S + a √t + b t ln t + c t + d t^{3/2} + e t²`, the small-`t` form of
    /// an Abel mean whose terms decay like `k⁻²`.
    AbelSingular,
    /// `S + γ/K` in the cutoff `K`.
    InverseK,
    /// `S + γ/K + δ/K²`.
    InverseKQuadratic,
    /// `a₀ x + a₁ + a₂/x`, with `x = 2k + 1` the size of cluster `k`.
    ClusterLaw,
}

impl FitModel {
    pub fn arity(self) -> usize {
        match self {
            FitModel::HeatTriple | FitModel::QuadraticInT | FitModel::InverseKQuadratic | FitModel::ClusterLaw => 3,
            FitModel::HeatTripleCorrected => 4,
            FitModel::AbelSingular => 6,
            FitModel::InverseK => 2,
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            FitModel::HeatTriple => "heat-triple",
            FitModel::HeatTripleCorrected => "heat-triple-corrected",
            FitModel::QuadraticInT => "quadratic-in-t",
            FitModel::AbelSingular => "abel-singular",
            FitModel::InverseK => "inverse-k",
            FitModel::InverseKQuadratic => "inverse-k-quadratic",
            FitModel::ClusterLaw => "cluster-law",
        }
    }

    fn transforms_by_t(self) -> bool {
        matches!(self, FitModel::HeatTriple | FitModel::HeatTripleCorrected)
    }

    fn basis(self, x: f64, row: &mut [f64]) {
        match self {
            FitModel::HeatTriple | FitModel::QuadraticInT => {
                row.copy_from_slice(&[1.0, x, x * x]);
            }
            FitModel::HeatTripleCorrected => row.copy_from_slice(&[1.0, x, x * x, x * x * x]),
            FitModel::AbelSingular => {
                let s = sqrt(x);
                row.copy_from_slice(&[1.0, s, x * ln(x), x, x * s, x * x]);
            }
            FitModel::InverseK => row.copy_from_slice(&[1.0, 1.0 / x]),
            FitModel::InverseKQuadratic => row.copy_from_slice(&[1.0, 1.0 / x, 1.0 / (x * x)]),
            FitModel::ClusterLaw => row.copy_from_slice(&[x, 1.0, 1.0 / x]),
        }
    }

    /// Model value at `x` for the given coefficients.
    pub fn evaluate(self, coefficients: &[f64], x: f64) -> f64 {
        let mut row = [0.0; 6];
        let n = self.arity();
        self.basis(x, &mut row[..n]);
        let v: f64 = row[..n].iter().zip(coefficients).map(|(a, b)| a * b).sum();
        if self.transforms_by_t() {
            v / x
        } else {
            v
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub coefficients: Vec<f64>,
    /// Euclidean norm of the residual in the fitted (possibly transformed)
    /// variable.
    pub residual_norm: f64,
    pub model: FitModel,
}

impl FitResult {
    pub fn model_id(&self) -> &'static str {
        self.model.id()
    }

    /// The first coefficient: `S` for extrapolation models, `h₀` for heat
    /// models, `a₀` for the cluster law.
    pub fn leading(&self) -> f64 {
        self.coefficients[0]
    }
}

/// Least-squares fit of `model` to `(x, value)` samples.
///
/// Requires at least `arity + 2` samples, all abscissae positive, and a
/// spread `max x / min x ≥ 8`.
pub fn fit_asymptotic(samples: &[(f64, f64)], model: FitModel) -> Result<FitResult> {
    let cols = model.arity();
    if samples.len() < cols + 2 {
        return Err(invalid("fit needs at least model arity + 2 samples"));
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &(x, v) in samples {
        if !(x > 0.0) || !x.is_finite() || !v.is_finite() {
            return Err(invalid("fit abscissae must be positive and samples finite"));
        }
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if hi < 8.0 * lo {
        return Err(invalid("fit abscissae must span at least a factor of 8"));
    }
    let rows = samples.len();
    let mut design = alloc::vec![0.0; rows * cols];
    let mut y = Vec::with_capacity(rows);
    for (i, &(x, v)) in samples.iter().enumerate() {
        model.basis(x, &mut design[i * cols..(i + 1) * cols]);
        y.push(if model.transforms_by_t() { x * v } else { v });
    }
    let (coefficients, residual_norm) =
        least_squares(&design, rows, cols, &y).ok_or(Error::FitDegenerate { model: model.id() })?;
    Ok(FitResult { coefficients, residual_norm, model })
}

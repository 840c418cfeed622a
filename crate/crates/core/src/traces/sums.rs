//! Subtraction constants, per-cluster deficits, partial sums and Abel means
//! of the regularized trace.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::geometry::zeta::HeatCoefficients;
use crate::math::{abs, exp};
use crate::numerics::fit::{fit_asymptotic, FitModel, FitResult};
use crate::spectra::{ClusterShifts, ClusteredSpectrum};
use crate::traces::theta::geometric_grid;

/// Residual thresholds for the two extrapolations.
pub const ABEL_RESIDUAL_THRESHOLD: f64 = 1e-5;
pub const PARTIAL_SUM_RESIDUAL_THRESHOLD: f64 = 1e-4;

/// Absolute error allowed for the clusters missing from an Abel mean.
pub const ABEL_TAIL_TOLERANCE: f64 = 1e-9;

/// `a₀ = (f₁ - l₁)/f₀`, `b₀ = (l₁ - m₁)/l₀`, `c₀ = a₀ + b₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubtractionConstants {
    pub a0: f64,
    pub b0: f64,
    pub c0: f64,
}

pub fn subtraction_constants(f: &HeatCoefficients, l: &HeatCoefficients, m: &HeatCoefficients) -> SubtractionConstants {
    let a0 = (f.h1 - l.h1) / f.h0;
    let b0 = (l.h1 - m.h1) / l.h0;
    SubtractionConstants { a0, b0, c0: a0 + b0 }
}

/// `d_k = Σ_i μ_ki - k(k + 1)(2k + 1) - c₀(2k + 1)` for every reliable `k`.
pub fn cluster_deficits(spectrum: &ClusteredSpectrum, c0: f64) -> Vec<f64> {
    spectrum
        .clusters
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let kappa = (k * (k + 1)) as f64;
            let n = (2 * k + 1) as f64;
            // shifts are summed before subtracting to keep the cancellation exact
            c.iter().map(|l| l - kappa).sum::<f64>() - c0 * n
        })
        .collect()
}

/// Deficits from precomputed cluster statistics against `k(k + 1)`.
pub fn deficits_from_shifts(shifts: &[ClusterShifts], c0: f64) -> Vec<f64> {
    shifts.iter().map(|s| s.sum - c0 * (2 * s.k + 1) as f64).collect()
}

/// `S_K = Σ_{k ≤ K} d_k`.
pub fn regularized_partial_sum(deficits: &[f64], k: usize) -> Result<f64> {
    if k >= deficits.len() {
        return Err(Error::ClusterIntegrity { k, expected: 2 * k + 1, found: 0 });
    }
    Ok(deficits[..=k].iter().sum())
}

/// All partial sums `S_0, …, S_{k_max}`.
pub fn partial_sums(deficits: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    deficits.iter().map(|d| {
        acc += d;
        acc
    })
    .collect()
}

/// Extrapolated limit of the partial sums.
#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolation {
    pub limit: f64,
    pub fit: FitResult,
    pub samples: Vec<(f64, f64)>,
}

/// Fit `S + γ/K` to `S_K` on a geometric set of cutoffs in
/// `[k_max/8, k_max]`.
pub fn extrapolate_partial_sums(deficits: &[f64]) -> Result<Extrapolation> {
    let k_max = deficits.len().checked_sub(1).ok_or_else(|| invalid("no clusters to sum"))?;
    if k_max < 16 {
        return Err(invalid("partial-sum extrapolation needs at least 16 clusters"));
    }
    let sums = partial_sums(deficits);
    let mut ks: Vec<usize> = geometric_grid((k_max / 8).max(2) as f64, k_max as f64, 16).iter().map(|&k| crate::math::round(k) as usize).collect();
    ks.dedup();
    let samples: Vec<(f64, f64)> = ks.iter().map(|&k| (k as f64, sums[k])).collect();
    let fit = fit_asymptotic(&samples, FitModel::InverseK)?;
    if fit.residual_norm > PARTIAL_SUM_RESIDUAL_THRESHOLD {
        return Err(Error::AsymptoteMismatch { residual: fit.residual_norm, threshold: PARTIAL_SUM_RESIDUAL_THRESHOLD });
    }
    Ok(Extrapolation { limit: fit.leading(), fit, samples })
}

/// `G(t) = Σ_k e^{-k(k+1)t} d_k` with a bound on the clusters beyond the
/// last deficit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbelMean {
    pub t: f64,
    pub value: f64,
    pub tail_bound: f64,
}

/// Abel mean at `t`. The tail assumes `|d_k| ≤ C k⁻²` with `C` read off
/// the upper half of the available deficits.
pub fn abel_sum(deficits: &[f64], t: f64) -> Result<AbelMean> {
    if !(t > 0.0) {
        return Err(invalid("Abel means need t > 0"));
    }
    let n = deficits.len();
    if n == 0 {
        return Err(invalid("no clusters to sum"));
    }
    let value = deficits.iter().enumerate().map(|(k, d)| exp(-((k * (k + 1)) as f64) * t) * d).sum();
    let tail_bound = abel_tail(deficits, t);
    if tail_bound > ABEL_TAIL_TOLERANCE {
        return Err(Error::TailBound { t, min_t: abel_min_t(deficits) });
    }
    Ok(AbelMean { t, value, tail_bound })
}

/// Smallest `t` whose Abel tail bound meets [`ABEL_TAIL_TOLERANCE`].
pub fn abel_min_t(deficits: &[f64]) -> f64 {
    if deficits.is_empty() {
        return f64::INFINITY;
    }
    let (mut lo, mut hi) = (1e-10, 1e3);
    if abel_tail(deficits, hi) > ABEL_TAIL_TOLERANCE {
        return f64::INFINITY;
    }
    for _ in 0..100 {
        let mid = crate::math::sqrt(lo * hi);
        if abel_tail(deficits, mid) > ABEL_TAIL_TOLERANCE {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `grid` scaled up, if needed, so that its smallest point is certified.
/// The spacing ratios are kept.
pub fn certified_abel_grid(deficits: &[f64], grid: &[f64]) -> Vec<f64> {
    let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let min_t = abel_min_t(deficits) * 1.05;
    if lo >= min_t || !min_t.is_finite() {
        return grid.to_vec();
    }
    grid.iter().map(|t| t * min_t / lo).collect()
}

fn abel_tail(deficits: &[f64], t: f64) -> f64 {
    let k_last = deficits.len() - 1;
    let c = deficits
        .iter()
        .enumerate()
        .skip(k_last / 2)
        .map(|(k, d)| abs(*d) * (k.max(1) * k.max(1)) as f64)
        .fold(0.0, f64::max);
    let k1 = (k_last + 1) as f64;
    let decay = exp(-k1 * (k1 + 1.0) * t);
    let ratio = exp(-2.0 * (k1 + 1.0) * t);
    c / (k1 * k1) * decay / (1.0 - ratio).max(1e-300)
}

/// Default Abel grid: 12 points geometric over `[1e-4, 1e-2]`.
pub fn default_abel_grid() -> Vec<f64> {
    geometric_grid(1e-4, 1e-2, 12)
}

/// Fit `model` to Abel means and return its constant term as the limit.
pub fn abel_extrapolate(means: &[AbelMean], model: FitModel) -> Result<Extrapolation> {
    for m in means {
        if !(1e-4 * (1.0 - 1e-12)..=0.2).contains(&m.t) {
            return Err(invalid("Abel extrapolation uses t in [1e-4, 0.2]"));
        }
    }
    let samples: Vec<(f64, f64)> = means.iter().map(|m| (m.t, m.value)).collect();
    let fit = fit_asymptotic(&samples, model)?;
    if fit.residual_norm > ABEL_RESIDUAL_THRESHOLD {
        return Err(Error::AsymptoteMismatch { residual: fit.residual_norm, threshold: ABEL_RESIDUAL_THRESHOLD });
    }
    Ok(Extrapolation { limit: fit.leading(), fit, samples })
}

/// Fitted `(a₀, a₁, a₂)` of `Σ_i ν_ki = a₀(2k + 1) + a₁ + a₂/(2k + 1)` over
/// clusters `k_lo..=k_hi`.
pub fn cluster_law(shifts: &[ClusterShifts], k_lo: usize, k_hi: usize) -> Result<FitResult> {
    let samples: Vec<(f64, f64)> = shifts.iter().filter(|s| s.k >= k_lo && s.k <= k_hi).map(|s| ((2 * s.k + 1) as f64, s.sum)).collect();
    fit_asymptotic(&samples, FitModel::ClusterLaw)
}

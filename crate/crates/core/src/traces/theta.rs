//! Theta series `θ(t) = Σ e^{-λt}` and fits of their small-`t` expansion.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::geometry::zeta::{HeatCoefficients, ThetaKind};
use crate::math::{exp, ln, powf};
use crate::numerics::fit::{fit_asymptotic, FitModel, FitResult};
use crate::spectra::ClusteredSpectrum;

/// Relative truncation error allowed in a theta value.
pub const THETA_TOLERANCE: f64 = 1e-12;

/// Default residual threshold for heat fits, on `t·θ(t)`.
pub const HEAT_FIT_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub enum ThetaSeries<'a> {
    /// `k(k + 1) + shift` with multiplicity `2k + 1`, summed to convergence.
    Round { shift: f64 },
    /// A computed spectrum, complete up to its reliable cluster.
    Spectrum(&'a ClusteredSpectrum),
}

impl<'a> ThetaSeries<'a> {
    pub fn round() -> Self {
        ThetaSeries::Round { shift: 0.0 }
    }

    /// Smallest `t` at which the missing clusters contribute at most
    /// [`THETA_TOLERANCE`] relative.
    pub fn min_t(&self) -> f64 {
        match self {
            ThetaSeries::Round { .. } => 0.0,
            ThetaSeries::Spectrum(s) => {
                let (mut lo, mut hi) = (1e-8, 10.0);
                if tail_ratio(s, hi) > THETA_TOLERANCE {
                    return f64::INFINITY;
                }
                for _ in 0..100 {
                    let mid = crate::math::sqrt(lo * hi);
                    if tail_ratio(s, mid) > THETA_TOLERANCE {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
        }
    }

    /// `θ(t)`, with the truncation certified.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(invalid("theta series needs t > 0"));
        }
        match *self {
            ThetaSeries::Round { shift } => {
                let mut sum = 0.0;
                let mut k = 0usize;
                loop {
                    let kf = k as f64;
                    let term = (2.0 * kf + 1.0) * exp(-kf * (kf + 1.0) * t);
                    sum += term;
                    if term < 1e-18 * sum && kf * (kf + 1.0) * t > 1.0 {
                        break;
                    }
                    k += 1;
                }
                Ok(sum * exp(-shift * t))
            }
            ThetaSeries::Spectrum(s) => {
                if tail_ratio(s, t) > THETA_TOLERANCE {
                    return Err(Error::TailBound { t, min_t: self.min_t() });
                }
                Ok(head_sum(s, t))
            }
        }
    }
}

fn head_sum(s: &ClusteredSpectrum, t: f64) -> f64 {
    s.clusters.iter().flat_map(|c| c.iter()).map(|&l| exp(-l * t)).sum()
}

/// Upper bound of `Σ_{k>K} (2k + 1) e^{-(k(k+1) - w) t}` relative to the
/// head sum, `w` the widest observed cluster shift.
fn tail_ratio(s: &ClusteredSpectrum, t: f64) -> f64 {
    let k = (s.k_max_reliable + 1) as f64;
    let floor = s.next_cluster_floor();
    let first = (2.0 * k + 1.0) * exp(-floor * t);
    let bound = first * (1.0 + 1.0 / ((2.0 * k + 1.0) * t));
    bound / head_sum(s, t).max(f64::MIN_POSITIVE)
}

/// `n` points spaced geometrically over `[lo, hi]`.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![lo];
    }
    (0..n).map(|i| lo * powf(hi / lo, i as f64 / (n - 1) as f64)).collect()
}

/// Coefficients of `θ(t) = h₀/t + h₁ + h₂ t + …` fitted on a `t` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatFit {
    pub coefficients: HeatCoefficients,
    pub fit: FitResult,
    pub t_grid: Vec<f64>,
    /// Set when the residual exceeds the threshold; `h₂` is then unreliable.
    pub warning: Option<Error>,
}

/// Fit `h₀/t + h₁ + h₂ t` (and, for the corrected model, a nuisance `t²`
/// term) to `t·θ(t)` on `t_grid`.
pub fn fit_heat_coefficients(theta: &ThetaSeries<'_>, t_grid: &[f64], model: FitModel, which: ThetaKind) -> Result<HeatFit> {
    if !matches!(model, FitModel::HeatTriple | FitModel::HeatTripleCorrected) {
        return Err(invalid("heat fits use a heat model"));
    }
    let samples = t_grid.iter().map(|&t| Ok((t, theta.eval(t)?))).collect::<Result<Vec<_>>>()?;
    let fit = fit_asymptotic(&samples, model)?;
    let c = &fit.coefficients;
    let threshold = HEAT_FIT_THRESHOLD;
    let warning = (fit.residual_norm > threshold).then_some(Error::AsymptoteMismatch { residual: fit.residual_norm, threshold });
    Ok(HeatFit { coefficients: HeatCoefficients { h0: c[0], h1: c[1], h2: c[2], which }, fit, t_grid: t_grid.to_vec(), warning })
}

/// A heat-fit grid of 8 points over a factor 8 starting at the larger of
/// `preferred_lo` and the smallest certified `t`.
pub fn heat_grid(theta: &ThetaSeries<'_>, preferred_lo: f64) -> Vec<f64> {
    let lo = preferred_lo.max(theta.min_t() * 1.05);
    geometric_grid(lo, 8.0 * lo, 8)
}

/// Number of decades in `[lo, hi]`, for reports.
pub fn decades(lo: f64, hi: f64) -> f64 {
    ln(hi / lo) / core::f64::consts::LN_10
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::assemble_clusters;

    fn exact(k_max: usize, shift: f64) -> ClusteredSpectrum {
        let e: Vec<f64> = (0..=k_max).flat_map(|k| core::iter::repeat_n((k * (k + 1)) as f64 + shift, 2 * k + 1)).collect();
        assemble_clusters(&e, k_max, shift, "exact").unwrap()
    }

    #[test]
    fn round_theta_near_its_asymptote() {
        let t = 0.05;
        let v = ThetaSeries::round().eval(t).unwrap();
        // the next term is 4t²/315
        let rest = v - (1.0 / t + 1.0 / 3.0 + t / 15.0);
        assert!((rest / (t * t) - 4.0 / 315.0).abs() < 2e-4, "{}", rest / (t * t));
        assert!((ThetaSeries::round().eval(50.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shift_law() {
        let c = 0.7;
        for &t in &[0.02, 0.3, 2.0] {
            let a = ThetaSeries::Round { shift: c }.eval(t).unwrap();
            let b = ThetaSeries::round().eval(t).unwrap();
            assert!((a - b * (-c * t).exp()).abs() < 1e-12 * a);
        }
        let s = exact(150, c);
        let a = ThetaSeries::Spectrum(&s).eval(0.01).unwrap();
        assert!((a - ThetaSeries::Round { shift: c }.eval(0.01).unwrap()).abs() < 1e-11 * a);
    }

    #[test]
    fn shallow_spectrum_reports_min_t() {
        let s = exact(30, 0.0);
        let th = ThetaSeries::Spectrum(&s);
        let min_t = th.min_t();
        assert!(min_t > 0.01 && min_t < 0.1, "{min_t}");
        match th.eval(0.005) {
            Err(Error::TailBound { min_t: m, .. }) => assert_eq!(m, min_t),
            other => panic!("{other:?}"),
        }
        assert!(th.eval(min_t * 1.01).is_ok());
    }

    #[test]
    fn theta_is_decreasing() {
        let th = ThetaSeries::round();
        let g = geometric_grid(0.001, 5.0, 40);
        for w in g.windows(2) {
            assert!(th.eval(w[0]).unwrap() > th.eval(w[1]).unwrap());
        }
    }

    #[test]
    fn round_heat_constants() {
        let fit = fit_heat_coefficients(&ThetaSeries::round(), &geometric_grid(0.005, 0.04, 8), FitModel::HeatTripleCorrected, ThetaKind::F).unwrap();
        let c = fit.coefficients;
        assert!((c.h0 - 1.0).abs() < 1e-4 && (c.h1 - 1.0 / 3.0).abs() < 1e-4 && (c.h2 - 1.0 / 15.0).abs() < 1e-4, "{c:?}");
        assert!(fit.warning.is_none());
    }

    #[test]
    fn shifted_heat_constants() {
        let c = 0.3;
        let s = exact(120, c);
        let th = ThetaSeries::Spectrum(&s);
        let fit = fit_heat_coefficients(&th, &heat_grid(&th, 0.005), FitModel::HeatTripleCorrected, ThetaKind::M).unwrap();
        // e^{-ct}(1/t + 1/3 + t/15): (1, 1/3 - c, 1/15 - c/3 + c²/2)
        let h = fit.coefficients;
        assert!((h.h0 - 1.0).abs() < 1e-4);
        assert!((h.h1 - (1.0 / 3.0 - c)).abs() < 5e-4, "{h:?}");
        assert!((h.h2 - (1.0 / 15.0 - c / 3.0 + c * c / 2.0)).abs() < 5e-3, "{h:?}");
    }
}

//! End-to-end check of the trace identity: spectrum, heat coefficients,
//! both left-side summations and the itemized right side.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{invalid, Error};
use crate::geodesics::LiouvilleGrid;
use crate::geometry::field::ScalarField;
use crate::geometry::metric::MetricPatch;
use crate::geometry::zeta::{heat_coefficients_from_values, zeta_values, GammaConvention, HeatCoefficients, ThetaKind, ZetaValues};
use crate::math::abs;
use crate::numerics::fit::FitModel;
use crate::spectra::{zoll_spectrum, ClusteredSpectrum, OperatorSpec, Truncation};
use crate::traces::sums::{
    abel_extrapolate, abel_sum, certified_abel_grid, cluster_deficits, default_abel_grid, extrapolate_partial_sums, partial_sums, subtraction_constants, AbelMean,
    Extrapolation, SubtractionConstants, ABEL_RESIDUAL_THRESHOLD, PARTIAL_SUM_RESIDUAL_THRESHOLD,
};
use crate::traces::theorem::{theorem_rhs, TheoremRhs};
use crate::traces::theta::{fit_heat_coefficients, heat_grid, HeatFit, ThetaSeries, HEAT_FIT_THRESHOLD};

/// Pipeline stage an error is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Config,
    Zeta,
    Spectrum,
    HeatFit,
    PartialSums,
    Abel,
    Rhs,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Zeta => "zeta",
            Stage::Spectrum => "spectrum",
            Stage::HeatFit => "heat-fit",
            Stage::PartialSums => "partial-sums",
            Stage::Abel => "abel",
            Stage::Rhs => "rhs",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageFailure {
    pub stage: Stage,
    pub error: Error,
}

impl fmt::Display for StageFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {}: {}", self.stage.name(), self.error)
    }
}

impl core::error::Error for StageFailure {}

trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, StageFailure>;
}

impl<T> AtStage<T> for Result<T, Error> {
    fn at(self, stage: Stage) -> Result<T, StageFailure> {
        self.map_err(|error| StageFailure { stage, error })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceConfig {
    /// Basis degree of the eigenvalue solvers.
    pub degree: usize,
    /// Convention for the `q·γ` term of `ζ(1)` in the heat pipeline.
    pub gamma: GammaConvention,
    pub abel_grid: Vec<f64>,
    pub abel_model: FitModel,
    /// Preferred lower end of the heat-fit grid.
    pub heat_t_lo: f64,
    pub heat_model: FitModel,
    pub liouville: LiouvilleGrid,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            degree: 60,
            gamma: GammaConvention::default(),
            abel_grid: default_abel_grid(),
            abel_model: FitModel::AbelSingular,
            heat_t_lo: 0.005,
            heat_model: FitModel::HeatTripleCorrected,
            liouville: LiouvilleGrid::default(),
        }
    }
}

/// Thresholds a report was produced under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub abel_residual: f64,
    pub partial_sum_residual: f64,
    pub heat_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceReport {
    pub provenance: alloc::string::String,
    pub k_max_reliable: usize,
    pub gamma: GammaConvention,
    /// Heat coefficients from the zeta pipeline.
    pub heat_f: HeatCoefficients,
    pub heat_l: HeatCoefficients,
    pub heat_m: HeatCoefficients,
    /// Heat coefficients fitted to the computed theta series.
    pub fitted_l: HeatFit,
    pub fitted_m: HeatFit,
    pub constants: SubtractionConstants,
    /// `(K, S_K, d_K)` for every reliable cluster.
    pub partial_sums: Vec<(usize, f64, f64)>,
    pub partial_extrapolation: Extrapolation,
    pub abel: Vec<AbelMean>,
    pub abel_extrapolation: Extrapolation,
    /// The Abel-extrapolated left side.
    pub lhs: f64,
    pub rhs: TheoremRhs,
    pub discrepancy: f64,
    /// `|Abel limit - partial-sum limit|`.
    pub method_gap: f64,
    /// `f₂ - a₀f₁ - m₂ - b₀l₁ + V2(σ)/2 + V2(q)/2`, with `m₂` under `gamma`.
    pub alternative_rhs: f64,
    pub alternative_discrepancy: f64,
    pub tolerances: Tolerances,
}

/// Compute the spectra for `(metric, q)` and verify the identity.
pub fn verify_trace(metric: &MetricPatch, q: &ScalarField, config: &TraceConfig) -> Result<TraceReport, StageFailure> {
    let (mu, lambda) = solve_spectra(metric, q, config.degree)?;
    verify_trace_with(metric, q, &mu, lambda.as_ref(), config)
}

/// The `μ` spectrum of `-Δ + q` and, when it differs and is not the round
/// one, the `λ` spectrum of `-Δ`.
pub fn solve_spectra(metric: &MetricPatch, q: &ScalarField, degree: usize) -> Result<(ClusteredSpectrum, Option<ClusteredSpectrum>), StageFailure> {
    let mu = OperatorSpec::new(metric.clone(), q.clone(), Truncation::Degree(degree)).at(Stage::Config)?.solve().at(Stage::Spectrum)?;
    let lambda = if q.is_zero() || metric.is_round() { None } else { Some(zoll_spectrum(metric, &ScalarField::zero(), degree).at(Stage::Spectrum)?) };
    Ok((mu, lambda))
}

/// Verify from precomputed spectra. `lambda` may be omitted when `q = 0`
/// or the metric is round.
pub fn verify_trace_with(
    metric: &MetricPatch,
    q: &ScalarField,
    mu: &ClusteredSpectrum,
    lambda: Option<&ClusteredSpectrum>,
    config: &TraceConfig,
) -> Result<TraceReport, StageFailure> {
    if lambda.is_none() && !(q.is_zero() || metric.is_round()) {
        return Err(invalid("the metric-only spectrum is required")).at(Stage::Config);
    }
    let zeta_m = zeta_values(metric, q, config.gamma).at(Stage::Zeta)?;
    let zeta_l: ZetaValues = zeta_m.without_potential();
    let heat_f = HeatCoefficients::ROUND;
    let heat_l = heat_coefficients_from_values(&zeta_l, ThetaKind::L);
    let heat_m = heat_coefficients_from_values(&zeta_m, ThetaKind::M);
    let constants = subtraction_constants(&heat_f, &heat_l, &heat_m);

    let theta_m = ThetaSeries::Spectrum(mu);
    let theta_l = match lambda {
        Some(l) => ThetaSeries::Spectrum(l),
        None if q.is_zero() => theta_m,
        None => ThetaSeries::round(),
    };
    let fitted_m = fit_heat_coefficients(&theta_m, &heat_grid(&theta_m, config.heat_t_lo), config.heat_model, ThetaKind::M).at(Stage::HeatFit)?;
    let fitted_l = fit_heat_coefficients(&theta_l, &heat_grid(&theta_m, config.heat_t_lo), config.heat_model, ThetaKind::L).at(Stage::HeatFit)?;

    let deficits = cluster_deficits(mu, constants.c0);
    let sums = partial_sums(&deficits);
    let partial_sums = sums.iter().zip(&deficits).enumerate().map(|(k, (s, d))| (k, *s, *d)).collect();
    let partial_extrapolation = extrapolate_partial_sums(&deficits).at(Stage::PartialSums)?;

    let abel = certified_abel_grid(&deficits, &config.abel_grid).iter().map(|&t| abel_sum(&deficits, t)).collect::<Result<Vec<_>, _>>().at(Stage::Abel)?;
    let abel_extrapolation = abel_extrapolate(&abel, config.abel_model).at(Stage::Abel)?;
    let lhs = abel_extrapolation.limit;

    let rhs = theorem_rhs(metric, q, config.liouville).at(Stage::Rhs)?;
    let SubtractionConstants { a0, b0, .. } = constants;
    let alternative_rhs =
        heat_f.h2 - a0 * heat_f.h1 - heat_m.h2 - b0 * heat_l.h1 + rhs.sigma_mean_square + rhs.potential_mean_square;

    Ok(TraceReport {
        provenance: mu.provenance.clone(),
        k_max_reliable: mu.k_max_reliable,
        gamma: config.gamma,
        heat_f,
        heat_l,
        heat_m,
        fitted_l,
        fitted_m,
        constants,
        partial_sums,
        method_gap: abs(lhs - partial_extrapolation.limit),
        partial_extrapolation,
        abel,
        abel_extrapolation,
        lhs,
        discrepancy: abs(lhs - rhs.value),
        alternative_discrepancy: abs(lhs - alternative_rhs),
        alternative_rhs,
        rhs,
        tolerances: Tolerances { abel_residual: ABEL_RESIDUAL_THRESHOLD, partial_sum_residual: PARTIAL_SUM_RESIDUAL_THRESHOLD, heat_residual: HEAT_FIT_THRESHOLD },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> TraceConfig {
        TraceConfig { degree: 40, liouville: LiouvilleGrid { fiber: 12, height: 12, azimuth: 16, orbit_samples: 32 }, ..TraceConfig::default() }
    }

    #[test]
    fn free_round_sphere() {
        let r = verify_trace(&MetricPatch::round(), &ScalarField::zero(), &quick()).unwrap();
        assert!(r.lhs.abs() < 1e-10 && r.rhs.value.abs() < 1e-12 && r.discrepancy < 1e-10, "{} {}", r.lhs, r.rhs.value);
        assert!(r.constants.a0.abs() < 1e-14 && r.constants.b0 == 0.0);
    }

    #[test]
    fn constant_potential() {
        let c = 0.3;
        let r = verify_trace(&MetricPatch::round(), &ScalarField::Constant(c), &quick()).unwrap();
        assert!(r.discrepancy < 1e-9, "{r:?}");
        assert!((r.constants.b0 - c).abs() < 1e-13 && r.constants.a0.abs() < 1e-13);
        assert!(r.alternative_discrepancy < 1e-9);
        let h = r.fitted_m.coefficients;
        assert!((h.h1 - (1.0 / 3.0 - c)).abs() < 5e-3 && (h.h2 - (1.0 / 15.0 - c / 3.0 + c * c / 2.0)).abs() < 5e-3, "{h:?}");
    }

    #[test]
    fn failures_name_their_stage() {
        let mut cfg = quick();
        cfg.degree = 4;
        assert_eq!(verify_trace(&MetricPatch::round(), &ScalarField::zero(), &cfg).unwrap_err().stage, Stage::Config);
        cfg.degree = 16;
        // too few clusters for the partial-sum fit
        assert_eq!(verify_trace(&MetricPatch::round(), &ScalarField::Constant(0.1), &cfg).unwrap_err().stage, Stage::PartialSums);
        let mut cfg = quick();
        // a shifted grid that leaves the extrapolation range
        cfg.abel_grid = alloc::vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35];
        let e = verify_trace(&MetricPatch::round(), &ScalarField::harmonic(1, 0, 0.5).unwrap(), &cfg).unwrap_err();
        assert_eq!(e.stage, Stage::Abel);
    }

    #[test]
    fn reproducible_from_spectra() {
        let q = ScalarField::harmonic(1, 0, 0.3).unwrap();
        let cfg = quick();
        let (mu, lambda) = solve_spectra(&MetricPatch::round(), &q, cfg.degree).unwrap();
        let a = verify_trace_with(&MetricPatch::round(), &q, &mu, lambda.as_ref(), &cfg).unwrap();
        let b = verify_trace(&MetricPatch::round(), &q, &cfg).unwrap();
        assert_eq!(a, b);
    }
}

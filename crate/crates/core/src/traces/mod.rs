//! Theta functions, heat coefficients, regularized trace sums and the
//! verification of the trace identity.

mod sf;
mod sums;
mod theorem;
mod theta;
mod verify;

pub use sf::{kernel_integral_direct, project_harmonics, sf_constants, SfConstants, KERNEL_AGREEMENT};
pub use sums::{
    abel_extrapolate, abel_min_t, abel_sum, certified_abel_grid, cluster_deficits, cluster_law, default_abel_grid, deficits_from_shifts, extrapolate_partial_sums, partial_sums,
    regularized_partial_sum, subtraction_constants, AbelMean, Extrapolation, SubtractionConstants, ABEL_RESIDUAL_THRESHOLD, ABEL_TAIL_TOLERANCE,
    PARTIAL_SUM_RESIDUAL_THRESHOLD,
};
pub use theorem::{theorem_rhs, TheoremRhs, RHS_ITEM_NAMES};
pub use theta::{decades, fit_heat_coefficients, geometric_grid, heat_grid, HeatFit, ThetaSeries, HEAT_FIT_THRESHOLD, THETA_TOLERANCE};
pub use verify::{solve_spectra, verify_trace, verify_trace_with, Stage, StageFailure, Tolerances, TraceConfig, TraceReport};

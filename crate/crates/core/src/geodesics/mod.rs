//! Geodesic flow on the unit cosphere bundle, Jacobi fields along closed
//! orbits, the subprincipal correction `σ`, and flow averages.

mod average;
mod census;
mod flow;
mod jacobi;

pub use average::{
    flow_average, liouville_mean_square, liouville_mean_square_on, sigma_mean_square, LiouvilleGrid, MeanSquare, OrbitBank,
    FLOW_AVERAGE_SAMPLES,
};
pub use census::{closure_census, ClosureCensus};
pub use flow::{geodesic_flow, lift_at, lift_to_cosphere, GeodesicPath, PathSample, PhasePoint, CHART_SWITCH, FLOW_TOLERANCE};
pub use jacobi::{
    jacobi_solve, normal_curvature_derivative, normal_curvature_derivative_with_step, zelditch_sigma, zelditch_sigma_with, JacobiData,
    SigmaSamples, CLOSURE_THRESHOLD, NORMAL_DERIVATIVE_STEP, SIGMA_SAMPLES,
};

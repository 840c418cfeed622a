//! Eigenvalues of `-Δ + q` and their grouping into clusters.

mod cluster;
mod galerkin;
mod operator;
mod zoll;

pub use cluster::{assemble_clusters, cluster_index, cluster_statistics, ClusterShifts, ClusteredSpectrum, ShiftReference};
pub use galerkin::{
    potential_matrix_element, sphere_full_eigenvalues, sphere_galerkin, sphere_zonal_block, LEAKAGE_TOLERANCE, MIN_DEGREE, RELIABILITY_BUFFER,
    UNKNOWN_BAND,
};
pub use operator::{OperatorSpec, Truncation};
pub use zoll::{zoll_separated_solver, zoll_spectrum, zoll_reliability_buffer, SeparatedScheme, MIN_GRID};

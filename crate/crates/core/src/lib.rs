//! Numerical spectral geometry on perturbed two-spheres.
//!
//! The crate computes, for the Laplace–Beltrami operator `-Δ + q` on a sphere
//! whose metric is a perturbation of the round one with all geodesics closed
//! of length `2π`, every object that enters its regularized first trace:
//!
//! - [`geometry`]: metric patches, Gaussian curvature, the Laplace–Beltrami
//!   operator, surface integrals and the `ζ(0)`, `ζ(1)` invariants;
//! - [`geodesics`]: the geodesic flow on the unit cosphere bundle, Jacobi
//!   fields, the averaged curvature symbol and Liouville mean squares;
//! - [`spectra`]: Galerkin eigenvalue solvers and cluster bookkeeping;
//! - [`traces`]: theta series, heat coefficients, regularized partial sums,
//!   Abel summation and the assembled trace identity;
//! - [`numerics`] and [`linalg`]: the kernels everything else stands on.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. The `parallel` feature spreads independent work items over a
//! rayon pool; reductions are always performed in index order so results do
//! not depend on the thread count.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_debug_implementations, rust_2018_idioms)]
// negated comparisons are how NaN is made to fail a bound
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod geodesics;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod math;
pub mod numerics;
mod par;
pub mod spectra;
pub mod traces;

pub use error::{Error, Result};

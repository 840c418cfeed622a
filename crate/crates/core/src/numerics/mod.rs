//! Shared numerical kernels: quadrature, adaptive ODE integration,
//! Legendre functions and spherical harmonics, asymptotic model fitting.

pub mod fit;
pub mod legendre;
pub mod ode;
pub mod quadrature;

pub use fit::{fit_asymptotic, FitModel, FitResult};
pub use legendre::{legendre_p, spherical_harmonic};
pub use ode::{ode_integrate, OdeSolution, Stepper};
pub use quadrature::{gauss_legendre, periodic_nodes, QuadratureRule};

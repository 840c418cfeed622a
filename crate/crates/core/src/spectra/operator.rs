//! A `-Δ + q` problem together with its truncation.

use alloc::format;

use crate::error::{invalid, Result};
use crate::geometry::field::ScalarField;
use crate::geometry::metric::MetricPatch;
use crate::spectra::cluster::ClusteredSpectrum;
use crate::spectra::galerkin::{sphere_galerkin, MIN_DEGREE};
use crate::spectra::zoll::{zoll_spectrum, MIN_GRID};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// Largest harmonic (or Legendre) degree in the basis.
    Degree(usize),
    /// Number of cells of a difference grid.
    Grid(usize),
}

#[derive(Debug, Clone)]
pub struct OperatorSpec {
    pub metric: MetricPatch,
    pub potential: ScalarField,
    pub truncation: Truncation,
}

impl OperatorSpec {
    pub fn new(metric: MetricPatch, potential: ScalarField, truncation: Truncation) -> Result<Self> {
        match truncation {
            Truncation::Degree(l) if l < MIN_DEGREE => return Err(invalid(format!("basis degree {l} below {MIN_DEGREE}"))),
            Truncation::Grid(n) if n < MIN_GRID => return Err(invalid(format!("grid size {n} below {MIN_GRID}"))),
            _ => {}
        }
        if metric.profile().is_none() {
            return Err(invalid("spectra are available for surfaces of revolution only"));
        }
        if !metric.is_round() && !potential.is_zonal() {
            return Err(invalid("non-zonal potentials are supported on the round sphere only"));
        }
        Ok(OperatorSpec { metric, potential, truncation })
    }

    /// Round sphere: harmonic Galerkin. Other surfaces of revolution:
    /// separated Legendre–Galerkin per azimuthal mode.
    pub fn solve(&self) -> Result<ClusteredSpectrum> {
        let degree = match self.truncation {
            Truncation::Degree(l) => l,
            Truncation::Grid(_) => return Err(invalid("full spectra need a degree truncation; grids serve single-mode checks")),
        };
        if self.metric.is_round() {
            sphere_galerkin(&self.potential, degree)
        } else {
            zoll_spectrum(&self.metric, &self.potential, degree)
        }
    }
}

//! Flow averages and normalized Liouville mean squares.
//!
//! `V2(f) = (1/vol S*M) ∫_{S*M} (f^av)² dL`, where `f^av` is the average of
//! `f` over the closed orbit through a point of the unit cosphere bundle and
//! `dL = dS dα` is the Liouville measure (area times fiber angle).
//!
//! On a surface of revolution the flow commutes with rotations about the
//! axis, so only the orbits starting on the meridian `φ = 0` are integrated.
//! Orbits are stored as ambient sample points in an [`OrbitBank`], which then
//! serves any number of potentials.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geodesics::flow::{geodesic_flow, lift_to_cosphere, PhasePoint};
use crate::geodesics::jacobi::{zelditch_sigma_with, CLOSURE_THRESHOLD, SIGMA_SAMPLES};
use crate::geometry::field::ScalarField;
use crate::geometry::metric::{Chart, MetricPatch};
use crate::math::{abs, acos, cos, sin, TAU};
use crate::numerics::quadrature::gauss_legendre;
use crate::par::map_range;

/// Samples per orbit used by [`flow_average`].
pub const FLOW_AVERAGE_SAMPLES: usize = 256;

/// `(1/2π) ∫₀^{2π} f(γ(t)) dt` over the closed geodesic through `start`,
/// by the periodic trapezoid rule.
pub fn flow_average(metric: &MetricPatch, f: &ScalarField, start: PhasePoint) -> Result<f64> {
    let path = geodesic_flow(metric, start, TAU, FLOW_AVERAGE_SAMPLES)?;
    if !path.is_closed(CLOSURE_THRESHOLD) {
        return Err(Error::NotClosed { residual: path.closure_residual });
    }
    let mut s = 0.0;
    for sample in &path.samples[..FLOW_AVERAGE_SAMPLES] {
        s += f.value(sample.position)?;
    }
    Ok(s / FLOW_AVERAGE_SAMPLES as f64)
}

/// Quadrature resolution over `S*M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiouvilleGrid {
    /// Fiber angles (uniform).
    pub fiber: usize,
    /// Gauss–Legendre nodes in `cos θ`.
    pub height: usize,
    /// Uniform azimuths.
    pub azimuth: usize,
    /// Stored points per orbit.
    pub orbit_samples: usize,
}

impl Default for LiouvilleGrid {
    fn default() -> Self {
        LiouvilleGrid { fiber: 24, height: 32, azimuth: 48, orbit_samples: 64 }
    }
}

impl LiouvilleGrid {
    /// Every count halved, for the error estimate.
    pub fn halved(&self) -> LiouvilleGrid {
        LiouvilleGrid {
            fiber: (self.fiber / 2).max(2),
            height: (self.height / 2).max(2),
            azimuth: (self.azimuth / 2).max(2),
            orbit_samples: self.orbit_samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Orbit {
    weight: f64,
    positions: Vec<[f64; 3]>,
    sigma_average: Option<f64>,
    closure_residual: f64,
}

/// Closed orbits through every quadrature node of `S*M`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitBank {
    grid: LiouvilleGrid,
    axisymmetric: bool,
    orbits: Vec<Orbit>,
    total_weight: f64,
    pub max_closure_residual: f64,
}

impl OrbitBank {
    /// Integrate all orbits; with `with_sigma` also the flow average of `σ`
    /// (dense sampling, see [`SIGMA_SAMPLES`]).
    pub fn build(metric: &MetricPatch, grid: LiouvilleGrid, with_sigma: bool) -> Result<OrbitBank> {
        if grid.fiber == 0 || grid.height == 0 || grid.azimuth == 0 || grid.orbit_samples == 0 {
            return Err(crate::error::invalid("Liouville grid counts must be positive"));
        }
        let axisymmetric = metric.profile().is_some();
        let rule = gauss_legendre(grid.height, -1.0, 1.0)?;
        let base_azimuths = if axisymmetric { 1 } else { grid.azimuth };
        let dphi = TAU / grid.azimuth as f64;
        let dalpha = TAU / grid.fiber as f64;
        let n = grid.height * base_azimuths * grid.fiber;
        let samples = if with_sigma { SIGMA_SAMPLES.max(grid.orbit_samples) } else { grid.orbit_samples };
        if samples % grid.orbit_samples != 0 {
            return Err(crate::error::invalid("orbit samples must divide the dense sampling"));
        }
        let stride = samples / grid.orbit_samples;
        let orbits: Vec<Result<Orbit>> = map_range(n, |idx| {
            let a = idx % grid.fiber;
            let b = (idx / grid.fiber) % base_azimuths;
            let i = idx / (grid.fiber * base_azimuths);
            let theta = acos(rule.nodes[i]);
            let phi = dphi * b as f64;
            let density = metric.area_density_cos([theta, phi])?;
            let weight = rule.weights[i] * dphi * dalpha * density * if axisymmetric { grid.azimuth as f64 } else { 1.0 };
            // the polar chart frame commutes with rotations about the axis
            let start = lift_to_cosphere(metric, Chart::North, [theta, phi], dalpha * a as f64)?;
            let (path, sigma_average) = if with_sigma {
                let s = zelditch_sigma_with(metric, start, samples)?;
                (s.path, Some(s.average))
            } else {
                let p = geodesic_flow(metric, start, TAU, samples)?;
                if !p.is_closed(CLOSURE_THRESHOLD) {
                    return Err(Error::NotClosed { residual: p.closure_residual });
                }
                (p, None)
            };
            let positions = (0..grid.orbit_samples).map(|j| path.samples[j * stride].position).collect();
            Ok(Orbit { weight, positions, sigma_average, closure_residual: path.closure_residual })
        });
        let mut out = Vec::with_capacity(n);
        let mut total_weight = 0.0;
        let mut max_res: f64 = 0.0;
        for o in orbits {
            let o = o?;
            total_weight += o.weight;
            max_res = max_res.max(o.closure_residual);
            out.push(o);
        }
        Ok(OrbitBank { grid, axisymmetric, orbits: out, total_weight, max_closure_residual: max_res })
    }

    pub fn grid(&self) -> LiouvilleGrid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    /// `V2(f)` over the stored orbits.
    pub fn mean_square(&self, f: &ScalarField) -> Result<f64> {
        let rotations: Vec<(f64, f64)> = if self.axisymmetric && !f.is_zonal() {
            (0..self.grid.azimuth).map(|k| {
                let a = TAU * k as f64 / self.grid.azimuth as f64;
                (cos(a), sin(a))
            })
            .collect()
        } else {
            alloc::vec![(1.0, 0.0)]
        };
        let per: Vec<Result<f64>> = map_range(self.orbits.len(), |i| {
            let o = &self.orbits[i];
            let mut acc = 0.0;
            for &(c, s) in &rotations {
                let mut avg = 0.0;
                for x in &o.positions {
                    avg += f.value([c * x[0] - s * x[1], s * x[0] + c * x[1], x[2]])?;
                }
                avg /= o.positions.len() as f64;
                acc += avg * avg;
            }
            Ok(o.weight * acc / rotations.len() as f64)
        });
        let mut total = 0.0;
        for p in per {
            total += p?;
        }
        Ok(total / self.total_weight)
    }

    /// `V2(σ)` when the bank was built with `σ`.
    pub fn sigma_mean_square(&self) -> Option<f64> {
        let mut total = 0.0;
        for o in &self.orbits {
            let s = o.sigma_average?;
            total += o.weight * s * s;
        }
        Some(total / self.total_weight)
    }

    /// Liouville mean of `σ^av` (the first moment), when available.
    pub fn sigma_mean(&self) -> Option<f64> {
        let mut total = 0.0;
        for o in &self.orbits {
            total += o.weight * o.sigma_average?;
        }
        Some(total / self.total_weight)
    }
}

/// A mean square with its grid-halving error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSquare {
    pub value: f64,
    pub coarse_value: f64,
    pub error_estimate: f64,
}

impl MeanSquare {
    fn new(value: f64, coarse_value: f64) -> Self {
        MeanSquare { value, coarse_value, error_estimate: abs(value - coarse_value) }
    }
}

/// `V2(f)` with the default grid and a half-resolution error estimate.
pub fn liouville_mean_square(metric: &MetricPatch, f: &ScalarField) -> Result<MeanSquare> {
    liouville_mean_square_on(metric, f, LiouvilleGrid::default())
}

pub fn liouville_mean_square_on(metric: &MetricPatch, f: &ScalarField, grid: LiouvilleGrid) -> Result<MeanSquare> {
    if let ScalarField::Constant(c) = f {
        return Ok(MeanSquare::new(c * c, c * c));
    }
    let fine = OrbitBank::build(metric, grid, false)?.mean_square(f)?;
    let coarse = OrbitBank::build(metric, grid.halved(), false)?.mean_square(f)?;
    Ok(MeanSquare::new(fine, coarse))
}

/// `V2(σ)` and the Liouville mean of `σ^av`, with the error estimate. The
/// round sphere has `σ ≡ 0` and is answered without integrating.
pub fn sigma_mean_square(metric: &MetricPatch, grid: LiouvilleGrid) -> Result<(MeanSquare, f64)> {
    if metric.is_round() {
        return Ok((MeanSquare::new(0.0, 0.0), 0.0));
    }
    let fine = OrbitBank::build(metric, grid, true)?;
    let coarse = OrbitBank::build(metric, grid.halved(), true)?;
    let v = MeanSquare::new(fine.sigma_mean_square().unwrap_or(0.0), coarse.sigma_mean_square().unwrap_or(0.0));
    Ok((v, fine.sigma_mean().unwrap_or(0.0)))
}

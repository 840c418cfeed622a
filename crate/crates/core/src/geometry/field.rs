//! Real scalar fields on the sphere.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{invalid, Result};
use crate::geometry::curvature::gauss_curvature;
use crate::geometry::metric::{Chart, MetricPatch};
use crate::jet::{Jet, Scalar};
use crate::numerics::legendre::real_harmonic_cartesian;

/// Real spherical-harmonic expansion `Σ c_lm Y_lm`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicExpansion {
    terms: Vec<(usize, i64, f64)>,
}

impl HarmonicExpansion {
    pub fn new(terms: Vec<(usize, i64, f64)>) -> Result<Self> {
        for &(l, m, c) in &terms {
            if m.unsigned_abs() as usize > l {
                return Err(invalid("harmonic coefficient with |m| > l"));
            }
            if !c.is_finite() {
                return Err(invalid("harmonic coefficient must be finite"));
            }
        }
        let mut terms: Vec<_> = terms.into_iter().filter(|t| t.2 != 0.0).collect();
        terms.sort_by_key(|t| (t.0, t.1));
        // merge duplicates
        let mut merged: Vec<(usize, i64, f64)> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if (last.0, last.1) == (t.0, t.1) => last.2 += t.2,
                _ => merged.push(t),
            }
        }
        Ok(HarmonicExpansion { terms: merged })
    }

    pub fn terms(&self) -> &[(usize, i64, f64)] {
        &self.terms
    }

    pub fn band_limit(&self) -> usize {
        self.terms.iter().map(|t| t.0).max().unwrap_or(0)
    }

    pub fn is_zonal(&self) -> bool {
        self.terms.iter().all(|t| t.1 == 0)
    }

    /// `∬ q² dS` by Parseval.
    pub fn l2_norm_squared(&self) -> f64 {
        self.terms.iter().map(|t| t.2 * t.2).sum()
    }

    fn eval<S: Scalar>(&self, p: [S; 3]) -> S {
        let mut acc = S::from_f64(0.0);
        for &(l, m, c) in &self.terms {
            acc = acc + real_harmonic_cartesian(l, m, p) * c;
        }
        acc
    }
}

type PointFn = dyn Fn([f64; 3]) -> f64 + Send + Sync;

/// A real function on the surface, evaluated at ambient unit vectors.
#[derive(Clone)]
pub enum ScalarField {
    Constant(f64),
    Harmonic(HarmonicExpansion),
    /// Gaussian curvature of the given metric.
    Curvature(MetricPatch),
    /// Arbitrary smooth function; `zonal` asserts dependence on `z` only.
    Function { f: Arc<PointFn>, zonal: bool },
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Constant(c) => f.debug_tuple("Constant").field(c).finish(),
            ScalarField::Harmonic(h) => f.debug_tuple("Harmonic").field(h).finish(),
            ScalarField::Curvature(m) => f.debug_tuple("Curvature").field(m).finish(),
            ScalarField::Function { zonal, .. } => f.debug_struct("Function").field("zonal", zonal).finish_non_exhaustive(),
        }
    }
}

impl ScalarField {
    pub fn zero() -> Self {
        ScalarField::Constant(0.0)
    }

    pub fn function(f: impl Fn([f64; 3]) -> f64 + Send + Sync + 'static, zonal: bool) -> Self {
        ScalarField::Function { f: Arc::new(f), zonal }
    }

    /// `amplitude · Y_lm`.
    pub fn harmonic(l: usize, m: i64, amplitude: f64) -> Result<Self> {
        Ok(ScalarField::Harmonic(HarmonicExpansion::new(alloc::vec![(l, m, amplitude)])?))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ScalarField::Constant(c) => *c == 0.0,
            ScalarField::Harmonic(h) => h.terms.is_empty(),
            _ => false,
        }
    }

    /// Depends on the height `z` only.
    pub fn is_zonal(&self) -> bool {
        match self {
            ScalarField::Constant(_) => true,
            ScalarField::Harmonic(h) => h.is_zonal(),
            ScalarField::Curvature(m) => m.profile().is_some(),
            ScalarField::Function { zonal, .. } => *zonal,
        }
    }

    /// Spherical-harmonic band limit when known.
    pub fn band_limit(&self) -> Option<usize> {
        match self {
            ScalarField::Constant(_) => Some(0),
            ScalarField::Harmonic(h) => Some(h.band_limit()),
            _ => None,
        }
    }

    /// Harmonic coefficients when the field is an explicit expansion.
    pub fn as_expansion(&self) -> Option<HarmonicExpansion> {
        match self {
            ScalarField::Constant(c) => {
                HarmonicExpansion::new(alloc::vec![(0, 0, c * crate::math::sqrt(4.0 * crate::math::PI))]).ok()
            }
            ScalarField::Harmonic(h) => Some(h.clone()),
            _ => None,
        }
    }

    pub fn value(&self, x: [f64; 3]) -> Result<f64> {
        match self {
            ScalarField::Constant(c) => Ok(*c),
            ScalarField::Harmonic(h) => Ok(h.eval(x)),
            ScalarField::Curvature(m) => crate::geometry::curvature::gauss_curvature_at(m, x),
            ScalarField::Function { f, .. } => Ok(f(x)),
        }
    }

    /// Value with gradient and Hessian in chart coordinates.
    pub fn jet(&self, chart: Chart, u: [f64; 2]) -> Result<Jet> {
        match self {
            ScalarField::Constant(c) => Ok(Jet::constant(*c)),
            ScalarField::Harmonic(h) => Ok(h.eval(chart.ambient_jets(u))),
            ScalarField::Curvature(m) => fd_jet(|v| gauss_curvature(m, chart, v), u),
            ScalarField::Function { f, .. } => fd_jet(|v| Ok(f(chart.to_ambient(v))), u),
        }
    }
}

const FD_STEP: f64 = 1e-2;

/// Fourth-order centered differences for value, gradient and Hessian. The
/// step shrinks near a chart pole so the stencil never crosses it.
fn fd_jet(f: impl Fn([f64; 2]) -> Result<f64>, u: [f64; 2]) -> Result<Jet> {
    let pole_distance = u[0].min(crate::math::PI - u[0]);
    let h = FD_STEP.min(0.25 * pole_distance);
    let w1 = [(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)];
    let w2 = [(-2.0, -1.0 / 12.0), (-1.0, 16.0 / 12.0), (0.0, -30.0 / 12.0), (1.0, 16.0 / 12.0), (2.0, -1.0 / 12.0)];
    let v = f(u)?;
    let mut d = [0.0; 2];
    let mut dd = [0.0; 2];
    for i in 0..2 {
        let at = |s: f64| {
            let mut p = u;
            p[i] += s * h;
            f(p)
        };
        for &(s, w) in &w1 {
            d[i] += w * at(s)?;
        }
        for &(s, w) in &w2 {
            dd[i] += w * if s == 0.0 { v } else { at(s)? };
        }
        d[i] /= h;
        dd[i] /= h * h;
    }
    let mut mixed = 0.0;
    for &(s, ws) in &w1 {
        for &(r, wr) in &w1 {
            mixed += ws * wr * f([u[0] + s * h, u[1] + r * h])?;
        }
    }
    mixed /= h * h;
    Ok(Jet { v, d, h: [dd[0], mixed, dd[1]] })
}

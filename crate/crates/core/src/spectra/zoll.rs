//! Separated eigenproblems on surfaces of revolution
//! `(1 + h(cos θ))² dθ² + sin²θ dφ²` with a zonal potential.
//!
//! Mode `m` of `-Δ + q` is the Sturm–Liouville problem
//! `-((1 - x²)/(1 + h) F')' + (1 + h)(m²/(1 - x²) + q) F = λ (1 + h) F`
//! on `x ∈ [-1, 1]`. Two discretizations are provided: a Galerkin method in
//! the normalized associated Legendre functions `Θ_l^m` (spectrally
//! accurate, the default) and a second-order cell-centred difference scheme
//! in `θ`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::geometry::field::ScalarField;
use crate::geometry::metric::{MetricPatch, Profile};
use crate::linalg::{generalized_eigenvalues, tridiagonal_eigenvalues};
use crate::math::{cos, sin, sqrt, PI};
use crate::numerics::legendre::normalized_associated_with_derivative;
use crate::numerics::quadrature::gauss_legendre;
use crate::par::map_range;
use crate::spectra::cluster::{assemble_clusters, ClusteredSpectrum};
use crate::spectra::galerkin::{spherical_mean, MIN_DEGREE, UNKNOWN_BAND};

/// Extra Gauss–Legendre nodes beyond polynomial exactness, for the
/// non-polynomial factor `1/(1 + h)`.
const EXTRA_NODES: usize = 48;

/// Clusters within this many degrees of the basis degree are not trusted.
/// Eigenvalues converge to roundoff about `8 + degree/12` below the
/// basis degree on `zoll(0.1)`.
pub fn zoll_reliability_buffer(degree: usize) -> usize {
    12 + degree / 10
}

/// Smallest grid accepted by the difference scheme.
pub const MIN_GRID: usize = 200;

/// Discretization of the separated problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparatedScheme {
    /// Legendre–Galerkin with basis degrees `|m|..=degree`.
    Galerkin { degree: usize },
    /// Cell-centred differences on `n` uniform cells in `θ`.
    FiniteDifference { cells: usize },
}

fn profile_of(metric: &MetricPatch) -> Result<&Profile> {
    metric.profile().ok_or_else(|| invalid("separated solver needs a surface of revolution"))
}

fn zonal_q(q: &ScalarField, x: f64) -> Result<f64> {
    if q.is_zero() {
        return Ok(0.0);
    }
    q.value([sqrt((1.0 - x * x).max(0.0)), 0.0, x])
}

/// Eigenvalues of azimuthal mode `m`, ascending.
pub fn zoll_separated_solver(metric: &MetricPatch, q: &ScalarField, m: usize, scheme: SeparatedScheme) -> Result<Vec<f64>> {
    if !q.is_zonal() {
        return Err(invalid("separation needs a zonal potential"));
    }
    let p = profile_of(metric)?;
    match scheme {
        SeparatedScheme::Galerkin { degree } => galerkin_mode(p, q, m, degree),
        SeparatedScheme::FiniteDifference { cells } => difference_mode(p, q, m, cells),
    }
}

fn galerkin_mode(p: &Profile, q: &ScalarField, m: usize, degree: usize) -> Result<Vec<f64>> {
    if m > degree {
        return Ok(Vec::new());
    }
    let n = degree - m + 1;
    let band = q.band_limit().unwrap_or(UNKNOWN_BAND);
    let rule = gauss_legendre(degree + band + 3 * p.r_coefficients().len() + EXTRA_NODES, -1.0, 1.0)?;
    let mut s = vec![0.0; n * n];
    let mut mass = vec![0.0; n * n];
    let m2 = (m * m) as f64;
    for (x, w) in rule.iter() {
        let (theta, dtheta) = normalized_associated_with_derivative(degree, m, x);
        let one_h = 1.0 + p.h(x).0;
        let sx = 1.0 - x * x;
        let stiff = w / (one_h * sx);
        let pot = w * one_h * (m2 / sx + zonal_q(q, x)?);
        let wm = w * one_h;
        for r in 0..n {
            let (a1, b1, c1) = (stiff * dtheta[r], pot * theta[r], wm * theta[r]);
            for c in r..n {
                s[r * n + c] += a1 * dtheta[c] + b1 * theta[c];
                mass[r * n + c] += c1 * theta[c];
            }
        }
    }
    for r in 0..n {
        for c in 0..r {
            s[r * n + c] = s[c * n + r];
            mass[r * n + c] = mass[c * n + r];
        }
    }
    generalized_eigenvalues(&s, &mass, n)
}

fn difference_mode(p: &Profile, q: &ScalarField, m: usize, cells: usize) -> Result<Vec<f64>> {
    if cells < MIN_GRID {
        return Err(invalid(format!("difference grid {cells} below the minimum {MIN_GRID}")));
    }
    let dt = PI / cells as f64;
    let m2 = (m * m) as f64;
    // face coefficients sin θ/(1 + h) at θ_{i+1/2}; zero at the poles
    let face: Vec<f64> = (0..=cells)
        .map(|i| {
            let t = dt * i as f64;
            if i == 0 || i == cells {
                0.0
            } else {
                sin(t) / (1.0 + p.h(cos(t)).0)
            }
        })
        .collect();
    let mut diag = Vec::with_capacity(cells);
    let mut weight = Vec::with_capacity(cells);
    for i in 0..cells {
        let t = dt * (i as f64 + 0.5);
        let (st, x) = (sin(t), cos(t));
        let one_h = 1.0 + p.h(x).0;
        let wt = one_h * st;
        weight.push(wt);
        diag.push((face[i] + face[i + 1]) / (dt * dt) + wt * (m2 / (st * st) + zonal_q(q, x)?));
    }
    // symmetric scaling W^{-1/2} S W^{-1/2} keeps the pencil tridiagonal
    let d: Vec<f64> = diag.iter().zip(&weight).map(|(a, w)| a / w).collect();
    let off: Vec<f64> = (0..cells - 1).map(|i| -face[i + 1] / (dt * dt) / sqrt(weight[i] * weight[i + 1])).collect();
    if d.iter().chain(&off).any(|v| !v.is_finite()) {
        return Err(Error::Discretization(format!("non-finite difference matrix on {cells} cells")));
    }
    tridiagonal_eigenvalues(&d, &off)
}

/// Full spectrum over all modes `|m| ≤ degree`, clustered up to
/// `degree - band(q) - zoll_reliability_buffer(degree)`.
pub fn zoll_spectrum(metric: &MetricPatch, q: &ScalarField, degree: usize) -> Result<ClusteredSpectrum> {
    if degree < MIN_DEGREE {
        return Err(invalid(format!("basis degree {degree} below the minimum {MIN_DEGREE}")));
    }
    let band = q.band_limit().unwrap_or(UNKNOWN_BAND);
    let k_cap = degree
        .checked_sub(band + zoll_reliability_buffer(degree))
        .ok_or_else(|| invalid("basis degree too small for the reliability buffer"))?;
    let modes: Vec<Result<Vec<f64>>> = map_range(degree + 1, |m| zoll_separated_solver(metric, q, m, SeparatedScheme::Galerkin { degree }));
    let mut all = Vec::new();
    for (m, e) in modes.into_iter().enumerate() {
        let e = e?;
        if m > 0 {
            all.extend_from_slice(&e);
        }
        all.extend(e);
    }
    let center = spherical_mean(q)?;
    assemble_clusters(&all, k_cap, center, format!("zoll-separated-galerkin/L={degree}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::field::HarmonicExpansion;
    use crate::geometry::metric::{builtin_metric, MetricFamily};
    use crate::math::abs;
    use crate::spectra::galerkin::sphere_zonal_block;

    fn galerkin(degree: usize) -> SeparatedScheme {
        SeparatedScheme::Galerkin { degree }
    }

    #[test]
    fn legendre_equation() {
        let round = MetricPatch::round();
        let e = zoll_separated_solver(&round, &ScalarField::zero(), 0, galerkin(30)).unwrap();
        for (k, l) in e.iter().enumerate() {
            assert!((l - (k * (k + 1)) as f64).abs() < 1e-9, "{k} {l}");
        }
        let e = zoll_separated_solver(&round, &ScalarField::zero(), 2, galerkin(30)).unwrap();
        for (i, l) in e.iter().enumerate() {
            let k = i + 2;
            assert!((l - (k * (k + 1)) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn difference_scheme_converges_at_second_order() {
        let round = MetricPatch::round();
        let err = |n: usize, m: usize| {
            let e = zoll_separated_solver(&round, &ScalarField::zero(), m, SeparatedScheme::FiniteDifference { cells: n }).unwrap();
            (0..4).map(|i| abs(e[i] - ((m + i) * (m + i + 1)) as f64)).fold(0.0, f64::max)
        };
        for m in [0, 2] {
            let (a, b) = (err(200, m), err(400, m));
            let order = (a / b).log2();
            assert!(order > 1.9, "m = {m}: order {order} ({a:e}, {b:e})");
        }
        // second order only: 1.9e-4 on λ = 12 at 800 cells
        assert!(err(800, 0) < 2.5e-4);
    }

    #[test]
    fn difference_and_galerkin_agree_on_zoll() {
        let m0 = MetricPatch::zoll(0.1).unwrap();
        let g = zoll_separated_solver(&m0, &ScalarField::zero(), 1, galerkin(40)).unwrap();
        let fd = zoll_separated_solver(&m0, &ScalarField::zero(), 1, SeparatedScheme::FiniteDifference { cells: 1600 }).unwrap();
        for i in 0..5 {
            assert!((g[i] - fd[i]).abs() < 1e-3 * (1.0 + g[i]), "{i}: {} {}", g[i], fd[i]);
        }
    }

    #[test]
    fn separation_matches_sphere_galerkin_for_round_metric() {
        let q = ScalarField::Harmonic(HarmonicExpansion::new(alloc::vec![(1, 0, 0.6), (2, 0, 0.3)]).unwrap());
        let round = MetricPatch::round();
        for m in [0, 1, 3] {
            let a = zoll_separated_solver(&round, &q, m, galerkin(30)).unwrap();
            let b = sphere_zonal_block(&q, 30, m).unwrap();
            for i in 0..20 {
                assert!((a[i] - b[i]).abs() < 1e-6, "m = {m}, {i}");
            }
        }
    }

    #[test]
    fn zoll_clusters_stay_near_round_values() {
        let m = MetricPatch::zoll(0.1).unwrap();
        let s = zoll_spectrum(&m, &ScalarField::zero(), 84).unwrap();
        assert!(s.k_max_reliable >= 60);
        let mut widest: f64 = 0.0;
        for k in 10..=60 {
            for &l in s.cluster(k).unwrap() {
                widest = widest.max(abs(l - (k * (k + 1)) as f64));
            }
        }
        assert!(widest <= 2.0, "{widest}");
    }

    #[test]
    fn zoll_truncation_stability() {
        let m = MetricPatch::zoll(0.1).unwrap();
        let a = zoll_spectrum(&m, &ScalarField::zero(), 48).unwrap();
        let b = zoll_spectrum(&m, &ScalarField::zero(), 60).unwrap();
        for k in 0..=a.k_max_reliable {
            for (x, y) in a.cluster(k).unwrap().iter().zip(b.cluster(k).unwrap()) {
                assert!((x - y).abs() < 1e-8, "k = {k}: {x} {y}");
            }
        }
    }

    #[test]
    fn deep_cluster_sums_are_converged() {
        let m = MetricPatch::zoll(0.1).unwrap();
        let a = zoll_spectrum(&m, &ScalarField::zero(), 100).unwrap();
        let b = zoll_spectrum(&m, &ScalarField::zero(), 140).unwrap();
        for k in 0..=a.k_max_reliable {
            let sa: f64 = a.cluster(k).unwrap().iter().sum();
            let sb: f64 = b.cluster(k).unwrap().iter().sum();
            assert!((sa - sb).abs() < 1e-9, "k = {k}: {}", sa - sb);
        }
    }

    #[test]
    fn non_zoll_control_spreads_clusters() {
        // an even profile breaks the cluster structure at large k
        let control = builtin_metric(MetricFamily::Revolution(Profile::even_bump(0.1))).unwrap();
        let e = zoll_separated_solver(&control, &ScalarField::zero(), 0, galerkin(60)).unwrap();
        let k = 40;
        assert!(abs(e[k] - (k * (k + 1)) as f64) > 2.0);
    }
}

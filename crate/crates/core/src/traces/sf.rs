//! The round-sphere constants `c₀ = (1/4π)∬q` and
//! `c₁ = (1/32π³) ∬∬ q(ω)q(ω₀)/√(1 - (ω·ω₀)²) - (1/16π) ∬q²`.
//!
//! The kernel double integral is evaluated twice, independently:
//! spectrally through the Funk–Hecke eigenvalues `2π² P_l(0)²`, and
//! directly in geodesic polar coordinates about each outer node, where the
//! area factor `sin d` cancels the kernel's `1/|sin d|`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::field::ScalarField;
use crate::math::{abs, cos, sin, sqrt, PI, TAU};
use crate::numerics::legendre::{legendre_p_at_zero, spherical_harmonic};
use crate::numerics::quadrature::gauss_legendre;

/// Relative agreement required between the two kernel evaluations.
pub const KERNEL_AGREEMENT: f64 = 1e-6;

/// Degree assumed for potentials without a harmonic expansion.
const UNKNOWN_DEGREE: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct SfConstants {
    pub c0: f64,
    pub c1: f64,
    /// Kernel double integral from the harmonic projection.
    pub kernel_spectral: f64,
    /// Kernel double integral by direct quadrature.
    pub kernel_direct: f64,
    /// `|spectral - direct| / max(|spectral|, |direct|, 1e-300)`.
    pub relative_disagreement: f64,
    /// `∬ q² dS`.
    pub square_integral: f64,
    /// `(l, m, q̂_lm)` for every projected coefficient above `1e-14`.
    pub coefficients: Vec<(usize, i64, f64)>,
}

fn degree_of(q: &ScalarField) -> usize {
    q.band_limit().unwrap_or(UNKNOWN_DEGREE)
}

/// `q̂_lm = ∬ q Y_lm dS` for `l ≤ degree`, by a product rule exact for the
/// band-limited product.
pub fn project_harmonics(q: &ScalarField, degree: usize) -> Result<Vec<(usize, i64, f64)>> {
    let rule = gauss_legendre(degree + 2, -1.0, 1.0)?;
    let nphi = 2 * degree + 2;
    let mut samples = Vec::with_capacity(rule.len() * nphi);
    for (x, w) in rule.iter() {
        let r = sqrt(1.0 - x * x);
        for j in 0..nphi {
            let phi = TAU * j as f64 / nphi as f64;
            samples.push((crate::math::acos(x), phi, w * TAU / nphi as f64 * q.value([r * cos(phi), r * sin(phi), x])?));
        }
    }
    let mut out = Vec::new();
    for l in 0..=degree {
        for m in -(l as i64)..=(l as i64) {
            let mut s = 0.0;
            for &(theta, phi, wq) in &samples {
                s += wq * spherical_harmonic(l, m, theta, phi)?;
            }
            out.push((l, m, s));
        }
    }
    Ok(out)
}

/// `∬∬ q(ω) q(ω₀) / |sin d(ω, ω₀)|` by nested quadrature.
pub fn kernel_integral_direct(q: &ScalarField, degree: usize) -> Result<f64> {
    let outer = gauss_legendre(degree + 2, -1.0, 1.0)?;
    let nphi = 2 * degree + 2;
    let radial = gauss_legendre(2 * degree + 24, 0.0, PI)?;
    let npsi = 2 * degree + 2;
    let mut total = 0.0;
    for (x, w) in outer.iter() {
        let s = sqrt(1.0 - x * x);
        for j in 0..nphi {
            let phi = TAU * j as f64 / nphi as f64;
            let (cp, sp) = (cos(phi), sin(phi));
            let p = [s * cp, s * sp, x];
            // orthonormal tangent frame at p
            let e1 = [x * cp, x * sp, -s];
            let e2 = [-sp, cp, 0.0];
            let mut inner = 0.0;
            for (d, wd) in radial.iter() {
                let (cd, sd) = (cos(d), sin(d));
                let mut ring = 0.0;
                for k in 0..npsi {
                    let psi = TAU * k as f64 / npsi as f64;
                    let (c, sn) = (cos(psi), sin(psi));
                    let y = [
                        cd * p[0] + sd * (c * e1[0] + sn * e2[0]),
                        cd * p[1] + sd * (c * e1[1] + sn * e2[1]),
                        cd * p[2] + sd * (c * e1[2] + sn * e2[2]),
                    ];
                    ring += q.value(y)?;
                }
                inner += wd * ring * TAU / npsi as f64;
            }
            total += w * TAU / nphi as f64 * q.value(p)? * inner;
        }
    }
    Ok(total)
}

/// `c₀`, `c₁` and both kernel evaluations; fails with
/// [`Error::KernelMismatch`] when they disagree beyond [`KERNEL_AGREEMENT`].
pub fn sf_constants(q: &ScalarField) -> Result<SfConstants> {
    let degree = degree_of(q);
    let coefficients = project_harmonics(q, degree)?;
    let mut kernel_spectral = 0.0;
    let mut square_integral = 0.0;
    let mut mean = 0.0;
    for &(l, _, c) in &coefficients {
        let p = legendre_p_at_zero(l);
        kernel_spectral += 2.0 * PI * PI * p * p * c * c;
        square_integral += c * c;
        if l == 0 {
            mean = c * sqrt(4.0 * PI) / (4.0 * PI);
        }
    }
    let kernel_direct = kernel_integral_direct(q, degree)?;
    let scale = abs(kernel_spectral).max(abs(kernel_direct)).max(1e-300);
    let relative_disagreement = abs(kernel_spectral - kernel_direct) / scale;
    if relative_disagreement > KERNEL_AGREEMENT && abs(kernel_spectral - kernel_direct) > 1e-13 {
        return Err(Error::KernelMismatch { spectral: kernel_spectral, direct: kernel_direct });
    }
    let c1 = kernel_spectral / (32.0 * PI * PI * PI) - square_integral / (16.0 * PI);
    let coefficients = coefficients.into_iter().filter(|c| abs(c.2) > 1e-14).collect();
    Ok(SfConstants { c0: mean, c1, kernel_spectral, kernel_direct, relative_disagreement, square_integral, coefficients })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::field::HarmonicExpansion;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_potential() {
        let c = 0.7;
        let s = sf_constants(&ScalarField::Constant(c)).unwrap();
        let target = 8.0 * PI * PI * PI * c * c;
        assert!((s.kernel_spectral - target).abs() < 1e-8 * target);
        assert!((s.kernel_direct - target).abs() < 1e-8 * target);
        assert!(s.c1.abs() < 1e-14);
        assert!((s.c0 - c).abs() < 1e-14);
    }

    #[test]
    fn zonal_degree_two() {
        let s = sf_constants(&ScalarField::harmonic(2, 0, 1.0).unwrap()).unwrap();
        assert!((s.c1 + 3.0 / (64.0 * PI)).abs() < 1e-12, "{}", s.c1);
        assert!((s.kernel_direct - PI * PI / 2.0).abs() < 1e-9);
    }

    #[test]
    fn odd_potentials_reduce_to_the_square_integral() {
        let q = ScalarField::Harmonic(HarmonicExpansion::new(alloc::vec![(1, 0, 0.5), (3, -1, 0.2), (5, 4, -0.1)]).unwrap());
        let s = sf_constants(&q).unwrap();
        let q2 = 0.25 + 0.04 + 0.01;
        assert!((2.0 * s.c1 + q2 / (8.0 * PI)).abs() < 1e-13);
        assert!(s.kernel_direct.abs() < 1e-12);
    }

    #[test]
    fn methods_agree_on_random_potentials() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..4 {
            let terms = (0..6).map(|_| {
                let l = rng.gen_range(0..=6usize);
                (l, rng.gen_range(-(l as i64)..=(l as i64)), rng.gen_range(-1.0..1.0))
            });
            let q = ScalarField::Harmonic(HarmonicExpansion::new(terms.collect()).unwrap());
            let s = sf_constants(&q).unwrap();
            assert!(s.relative_disagreement < 1e-10, "{}", s.relative_disagreement);
        }
    }

    #[test]
    fn projection_recovers_coefficients() {
        let q = ScalarField::Harmonic(HarmonicExpansion::new(alloc::vec![(2, -1, 0.3), (4, 3, -0.6)]).unwrap());
        let p = project_harmonics(&q, 4).unwrap();
        for &(l, m, c) in &p {
            let expected = match (l, m) {
                (2, -1) => 0.3,
                (4, 3) => -0.6,
                _ => 0.0,
            };
            assert!((c - expected).abs() < 1e-13, "{l} {m} {c}");
        }
    }
}

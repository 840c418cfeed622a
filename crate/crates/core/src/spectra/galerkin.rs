//! `-Δ + q` on the round sphere in the real orthonormal harmonic basis.
//!
//! The matrix is `diag(l(l + 1)) + Q` with `Q` the Gram matrix of `q` in the
//! basis, computed by product quadrature (Gauss–Legendre in `cos θ`, uniform
//! in `φ`) that is exact for band-limited `q`. A zonal `q` splits by `m` into
//! banded blocks; the `±m` blocks coincide.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::geometry::field::ScalarField;
use crate::linalg::{band_eigenvalues, symmetric_eigenvalues, tridiagonal_eigenvalues};
use crate::math::{abs, cos, sin, sqrt, PI, TAU};
use crate::numerics::legendre::normalized_associated;
use crate::numerics::quadrature::{gauss_legendre, QuadratureRule};
use crate::par::map_range;
use crate::spectra::cluster::{assemble_clusters, ClusteredSpectrum};

/// Smallest supported basis degree.
pub const MIN_DEGREE: usize = 8;

/// Degrees above `L_max - band - RELIABILITY_BUFFER` are not trusted.
pub const RELIABILITY_BUFFER: usize = 4;

/// Band limit assumed for a potential with no harmonic expansion.
pub const UNKNOWN_BAND: usize = 8;

/// Tolerance on matrix entries the quadrature must reproduce as zero.
pub const LEAKAGE_TOLERANCE: f64 = 1e-10;

/// Spherical mean `(1/4π) ∬ q dS` of a band-limited field, from its
/// expansion when available.
pub(crate) fn spherical_mean(q: &ScalarField) -> Result<f64> {
    if let Some(e) = q.as_expansion() {
        let c = e.terms().iter().filter(|t| t.0 == 0).map(|t| t.2).sum::<f64>();
        return Ok(c / sqrt(4.0 * PI));
    }
    let rule = gauss_legendre(64, -1.0, 1.0)?;
    let nphi = if q.is_zonal() { 1 } else { 128 };
    let mut s = 0.0;
    for (x, w) in rule.iter() {
        let r = sqrt(1.0 - x * x);
        for j in 0..nphi {
            let phi = TAU * j as f64 / nphi as f64;
            s += w * q.value([r * cos(phi), r * sin(phi), x])?;
        }
    }
    Ok(s / (2.0 * nphi as f64))
}

fn band_of(q: &ScalarField) -> usize {
    q.band_limit().unwrap_or(UNKNOWN_BAND)
}

fn zonal_value(q: &ScalarField, x: f64) -> Result<f64> {
    q.value([sqrt((1.0 - x * x).max(0.0)), 0.0, x])
}

/// Block `m` of a zonal potential: `D + Q` over degrees `m..=l_max`, stored
/// densely with `band` (or `band + 1` for the leakage check) diagonals filled.
fn zonal_block(q_nodes: &[f64], rule: &QuadratureRule, l_max: usize, m: usize, band: Option<usize>) -> (Vec<f64>, usize, f64) {
    let n = l_max - m + 1;
    let reach = band.map_or(n - 1, |b| (b + 1).min(n - 1));
    let mut a = vec![0.0; n * n];
    for (i, (&x, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let theta = normalized_associated(l_max, m, x);
        let wq = w * q_nodes[i];
        for r in 0..n {
            let t = wq * theta[r];
            for c in r..(r + reach + 1).min(n) {
                a[r * n + c] += t * theta[c];
            }
        }
    }
    let mut leakage: f64 = 0.0;
    let bw = band.map_or(n - 1, |b| b.min(n - 1));
    for r in 0..n {
        for c in r..(r + reach + 1).min(n) {
            if c - r > bw {
                leakage = leakage.max(abs(a[r * n + c]));
                a[r * n + c] = 0.0;
            } else {
                a[c * n + r] = a[r * n + c];
            }
        }
        let l = (m + r) as f64;
        a[r * n + r] += l * (l + 1.0);
    }
    (a, bw, leakage)
}

fn block_eigenvalues(a: &[f64], n: usize, bw: usize) -> Result<Vec<f64>> {
    match bw {
        0 => {
            let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
            d.sort_by(f64::total_cmp);
            Ok(d)
        }
        1 => {
            let d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
            let e: Vec<f64> = (0..n.saturating_sub(1)).map(|i| a[i * n + i + 1]).collect();
            tridiagonal_eigenvalues(&d, &e)
        }
        b if 4 * b < n => band_eigenvalues(a, n, b),
        _ => symmetric_eigenvalues(a, n),
    }
}

/// Eigenvalues of the `m` block of `-Δ + q` for zonal `q`, degrees
/// `|m|..=l_max`.
pub fn sphere_zonal_block(q: &ScalarField, l_max: usize, m: usize) -> Result<Vec<f64>> {
    if !q.is_zonal() {
        return Err(invalid("zonal block requested for a non-zonal potential"));
    }
    if m > l_max {
        return Ok(Vec::new());
    }
    let band = q.band_limit();
    let rule = gauss_legendre(l_max + band.unwrap_or(l_max) + 2, -1.0, 1.0)?;
    let q_nodes = rule.nodes.iter().map(|&x| zonal_value(q, x)).collect::<Result<Vec<_>>>()?;
    let (a, bw, leak) = zonal_block(&q_nodes, &rule, l_max, m, band);
    if leak > LEAKAGE_TOLERANCE {
        return Err(Error::QuadratureInconsistency { asymmetry: leak });
    }
    block_eigenvalues(&a, l_max - m + 1, bw)
}

/// Matrix element `∬ Y_{l m} q Y_{l' m'} dS` by the same product quadrature
/// the solver uses.
pub fn potential_matrix_element(q: &ScalarField, a: (usize, i64), b: (usize, i64)) -> Result<f64> {
    let l_max = a.0.max(b.0);
    let band = band_of(q);
    let rule = gauss_legendre(l_max + band + 2, -1.0, 1.0)?;
    let nphi = 2 * l_max + band + 2;
    let mut s = 0.0;
    for (x, w) in rule.iter() {
        let ta = normalized_associated(a.0, a.1.unsigned_abs() as usize, x);
        let tb = normalized_associated(b.0, b.1.unsigned_abs() as usize, x);
        let theta = ta.last().copied().unwrap_or(0.0) * tb.last().copied().unwrap_or(0.0);
        let r = sqrt(1.0 - x * x);
        let mut f = 0.0;
        for j in 0..nphi {
            let phi = TAU * j as f64 / nphi as f64;
            f += azimuthal(a.1, phi) * azimuthal(b.1, phi) * q.value([r * cos(phi), r * sin(phi), x])?;
        }
        s += w * theta * f * TAU / nphi as f64;
    }
    Ok(s)
}

fn azimuthal(m: i64, phi: f64) -> f64 {
    if m == 0 {
        1.0 / sqrt(TAU)
    } else if m > 0 {
        cos(m as f64 * phi) / sqrt(PI)
    } else {
        sin((-m) as f64 * phi) / sqrt(PI)
    }
}

/// Eigenvalues of the full `(l_max + 1)² × (l_max + 1)²` matrix for a
/// general `q`, ascending.
pub fn sphere_full_eigenvalues(q: &ScalarField, l_max: usize) -> Result<Vec<f64>> {
    let band = band_of(q);
    let rule = gauss_legendre(l_max + band + 2, -1.0, 1.0)?;
    let nphi = 2 * l_max + band + 2;
    let dim = (l_max + 1) * (l_max + 1);
    // basis ordered by azimuthal index a = -l_max..=l_max, then degree
    let offsets: Vec<usize> = {
        let mut o = Vec::with_capacity(2 * l_max + 2);
        let mut acc = 0;
        for a in -(l_max as i64)..=(l_max as i64) {
            o.push(acc);
            acc += l_max + 1 - a.unsigned_abs() as usize;
        }
        o.push(acc);
        o
    };
    let na = 2 * l_max + 1;
    let phis: Vec<f64> = (0..nphi).map(|j| TAU * j as f64 / nphi as f64).collect();
    let basis: Vec<Vec<f64>> = (0..na).map(|ai| phis.iter().map(|&p| azimuthal(ai as i64 - l_max as i64, p)).collect()).collect();
    struct NodeData {
        f: Vec<f64>,
        thetas: Vec<Vec<f64>>,
    }
    let nodes: Vec<Result<NodeData>> = map_range(rule.len(), |i| {
        let x = rule.nodes[i];
        let r = sqrt(1.0 - x * x);
        let qv = phis.iter().map(|&p| q.value([r * cos(p), r * sin(p), x])).collect::<Result<Vec<_>>>()?;
        let thetas: Vec<Vec<f64>> = (0..=l_max).map(|m| normalized_associated(l_max, m, x)).collect();
        let mut f = vec![0.0; na * na];
        for ai in 0..na {
            for bi in ai..na {
                let mut s = 0.0;
                for j in 0..nphi {
                    s += basis[ai][j] * basis[bi][j] * qv[j];
                }
                f[ai * na + bi] = rule.weights[i] * s * TAU / nphi as f64;
            }
        }
        Ok(NodeData { f, thetas })
    });
    let nodes = nodes.into_iter().collect::<Result<Vec<_>>>()?;
    // each azimuthal block row is accumulated independently
    let rows: Vec<Vec<f64>> = map_range(na, |ai| {
        let ma = (ai as i64 - l_max as i64).unsigned_abs() as usize;
        let height = l_max + 1 - ma;
        let mut out = vec![0.0; height * dim];
        for node in &nodes {
            for bi in ai..na {
                let mb = (bi as i64 - l_max as i64).unsigned_abs() as usize;
                let fab = node.f[ai * na + bi];
                for (ri, ta) in node.thetas[ma].iter().enumerate() {
                    let t = fab * ta;
                    let row = &mut out[ri * dim + offsets[bi]..];
                    for (ci, tb) in node.thetas[mb].iter().enumerate() {
                        row[ci] += t * tb;
                    }
                }
            }
        }
        out
    });
    let mut a = Vec::with_capacity(dim * dim);
    for r in rows {
        a.extend(r);
    }
    for ai in 0..na {
        let m = (ai as i64 - l_max as i64).unsigned_abs() as usize;
        for ri in 0..(l_max + 1 - m) {
            let l = (m + ri) as f64;
            let d = offsets[ai] + ri;
            a[d * dim + d] += l * (l + 1.0);
        }
    }
    // only blocks with ai ≤ bi were filled; mirror them, checking the
    // diagonal blocks for consistency
    let mut asym: f64 = 0.0;
    for r in 0..dim {
        for c in (r + 1)..dim {
            let (u, l) = (a[r * dim + c], a[c * dim + r]);
            if l != 0.0 {
                asym = asym.max(abs(u - l));
            }
            let v = if u != 0.0 { u } else { l };
            a[r * dim + c] = v;
            a[c * dim + r] = v;
        }
    }
    if asym > LEAKAGE_TOLERANCE {
        return Err(Error::QuadratureInconsistency { asymmetry: asym });
    }
    symmetric_eigenvalues(&a, dim)
}

/// Spectrum of `-Δ + q` on the round sphere, clustered up to
/// `l_max - band(q) - 4`.
pub fn sphere_galerkin(q: &ScalarField, l_max: usize) -> Result<ClusteredSpectrum> {
    if l_max < MIN_DEGREE {
        return Err(invalid(format!("basis degree {l_max} below the minimum {MIN_DEGREE}")));
    }
    let band = band_of(q);
    let k_cap = l_max.checked_sub(band + RELIABILITY_BUFFER).ok_or_else(|| invalid("basis degree too small for the potential's band"))?;
    let eig = if q.is_zonal() {
        let band_opt = q.band_limit();
        let rule = gauss_legendre(l_max + band + 2, -1.0, 1.0)?;
        let q_nodes = rule.nodes.iter().map(|&x| zonal_value(q, x)).collect::<Result<Vec<_>>>()?;
        let blocks: Vec<Result<Vec<f64>>> = map_range(l_max + 1, |m| {
            let (a, bw, leak) = zonal_block(&q_nodes, &rule, l_max, m, band_opt);
            if leak > LEAKAGE_TOLERANCE {
                return Err(Error::QuadratureInconsistency { asymmetry: leak });
            }
            block_eigenvalues(&a, l_max - m + 1, bw)
        });
        let mut all = Vec::with_capacity((l_max + 1) * (l_max + 1));
        for (m, b) in blocks.into_iter().enumerate() {
            let b = b?;
            if m > 0 {
                all.extend_from_slice(&b);
            }
            all.extend(b);
        }
        all
    } else {
        sphere_full_eigenvalues(q, l_max)?
    };
    let center = spherical_mean(q)?;
    assemble_clusters(&eig, k_cap, center, format!("sphere-galerkin/L={l_max}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::field::HarmonicExpansion;
    use crate::spectra::cluster::{cluster_statistics, ShiftReference};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cos_theta(amplitude: f64) -> ScalarField {
        ScalarField::harmonic(1, 0, amplitude * sqrt(4.0 * PI / 3.0)).unwrap()
    }

    #[test]
    fn free_spectrum_is_exact() {
        let s = sphere_galerkin(&ScalarField::zero(), 30).unwrap();
        for k in 0..=s.k_max_reliable {
            let c = s.cluster(k).unwrap();
            assert_eq!(c.len(), 2 * k + 1);
            assert!(c.iter().all(|&l| l == (k * (k + 1)) as f64));
        }
    }

    #[test]
    fn constant_potential_shifts_everything() {
        for &c in &[-1.0, 0.3, 2.0] {
            let s = sphere_galerkin(&ScalarField::Constant(c), 20).unwrap();
            for k in 0..=s.k_max_reliable {
                for &l in s.cluster(k).unwrap() {
                    assert!((l - (k * (k + 1)) as f64 - c).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn cos_theta_matrix_elements() {
        let q = cos_theta(1.0);
        let e = potential_matrix_element(&q, (0, 0), (1, 0)).unwrap();
        assert!((e - 1.0 / sqrt(3.0)).abs() < 1e-14);
        for &(l, m) in &[(3usize, 2i64), (5, -4), (7, 0)] {
            let lf = l as f64;
            let mf = m as f64;
            let exact = sqrt(((lf + 1.0).powi(2) - mf * mf) / ((2.0 * lf + 1.0) * (2.0 * lf + 3.0)));
            let e = potential_matrix_element(&q, (l, m), (l + 1, m)).unwrap();
            assert!((e - exact).abs() < 1e-13, "{l} {m}");
            if m != 0 {
                assert!(potential_matrix_element(&q, (l, m), (l + 1, -m)).unwrap().abs() < 1e-14);
            }
        }
    }

    #[test]
    fn weak_odd_potential_keeps_clusters() {
        let s = sphere_galerkin(&cos_theta(0.3), 60).unwrap();
        assert_eq!(s.k_max_reliable, 55);
        for k in 0..=54 {
            assert_eq!(s.cluster(k).unwrap().len(), 2 * k + 1);
        }
        // traceless cluster blocks: cluster sums vanish to second order
        for st in cluster_statistics(&s, ShiftReference::Round).unwrap().iter().skip(1) {
            assert!(st.sum.abs() < 0.09 * 0.1, "{st:?}");
        }
    }

    #[test]
    fn cluster_sums_vanish_to_first_order() {
        // Π_k cosθ Π_k is traceless; for k ≥ 1 even the second-order sums
        // cancel, k = 0 carries -α²/6 = -(1/8π)∬q² dS
        for &a in &[0.1, 0.2] {
            let s = cluster_statistics(&sphere_galerkin(&cos_theta(a), 40).unwrap(), ShiftReference::Round).unwrap();
            assert!((s[0].sum + a * a / 6.0).abs() < a.powi(4));
            for st in &s[1..] {
                assert!(st.sum.abs() < 0.01 * a * a, "{st:?}");
            }
        }
    }

    #[test]
    fn truncation_stability() {
        let q = ScalarField::Harmonic(HarmonicExpansion::new(alloc::vec![(1, 0, 0.4), (2, 0, -0.3), (4, 0, 0.2)]).unwrap());
        let a = sphere_galerkin(&q, 40).unwrap();
        let b = sphere_galerkin(&q, 50).unwrap();
        for k in 0..=a.k_max_reliable {
            for (x, y) in a.cluster(k).unwrap().iter().zip(b.cluster(k).unwrap()) {
                assert!((x - y).abs() < 1e-8, "k = {k}: {x} {y}");
            }
        }
    }

    #[test]
    fn nonnegative_potential_raises_every_eigenvalue() {
        let q = ScalarField::Harmonic(HarmonicExpansion::new(alloc::vec![(0, 0, sqrt(4.0 * PI)), (1, 0, sqrt(4.0 * PI / 3.0))]).unwrap());
        let s = sphere_galerkin(&q, 30).unwrap();
        for k in 0..=s.k_max_reliable {
            assert!(s.cluster(k).unwrap().iter().all(|&l| l >= (k * (k + 1)) as f64 - 1e-12));
        }
    }

    #[test]
    fn full_matrix_agrees_with_zonal_blocks() {
        let q = ScalarField::Harmonic(HarmonicExpansion::new(alloc::vec![(1, 0, 0.5), (2, 0, 0.2)]).unwrap());
        let mut blocks: Vec<f64> = (0..=12).flat_map(|m| {
            let b = sphere_zonal_block(&q, 12, m).unwrap();
            if m == 0 { b } else { b.iter().chain(b.iter()).copied().collect() }
        })
        .collect();
        blocks.sort_by(f64::total_cmp);
        let full = sphere_full_eigenvalues(&q, 12).unwrap();
        for (a, b) in blocks.iter().zip(&full) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn rotation_invariance_of_the_spectrum() {
        // a generic rotation of cos θ has the same spectrum as cos θ
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let c = 0.7 * sqrt(4.0 * PI / 3.0) / n;
        // real Y_1 components: m = 1 ~ x, m = -1 ~ y, m = 0 ~ z
        let q = ScalarField::Harmonic(HarmonicExpansion::new(alloc::vec![(1, 1, c * v[0]), (1, -1, c * v[1]), (1, 0, c * v[2])]).unwrap());
        let a = sphere_galerkin(&q, 14).unwrap().flat();
        let b = sphere_galerkin(&cos_theta(0.7), 14).unwrap().flat();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10, "{x} {y}");
        }
    }

    #[test]
    fn rejects_small_bases() {
        assert!(sphere_galerkin(&ScalarField::zero(), 5).is_err());
    }
}

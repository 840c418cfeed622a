//! Small dense linear algebra: symmetric eigenvalues (dense, banded and
//! tridiagonal), Cholesky-based generalized eigenvalues and least squares.
//!
//! Matrices are row-major `n × n` slices. Only eigenvalues are produced;
//! nothing downstream needs eigenvectors.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::math::{abs, hypot, sqrt};

const QL_MAX_SWEEPS: usize = 60;

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off[i]` couples `i` and `i + 1`), sorted ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 != n {
        return Err(invalid("off-diagonal length must be n - 1"));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    implicit_ql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Implicit QL with Wilkinson shifts; `e[i]` couples `i` and `i + 1`,
/// `e[n - 1]` is ignored. Eigenvalues are left in `d` (unsorted).
fn implicit_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n < 2 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = abs(d[m]) + abs(d[m + 1]);
                if abs(e[m]) <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > QL_MAX_SWEEPS {
                return Err(Error::Discretization("QL iteration did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Householder reduction of a dense symmetric matrix to tridiagonal form.
/// Reads the lower triangle; returns `(diag, off)`.
pub fn tridiagonalize(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut a = a.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| abs(a[i * n + k])).sum();
            if scale == 0.0 {
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let f = a[i * n + l];
                let g = if f >= 0.0 { -sqrt(h) } else { sqrt(h) };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                let mut f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in (j + 1)..=l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    f += e[j] * a[i * n + j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    for i in 0..n {
        d[i] = a[i * n + i];
    }
    // e[i] couples i - 1 and i; shift to the i, i + 1 convention.
    let off = if n > 1 { e[1..].to_vec() } else { Vec::new() };
    (d, off)
}

/// Sorted eigenvalues of a dense symmetric matrix.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(invalid("matrix storage does not match dimension"));
    }
    let (d, off) = tridiagonalize(a, n);
    tridiagonal_eigenvalues(&d, &off)
}

/// Sorted eigenvalues of a symmetric matrix with `bandwidth` nonzero
/// superdiagonals, stored densely. The band is reduced to tridiagonal form by
/// Givens rotations with bulge chasing, touching only the band window, which
/// costs `O(n² · bandwidth)`.
pub fn band_eigenvalues(a: &[f64], n: usize, bandwidth: usize) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(invalid("matrix storage does not match dimension"));
    }
    if bandwidth <= 1 || n < 3 {
        let diag: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
        let off: Vec<f64> = (0..n.saturating_sub(1)).map(|i| a[(i + 1) * n + i]).collect();
        return tridiagonal_eigenvalues(&diag, &off);
    }
    let b = bandwidth;
    let mut m = a.to_vec();
    for j in 0..n - 2 {
        let last = core::cmp::min(j + b, n - 1);
        for r in (j + 2..=last).rev() {
            annihilate(&mut m, n, b, r - 1, j);
            let mut p = r - 1;
            loop {
                let row = p + 1 + b;
                if row >= n {
                    break;
                }
                annihilate(&mut m, n, b, row - 1, p);
                p = row - 1;
            }
        }
    }
    let diag: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    let off: Vec<f64> = (0..n - 1).map(|i| m[(i + 1) * n + i]).collect();
    tridiagonal_eigenvalues(&diag, &off)
}

/// Zero `m[p + 1][col]` against `m[p][col]` with a rotation in the plane
/// `(p, p + 1)`, applied as a similarity on the band window.
fn annihilate(m: &mut [f64], n: usize, b: usize, p: usize, col: usize) {
    let q = p + 1;
    let (x, y) = (m[p * n + col], m[q * n + col]);
    if y == 0.0 {
        return;
    }
    let r = hypot(x, y);
    let (c, s) = (x / r, y / r);
    let lo = p.saturating_sub(b + 1);
    let hi = core::cmp::min(n, q + b + 2);
    for k in lo..hi {
        let (u, v) = (m[p * n + k], m[q * n + k]);
        m[p * n + k] = c * u + s * v;
        m[q * n + k] = -s * u + c * v;
    }
    for k in lo..hi {
        let (u, v) = (m[k * n + p], m[k * n + q]);
        m[k * n + p] = c * u + s * v;
        m[k * n + q] = -s * u + c * v;
    }
    m[q * n + col] = 0.0;
    m[col * n + q] = 0.0;
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky(a: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::Discretization("mass matrix is not positive definite".into()));
                }
                l[i * n + i] = sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// Sorted eigenvalues of the pencil `S x = λ M x` with `S` symmetric and `M`
/// symmetric positive definite.
pub fn generalized_eigenvalues(s: &[f64], mass: &[f64], n: usize) -> Result<Vec<f64>> {
    let l = cholesky(mass, n)?;
    // X = L⁻¹ S, column by column.
    let mut x = s.to_vec();
    for col in 0..n {
        for i in 0..n {
            let mut v = x[i * n + col];
            for k in 0..i {
                v -= l[i * n + k] * x[k * n + col];
            }
            x[i * n + col] = v / l[i * n + i];
        }
    }
    // C = X L⁻ᵀ, i.e. Cᵀ = L⁻¹ Xᵀ; rows of X are solved in place.
    let mut c = vec![0.0; n * n];
    for row in 0..n {
        for i in 0..n {
            let mut v = x[row * n + i];
            for k in 0..i {
                v -= l[i * n + k] * c[row * n + k];
            }
            c[row * n + i] = v / l[i * n + i];
        }
    }
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (c[i * n + j] + c[j * n + i]);
            c[i * n + j] = avg;
            c[j * n + i] = avg;
        }
    }
    symmetric_eigenvalues(&c, n)
}

/// Solution of `min ‖X β − y‖₂` for a `rows × cols` row-major design.
///
/// Columns are equilibrated before a Householder QR; the fit is rejected as
/// rank deficient when a diagonal entry of `R` falls below `1e-12` of the
/// largest. Returns `(β, ‖X β − y‖₂)`.
pub fn least_squares(design: &[f64], rows: usize, cols: usize, y: &[f64]) -> Option<(Vec<f64>, f64)> {
    if rows < cols || design.len() != rows * cols || y.len() != rows {
        return None;
    }
    let mut a = design.to_vec();
    let mut scale = vec![0.0; cols];
    for (j, s) in scale.iter_mut().enumerate() {
        *s = sqrt((0..rows).map(|i| a[i * cols + j] * a[i * cols + j]).sum::<f64>());
        if *s == 0.0 {
            return None;
        }
        for i in 0..rows {
            a[i * cols + j] /= *s;
        }
    }
    let mut b = y.to_vec();
    let mut rdiag = vec![0.0; cols];
    for k in 0..cols {
        let norm = sqrt((k..rows).map(|i| a[i * cols + k] * a[i * cols + k]).sum::<f64>());
        if norm == 0.0 {
            return None;
        }
        let alpha = if a[k * cols + k] > 0.0 { -norm } else { norm };
        // v = x - alpha e_k stored in column k below the diagonal
        a[k * cols + k] -= alpha;
        let vnorm2: f64 = (k..rows).map(|i| a[i * cols + k] * a[i * cols + k]).sum();
        if vnorm2 > 0.0 {
            for j in (k + 1)..cols {
                let dotp: f64 = (k..rows).map(|i| a[i * cols + k] * a[i * cols + j]).sum();
                let f = 2.0 * dotp / vnorm2;
                for i in k..rows {
                    a[i * cols + j] -= f * a[i * cols + k];
                }
            }
            let dotp: f64 = (k..rows).map(|i| a[i * cols + k] * b[i]).sum();
            let f = 2.0 * dotp / vnorm2;
            for i in k..rows {
                b[i] -= f * a[i * cols + k];
            }
        }
        rdiag[k] = alpha;
    }
    let rmax = rdiag.iter().fold(0.0f64, |m, &r| if abs(r) > m { abs(r) } else { m });
    if rdiag.iter().any(|&r| abs(r) <= 1e-12 * rmax) {
        return None;
    }
    let mut beta = vec![0.0; cols];
    for k in (0..cols).rev() {
        let mut v = b[k];
        for j in (k + 1)..cols {
            v -= a[k * cols + j] * beta[j];
        }
        beta[k] = v / rdiag[k];
    }
    let residual = sqrt(b[cols..].iter().map(|r| r * r).sum::<f64>());
    for (bj, s) in beta.iter_mut().zip(&scale) {
        *bj /= s;
    }
    Some((beta, residual))
}

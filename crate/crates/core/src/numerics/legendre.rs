//! Legendre polynomials, normalized associated Legendre functions and real
//! orthonormal spherical harmonics.
//!
//! Conventions: `Θ_l^m(x)` is normalized so that `∫_{-1}^{1} Θ_l^m(x)² dx = 1`
//! and carries no Condon–Shortley phase. The real harmonic is
//! `Y_lm(θ, φ) = Θ_l^|m|(cos θ) Φ_m(φ)` with `Φ_0 = 1/√(2π)`,
//! `Φ_m = cos(mφ)/√π` for `m > 0` and `Φ_m = sin(|m|φ)/√π` for `m < 0`.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::jet::Scalar;
use crate::math::{abs, cos, sin, sqrt, PI};

/// `P_l(x)` by the three-term recurrence.
pub fn legendre_p(l: usize, x: f64) -> Result<f64> {
    if !(abs(x) <= 1.0) {
        return Err(invalid("Legendre argument must satisfy |x| ≤ 1"));
    }
    let (mut p0, mut p1) = (1.0, x);
    if l == 0 {
        return Ok(1.0);
    }
    for k in 2..=l {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    Ok(p1)
}

/// `P_l(0)`: zero for odd `l`, `(-1)^{l/2} (l-1)!!/l!!` for even `l`.
pub fn legendre_p_at_zero(l: usize) -> f64 {
    if l % 2 == 1 {
        return 0.0;
    }
    let mut v = 1.0;
    let mut k = 2;
    while k <= l {
        v *= -((k - 1) as f64) / k as f64;
        k += 2;
    }
    v
}

fn recurrence_a(l: usize, m: usize) -> f64 {
    let (l, m) = (l as f64, m as f64);
    sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
}

/// `Θ_m^m / (1 - x²)^{m/2}`.
fn sectoral_constant(m: usize) -> f64 {
    let mut c = 1.0 / core::f64::consts::SQRT_2;
    for k in 1..=m {
        let kf = k as f64;
        c *= sqrt((2.0 * kf + 1.0) / (2.0 * kf));
    }
    c
}

/// `Θ_l^m(x)` for `l = m..=l_max`.
pub fn normalized_associated(l_max: usize, m: usize, x: f64) -> Vec<f64> {
    if l_max < m {
        return Vec::new();
    }
    let s = sqrt((1.0 - x * x).max(0.0));
    let mut out = Vec::with_capacity(l_max - m + 1);
    let mut pmm = sectoral_constant(m);
    for _ in 0..m {
        pmm *= s;
    }
    out.push(pmm);
    if l_max == m {
        return out;
    }
    out.push(x * sqrt(2.0 * m as f64 + 3.0) * pmm);
    for l in (m + 2)..=l_max {
        let a = recurrence_a(l, m);
        let a_prev = recurrence_a(l - 1, m);
        let n = out.len();
        let v = a * (x * out[n - 1] - out[n - 2] / a_prev);
        out.push(v);
    }
    out
}

/// `Θ_l^m(x)` together with `(1 - x²) dΘ_l^m/dx`, for `l = m..=l_max`.
pub fn normalized_associated_with_derivative(l_max: usize, m: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let vals = normalized_associated(l_max, m, x);
    let mf = m as f64;
    let ders = vals
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let l = (m + i) as f64;
            let lower = if i == 0 { 0.0 } else { vals[i - 1] };
            let c = if i == 0 { 0.0 } else { sqrt((2.0 * l + 1.0) * (l * l - mf * mf) / (2.0 * l - 1.0)) };
            -l * x * v + c * lower
        })
        .collect();
    (vals, ders)
}

fn azimuthal_norm(m: i64) -> f64 {
    if m == 0 {
        1.0 / sqrt(2.0 * PI)
    } else {
        1.0 / sqrt(PI)
    }
}

/// Real orthonormal spherical harmonic `Y_lm(θ, φ)`.
pub fn spherical_harmonic(l: usize, m: i64, theta: f64, phi: f64) -> Result<f64> {
    if m.unsigned_abs() as usize > l {
        return Err(invalid("spherical harmonic order must satisfy |m| ≤ l"));
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(invalid("polar angle must lie in [0, π]"));
    }
    let am = m.unsigned_abs() as usize;
    let theta_part = normalized_associated(l, am, cos(theta))[l - am];
    let phi_part = match m {
        0 => 1.0,
        m if m > 0 => cos(m as f64 * phi),
        m => sin(-(m as f64) * phi),
    };
    Ok(theta_part * phi_part * azimuthal_norm(m))
}

/// `Y_lm` evaluated at a point `p` of the unit sphere given in Cartesian
/// coordinates, written as a polynomial in `(x, y, z)` so it can be evaluated
/// on jets. `|m| ≤ l` is the caller's responsibility.
pub fn real_harmonic_cartesian<S: Scalar>(l: usize, m: i64, p: [S; 3]) -> S {
    let am = m.unsigned_abs() as usize;
    let z = p[2];
    // Θ_l^m(z) / (1 - z²)^{m/2} by the same recurrence as Θ.
    let mut prev = S::from_f64(sectoral_constant(am));
    if l > am {
        let mut prev2 = prev;
        prev = z * prev * sqrt(2.0 * am as f64 + 3.0);
        for ll in (am + 2)..=l {
            let a = recurrence_a(ll, am);
            let a_prev = recurrence_a(ll - 1, am);
            let next = (z * prev - prev2 * (1.0 / a_prev)) * a;
            prev2 = prev;
            prev = next;
        }
    }
    // (x + i y)^m
    let (mut re, mut im) = (S::from_f64(1.0), S::from_f64(0.0));
    for _ in 0..am {
        let nr = re * p[0] - im * p[1];
        let ni = re * p[1] + im * p[0];
        re = nr;
        im = ni;
    }
    let ang = if m >= 0 { re } else { im };
    prev * ang * azimuthal_norm(m)
}

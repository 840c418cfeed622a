//! Adaptive Dormand–Prince 5(4) integration of autonomous systems.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::math::{abs, powf};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Step-size controller state carried between [`Stepper::advance`] calls.
///
/// Each accepted step of size `h` keeps the embedded error estimate below
/// `tol · |h| · (1 + |y_i|)` in every component, i.e. the local error per
/// unit length stays below `tol`.
#[derive(Debug, Clone)]
pub struct Stepper {
    tol: f64,
    reference_length: f64,
    h: f64,
    pub accepted: usize,
    pub rejected: usize,
}

impl Stepper {
    /// `reference_length` sets the initial step and the underflow threshold
    /// (`1e-12` of it).
    pub fn new(tol: f64, reference_length: f64) -> Result<Self> {
        if !(1e-14..=1e-4).contains(&tol) {
            return Err(invalid("ODE tolerance must lie in [1e-14, 1e-4]"));
        }
        let reference_length = abs(reference_length);
        if !(reference_length > 0.0) {
            return Err(invalid("ODE reference length must be positive"));
        }
        Ok(Stepper { tol, reference_length, h: 0.01 * reference_length, accepted: 0, rejected: 0 })
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Integrate `y' = field(y)` from `t0` to `t1` (either direction), landing
    /// exactly on `t1`.
    pub fn advance<const N: usize, F>(&mut self, field: &F, y: &mut [f64; N], t0: f64, t1: f64) -> Result<()>
    where
        F: Fn(&[f64; N]) -> [f64; N],
    {
        let span = t1 - t0;
        if span == 0.0 {
            return Ok(());
        }
        let dir = if span > 0.0 { 1.0 } else { -1.0 };
        let min_step = 1e-12 * self.reference_length;
        let mut t = t0;
        let mut k1 = field(y);
        loop {
            let remaining = (t1 - t) * dir;
            if remaining <= 1e-15 * self.reference_length {
                return Ok(());
            }
            let mut h = if self.h > remaining { remaining } else { self.h };
            let last = h == remaining;
            if h < min_step && !last {
                return Err(Error::StepUnderflow { t, state: y.to_vec() });
            }
            h *= dir;
            let (y_new, k7, err) = dp_step(field, y, &k1, h, self.tol);
            if !err.is_finite() || err > 1.0 {
                self.rejected += 1;
                let factor = if err.is_finite() { clamp(0.9 * powf(err, -0.25), 0.1, 0.9) } else { 0.1 };
                self.h = abs(h) * factor;
                if self.h < min_step {
                    return Err(Error::StepUnderflow { t, state: y.to_vec() });
                }
                continue;
            }
            self.accepted += 1;
            t = if last { t1 } else { t + h };
            *y = y_new;
            k1 = k7;
            let grow = if err == 0.0 { 5.0 } else { clamp(0.9 * powf(err, -0.25), 0.2, 5.0) };
            // a step truncated to hit t1 says little about the natural size
            if !last || abs(h) * grow > self.h {
                self.h = abs(h) * grow;
            }
        }
    }
}

fn clamp(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo {
        lo
    } else if x > hi {
        hi
    } else {
        x
    }
}

#[inline]
fn dp_step<const N: usize, F>(field: &F, y: &[f64; N], k1: &[f64; N], h: f64, tol: f64) -> ([f64; N], [f64; N], f64)
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    let mut tmp = [0.0; N];
    for i in 0..N {
        tmp[i] = y[i] + h * A21 * k1[i];
    }
    let k2 = field(&tmp);
    for i in 0..N {
        tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
    }
    let k3 = field(&tmp);
    for i in 0..N {
        tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
    }
    let k4 = field(&tmp);
    for i in 0..N {
        tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
    }
    let k5 = field(&tmp);
    for i in 0..N {
        tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
    }
    let k6 = field(&tmp);
    let mut y_new = [0.0; N];
    for i in 0..N {
        y_new[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
    }
    let k7 = field(&y_new);
    let mut err: f64 = 0.0;
    for i in 0..N {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = tol * abs(h) * (1.0 + fmax(abs(y[i]), abs(y_new[i])));
        let r = abs(e) / sc;
        if !(r <= err) {
            err = r;
        }
    }
    (y_new, k7, err)
}

#[inline]
fn fmax(a: f64, b: f64) -> f64 {
    if b > a {
        b
    } else {
        a
    }
}

/// Final state and optional uniformly sampled path of an integration.
#[derive(Debug, Clone)]
pub struct OdeSolution<const N: usize> {
    pub final_state: [f64; N],
    /// `(t, y(t))` at `samples + 1` equispaced times including both ends;
    /// empty when no samples were requested.
    pub path: Vec<(f64, [f64; N])>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Integrate the time-independent field from `y0` over `length` (negative
/// lengths integrate backwards). With `samples > 0` the state is recorded at
/// `samples` equal subintervals.
pub fn ode_integrate<const N: usize, F>(field: F, y0: [f64; N], length: f64, tol: f64, samples: usize) -> Result<OdeSolution<N>>
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    if length == 0.0 {
        return Err(invalid("integration length must be nonzero"));
    }
    let mut stepper = Stepper::new(tol, length)?;
    let mut y = y0;
    let mut path = Vec::new();
    if samples == 0 {
        stepper.advance(&field, &mut y, 0.0, length)?;
    } else {
        path.reserve(samples + 1);
        path.push((0.0, y));
        let mut t = 0.0;
        for j in 1..=samples {
            let t_next = length * j as f64 / samples as f64;
            stepper.advance(&field, &mut y, t, t_next)?;
            t = t_next;
            path.push((t, y));
        }
    }
    Ok(OdeSolution { final_state: y, path, accepted_steps: stepper.accepted, rejected_steps: stepper.rejected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::TAU;
    use proptest::prelude::*;

    fn oscillator(y: &[f64; 2]) -> [f64; 2] {
        [y[1], -y[0]]
    }

    #[test]
    fn harmonic_oscillator_closes() {
        let sol = ode_integrate(oscillator, [1.0, 0.0], TAU, 1e-12, 0).unwrap();
        assert!((sol.final_state[0] - 1.0).abs() < 1e-9);
        assert!(sol.final_state[1].abs() < 1e-9);
    }

    #[test]
    fn exponential_decay() {
        let tol = 1e-10;
        let sol = ode_integrate(|y: &[f64; 1]| [-y[0]], [1.0], 1.0, tol, 10).unwrap();
        assert!((sol.final_state[0] - (-1.0f64).exp()).abs() < tol);
        assert_eq!(sol.path.len(), 11);
        assert!((sol.path[5].0 - 0.5).abs() < 1e-15);
        assert!((sol.path[5].1[0] - (-0.5f64).exp()).abs() < tol);
    }

    #[test]
    fn great_circle_closes() {
        // round sphere in (θ, φ, p_θ, p_φ): H = (p_θ² + p_φ²/sin²θ)/2
        let field = |y: &[f64; 4]| {
            let (s, c) = (y[0].sin(), y[0].cos());
            [y[2], y[3] / (s * s), y[3] * y[3] * c / (s * s * s), 0.0]
        };
        let start = [1.1, 0.3, 0.6, 0.8 * 1.1f64.sin()];
        let sol = ode_integrate(field, start, TAU, 1e-12, 0).unwrap();
        // φ winds once around
        let wound = [0.0, TAU, 0.0, 0.0];
        for i in 0..4 {
            assert!((sol.final_state[i] - start[i] - wound[i]).abs() < 1e-8, "{i}");
        }
    }

    #[test]
    fn singular_field_reports_underflow() {
        // y' = y², blows up at t = 1
        let err = ode_integrate(|y: &[f64; 1]| [y[0] * y[0]], [1.0], 2.0, 1e-10, 0).unwrap_err();
        assert!(matches!(err, Error::StepUnderflow { .. }), "{err:?}");
    }

    #[test]
    fn tolerance_range_enforced() {
        assert!(ode_integrate(oscillator, [1.0, 0.0], 1.0, 1e-3, 0).is_err());
        assert!(ode_integrate(oscillator, [1.0, 0.0], 1.0, 1e-15, 0).is_err());
    }

    proptest! {
        #[test]
        fn forward_backward_returns(q in -2.0f64..2.0, p in -2.0f64..2.0, len in 0.5f64..10.0) {
            // pendulum H = p²/2 - cos q
            let tol = 1e-10;
            let field = |y: &[f64; 2]| [y[1], -y[0].sin()];
            let fwd = ode_integrate(field, [q, p], len, tol, 0).unwrap();
            let back = ode_integrate(field, fwd.final_state, -len, tol, 0).unwrap();
            prop_assert!((back.final_state[0] - q).abs() < 10.0 * tol * (1.0 + len));
            prop_assert!((back.final_state[1] - p).abs() < 10.0 * tol * (1.0 + len));
        }
    }
}

//! Second-order forward-mode differentiation in two variables.
//!
//! A [`Jet`] carries a value together with its gradient and Hessian with
//! respect to the chart coordinates `(u₁, u₂)`. Metric coefficients of the
//! builtin surfaces are written once as jet expressions, which yields the
//! exact first and second partials the curvature formula consumes.

use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d: [f64; 2],
    /// Hessian entries `[∂₁₁, ∂₁₂, ∂₂₂]`.
    pub h: [f64; 3],
}

impl Jet {
    pub const fn constant(v: f64) -> Self {
        Jet { v, d: [0.0; 2], h: [0.0; 3] }
    }

    /// The coordinate function `u_i` evaluated at `value`.
    pub const fn variable(value: f64, i: usize) -> Self {
        let mut d = [0.0; 2];
        d[i] = 1.0;
        Jet { v: value, d, h: [0.0; 3] }
    }

    /// Chain rule for a scalar function `g` given `g(v)`, `g'(v)`, `g''(v)`.
    #[inline]
    pub fn lift(self, g0: f64, g1: f64, g2: f64) -> Self {
        let d = self.d;
        Jet {
            v: g0,
            d: [g1 * d[0], g1 * d[1]],
            h: [
                g1 * self.h[0] + g2 * d[0] * d[0],
                g1 * self.h[1] + g2 * d[0] * d[1],
                g1 * self.h[2] + g2 * d[1] * d[1],
            ],
        }
    }

    pub fn sin(self) -> Self {
        let (s, c) = (math::sin(self.v), math::cos(self.v));
        self.lift(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = (math::sin(self.v), math::cos(self.v));
        self.lift(c, -s, -c)
    }

    pub fn sqrt(self) -> Self {
        let r = math::sqrt(self.v);
        self.lift(r, 0.5 / r, -0.25 / (r * self.v))
    }

    pub fn exp(self) -> Self {
        let e = math::exp(self.v);
        self.lift(e, e, e)
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.lift(r, -r * r, 2.0 * r * r * r)
    }

    pub fn square(self) -> Self {
        self * self
    }

    /// `∂²/∂u_i∂u_j`.
    #[inline]
    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.h[i + j]
    }
}

impl Add for Jet {
    type Output = Jet;
    #[inline]
    fn add(self, o: Jet) -> Jet {
        Jet {
            v: self.v + o.v,
            d: [self.d[0] + o.d[0], self.d[1] + o.d[1]],
            h: [self.h[0] + o.h[0], self.h[1] + o.h[1], self.h[2] + o.h[2]],
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    #[inline]
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    #[inline]
    fn neg(self) -> Jet {
        Jet {
            v: -self.v,
            d: [-self.d[0], -self.d[1]],
            h: [-self.h[0], -self.h[1], -self.h[2]],
        }
    }
}

impl Mul for Jet {
    type Output = Jet;
    #[inline]
    fn mul(self, o: Jet) -> Jet {
        let (a, b) = (self, o);
        Jet {
            v: a.v * b.v,
            d: [a.d[0] * b.v + a.v * b.d[0], a.d[1] * b.v + a.v * b.d[1]],
            h: [
                a.h[0] * b.v + 2.0 * a.d[0] * b.d[0] + a.v * b.h[0],
                a.h[1] * b.v + a.d[0] * b.d[1] + a.d[1] * b.d[0] + a.v * b.h[1],
                a.h[2] * b.v + 2.0 * a.d[1] * b.d[1] + a.v * b.h[2],
            ],
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[inline]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    #[inline]
    fn add(mut self, c: f64) -> Jet {
        self.v += c;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    #[inline]
    fn mul(self, c: f64) -> Jet {
        Jet {
            v: self.v * c,
            d: [self.d[0] * c, self.d[1] * c],
            h: [self.h[0] * c, self.h[1] * c, self.h[2] * c],
        }
    }
}

/// Arithmetic shared by `f64` and [`Jet`], so field formulas can be written
/// once and evaluated either plainly or with derivatives.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn value(self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn value(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        math::sqrt(self)
    }
    fn sin(self) -> Self {
        math::sin(self)
    }
    fn cos(self) -> Self {
        math::cos(self)
    }
    fn exp(self) -> Self {
        math::exp(self)
    }
}

impl Scalar for Jet {
    fn from_f64(x: f64) -> Self {
        Jet::constant(x)
    }
    fn value(self) -> f64 {
        self.v
    }
    fn sqrt(self) -> Self {
        Jet::sqrt(self)
    }
    fn sin(self) -> Self {
        Jet::sin(self)
    }
    fn cos(self) -> Self {
        Jet::cos(self)
    }
    fn exp(self) -> Self {
        Jet::exp(self)
    }
}

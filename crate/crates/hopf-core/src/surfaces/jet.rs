//! Second-order forward-mode dual numbers.
//!
//! A `Jet` carries a value together with its gradient and Hessian with
//! respect to up to [`MAX_VARS`] seed variables. Propagating a chart map
//! through `Jet` arithmetic yields exact first and second derivatives,
//! which is the `Dual` differentiation backend.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const MAX_VARS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub g: [f64; MAX_VARS],
    pub h: [[f64; MAX_VARS]; MAX_VARS],
}

impl Jet {
    pub fn constant(v: f64) -> Jet {
        Jet {
            v,
            g: [0.0; MAX_VARS],
            h: [[0.0; MAX_VARS]; MAX_VARS],
        }
    }

    /// Seed variable number `i`.
    pub fn variable(v: f64, i: usize) -> Jet {
        let mut j = Jet::constant(v);
        j.g[i] = 1.0;
        j
    }

    /// Chain rule for a scalar function with derivatives f', f'' at self.v.
    fn chain(self, f: f64, df: f64, ddf: f64) -> Jet {
        let mut out = Jet::constant(f);
        for i in 0..MAX_VARS {
            out.g[i] = df * self.g[i];
        }
        for i in 0..MAX_VARS {
            for j in 0..MAX_VARS {
                out.h[i][j] = ddf * self.g[i] * self.g[j] + df * self.h[i][j];
            }
        }
        out
    }

    pub fn sin(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn sqrt(self) -> Jet {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * s * s))
    }

    pub fn exp(self) -> Jet {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Jet {
        self.chain(self.v.ln(), 1.0 / self.v, -1.0 / (self.v * self.v))
    }

    pub fn powi(self, n: i32) -> Jet {
        let f = self.v.powi(n);
        let df = n as f64 * self.v.powi(n - 1);
        let ddf = (n * (n - 1)) as f64 * self.v.powi(n - 2);
        self.chain(f, df, ddf)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut out = Jet::constant(self.v + rhs.v);
        for i in 0..MAX_VARS {
            out.g[i] = self.g[i] + rhs.g[i];
            for j in 0..MAX_VARS {
                out.h[i][j] = self.h[i][j] + rhs.h[i][j];
            }
        }
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        let mut out = Jet::constant(-self.v);
        for i in 0..MAX_VARS {
            out.g[i] = -self.g[i];
            for j in 0..MAX_VARS {
                out.h[i][j] = -self.h[i][j];
            }
        }
        out
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut out = Jet::constant(self.v * rhs.v);
        for i in 0..MAX_VARS {
            out.g[i] = self.g[i] * rhs.v + self.v * rhs.g[i];
        }
        for i in 0..MAX_VARS {
            for j in 0..MAX_VARS {
                out.h[i][j] = self.h[i][j] * rhs.v
                    + self.g[i] * rhs.g[j]
                    + self.g[j] * rhs.g[i]
                    + self.v * rhs.h[i][j];
            }
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        // self * rhs^{-1}; reciprocal via chain rule.
        let inv = rhs.chain(1.0 / rhs.v, -1.0 / (rhs.v * rhs.v), 2.0 / (rhs.v * rhs.v * rhs.v));
        self * inv
    }
}

/// Scalar abstraction letting one chart formula serve the plain f64 path
/// and the dual-number backend.
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn value(self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn powi(self, n: i32) -> Self;
}

impl Real for f64 {
    fn from_f64(x: f64) -> f64 {
        x
    }
    fn value(self) -> f64 {
        self
    }
    fn sin(self) -> f64 {
        f64::sin(self)
    }
    fn cos(self) -> f64 {
        f64::cos(self)
    }
    fn sqrt(self) -> f64 {
        f64::sqrt(self)
    }
    fn exp(self) -> f64 {
        f64::exp(self)
    }
    fn ln(self) -> f64 {
        f64::ln(self)
    }
    fn powi(self, n: i32) -> f64 {
        f64::powi(self, n)
    }
}

impl Real for Jet {
    fn from_f64(x: f64) -> Jet {
        Jet::constant(x)
    }
    fn value(self) -> f64 {
        self.v
    }
    fn sin(self) -> Jet {
        Jet::sin(self)
    }
    fn cos(self) -> Jet {
        Jet::cos(self)
    }
    fn sqrt(self) -> Jet {
        Jet::sqrt(self)
    }
    fn exp(self) -> Jet {
        Jet::exp(self)
    }
    fn ln(self) -> Jet {
        Jet::ln(self)
    }
    fn powi(self, n: i32) -> Jet {
        Jet::powi(self, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn f<T: Real>(x: T, y: T) -> T {
        // sin(x) * cos(y) + sqrt(x*x + y*y) / exp(y)
        x.sin() * y.cos() + (x * x + y * y).sqrt() / y.exp()
    }

    #[test]
    fn jet_matches_finite_differences() {
        let (x0, y0) = (0.7, 1.3);
        let jx = Jet::variable(x0, 0);
        let jy = Jet::variable(y0, 1);
        let r = f(jx, jy);
        assert_relative_eq!(r.v, f(x0, y0), epsilon = 1e-14);
        let h = 1e-5;
        let dx = (f(x0 + h, y0) - f(x0 - h, y0)) / (2.0 * h);
        let dy = (f(x0, y0 + h) - f(x0, y0 - h)) / (2.0 * h);
        assert_relative_eq!(r.g[0], dx, epsilon = 1e-8);
        assert_relative_eq!(r.g[1], dy, epsilon = 1e-8);
        let h2 = 1e-4;
        let dxx = (f(x0 + h2, y0) - 2.0 * f(x0, y0) + f(x0 - h2, y0)) / (h2 * h2);
        let dxy = (f(x0 + h2, y0 + h2) - f(x0 + h2, y0 - h2) - f(x0 - h2, y0 + h2)
            + f(x0 - h2, y0 - h2))
            / (4.0 * h2 * h2);
        assert_relative_eq!(r.h[0][0], dxx, epsilon = 1e-6);
        assert_relative_eq!(r.h[0][1], dxy, epsilon = 1e-6);
        assert_relative_eq!(r.h[0][1], r.h[1][0], epsilon = 1e-14);
    }

    #[test]
    fn division_and_powers() {
        let x = Jet::variable(2.0, 0);
        let r = (x * x * x) / x; // = x^2
        assert_relative_eq!(r.v, 4.0, epsilon = 1e-14);
        assert_relative_eq!(r.g[0], 4.0, epsilon = 1e-12);
        assert_relative_eq!(r.h[0][0], 2.0, epsilon = 1e-12);
        let p = x.powi(4);
        assert_relative_eq!(p.g[0], 32.0, epsilon = 1e-12);
        assert_relative_eq!(p.h[0][0], 48.0, epsilon = 1e-12);
        let l = x.ln().exp();
        assert_relative_eq!(l.v, 2.0, epsilon = 1e-14);
        assert_relative_eq!(l.g[0], 1.0, epsilon = 1e-12);
    }
}

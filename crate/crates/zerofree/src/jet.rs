//! Second-order truncated Taylor arithmetic over the complex numbers.
//!
//! A [`Jet`] holds `f(x0) + f'(x0) h + f''(x0)/2 h^2`; arithmetic propagates the
//! coefficients exactly, so any routine written against [`Field`] yields first and
//! second parameter derivatives alongside the value.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Field:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn cst(z: Complex64) -> Self;
    fn val(&self) -> Complex64;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn conj(self) -> Self;
    /// Largest modulus over all carried components.
    fn max_norm(&self) -> f64;
    /// Whether derivative coefficients are carried at all.
    const CARRIES_DERIVATIVES: bool;
    /// Applies a scalar function given its value and first two derivatives at `self.val()`.
    fn apply(self, f0: Complex64, f1: Complex64, f2: Complex64) -> Self;

    fn re(x: f64) -> Self {
        Self::cst(Complex64::new(x, 0.0))
    }
    fn scale(self, k: Complex64) -> Self {
        self * Self::cst(k)
    }
    fn shift(self, k: Complex64) -> Self {
        self + Self::cst(k)
    }
    fn recip(self) -> Self {
        Self::cst(Complex64::new(1.0, 0.0)) / self
    }
}

impl Field for Complex64 {
    fn cst(z: Complex64) -> Self {
        z
    }
    fn val(&self) -> Complex64 {
        *self
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn ln(self) -> Self {
        Complex64::ln(self)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn max_norm(&self) -> f64 {
        self.norm()
    }
    const CARRIES_DERIVATIVES: bool = false;
    fn apply(self, f0: Complex64, _f1: Complex64, _f2: Complex64) -> Self {
        f0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub c0: Complex64,
    pub c1: Complex64,
    pub c2: Complex64,
}

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

impl Jet {
    pub fn new(c0: Complex64, c1: Complex64, c2: Complex64) -> Self {
        Jet { c0, c1, c2 }
    }

    /// The independent variable at `x`.
    pub fn var(x: f64) -> Self {
        Jet::new(Complex64::new(x, 0.0), Complex64::new(1.0, 0.0), ZERO)
    }

    pub fn d1(&self) -> Complex64 {
        self.c1
    }

    pub fn d2(&self) -> Complex64 {
        self.c2 * 2.0
    }

    /// Composition with a scalar function given its value and first two derivatives.
    pub fn compose(self, f0: Complex64, f1: Complex64, f2: Complex64) -> Self {
        Jet::new(
            f0,
            f1 * self.c1,
            f1 * self.c2 + f2 * 0.5 * self.c1 * self.c1,
        )
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet::new(self.c0 + o.c0, self.c1 + o.c1, self.c2 + o.c2)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet::new(self.c0 - o.c0, self.c1 - o.c1, self.c2 - o.c2)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.c0, -self.c1, -self.c2)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet::new(
            self.c0 * o.c0,
            self.c0 * o.c1 + self.c1 * o.c0,
            self.c0 * o.c2 + self.c1 * o.c1 + self.c2 * o.c0,
        )
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let q0 = self.c0 / o.c0;
        let q1 = (self.c1 - q0 * o.c1) / o.c0;
        let q2 = (self.c2 - q0 * o.c2 - q1 * o.c1) / o.c0;
        Jet::new(q0, q1, q2)
    }
}

impl Field for Jet {
    fn cst(z: Complex64) -> Self {
        Jet::new(z, ZERO, ZERO)
    }
    fn val(&self) -> Complex64 {
        self.c0
    }
    fn exp(self) -> Self {
        let e = self.c0.exp();
        Jet::new(e, e * self.c1, e * (self.c2 + 0.5 * self.c1 * self.c1))
    }
    fn ln(self) -> Self {
        let l1 = self.c1 / self.c0;
        Jet::new(self.c0.ln(), l1, self.c2 / self.c0 - 0.5 * l1 * l1)
    }
    fn conj(self) -> Self {
        Jet::new(self.c0.conj(), self.c1.conj(), self.c2.conj())
    }
    fn max_norm(&self) -> f64 {
        self.c0.norm().max(self.c1.norm()).max(self.c2.norm())
    }
    const CARRIES_DERIVATIVES: bool = true;
    fn apply(self, f0: Complex64, f1: Complex64, f2: Complex64) -> Self {
        self.compose(f0, f1, f2)
    }
    fn scale(self, k: Complex64) -> Self {
        Jet::new(self.c0 * k, self.c1 * k, self.c2 * k)
    }
    fn shift(self, k: Complex64) -> Self {
        Jet::new(self.c0 + k, self.c1, self.c2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn exp_ln_roundtrip_keeps_derivatives() {
        let x = Jet::var(1.3);
        let y = (x * x).exp().ln();
        assert!((y.c0 - c(1.69)).norm() < 1e-14);
        assert!((y.d1() - c(2.6)).norm() < 1e-14);
        assert!((y.d2() - c(2.0)).norm() < 1e-13);
    }

    #[test]
    fn quotient_matches_closed_form() {
        // f(x) = 1/(1+x), f' = -1/(1+x)^2, f'' = 2/(1+x)^3
        let x = Jet::var(0.5);
        let f = Jet::re(1.0) / (x.shift(c(1.0)));
        assert!((f.d1() + c(1.0 / 2.25)).norm() < 1e-15);
        assert!((f.d2() - c(2.0 / 3.375)).norm() < 1e-15);
    }
}

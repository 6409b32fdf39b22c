//! Scalar abstraction shared by plain floats, complex numbers and dual numbers.
//!
//! Field formulas are written once, generically over [`ComplexScalar`], and
//! evaluated either on plain `Complex64` values or on (nested) [`Dual`]
//! numbers to obtain exact first and second derivatives.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn recip(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    /// True when every stored component is finite.
    fn is_finite(&self) -> bool;

    #[inline]
    fn scale(self, k: f64) -> Self {
        self * Self::from_f64(k)
    }
}

/// Scalars that can hold complex constants.
pub trait ComplexScalar: Scalar {
    fn from_c64(z: Complex64) -> Self;

    #[inline]
    fn i() -> Self {
        Self::from_c64(Complex64::i())
    }
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn recip(self) -> Self {
        1.0 / self
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Scalar for Complex64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }

    /// Smith's algorithm: no intermediate `|z|^2`, so the reciprocal of a
    /// large-but-finite value underflows instead of overflowing.
    #[inline]
    fn recip(self) -> Self {
        let (a, b) = (self.re, self.im);
        if a.abs() >= b.abs() {
            let r = b / a;
            let den = a + b * r;
            Complex64::new(1.0 / den, -r / den)
        } else {
            let r = a / b;
            let den = a * r + b;
            Complex64::new(r / den, -1.0 / den)
        }
    }

    #[inline]
    fn powi(self, n: i32) -> Self {
        if n < 0 {
            return Scalar::recip(Scalar::powi(self, -n));
        }
        let mut acc = Complex64::new(1.0, 0.0);
        let mut base = self;
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }
    #[inline]
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        Complex64::ln(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    #[inline]
    fn sin(self) -> Self {
        Complex64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        Complex64::cos(self)
    }
    #[inline]
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl ComplexScalar for Complex64 {
    #[inline]
    fn from_c64(z: Complex64) -> Self {
        z
    }
}

/// First-order dual number `re + eps·ε` with `ε² = 0`.
///
/// Nesting (`Dual<Dual<T>>`) gives hyper-dual numbers: seeding the outer and
/// inner infinitesimals along two coordinates yields the mixed second
/// derivative in the `eps.eps` slot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Scalar> Dual<T> {
    #[inline]
    pub fn new(re: T, eps: T) -> Self {
        Dual { re, eps }
    }

    #[inline]
    pub fn constant(re: T) -> Self {
        Dual {
            re,
            eps: T::from_f64(0.0),
        }
    }

    /// The independent variable at `re` (unit tangent).
    #[inline]
    pub fn variable(re: T) -> Self {
        Dual {
            re,
            eps: T::from_f64(1.0),
        }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Dual::new(self.re + rhs.re, self.eps + rhs.eps)
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Dual::new(self.re - rhs.re, self.eps - rhs.eps)
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Dual::new(self.re * rhs.re, self.re * rhs.eps + self.eps * rhs.re)
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.eps)
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    #[inline]
    fn from_f64(x: f64) -> Self {
        Dual::constant(T::from_f64(x))
    }

    #[inline]
    fn recip(self) -> Self {
        let r = self.re.recip();
        Dual::new(r, -(self.eps * r * r))
    }

    #[inline]
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Dual::from_f64(1.0);
        }
        let p = self.re.powi(n - 1);
        Dual::new(p * self.re, self.eps * p.scale(n as f64))
    }

    #[inline]
    fn exp(self) -> Self {
        let e = self.re.exp();
        Dual::new(e, self.eps * e)
    }

    #[inline]
    fn ln(self) -> Self {
        Dual::new(self.re.ln(), self.eps * self.re.recip())
    }

    #[inline]
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        Dual::new(s, self.eps * s.scale(2.0).recip())
    }

    #[inline]
    fn sin(self) -> Self {
        Dual::new(self.re.sin(), self.eps * self.re.cos())
    }

    #[inline]
    fn cos(self) -> Self {
        Dual::new(self.re.cos(), -(self.eps * self.re.sin()))
    }

    #[inline]
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.eps.is_finite()
    }
}

impl<T: ComplexScalar> ComplexScalar for Dual<T> {
    #[inline]
    fn from_c64(z: Complex64) -> Self {
        Dual::constant(T::from_c64(z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smith_reciprocal_survives_huge_arguments() {
        let z = Complex64::new(3e200, -4e200);
        let r = Scalar::recip(z);
        assert!(r.is_finite());
        let back = r * z;
        assert!((back - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn complex_powi_matches_repeated_product() {
        let z = Complex64::new(0.3, -1.7);
        assert!((Scalar::powi(z, 5) - z * z * z * z * z).norm() < 1e-12);
        assert!((Scalar::powi(z, -2) * z * z - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(Scalar::powi(z, 0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn hyper_dual_gives_mixed_second_derivative() {
        // f(x, y) = x^2 y^3 at (2, 5)
        let x = Dual::new(Dual::new(2.0, 0.0), Dual::new(1.0, 0.0));
        let y = Dual::new(Dual::new(5.0, 1.0), Dual::new(0.0, 0.0));
        let f = x * x * y * y * y;
        assert_eq!(f.re.re, 500.0);
        assert_eq!(f.re.eps, 300.0); // f_y = 3 x^2 y^2
        assert_eq!(f.eps.re, 500.0); // f_x = 2 x y^3
        assert_eq!(f.eps.eps, 300.0); // f_xy = 6 x y^2
    }

    #[test]
    fn dual_elementary_functions() {
        let x = Dual::variable(0.7_f64);
        assert!((x.exp().eps - 0.7_f64.exp()).abs() < 1e-15);
        assert!((x.ln().eps - 1.0 / 0.7).abs() < 1e-15);
        assert!((x.sqrt().eps - 0.5 / 0.7_f64.sqrt()).abs() < 1e-15);
        assert!((x.sin().eps - 0.7_f64.cos()).abs() < 1e-15);
        assert!((x.cos().eps + 0.7_f64.sin()).abs() < 1e-15);
        assert!((x.powi(-3).eps + 3.0 * 0.7_f64.powi(-4)).abs() < 1e-12);
    }
}

//! Scalar abstraction shared by every routine that must remain differentiable
//! by complex-step perturbation.
//!
//! `f64` is the ordinary real scalar. `Complex<S>` for any `S: Scalar` is a
//! complex perturbation on top of `S`, so `Complex<Complex<f64>>` (a bicomplex
//! number) is available when a complex-step derivative is taken of a map that
//! itself uses a complex-step derivative internally (the spin-fitter inside the
//! projected force, differentiated again for its tangent).
//!
//! Rules for analytic code written against this trait:
//! - never take an absolute value, modulus or conjugate of a perturbed value;
//!   norms are `sqrt` of a sum of squares;
//! - branch only on [`Scalar::re`].

use std::fmt::Debug;
use std::ops::Neg;

use num_complex::Complex;
use num_traits::NumAssign;

pub trait Scalar: NumAssign + Neg<Output = Self> + Copy + Debug + Send + Sync + 'static {
    fn from_f64(v: f64) -> Self;

    /// Innermost real part.
    fn re(self) -> f64;

    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn asin(self) -> Self;

    fn is_finite(self) -> bool;

    #[inline]
    fn scale(self, k: f64) -> Self {
        self * Self::from_f64(k)
    }

    #[inline]
    fn powi2(self) -> Self {
        self * self
    }
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn re(self) -> f64 {
        self
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
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn asin(self) -> Self {
        f64::asin(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

fn sinh<S: Scalar>(b: S) -> S {
    if b.re().abs() < 1e-3 {
        // (e^b - e^-b)/2 cancels completely for perturbation-sized b.
        let b2 = b * b;
        b * (S::one() + b2 * (S::from_f64(1.0 / 6.0) + b2 * (S::from_f64(1.0 / 120.0) + b2.scale(1.0 / 5040.0))))
    } else {
        (b.exp() - (-b).exp()).scale(0.5)
    }
}

fn cosh<S: Scalar>(b: S) -> S {
    (b.exp() + (-b).exp()).scale(0.5)
}

impl<S: Scalar> Scalar for Complex<S> {
    #[inline]
    fn from_f64(v: f64) -> Self {
        Complex::new(S::from_f64(v), S::zero())
    }

    #[inline]
    fn re(self) -> f64 {
        self.re.re()
    }

    fn sqrt(self) -> Self {
        let (a, b) = (self.re, self.im);
        if a.re() == 0.0 && b.re() == 0.0 && a == S::zero() && b == S::zero() {
            return Complex::new(S::zero(), S::zero());
        }
        let modulus = (a * a + b * b).sqrt();
        if a.re() >= 0.0 {
            let r = ((modulus + a).scale(0.5)).sqrt();
            Complex::new(r, b / (r + r))
        } else {
            let mut t = ((modulus - a).scale(0.5)).sqrt();
            if b.re() < 0.0 {
                t = -t;
            }
            Complex::new(b / (t + t), t)
        }
    }

    fn sin(self) -> Self {
        let (a, b) = (self.re, self.im);
        Complex::new(a.sin() * cosh(b), a.cos() * sinh(b))
    }

    fn cos(self) -> Self {
        let (a, b) = (self.re, self.im);
        Complex::new(a.cos() * cosh(b), -(a.sin() * sinh(b)))
    }

    fn exp(self) -> Self {
        let ea = self.re.exp();
        Complex::new(ea * self.im.cos(), ea * self.im.sin())
    }

    /// First-order expansion in the imaginary part. Exact to O(im²), which is
    /// below machine precision for the perturbation sizes this type carries.
    fn asin(self) -> Self {
        let a = self.re;
        let d = S::one() / (S::one() - a * a).sqrt();
        Complex::new(a.asin(), self.im * d)
    }

    #[inline]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Embed a value of `S` as a complex number with zero imaginary part.
#[inline]
pub fn lift<S: Scalar>(v: S) -> Complex<S> {
    Complex::new(v, S::zero())
}

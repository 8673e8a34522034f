//! Complex-step differentiation: `f'(x) ≈ Im f(x + ih) / h`, free of
//! subtractive cancellation, so `h` can be taken absurdly small.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::DMat;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbSpec {
    pub h: f64,
}

impl Default for PerturbSpec {
    fn default() -> Self {
        PerturbSpec { h: 1e-50 }
    }
}

impl PerturbSpec {
    pub fn new(h: f64) -> Result<Self> {
        let s = PerturbSpec { h };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.h > 0.0 && self.h <= 1e-20 {
            Ok(())
        } else {
            Err(Error::InvalidStep { h: self.h })
        }
    }
}

/// `Im f(x + ih) / h` for a scalar map over any scalar base type.
pub fn derivative_scalar<S, F>(f: F, x: S, spec: PerturbSpec) -> Result<S>
where
    S: Scalar,
    F: Fn(Complex<S>) -> Complex<S>,
{
    spec.validate()?;
    let y = f(Complex::new(x, S::from_f64(spec.h)));
    if !y.is_finite() {
        return Err(Error::NonFiniteResult { column: None });
    }
    Ok(y.im.scale(1.0 / spec.h))
}

/// Jacobian of `F: Sⁿ → Sᵐ`, one complex evaluation per column.
pub fn jacobian<S, F>(f: F, x: &[S], spec: PerturbSpec) -> Result<DMat<S>>
where
    S: Scalar,
    F: Fn(&[Complex<S>]) -> Result<Vec<Complex<S>>>,
{
    spec.validate()?;
    let n = x.len();
    let mut xc: Vec<Complex<S>> = x.iter().map(|&v| Complex::new(v, S::zero())).collect();
    let mut jac: Option<DMat<S>> = None;
    for j in 0..n {
        xc[j].im = S::from_f64(spec.h);
        let y = f(&xc)?;
        xc[j].im = S::zero();
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteResult { column: Some(j) });
        }
        let m = jac.get_or_insert_with(|| DMat::zeros(y.len(), n));
        assert_eq!(y.len(), m.nrows(), "map output dimension changed between columns");
        for (i, v) in y.iter().enumerate() {
            m[(i, j)] = v.im.scale(1.0 / spec.h);
        }
    }
    Ok(jac.unwrap_or_else(|| DMat::zeros(0, 0)))
}

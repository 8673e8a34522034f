//! Finite rotations: spin/axial maps, Rodrigues exponential, logarithm and
//! angle-axis extraction.

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Scalar;

/// Rotation vector; its norm is the rotation angle in radians.
pub type RotVec<S = f64> = Vec3<S>;

/// Proper orthogonal 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Mat3<f64>);

impl Rotation {
    pub const ORTHO_TOL: f64 = 1e-12;

    pub fn identity() -> Self {
        Rotation(Mat3::identity())
    }

    pub fn from_matrix(m: Mat3<f64>) -> Result<Self> {
        if is_rotation(&m, Self::ORTHO_TOL) {
            Ok(Rotation(m))
        } else {
            Err(Error::DegenerateConfiguration)
        }
    }

    pub fn from_rotvec(v: &RotVec<f64>) -> Self {
        Rotation(exp_rotvec(v))
    }

    pub fn matrix(&self) -> &Mat3<f64> {
        &self.0
    }
}

pub fn is_rotation(m: &Mat3<f64>, tol: f64) -> bool {
    (*m * m.transpose() - Mat3::identity()).max_abs() <= tol && (m.det() - 1.0).abs() <= tol
}

pub fn spin<S: Scalar>(r: &Vec3<S>) -> Mat3<S> {
    let [a, b, c] = r.0;
    let z = S::zero();
    Mat3([[z, -c, b], [c, z, -a], [-b, a, z]])
}

/// Axial vector of the skew part of `m`, without a skewness check.
pub fn skew_axial<S: Scalar>(m: &Mat3<S>) -> Vec3<S> {
    let m = &m.0;
    Vec3([
        (m[2][1] - m[1][2]).scale(0.5),
        (m[0][2] - m[2][0]).scale(0.5),
        (m[1][0] - m[0][1]).scale(0.5),
    ])
}

pub fn axial<S: Scalar>(m: &Mat3<S>) -> Result<Vec3<S>> {
    let r = m.re();
    let sym = (r + r.transpose()).scale(0.5);
    let sym_norm = sym.frob();
    if sym_norm > 1e-10 * r.frob() {
        return Err(Error::NotSkew { sym_norm });
    }
    Ok(skew_axial(m))
}

/// Rodrigues formula `I + (sinθ/θ)Ω + ((1−cosθ)/θ²)Ω²`.
pub fn exp_rotvec<S: Scalar>(v: &RotVec<S>) -> Mat3<S> {
    let t2 = v.norm_sq();
    let (a, b) = if t2.re() < 1e-16 {
        (
            S::one() - t2.scale(1.0 / 6.0) + (t2 * t2).scale(1.0 / 120.0),
            S::from_f64(0.5) - t2.scale(1.0 / 24.0) + (t2 * t2).scale(1.0 / 720.0),
        )
    } else {
        let t = t2.sqrt();
        let s = t.scale(0.5).sin();
        (t.sin() / t, (s * s).scale(2.0) / t2)
    };
    let w = spin(v);
    Mat3::identity() + w.scale(a) + (w * w).scale(b)
}

/// Matrix logarithm `(asin τ / 2τ)(R − Rᵀ)`, valid for rotation angles up to π/2.
pub fn log_rot<S: Scalar>(r: &Mat3<S>) -> Result<Mat3<S>> {
    // cos θ = (tr R − 1)/2 < 0 exactly when θ > π/2.
    let c = (r.re().trace() - 1.0) * 0.5;
    if c < -1e-9 {
        return Err(Error::OutOfRange { angle: c.clamp(-1.0, 1.0).acos() });
    }
    let a = *r - r.transpose();
    let tau2 = skew_axial(r).norm_sq();
    let coef = if tau2.re() < 1e-16 {
        S::from_f64(0.5) + tau2.scale(1.0 / 12.0) + (tau2 * tau2).scale(3.0 / 80.0)
    } else {
        let tau = tau2.sqrt();
        tau.asin() / (tau + tau)
    };
    Ok(a.scale(coef))
}

/// Rotation vector `axial(log_rot(R))`.
pub fn log_rotvec<S: Scalar>(r: &Mat3<S>) -> Result<RotVec<S>> {
    Ok(skew_axial(&log_rot(r)?))
}

/// Angle in `[0, π]` and unit axis. The trace formula is used in the well
/// conditioned middle range; near 0 and π a Spurrier quaternion extraction
/// takes over.
pub fn extract_angle_axis(r: &Mat3<f64>) -> (f64, Vec3<f64>) {
    const EDGE: f64 = 0.1;
    let c = ((r.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let angle = c.acos();
    if angle > EDGE && angle < std::f64::consts::PI - EDGE {
        let w = skew_axial(r);
        return (angle, w.scale(1.0 / angle.sin()));
    }
    let q = quaternion(r);
    let v = Vec3([q[1], q[2], q[3]]);
    let s = v.norm();
    if s == 0.0 {
        return (0.0, Vec3::unit(0));
    }
    (2.0 * s.atan2(q[0]), v.scale(1.0 / s))
}

/// Unit quaternion `[w, x, y, z]` with `w ≥ 0` (Spurrier's method).
pub fn quaternion(r: &Mat3<f64>) -> [f64; 4] {
    let m = &r.0;
    let t = r.trace();
    let mut q = [0.0; 4];
    let diag = [m[0][0], m[1][1], m[2][2]];
    let (imax, dmax) = diag.iter().enumerate().fold((0, f64::MIN), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
    if t >= dmax {
        let w = 0.5 * (1.0 + t).sqrt();
        q[0] = w;
        q[1] = (m[2][1] - m[1][2]) / (4.0 * w);
        q[2] = (m[0][2] - m[2][0]) / (4.0 * w);
        q[3] = (m[1][0] - m[0][1]) / (4.0 * w);
    } else {
        let i = imax;
        let j = (i + 1) % 3;
        let k = (i + 2) % 3;
        let qi = (0.5 * m[i][i] + 0.25 * (1.0 - t)).sqrt();
        q[1 + i] = qi;
        q[0] = (m[k][j] - m[j][k]) / (4.0 * qi);
        q[1 + j] = (m[j][i] + m[i][j]) / (4.0 * qi);
        q[1 + k] = (m[k][i] + m[i][k]) / (4.0 * qi);
    }
    if q[0] < 0.0 {
        q.iter_mut().for_each(|c| *c = -*c);
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn spin_components() {
        let s = spin(&Vec3::new(1.0, 2.0, 3.0));
        assert_eq!(s, Mat3([[0.0, -3.0, 2.0], [3.0, 0.0, -1.0], [-2.0, 1.0, 0.0]]));
        assert_eq!(spin(&Vec3::<f64>::zero()), Mat3::zero());
    }

    #[test]
    fn axial_inverts_spin() {
        let v = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(axial(&spin(&v)).unwrap(), v);
        assert_eq!(axial(&Mat3::<f64>::zero()).unwrap(), Vec3::zero());
        assert!(matches!(axial(&Mat3::<f64>::identity()), Err(Error::NotSkew { .. })));
    }

    #[test]
    fn quarter_turn_about_x() {
        let r = exp_rotvec(&Vec3::new(PI / 2.0, 0.0, 0.0));
        assert!((r.mul_vec(&Vec3::unit(1)) - Vec3::unit(2)).max_abs() < 1e-15);
        assert!((r.mul_vec(&Vec3::unit(2)) + Vec3::unit(1)).max_abs() < 1e-15);
        assert_eq!(exp_rotvec(&Vec3::<f64>::zero()), Mat3::identity());
    }

    #[test]
    fn log_domain() {
        assert_eq!(log_rot(&Mat3::<f64>::identity()).unwrap(), Mat3::zero());
        let r = exp_rotvec(&Vec3::new(0.0, 3.0 * PI / 4.0, 0.0));
        assert!(matches!(log_rot(&r), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn log_inverts_exp_up_to_quarter_turn() {
        for k in 1..=20 {
            let t = PI / 2.0 * k as f64 / 20.0;
            let v = Vec3::new(0.3, -0.5, 0.8).normalized().scale(t);
            let w = log_rotvec(&exp_rotvec(&v)).unwrap();
            assert!((w - v).max_abs() < 1e-12, "{t}: {w:?}");
        }
    }

    #[test]
    fn identity_axis_convention() {
        let (a, n) = extract_angle_axis(&Mat3::identity());
        assert_eq!(a, 0.0);
        assert_eq!(n, Vec3::unit(0));
    }

    #[test]
    fn near_pi_extraction() {
        let r = exp_rotvec(&Vec3::new(0.0, 0.0, PI - 1e-6));
        let (a, n) = extract_angle_axis(&r);
        assert!((a - (PI - 1e-6)).abs() < 1e-9);
        assert!((n - Vec3::unit(2)).max_abs() < 1e-9);
    }
}

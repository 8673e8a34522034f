//! Co-rotational frame strategies. Every routine is generic over [`Scalar`]
//! and uses fixed iteration counts, so frames can be differentiated by complex
//! step.

use serde::{Deserialize, Serialize};

use crate::elements::{ElementKind, Regime};
use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrameStrategy {
    SideAlign2D,
    LeastSquare,
    PolarDecomp,
    SideAlign3D,
    BeamFrame,
    QuadShellFrame,
}

impl FrameStrategy {
    pub const ALL: [FrameStrategy; 6] = [
        FrameStrategy::SideAlign2D,
        FrameStrategy::LeastSquare,
        FrameStrategy::PolarDecomp,
        FrameStrategy::SideAlign3D,
        FrameStrategy::BeamFrame,
        FrameStrategy::QuadShellFrame,
    ];

    /// Model-file name; `side` covers both side-alignment variants.
    pub fn name(self) -> &'static str {
        match self {
            FrameStrategy::SideAlign2D | FrameStrategy::SideAlign3D => "side",
            FrameStrategy::LeastSquare => "lsq",
            FrameStrategy::PolarDecomp => "polar",
            FrameStrategy::BeamFrame => "beam",
            FrameStrategy::QuadShellFrame => "quadshell",
        }
    }

    pub fn parse(name: &str, regime: Regime) -> Result<Self> {
        Ok(match name {
            "side" => {
                if regime == Regime::Plane {
                    FrameStrategy::SideAlign2D
                } else {
                    FrameStrategy::SideAlign3D
                }
            }
            "lsq" => FrameStrategy::LeastSquare,
            "polar" => FrameStrategy::PolarDecomp,
            "beam" => FrameStrategy::BeamFrame,
            "quadshell" => FrameStrategy::QuadShellFrame,
            _ => return Err(Error::UnknownName { what: "frame", name: name.to_string() }),
        })
    }

    pub fn is_compatible(self, kind: ElementKind) -> bool {
        use ElementKind::*;
        match self {
            FrameStrategy::SideAlign2D => matches!(kind, Bar2 | Cst3 | Quad4),
            FrameStrategy::LeastSquare | FrameStrategy::PolarDecomp => matches!(kind, Cst3 | Quad4 | Hex8),
            FrameStrategy::SideAlign3D => matches!(kind, Hex8 | TriShell3 | QuadShell4),
            FrameStrategy::BeamFrame => kind == Beam2,
            FrameStrategy::QuadShellFrame => kind == QuadShell4,
        }
    }

    pub fn check(self, kind: ElementKind) -> Result<()> {
        if self.is_compatible(kind) {
            Ok(())
        } else {
            Err(Error::IncompatibleFrame { strategy: format!("{self:?}"), kind: kind.name().to_string() })
        }
    }

    /// Default strategy for a kind.
    pub fn default_for(kind: ElementKind) -> Self {
        use ElementKind::*;
        match kind {
            Bar2 | Cst3 | Quad4 => FrameStrategy::SideAlign2D,
            Hex8 | TriShell3 => FrameStrategy::SideAlign3D,
            Beam2 => FrameStrategy::BeamFrame,
            QuadShell4 => FrameStrategy::QuadShellFrame,
        }
    }

    /// Strategies whose initial frame is the identity.
    pub fn identity_initial_frame(self) -> bool {
        matches!(self, FrameStrategy::LeastSquare | FrameStrategy::PolarDecomp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameResult<S = f64> {
    pub r: Mat3<S>,
    pub origin: Vec3<S>,
}

fn len_ok<S: Scalar>(d: &Vec3<S>, scale: f64) -> bool {
    let l = d.re().norm();
    l > 0.0 && l > 1e-12 * scale
}

pub fn frame_side_2d<S: Scalar>(x1: &Vec3<S>, x2: &Vec3<S>) -> Result<FrameResult<S>> {
    let mut d = *x2 - *x1;
    d.0[2] = S::zero();
    if !len_ok(&d, x1.re().norm().max(x2.re().norm())) {
        return Err(Error::DegenerateSide);
    }
    let e1 = d.normalized();
    let e2 = Vec3::new(-e1.y(), e1.x(), S::zero());
    Ok(FrameResult { r: Mat3::from_cols(e1, e2, Vec3::unit(2)), origin: *x1 })
}

/// Orthogonal factor of a 2×2 matrix (embedded in the leading block) with
/// positive determinant: `(F + cof F)/‖·‖`.
pub fn polar_2d<S: Scalar>(f: &Mat3<S>) -> Result<Mat3<S>> {
    let (a, b, c, d) = (f.0[0][0], f.0[0][1], f.0[1][0], f.0[1][1]);
    let det = a * d - b * c;
    if !(det.re() > 0.0) {
        return Err(Error::InvertedElement { det: det.re() });
    }
    procrustes_2d(f).ok_or(Error::InvertedElement { det: det.re() })
}

/// Planar rotation maximizing `tr(Rᵀ H)`.
fn procrustes_2d<S: Scalar>(f: &Mat3<S>) -> Option<Mat3<S>> {
    let (a, b, c, d) = (f.0[0][0], f.0[0][1], f.0[1][0], f.0[1][1]);
    let p = a + d;
    let q = c - b;
    let n2 = p * p + q * q;
    if !(n2.re() > 0.0) {
        return None;
    }
    let n = n2.sqrt();
    let (cs, sn) = (p / n, q / n);
    let z = S::zero();
    Some(Mat3([[cs, -sn, z], [sn, cs, z], [z, z, S::one()]]))
}

/// Orthogonal factor of a 3×3 matrix by Newton iteration `X ← ½(γX + X⁻ᵀ/γ)`
/// with Frobenius scaling, fixed at 12 steps.
pub fn polar_3d<S: Scalar>(f: &Mat3<S>) -> Result<Mat3<S>> {
    let det = f.det();
    if !(det.re() > 0.0) {
        return Err(Error::InvertedElement { det: det.re() });
    }
    let mut x = *f;
    for _ in 0..12 {
        let xit = x.inverse()?.transpose();
        let g = (xit.frob_sq() / x.frob_sq()).sqrt().sqrt();
        x = (x.scale(g) + xit.scale(S::one() / g)).scale(S::from_f64(0.5));
    }
    Ok(x)
}

/// Least-squares fit of `x` onto the initial local coordinates `xbar0`
/// (taken about their centroid), origin at the current centroid.
pub fn frame_lsq<S: Scalar>(xbar0: &[Vec3<f64>], x: &[Vec3<S>], planar: bool) -> Result<FrameResult<S>> {
    if x.len() < 3 || xbar0.len() != x.len() {
        return Err(Error::DegenerateConfiguration);
    }
    let inv_n = S::from_f64(1.0 / x.len() as f64);
    let mut c = Vec3::zero();
    for p in x {
        c += *p;
    }
    c = c.scale(inv_n);
    let mut c0 = Vec3::<f64>::zero();
    for p in xbar0 {
        c0 += *p;
    }
    c0 = c0.scale(1.0 / x.len() as f64);
    let mut h = Mat3::zero();
    for (p, q) in x.iter().zip(xbar0) {
        h = h + (*p - c).outer(&Vec3::from_f64(*q - c0));
    }
    let r = if planar {
        procrustes_2d(&h).ok_or(Error::DegenerateConfiguration)?
    } else {
        polar_3d(&h).map_err(|_| Error::DegenerateConfiguration)?
    };
    Ok(FrameResult { r, origin: c })
}

/// Rotation from the deformation gradient, `F = RU`; origin at the first node.
pub fn frame_polar<S: Scalar>(f: &Mat3<S>, planar: bool, origin: Vec3<S>) -> Result<FrameResult<S>> {
    let r = if planar { polar_2d(f)? } else { polar_3d(f)? };
    Ok(FrameResult { r, origin })
}

pub fn frame_side_3d<S: Scalar>(x1: &Vec3<S>, x2: &Vec3<S>, x3: &Vec3<S>) -> Result<FrameResult<S>> {
    let d = *x2 - *x1;
    let scale = x1.re().norm().max(x2.re().norm()).max(x3.re().norm());
    if !len_ok(&d, scale) {
        return Err(Error::CollinearNodes);
    }
    let e1 = d.normalized();
    let a = *x3 - *x1;
    let n = e1.cross(&a);
    if !(n.re().norm() > 1e-10 * a.re().norm()) {
        return Err(Error::CollinearNodes);
    }
    let e3 = n.normalized();
    let e2 = e3.cross(&e1);
    Ok(FrameResult { r: Mat3::from_cols(e1, e2, e3), origin: *x1 })
}

/// Beam frame: axis along the chord, auxiliary vector the mean of the nodal
/// triads' images of the initial local y axis.
pub fn frame_beam<S: Scalar>(
    x1: &Vec3<S>,
    x2: &Vec3<S>,
    r1: &Mat3<S>,
    r2: &Mat3<S>,
    r0: &Mat3<f64>,
) -> Result<FrameResult<S>> {
    let d = *x2 - *x1;
    if !len_ok(&d, x1.re().norm().max(x2.re().norm())) {
        return Err(Error::DegenerateSide);
    }
    let e1 = d.normalized();
    let y0 = Vec3::from_f64(r0.col(1));
    let r = (r1.mul_vec(&y0) + r2.mul_vec(&y0)).scale(S::from_f64(0.5));
    let n = e1.cross(&r);
    if !(n.re().norm() > 1e-10 * r.re().norm()) {
        return Err(Error::DegenerateAuxiliary);
    }
    let e3 = n.normalized();
    let e2 = e3.cross(&e1);
    Ok(FrameResult { r: Mat3::from_cols(e1, e2, e3), origin: *x1 })
}

/// Initial beam frame from the axis and an orientation vector in the local
/// x-y plane.
pub fn beam_initial_frame(x1: &Vec3<f64>, x2: &Vec3<f64>, orientation: Option<Vec3<f64>>) -> Result<Mat3<f64>> {
    let d = *x2 - *x1;
    if !(d.norm() > 0.0) {
        return Err(Error::DegenerateSide);
    }
    let e1 = d.normalized();
    let v = orientation.unwrap_or_else(|| {
        // local y perpendicular to global z where possible
        if e1.z().abs() < 0.99 {
            Vec3::unit(2).cross(&e1)
        } else {
            Vec3::unit(1)
        }
    });
    let n = e1.cross(&v);
    if !(n.norm() > 1e-10 * v.norm()) {
        return Err(Error::DegenerateAuxiliary);
    }
    let e3 = n.normalized();
    Ok(Mat3::from_cols(e1, e3.cross(&e1), e3))
}

pub fn frame_quadshell<S: Scalar>(x: &[Vec3<S>]) -> Result<FrameResult<S>> {
    let d1 = x[2] - x[0];
    let d2 = x[3] - x[1];
    let n = d1.cross(&d2);
    if !(n.re().norm() > 1e-10 * d1.re().norm() * d2.re().norm()) {
        return Err(Error::DegenerateDiagonals);
    }
    let e3 = n.normalized();
    let e1 = (x[3] - x[0]).cross(&e3).normalized();
    let e2 = e3.cross(&e1);
    Ok(FrameResult { r: Mat3::from_cols(e1, e2, e3), origin: x[0] })
}

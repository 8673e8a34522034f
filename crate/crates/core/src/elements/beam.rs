use crate::error::{Error, Result};
use crate::linalg::{DMat, Vec3};

use super::Material;

fn axis_length(x: &[Vec3<f64>]) -> Result<f64> {
    let l = x[1].0[0] - x[0].0[0];
    if !(l > 0.0) {
        return Err(Error::DegenerateGeometry(format!("element length {l:e} along local axis")));
    }
    Ok(l)
}

/// Plane truss member, DOFs `[ux, uy] × 2`.
pub fn bar2(x: &[Vec3<f64>], mat: &Material) -> Result<DMat<f64>> {
    let l = axis_length(x)?;
    let k = mat.e * mat.section.map_or(0.0, |s| s.area) / l;
    let mut m = DMat::zeros(4, 4);
    m[(0, 0)] = k;
    m[(2, 2)] = k;
    m[(0, 2)] = -k;
    m[(2, 0)] = -k;
    Ok(m)
}

/// Spatial Euler-Bernoulli beam, DOFs `[ux, uy, uz, rx, ry, rz] × 2`.
pub fn beam2(x: &[Vec3<f64>], mat: &Material) -> Result<DMat<f64>> {
    let l = axis_length(x)?;
    let s = mat.section.expect("validated");
    let e = mat.e;
    let (l2, l3) = (l * l, l * l * l);
    let mut k = DMat::zeros(12, 12);
    let mut set = |i: usize, j: usize, v: f64| {
        k[(i, j)] = v;
        k[(j, i)] = v;
    };
    let ea = e * s.area / l;
    set(0, 0, ea);
    set(6, 6, ea);
    set(0, 6, -ea);

    let gj = mat.shear_modulus() * s.j / l;
    set(3, 3, gj);
    set(9, 9, gj);
    set(3, 9, -gj);

    let ez = e * s.iz;
    set(1, 1, 12.0 * ez / l3);
    set(7, 7, 12.0 * ez / l3);
    set(1, 7, -12.0 * ez / l3);
    set(1, 5, 6.0 * ez / l2);
    set(1, 11, 6.0 * ez / l2);
    set(5, 7, -6.0 * ez / l2);
    set(7, 11, -6.0 * ez / l2);
    set(5, 5, 4.0 * ez / l);
    set(11, 11, 4.0 * ez / l);
    set(5, 11, 2.0 * ez / l);

    let ey = e * s.iy;
    set(2, 2, 12.0 * ey / l3);
    set(8, 8, 12.0 * ey / l3);
    set(2, 8, -12.0 * ey / l3);
    set(2, 4, -6.0 * ey / l2);
    set(2, 10, -6.0 * ey / l2);
    set(4, 8, 6.0 * ey / l2);
    set(8, 10, 6.0 * ey / l2);
    set(4, 4, 4.0 * ey / l);
    set(10, 10, 4.0 * ey / l);
    set(4, 10, 2.0 * ey / l);
    Ok(k)
}

use crate::error::{Error, Result};
use crate::linalg::{DMat, Vec3};

use super::Material;

pub fn plane_stress_d(e: f64, nu: f64) -> [[f64; 3]; 3] {
    let c = e / (1.0 - nu * nu);
    [[c, c * nu, 0.0], [c * nu, c, 0.0], [0.0, 0.0, c * (1.0 - nu) / 2.0]]
}

pub fn solid_d(e: f64, nu: f64) -> [[f64; 6]; 6] {
    let l = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    let g = e / (2.0 * (1.0 + nu));
    let mut d = [[0.0; 6]; 6];
    for i in 0..3 {
        for j in 0..3 {
            d[i][j] = l;
        }
        d[i][i] = l + 2.0 * g;
        d[i + 3][i + 3] = g;
    }
    d
}

/// Natural-coordinate gradients of the linear triangle (constant).
pub fn tri3_grad(_xi: [f64; 2]) -> Vec<[f64; 3]> {
    vec![[-1.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]
}

pub fn quad4_grad(xi: [f64; 2]) -> Vec<[f64; 3]> {
    const C: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
    C.iter()
        .map(|c| [0.25 * c[0] * (1.0 + c[1] * xi[1]), 0.25 * c[1] * (1.0 + c[0] * xi[0]), 0.0])
        .collect()
}

pub const HEX8_CORNERS: [[f64; 3]; 8] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

pub fn hex8_grad(xi: [f64; 3]) -> Vec<[f64; 3]> {
    HEX8_CORNERS
        .iter()
        .map(|c| {
            let a = 1.0 + c[0] * xi[0];
            let b = 1.0 + c[1] * xi[1];
            let d = 1.0 + c[2] * xi[2];
            [0.125 * c[0] * b * d, 0.125 * c[1] * a * d, 0.125 * c[2] * a * b]
        })
        .collect()
}

const G2: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

/// Physical gradients of 2D shape functions and the Jacobian determinant.
fn plane_physical(xy: &[[f64; 2]], dn: &[[f64; 3]]) -> Result<(Vec<[f64; 2]>, f64)> {
    let mut j = [[0.0; 2]; 2];
    for (p, d) in xy.iter().zip(dn) {
        for a in 0..2 {
            for b in 0..2 {
                j[a][b] += d[a] * p[b];
            }
        }
    }
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if !(det > 0.0) {
        return Err(Error::DegenerateGeometry(format!("non-positive Jacobian {det:e}")));
    }
    let inv = [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]];
    let g = dn
        .iter()
        .map(|d| [inv[0][0] * d[0] + inv[0][1] * d[1], inv[1][0] * d[0] + inv[1][1] * d[1]])
        .collect();
    Ok((g, det))
}

fn add_plane_btdb(k: &mut DMat<f64>, g: &[[f64; 2]], d: &[[f64; 3]; 3], w: f64) {
    let n = g.len();
    let mut b = vec![[0.0; 3]; 2 * n];
    for (i, gi) in g.iter().enumerate() {
        b[2 * i] = [gi[0], 0.0, gi[1]];
        b[2 * i + 1] = [0.0, gi[1], gi[0]];
    }
    for p in 0..2 * n {
        let mut db = [0.0; 3];
        for r in 0..3 {
            db[r] = (0..3).map(|s| d[r][s] * b[p][s]).sum();
        }
        for q in 0..2 * n {
            k[(q, p)] += w * (0..3).map(|r| b[q][r] * db[r]).sum::<f64>();
        }
    }
}

pub fn cst3(xy: &[[f64; 2]], mat: &Material) -> Result<DMat<f64>> {
    let d = plane_stress_d(mat.e, mat.nu);
    let (g, det) = plane_physical(xy, &tri3_grad([0.0; 2]))?;
    let mut k = DMat::zeros(6, 6);
    add_plane_btdb(&mut k, &g, &d, 0.5 * det * mat.thickness);
    Ok(k)
}

pub fn quad4(xy: &[[f64; 2]], mat: &Material) -> Result<DMat<f64>> {
    let d = plane_stress_d(mat.e, mat.nu);
    let mut k = DMat::zeros(8, 8);
    for &a in &G2 {
        for &b in &G2 {
            let (g, det) = plane_physical(xy, &quad4_grad([a, b]))?;
            add_plane_btdb(&mut k, &g, &d, det * mat.thickness);
        }
    }
    Ok(k)
}

pub fn hex8(x: &[Vec3<f64>], mat: &Material) -> Result<DMat<f64>> {
    let d = solid_d(mat.e, mat.nu);
    let mut k = DMat::zeros(24, 24);
    for &a in &G2 {
        for &b in &G2 {
            for &c in &G2 {
                let dn = hex8_grad([a, b, c]);
                let mut j = [[0.0; 3]; 3];
                for (p, dd) in x.iter().zip(&dn) {
                    for r in 0..3 {
                        for s in 0..3 {
                            j[r][s] += dd[r] * p.0[s];
                        }
                    }
                }
                let jm = crate::linalg::Mat3(j);
                let det = jm.det();
                if !(det > 0.0) {
                    return Err(Error::DegenerateGeometry(format!("non-positive Jacobian {det:e}")));
                }
                let inv = jm.inverse()?;
                let g: Vec<[f64; 3]> = dn
                    .iter()
                    .map(|dd| {
                        let v = inv.mul_vec(&Vec3(*dd));
                        v.0
                    })
                    .collect();
                let mut bm = vec![[0.0; 6]; 24];
                for (i, gi) in g.iter().enumerate() {
                    bm[3 * i] = [gi[0], 0.0, 0.0, gi[1], 0.0, gi[2]];
                    bm[3 * i + 1] = [0.0, gi[1], 0.0, gi[0], gi[2], 0.0];
                    bm[3 * i + 2] = [0.0, 0.0, gi[2], 0.0, gi[1], gi[0]];
                }
                for p in 0..24 {
                    let mut db = [0.0; 6];
                    for r in 0..6 {
                        db[r] = (0..6).map(|s| d[r][s] * bm[p][s]).sum();
                    }
                    for q in 0..24 {
                        k[(q, p)] += det * (0..6).map(|r| bm[q][r] * db[r]).sum::<f64>();
                    }
                }
            }
        }
    }
    Ok(k)
}

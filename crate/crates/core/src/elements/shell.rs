//! Flat shells: membrane (CST or bilinear) + discrete Kirchhoff bending +
//! drilling penalty, DOFs `[u, v, w, θx, θy, θz]` per node.

use crate::error::Result;
use crate::linalg::DMat;

use super::continuum::{cst3, quad4, quad4_grad, tri3_grad};
use super::plate::discrete_kirchhoff;
use super::Material;

pub fn flat_shell(xy: &[[f64; 2]], mat: &Material) -> Result<DMat<f64>> {
    let nc = xy.len();
    let n = 6 * nc;
    let t = mat.thickness;
    let km = if nc == 3 { cst3(xy, mat)? } else { quad4(xy, mat)? };
    let d0 = mat.e * t.powi(3) / (12.0 * (1.0 - mat.nu * mat.nu));
    let kb = discrete_kirchhoff(xy, d0, mat.nu)?;

    let mut k = DMat::zeros(n, n);
    let mem = |i: usize| 6 * (i / 2) + i % 2;
    let ben = |i: usize| 6 * (i / 3) + 2 + i % 3;
    for i in 0..2 * nc {
        for j in 0..2 * nc {
            k[(mem(i), mem(j))] += km[(i, j)];
        }
    }
    let mut kb_max: f64 = 0.0;
    for i in 0..3 * nc {
        for j in 0..3 * nc {
            k[(ben(i), ben(j))] += kb[(i, j)];
        }
        kb_max = kb_max.max(kb[(i, i)]);
    }

    // Drilling: penalize θz_i − ω_c, where ω_c = ½(v,x − u,y) at the centre,
    // so in-plane rigid rotation stays energy free.
    let kd = mat.drill_factor * kb_max;
    if kd > 0.0 {
        let xi = [if nc == 3 { 1.0 / 3.0 } else { 0.0 }; 2];
        let dn = if nc == 3 { tri3_grad(xi) } else { quad4_grad(xi) };
        let mut j = [[0.0; 2]; 2];
        for (p, d) in xy.iter().zip(&dn) {
            for a in 0..2 {
                for b in 0..2 {
                    j[a][b] += d[a] * p[b];
                }
            }
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let inv = [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]];
        let mut c = vec![0.0; n];
        for (i, d) in dn.iter().enumerate() {
            let gx = inv[0][0] * d[0] + inv[0][1] * d[1];
            let gy = inv[1][0] * d[0] + inv[1][1] * d[1];
            c[6 * i] = -0.5 * gy;
            c[6 * i + 1] = 0.5 * gx;
        }
        for i in 0..nc {
            let mut a = c.iter().map(|v| -v).collect::<Vec<_>>();
            a[6 * i + 5] += 1.0;
            for p in 0..n {
                if a[p] == 0.0 {
                    continue;
                }
                for q in 0..n {
                    k[(p, q)] += kd * a[p] * a[q];
                }
            }
        }
    }
    Ok(k)
}

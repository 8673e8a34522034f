//! Discrete Kirchhoff plate bending (DKT for triangles, DKQ for quadrilaterals).
//!
//! The normal's slopes `β = ∇w` are interpolated quadratically over corners and
//! edge midpoints (T6 / Q8 serendipity). Midside values are eliminated by the
//! Kirchhoff constraints along each edge: cubic `w` along the side and linear
//! normal slope. Corner DOFs are `[w, θx, θy]` with `β = (−θy, θx)`.

use crate::error::{Error, Result};
use crate::linalg::DMat;

/// Quadratic shape-function values' natural derivatives at `xi`, corners then
/// midsides (midside k sits between corner k and k+1).
fn beta_grad(nc: usize, xi: [f64; 2]) -> Vec<[f64; 2]> {
    let (x, y) = (xi[0], xi[1]);
    if nc == 3 {
        let l = [1.0 - x - y, x, y];
        let dl = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
        let mut g = Vec::with_capacity(6);
        for i in 0..3 {
            let f = 4.0 * l[i] - 1.0;
            g.push([f * dl[i][0], f * dl[i][1]]);
        }
        for i in 0..3 {
            let j = (i + 1) % 3;
            g.push([
                4.0 * (dl[i][0] * l[j] + l[i] * dl[j][0]),
                4.0 * (dl[i][1] * l[j] + l[i] * dl[j][1]),
            ]);
        }
        g
    } else {
        const C: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
        const M: [[f64; 2]; 4] = [[0.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]];
        let mut g = Vec::with_capacity(8);
        for c in &C {
            let (a, b) = (c[0], c[1]);
            let s = a * x + b * y - 1.0;
            g.push([
                0.25 * a * (1.0 + b * y) * s + 0.25 * (1.0 + a * x) * (1.0 + b * y) * a,
                0.25 * b * (1.0 + a * x) * s + 0.25 * (1.0 + a * x) * (1.0 + b * y) * b,
            ]);
        }
        for m in &M {
            if m[0] == 0.0 {
                g.push([-x * (1.0 + m[1] * y), 0.5 * (1.0 - x * x) * m[1]]);
            } else {
                g.push([0.5 * m[0] * (1.0 - y * y), -y * (1.0 + m[0] * x)]);
            }
        }
        g
    }
}

fn geometry_grad(nc: usize, xi: [f64; 2]) -> Vec<[f64; 2]> {
    if nc == 3 {
        vec![[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]
    } else {
        super::quad4_grad(xi).into_iter().map(|g| [g[0], g[1]]).collect()
    }
}

fn quadrature(nc: usize) -> Vec<([f64; 2], f64)> {
    if nc == 3 {
        vec![([1.0 / 6.0, 1.0 / 6.0], 1.0 / 6.0), ([2.0 / 3.0, 1.0 / 6.0], 1.0 / 6.0), ([1.0 / 6.0, 2.0 / 3.0], 1.0 / 6.0)]
    } else {
        let g = 0.577_350_269_189_625_8;
        [[-g, -g], [g, -g], [g, g], [-g, g]].into_iter().map(|p| (p, 1.0)).collect()
    }
}

/// Bending stiffness for corners `xy` (counter-clockwise), flexural rigidity
/// `d0 = Et³/12(1−ν²)`. DOFs `[w, θx, θy]` per corner.
pub fn discrete_kirchhoff(xy: &[[f64; 2]], d0: f64, nu: f64) -> Result<DMat<f64>> {
    let nc = xy.len();
    assert!(nc == 3 || nc == 4);
    let nq = 3 * nc;
    // t: slopes at the 2nc interpolation points in terms of corner DOFs.
    let mut t = DMat::zeros(4 * nc, nq);
    for i in 0..nc {
        t[(2 * i, 3 * i + 2)] = -1.0;
        t[(2 * i + 1, 3 * i + 1)] = 1.0;
    }
    for k in 0..nc {
        let (i, j) = (k, (k + 1) % nc);
        let dx = xy[j][0] - xy[i][0];
        let dy = xy[j][1] - xy[i][1];
        let l = (dx * dx + dy * dy).sqrt();
        if !(l > 0.0) {
            return Err(Error::DegenerateGeometry("zero-length plate edge".into()));
        }
        let s = [dx / l, dy / l];
        let row = 2 * (nc + k);
        for a in 0..2 {
            for b in 0..2 {
                let c = if a == b { 0.5 } else { 0.0 } - 0.75 * s[a] * s[b];
                for n in [i, j] {
                    // β_n,b in terms of corner DOFs: βx = −θy, βy = θx
                    let (col, sign) = if b == 0 { (3 * n + 2, -1.0) } else { (3 * n + 1, 1.0) };
                    t[(row + a, col)] += c * sign;
                }
            }
            t[(row + a, 3 * j)] += 1.5 / l * s[a];
            t[(row + a, 3 * i)] -= 1.5 / l * s[a];
        }
    }
    let db = [[d0, d0 * nu, 0.0], [d0 * nu, d0, 0.0], [0.0, 0.0, d0 * (1.0 - nu) / 2.0]];
    let mut k = DMat::zeros(nq, nq);
    for (xi, w) in quadrature(nc) {
        let gg = geometry_grad(nc, xi);
        let mut j = [[0.0; 2]; 2];
        for (p, d) in xy.iter().zip(&gg) {
            for a in 0..2 {
                for b in 0..2 {
                    j[a][b] += d[a] * p[b];
                }
            }
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if !(det > 0.0) {
            return Err(Error::DegenerateGeometry(format!("non-positive plate Jacobian {det:e}")));
        }
        let inv = [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]];
        // curvature operator on interpolation-point slopes
        let mut bb = DMat::zeros(3, 4 * nc);
        for (p, d) in beta_grad(nc, xi).iter().enumerate() {
            let gx = inv[0][0] * d[0] + inv[0][1] * d[1];
            let gy = inv[1][0] * d[0] + inv[1][1] * d[1];
            bb[(0, 2 * p)] = gx;
            bb[(1, 2 * p + 1)] = gy;
            bb[(2, 2 * p)] = gy;
            bb[(2, 2 * p + 1)] = gx;
        }
        let b = bb.matmul(&t);
        for p in 0..nq {
            let mut dbp = [0.0; 3];
            for r in 0..3 {
                dbp[r] = (0..3).map(|s| db[r][s] * b[(s, p)]).sum();
            }
            for q in 0..nq {
                k[(q, p)] += w * det * (0..3).map(|r| b[(r, q)] * dbp[r]).sum::<f64>();
            }
        }
    }
    Ok(k)
}

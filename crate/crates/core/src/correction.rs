//! Direct force correction: the weighted minimum-norm change of an element
//! force that restores element self-equilibrium, and its consistent tangent.
//!
//! Everything is assembled in a full six-component node layout `[n, m]` and
//! the rows/columns belonging to the regime are selected afterwards, so plane
//! elements use the three-row constraint `(Σfx, Σfy, Σmz)`.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::corot::to_blocks;
use crate::elements::Regime;
use crate::error::{Error, Result};
use crate::linalg::{DMat, Vec3};
use crate::rotkit::spin;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeightCase {
    /// `W = I`
    CaseI,
    /// Moments only.
    CaseII,
    /// Translations only.
    CaseIII,
}

impl WeightCase {
    pub fn name(self) -> &'static str {
        match self {
            WeightCase::CaseI => "CaseI",
            WeightCase::CaseII => "CaseII",
            WeightCase::CaseIII => "CaseIII",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorrectionResult<S = f64> {
    pub f_corr: Vec<S>,
    /// Multiplier in the regime's constraint-row layout.
    pub lambda: Vec<S>,
    /// The constraint metric was singular and a pseudo-inverse was used.
    pub rank_deficient: bool,
}

/// Relative singular-value threshold for the constraint metric.
pub const RANK_TOL: f64 = 1e-10;

fn column_map(regime: Regime, nodes: usize) -> Vec<usize> {
    let comps = regime.node_components();
    (0..nodes).flat_map(|i| comps.iter().map(move |&c| 6 * i + c)).collect()
}

/// `g(f, x) = [Σnᵢ; Σ(xᵢ×nᵢ + mᵢ)]`, regime rows.
pub fn constraint<S: Scalar>(regime: Regime, f: &[S], x: &[Vec3<S>]) -> Vec<S> {
    let mut t = Vec3::zero();
    let mut m = Vec3::zero();
    for ((n, mi), xi) in to_blocks(regime, f).iter().zip(x) {
        t += *n;
        m += xi.cross(n) + *mi;
    }
    let full = [t.0[0], t.0[1], t.0[2], m.0[0], m.0[1], m.0[2]];
    regime.constraint_rows().iter().map(|&r| full[r]).collect()
}

fn full_jacobian<S: Scalar>(x: &[Vec3<S>]) -> DMat<S> {
    let mut g = DMat::zeros(6, 6 * x.len());
    for (i, xi) in x.iter().enumerate() {
        let s = spin(xi);
        for a in 0..3 {
            g[(a, 6 * i + a)] = S::one();
            g[(3 + a, 6 * i + 3 + a)] = S::one();
            for b in 0..3 {
                g[(3 + a, 6 * i + b)] = s.0[a][b];
            }
        }
    }
    g
}

/// `g_f = ∂g/∂f`, depending only on the current positions.
pub fn constraint_jacobian<S: Scalar>(regime: Regime, x: &[Vec3<S>]) -> DMat<S> {
    full_jacobian(x).select(regime.constraint_rows(), &column_map(regime, x.len()))
}

/// Diagonal of `W⁻¹` in the regime layout.
pub fn weight_inverse(regime: Regime, nodes: usize, case: WeightCase) -> Result<Vec<f64>> {
    if case != WeightCase::CaseI && !regime.has_rotations() {
        return Err(Error::IncompatibleWeightCase { case: case.name().into() });
    }
    let per: Vec<f64> = match case {
        WeightCase::CaseI => vec![1.0; regime.dofs_per_node()],
        WeightCase::CaseII => vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
        WeightCase::CaseIII => vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0],
    };
    Ok((0..nodes).flat_map(|_| per.iter().copied()).collect())
}

/// Inverse of a metric of the form `[[D, B], [Bᵀ, A]]` with diagonal `D`
/// (leading `nt` rows): `H = (A − BᵀD⁻¹B)⁻¹`.
pub fn block_inverse<S: Scalar>(m: &DMat<S>, nt: usize) -> Result<DMat<S>> {
    let n = m.nrows();
    let nr = n - nt;
    let mut dinv = Vec::with_capacity(nt);
    for i in 0..nt {
        let d = m[(i, i)];
        if !(d.re() > 0.0) {
            return Err(Error::SingularSchur);
        }
        dinv.push(S::one() / d);
    }
    let b = DMat::from_fn(nt, nr, |i, j| m[(i, nt + j)]);
    let a = DMat::from_fn(nr, nr, |i, j| m[(nt + i, nt + j)]);
    // D⁻¹B
    let db = DMat::from_fn(nt, nr, |i, j| dinv[i] * b[(i, j)]);
    let schur = &a - &b.transpose().matmul(&db);
    let h = schur.inverse().map_err(|_| Error::SingularSchur)?;
    let dbh = db.matmul(&h);
    let mut out = DMat::zeros(n, n);
    // D⁻¹(I + B H Bᵀ D⁻¹) = D⁻¹ + (D⁻¹BH)(D⁻¹B)ᵀ
    let tl = dbh.matmul(&db.transpose());
    for i in 0..nt {
        for j in 0..nt {
            out[(i, j)] = tl[(i, j)];
        }
        out[(i, i)] += dinv[i];
        for j in 0..nr {
            out[(i, nt + j)] = -dbh[(i, j)];
            out[(nt + j, i)] = -dbh[(i, j)];
        }
    }
    for i in 0..nr {
        for j in 0..nr {
            out[(nt + i, nt + j)] = h[(i, j)];
        }
    }
    Ok(out)
}

/// Inverse of the symmetric metric `g_f W⁻¹ g_fᵀ`, falling back to the
/// minimum-norm pseudo-inverse when its real part is rank deficient. The
/// pseudo-inverse tracks the null space to first order in any perturbation so
/// it stays complex-step differentiable.
pub fn metric_inverse<S: Scalar>(m: &DMat<S>, nt: usize) -> Result<(DMat<S>, bool)> {
    let n = m.nrows();
    let re = m.re();
    let eig = SymmetricEigen::new(re.to_nalgebra());
    let smax = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if smax == 0.0 {
        return Err(Error::SingularMatrix);
    }
    let null: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i].abs() <= RANK_TOL * smax).collect();
    if null.is_empty() {
        let inv = match block_inverse(m, nt) {
            Ok(v) => v,
            Err(_) => m.inverse()?,
        };
        return Ok((inv, false));
    }
    let k = null.len();
    let z0 = DMat::from_fn(n, k, |i, j| eig.eigenvectors[(i, null[j])]);
    let z0s = DMat::<S>::from_f64(&z0);
    let mut shifted = re.clone();
    let zzt = z0.matmul(&z0.transpose());
    for i in 0..n {
        for j in 0..n {
            shifted[(i, j)] += smax * zzt[(i, j)];
        }
    }
    let sinv = DMat::<S>::from_f64(&shifted.inverse()?);
    let z = &z0s - &sinv.matmul(&m.matmul(&z0s));
    let zz = z.matmul(&z.transpose());
    let s = S::from_f64(smax);
    let reg = DMat::from_fn(n, n, |i, j| m[(i, j)] + s * zz[(i, j)]);
    let inv = &reg.inverse()? - &zz.scale(S::one() / s);
    Ok((inv, true))
}

fn weighted_jt<S: Scalar>(gf: &DMat<S>, winv: &[f64]) -> DMat<S> {
    // W⁻¹ g_fᵀ
    DMat::from_fn(gf.ncols(), gf.nrows(), |i, j| gf[(j, i)].scale(winv[i]))
}

fn trans_rows(regime: Regime) -> usize {
    regime.trans_dims()
}

/// `f̲ = −W⁻¹g_fᵀ(g_fW⁻¹g_fᵀ)⁻¹g_f f`, `λ = (g_fW⁻¹g_fᵀ)⁻¹g_f f`.
pub fn correct<S: Scalar>(regime: Regime, f: &[S], x: &[Vec3<S>], case: WeightCase) -> Result<CorrectionResult<S>> {
    let winv = weight_inverse(regime, x.len(), case)?;
    if case == WeightCase::CaseII {
        return Ok(case2_closed_form(regime, f, x));
    }
    correct_general(regime, f, x, &winv)
}

/// General path for any diagonal `W⁻¹`.
pub fn correct_general<S: Scalar>(regime: Regime, f: &[S], x: &[Vec3<S>], winv: &[f64]) -> Result<CorrectionResult<S>> {
    let gf = constraint_jacobian(regime, x);
    let wgt = weighted_jt(&gf, winv);
    let metric = gf.matmul(&wgt);
    let (minv, rank_deficient) = metric_inverse(&metric, trans_rows(regime))?;
    let g = gf.mul_vec(f);
    let lambda = minv.mul_vec(&g);
    let f_corr = wgt.mul_vec(&lambda).into_iter().map(|v| -v).collect();
    Ok(CorrectionResult { f_corr, lambda, rank_deficient })
}

/// Moment-only weights: every nodal moment receives `−m_unbalance/N`.
pub fn case2_closed_form<S: Scalar>(regime: Regime, f: &[S], x: &[Vec3<S>]) -> CorrectionResult<S> {
    let g = constraint(regime, f, x);
    let inv_n = S::from_f64(1.0 / x.len() as f64);
    let mu = Vec3([g[3], g[4], g[5]]).scale(inv_n);
    let mut f_corr = vec![S::zero(); f.len()];
    for i in 0..x.len() {
        for c in 0..3 {
            f_corr[6 * i + 3 + c] = -mu.0[c];
        }
    }
    let lambda = vec![S::zero(), S::zero(), S::zero(), mu.0[0], mu.0[1], mu.0[2]];
    CorrectionResult { f_corr, lambda, rank_deficient: true }
}

/// Correction tangent `K̲ = df̲/dx` given the preliminary tangent `K`.
pub fn correction_tangent(
    regime: Regime,
    f: &[f64],
    k: &DMat<f64>,
    x: &[Vec3<f64>],
    case: WeightCase,
    res: &CorrectionResult<f64>,
) -> Result<DMat<f64>> {
    if case == WeightCase::CaseII {
        weight_inverse(regime, x.len(), case)?;
        return Ok(case2_tangent(f, k, x));
    }
    let winv = weight_inverse(regime, x.len(), case)?;
    correction_tangent_general(regime, f, k, x, &winv, res)
}

/// `−W⁻¹[(I − g_fᵀM⁺g_fW⁻¹)M₁ + g_fᵀM⁺M₂]`, `M₂ = g_f K + g_x`.
pub fn correction_tangent_general(
    regime: Regime,
    f: &[f64],
    k: &DMat<f64>,
    x: &[Vec3<f64>],
    winv: &[f64],
    res: &CorrectionResult<f64>,
) -> Result<DMat<f64>> {
    let n = f.len();
    let nn = x.len();
    let cols = column_map(regime, nn);
    let rows = regime.constraint_rows();
    let gf = constraint_jacobian(regime, x);
    let wgt = weighted_jt(&gf, winv);
    let (minv, _) = metric_inverse(&gf.matmul(&wgt), trans_rows(regime))?;

    let mut lam = [0.0; 6];
    for (k, &r) in rows.iter().enumerate() {
        lam[r] = res.lambda[k];
    }
    let sl = spin(&Vec3([lam[3], lam[4], lam[5]]));
    let mut m1_full = DMat::zeros(6 * nn, 6 * nn);
    let ff: Vec<f64> = f.iter().zip(&res.f_corr).map(|(a, b)| a + b).collect();
    let blocks = to_blocks(regime, &ff);
    let mut gx_full = DMat::zeros(6, 6 * nn);
    for i in 0..nn {
        let sn = spin(&blocks[i].0);
        for a in 0..3 {
            for b in 0..3 {
                m1_full[(6 * i + a, 6 * i + b)] = sl.0[a][b];
                gx_full[(3 + a, 6 * i + b)] = -sn.0[a][b];
            }
        }
    }
    let m1 = m1_full.select(&cols, &cols);
    let gx = gx_full.select(rows, &cols);
    let m2 = &gf.matmul(k) + &gx;

    // P = I − g_fᵀ M⁺ g_f W⁻¹
    let gtm = gf.transpose().matmul(&minv);
    let mut p = gtm.matmul(&gf).scale(-1.0);
    for j in 0..n {
        for i in 0..n {
            p[(i, j)] *= winv[j];
        }
        p[(j, j)] += 1.0;
    }
    let inner = &p.matmul(&m1) + &gtm.matmul(&m2);
    Ok(DMat::from_fn(n, n, |i, j| -winv[i] * inner[(i, j)]))
}

/// Moment-only tangent `(−ΓK + Ψ)/N`: each node's moment rows receive minus
/// the derivative of the unbalanced moment over `N`.
pub fn case2_tangent(f: &[f64], k: &DMat<f64>, x: &[Vec3<f64>]) -> DMat<f64> {
    let nn = x.len();
    let n = 6 * nn;
    let gm = full_jacobian(x).select(&[3, 4, 5], &(0..n).collect::<Vec<_>>());
    let mut dm = gm.matmul(k);
    for (i, (ni, _)) in to_blocks(Regime::Structural, f).iter().enumerate() {
        let s = spin(ni);
        for a in 0..3 {
            for b in 0..3 {
                dm[(a, 6 * i + b)] -= s.0[a][b];
            }
        }
    }
    let mut out = DMat::zeros(n, n);
    let inv_n = 1.0 / nn as f64;
    for i in 0..nn {
        for a in 0..3 {
            for j in 0..n {
                out[(6 * i + 3 + a, j)] = -dm[(a, j)] * inv_n;
            }
        }
    }
    out
}

/// `P_linearᵀ = I − g_fᵀ(g_f g_fᵀ)⁻¹g_f`.
pub fn linear_projector_t(regime: Regime, x: &[Vec3<f64>]) -> Result<DMat<f64>> {
    let gf = constraint_jacobian(regime, x);
    let (minv, _) = metric_inverse(&gf.matmul(&gf.transpose()), trans_rows(regime))?;
    let n = gf.ncols();
    Ok(&DMat::identity(n) - &gf.transpose().matmul(&minv).matmul(&gf))
}

/// Element diameter used to nondimensionalize equilibrium residuals.
pub fn diameter(x: &[Vec3<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for a in x {
        for b in x {
            d = d.max((*a - *b).norm());
        }
    }
    d
}

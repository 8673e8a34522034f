//! Element-independent co-rotational kinematics: local displacements, the
//! preliminary force (method S), the projected force (method SP) with a
//! numerically built spin-fitter, and consistent tangents by complex step.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::correction::{self, WeightCase};
use crate::csfd::PerturbSpec;
use crate::elements::{
    hex8_grad, local_stiffness, quad4_grad, tri3_grad, ElementKind, Material, Regime,
};
use crate::error::{Error, Result};
use crate::frames::{self, FrameResult, FrameStrategy};
use crate::linalg::{DMat, Mat3, Vec3};
use crate::rotkit::{exp_rotvec, log_rotvec, skew_axial, spin};
use crate::scalar::{lift, Scalar};

/// Local rotations beyond this trigger a step cut.
pub const MAX_LOCAL_ROTATION: f64 = FRAC_PI_2 - 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    S,
    SP,
    SC1,
    SC2,
    SC3,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::S, Method::SP, Method::SC1, Method::SC2, Method::SC3];

    pub fn name(self) -> &'static str {
        match self {
            Method::S => "s",
            Method::SP => "sp",
            Method::SC1 => "sc1",
            Method::SC2 => "sc2",
            Method::SC3 => "sc3",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName { what: "method", name: s.to_string() })
    }

    pub fn weight_case(self) -> Option<WeightCase> {
        match self {
            Method::SC1 => Some(WeightCase::CaseI),
            Method::SC2 => Some(WeightCase::CaseII),
            Method::SC3 => Some(WeightCase::CaseIII),
            _ => None,
        }
    }

    pub fn is_corrected(self) -> bool {
        self.weight_case().is_some()
    }

    /// Whether the method can be used in a regime.
    pub fn supports(self, regime: Regime) -> bool {
        !matches!(self, Method::SC2 | Method::SC3) || regime.has_rotations()
    }
}

/// Force path whose tangent is differentiated numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcePath {
    S,
    SP,
}

/// Element data fixed at the reference configuration.
#[derive(Debug, Clone)]
pub struct ElementSetup {
    pub kind: ElementKind,
    pub strategy: FrameStrategy,
    pub material: Material,
    /// Reference global node positions.
    pub x0: Vec<Vec3<f64>>,
    /// Initial frame.
    pub r0: Mat3<f64>,
    /// Initial local coordinates about the initial origin.
    pub xbar0: Vec<Vec3<f64>>,
    pub kbar: DMat<f64>,
    /// Reference shape-function gradients at the element centre (polar frame).
    grad0: Vec<Vec3<f64>>,
    /// Element diameter.
    pub diam: f64,
}

impl ElementSetup {
    pub fn new(
        kind: ElementKind,
        strategy: FrameStrategy,
        material: Material,
        x0: Vec<Vec3<f64>>,
        orientation: Option<Vec3<f64>>,
    ) -> Result<Self> {
        strategy.check(kind)?;
        if x0.len() != kind.node_count() {
            return Err(Error::DegenerateGeometry(format!(
                "{} needs {} nodes, got {}",
                kind.name(),
                kind.node_count(),
                x0.len()
            )));
        }
        let planar = kind.regime() == Regime::Plane;
        if planar && x0.iter().any(|p| p.z() != 0.0) {
            return Err(Error::DegenerateGeometry("plane elements must lie in z = 0".into()));
        }
        let (r0, o0) = match strategy {
            FrameStrategy::LeastSquare => (Mat3::identity(), centroid(&x0)),
            FrameStrategy::PolarDecomp => (Mat3::identity(), x0[0]),
            FrameStrategy::BeamFrame => (frames::beam_initial_frame(&x0[0], &x0[1], orientation)?, x0[0]),
            _ => {
                let f = frame_from(kind, strategy, &x0, &[], &Mat3::identity(), &[], &[])?;
                (f.r, f.origin)
            }
        };
        let xbar0: Vec<Vec3<f64>> = x0.iter().map(|p| r0.tr_mul_vec(&(*p - o0))).collect();
        let kbar = local_stiffness(kind, &xbar0, &material)?;
        let grad0 = if strategy == FrameStrategy::PolarDecomp { reference_gradients(kind, &x0)? } else { Vec::new() };
        let mut diam: f64 = 0.0;
        for a in &x0 {
            for b in &x0 {
                diam = diam.max((*a - *b).norm());
            }
        }
        Ok(ElementSetup { kind, strategy, material, x0, r0, xbar0, kbar, grad0, diam })
    }

    pub fn regime(&self) -> Regime {
        self.kind.regime()
    }

    pub fn ndofs(&self) -> usize {
        self.kind.ndofs()
    }

    pub fn node_count(&self) -> usize {
        self.kind.node_count()
    }

    pub fn reference_state(&self) -> ElementGlobalState<f64> {
        let triads = if self.regime().has_rotations() { vec![Mat3::identity(); self.node_count()] } else { Vec::new() };
        ElementGlobalState { x: self.x0.clone(), triads }
    }

    pub fn frame<S: Scalar>(&self, st: &ElementGlobalState<S>) -> Result<FrameResult<S>> {
        frame_from(self.kind, self.strategy, &st.x, &st.triads, &self.r0, &self.xbar0, &self.grad0)
    }
}

fn centroid(x: &[Vec3<f64>]) -> Vec3<f64> {
    let mut c = Vec3::zero();
    for p in x {
        c += *p;
    }
    c.scale(1.0 / x.len() as f64)
}

fn reference_gradients(kind: ElementKind, x0: &[Vec3<f64>]) -> Result<Vec<Vec3<f64>>> {
    let (dn, dim) = match kind {
        ElementKind::Cst3 => (tri3_grad([1.0 / 3.0; 2]), 2),
        ElementKind::Quad4 => (quad4_grad([0.0; 2]), 2),
        ElementKind::Hex8 => (hex8_grad([0.0; 3]), 3),
        k => return Err(Error::IncompatibleFrame { strategy: "PolarDecomp".into(), kind: k.name().into() }),
    };
    let mut j = Mat3::zero();
    for (p, d) in x0.iter().zip(&dn) {
        for a in 0..dim {
            for b in 0..dim {
                j.0[a][b] += d[a] * p.0[b];
            }
        }
    }
    if dim == 2 {
        j.0[2][2] = 1.0;
    }
    let inv = j.inverse().map_err(|_| Error::DegenerateGeometry("singular reference Jacobian".into()))?;
    Ok(dn.iter().map(|d| inv.mul_vec(&Vec3(*d))).collect())
}

fn frame_from<S: Scalar>(
    kind: ElementKind,
    strategy: FrameStrategy,
    x: &[Vec3<S>],
    triads: &[Mat3<S>],
    r0: &Mat3<f64>,
    xbar0: &[Vec3<f64>],
    grad0: &[Vec3<f64>],
) -> Result<FrameResult<S>> {
    let planar = kind.regime() == Regime::Plane;
    match strategy {
        FrameStrategy::SideAlign2D => frames::frame_side_2d(&x[0], &x[1]),
        FrameStrategy::LeastSquare => frames::frame_lsq(xbar0, x, planar),
        FrameStrategy::PolarDecomp => {
            let mut f = Mat3::zero();
            for (p, g) in x.iter().zip(grad0) {
                f = f + p.outer(&Vec3::from_f64(*g));
            }
            if planar {
                f.0[2][2] = S::one();
            }
            frames::frame_polar(&f, planar, x[0])
        }
        FrameStrategy::SideAlign3D => frames::frame_side_3d(&x[0], &x[1], &x[2]),
        FrameStrategy::BeamFrame => frames::frame_beam(&x[0], &x[1], &triads[0], &triads[1], r0),
        FrameStrategy::QuadShellFrame => frames::frame_quadshell(x),
    }
}

/// Current nodal positions and (structural) nodal triads of one element.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementGlobalState<S = f64> {
    pub x: Vec<Vec3<S>>,
    pub triads: Vec<Mat3<S>>,
}

impl<S: Scalar> ElementGlobalState<S> {
    pub fn lift(&self) -> ElementGlobalState<Complex<S>> {
        ElementGlobalState {
            x: self.x.iter().map(|p| Vec3(p.0.map(lift))).collect(),
            triads: self.triads.iter().map(|t| Mat3(t.0.map(|r| r.map(lift)))).collect(),
        }
    }

    /// Perturb global element DOF `j` (regime layout). Rotational DOFs are
    /// perturbed multiplicatively: `Rᵢ ← exp(spin(δ e_k)) Rᵢ`.
    pub fn perturbed(&self, regime: Regime, j: usize, delta: S) -> Self {
        let dpn = regime.dofs_per_node();
        let (node, c) = (j / dpn, j % dpn);
        let mut st = self.clone();
        if c < 3 {
            st.x[node].0[c] += delta;
        } else {
            let w = Vec3::unit(c - 3).scale(delta);
            st.triads[node] = exp_rotvec(&w) * st.triads[node];
        }
        st
    }
}

#[derive(Debug, Clone)]
pub struct LocalState<S = f64> {
    pub frame: FrameResult<S>,
    /// Local DOF vector in the regime layout.
    pub v: Vec<S>,
    /// Current local node coordinates `Rᵀ(xᵢ − o)`.
    pub xbar: Vec<Vec3<S>>,
}

pub fn local_state<S: Scalar>(setup: &ElementSetup, st: &ElementGlobalState<S>) -> Result<LocalState<S>> {
    let frame = setup.frame(st)?;
    let regime = setup.regime();
    let dpn = regime.dofs_per_node();
    let mut v = vec![S::zero(); setup.ndofs()];
    let mut xbar = Vec::with_capacity(st.x.len());
    for (i, p) in st.x.iter().enumerate() {
        let xb = frame.r.tr_mul_vec(&(*p - frame.origin));
        let u = xb - Vec3::from_f64(setup.xbar0[i]);
        for c in 0..regime.trans_dims() {
            v[i * dpn + c] = u.0[c];
        }
        xbar.push(xb);
        if regime.has_rotations() {
            let rb = frame.r.transpose() * st.triads[i] * Mat3::from_f64(setup.r0);
            let c = (rb.re().trace() - 1.0) * 0.5;
            let angle = c.clamp(-1.0, 1.0).acos();
            if angle > MAX_LOCAL_ROTATION {
                return Err(Error::StepTooLarge { angle });
            }
            let th = log_rotvec(&rb).map_err(|_| Error::StepTooLarge { angle })?;
            for c in 0..3 {
                v[i * dpn + 3 + c] = th.0[c];
            }
        }
    }
    Ok(LocalState { frame, v, xbar })
}

/// Split a regime-layout vector into per-node `(n, m)` 3-vectors.
pub fn to_blocks<S: Scalar>(regime: Regime, f: &[S]) -> Vec<(Vec3<S>, Vec3<S>)> {
    let comps = regime.node_components();
    f.chunks(comps.len())
        .map(|c| {
            let mut b = [S::zero(); 6];
            for (k, &p) in comps.iter().enumerate() {
                b[p] = c[k];
            }
            (Vec3([b[0], b[1], b[2]]), Vec3([b[3], b[4], b[5]]))
        })
        .collect()
}

pub fn from_blocks<S: Scalar>(regime: Regime, blocks: &[(Vec3<S>, Vec3<S>)]) -> Vec<S> {
    let comps = regime.node_components();
    let mut out = Vec::with_capacity(blocks.len() * comps.len());
    for (n, m) in blocks {
        for &p in comps {
            out.push(if p < 3 { n.0[p] } else { m.0[p - 3] });
        }
    }
    out
}

/// `diag(R)·f̄`
pub fn rotate_to_global<S: Scalar>(regime: Regime, r: &Mat3<S>, fbar: &[S]) -> Vec<S> {
    let b: Vec<_> = to_blocks(regime, fbar).iter().map(|(n, m)| (r.mul_vec(n), r.mul_vec(m))).collect();
    from_blocks(regime, &b)
}

fn local_force<S: Scalar>(setup: &ElementSetup, v: &[S]) -> Vec<S> {
    let n = setup.ndofs();
    let k = &setup.kbar;
    (0..n)
        .map(|i| {
            let mut s = S::zero();
            for (j, vj) in v.iter().enumerate() {
                let kij = k[(i, j)];
                if kij != 0.0 {
                    s += vj.scale(kij);
                }
            }
            s
        })
        .collect()
}

/// Preliminary force `diag(R)·K̄·v̄`.
pub fn force_s<S: Scalar>(setup: &ElementSetup, st: &ElementGlobalState<S>) -> Result<Vec<S>> {
    let ls = local_state(setup, st)?;
    let fbar = local_force(setup, &ls.v);
    Ok(rotate_to_global(setup.regime(), &ls.frame.r, &fbar))
}

/// Spin-lever matrix `S̄` (DOFs × free spin components).
pub fn spin_lever<S: Scalar>(regime: Regime, xbar: &[Vec3<S>]) -> DMat<S> {
    let dpn = regime.dofs_per_node();
    let sd = regime.spin_dims();
    let mut m = DMat::zeros(xbar.len() * dpn, sd.len());
    for (i, xb) in xbar.iter().enumerate() {
        let st = spin(xb).transpose();
        for r in 0..regime.trans_dims() {
            for (c, &k) in sd.iter().enumerate() {
                m[(i * dpn + r, c)] = st.0[r][k];
            }
        }
        if regime.has_rotations() {
            for k in 0..3 {
                m[(i * dpn + 3 + k, k)] = S::one();
            }
        }
    }
    m
}

/// Spin-fitter `Ḡ = ∂ω̄/∂v̄`, one complex-step frame evaluation per DOF.
pub fn spin_fitter<S: Scalar>(setup: &ElementSetup, st: &ElementGlobalState<S>) -> Result<DMat<S>> {
    let h = PerturbSpec::default().h;
    let regime = setup.regime();
    let sd = regime.spin_dims();
    let base = st.lift();
    let r = setup.frame(st)?.r;
    let n = setup.ndofs();
    let mut g = DMat::zeros(sd.len(), n);
    let hc = Complex::new(S::zero(), S::from_f64(h));
    for j in 0..n {
        let pert = base.perturbed(regime, j, hc);
        let rc = setup.frame(&pert)?.r;
        let dr = Mat3(rc.0.map(|row| row.map(|c| c.im.scale(1.0 / h))));
        let w = skew_axial(&(r.transpose() * dr));
        for (a, &k) in sd.iter().enumerate() {
            g[(a, j)] = w.0[k];
        }
    }
    // ∂ū/∂u = Rᵀ per node block, so Ḡ = (∂ω̄/∂u)·diag(R).
    let dpn = regime.dofs_per_node();
    let td = regime.trans_dims();
    let mut out = DMat::zeros(sd.len(), n);
    for a in 0..sd.len() {
        for node in 0..setup.node_count() {
            for (off, dims) in [(0usize, td), (3usize, if regime.has_rotations() { 3 } else { 0 })] {
                for c in 0..dims {
                    let mut s = S::zero();
                    for b in 0..dims {
                        s += g[(a, node * dpn + off + b)] * r.0[b][c];
                    }
                    out[(a, node * dpn + off + c)] = s;
                }
            }
        }
    }
    Ok(out)
}

/// Projected force `diag(R)·(I − S̄Ḡ)ᵀ·K̄·v̄`.
pub fn force_sp<S: Scalar>(setup: &ElementSetup, st: &ElementGlobalState<S>) -> Result<Vec<S>> {
    let ls = local_state(setup, st)?;
    let g = spin_fitter(setup, st)?;
    let sl = spin_lever(setup.regime(), &ls.xbar);
    let fbar = local_force(setup, &ls.v);
    let m = sl.tr_mul_vec(&fbar);
    let corr = g.tr_mul_vec(&m);
    let proj: Vec<S> = fbar.iter().zip(&corr).map(|(a, b)| *a - *b).collect();
    Ok(rotate_to_global(setup.regime(), &ls.frame.r, &proj))
}

pub fn force<S: Scalar>(path: ForcePath, setup: &ElementSetup, st: &ElementGlobalState<S>) -> Result<Vec<S>> {
    match path {
        ForcePath::S => force_s(setup, st),
        ForcePath::SP => force_sp(setup, st),
    }
}

/// Consistent tangent of a force path by complex step over the element's
/// global DOFs (multiplicative perturbation on rotations).
pub fn tangent(path: ForcePath, setup: &ElementSetup, st: &ElementGlobalState<f64>) -> Result<DMat<f64>> {
    let h = PerturbSpec::default().h;
    let n = setup.ndofs();
    let regime = setup.regime();
    let base = st.lift();
    let mut k = DMat::zeros(n, n);
    for j in 0..n {
        let pert = base.perturbed(regime, j, Complex::new(0.0, h));
        let f = force(path, setup, &pert)?;
        for (i, v) in f.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteResult { column: Some(j) });
            }
            k[(i, j)] = v.im / h;
        }
    }
    Ok(k)
}

/// `Σ (xᵢ × nᵢ + mᵢ)`
pub fn unbalanced_moment<S: Scalar>(regime: Regime, f: &[S], x: &[Vec3<S>]) -> Vec3<S> {
    let mut m = Vec3::zero();
    for ((n, mi), xi) in to_blocks(regime, f).iter().zip(x) {
        m += xi.cross(n) + *mi;
    }
    m
}

/// Final element force for a method, evaluable on perturbed states.
pub fn element_force<S: Scalar>(method: Method, setup: &ElementSetup, st: &ElementGlobalState<S>) -> Result<Vec<S>> {
    match method {
        Method::S => force_s(setup, st),
        Method::SP => force_sp(setup, st),
        _ => {
            let f = force_s(setup, st)?;
            let case = method.weight_case().expect("corrected method");
            let c = correction::correct(setup.regime(), &f, &st.x, case)?;
            Ok(f.iter().zip(&c.f_corr).map(|(a, b)| *a + *b).collect())
        }
    }
}

/// Complex-step Jacobian of [`element_force`] for any method.
pub fn element_tangent_csfd(method: Method, setup: &ElementSetup, st: &ElementGlobalState<f64>) -> Result<DMat<f64>> {
    let h = PerturbSpec::default().h;
    let n = setup.ndofs();
    let regime = setup.regime();
    let base = st.lift();
    let mut k = DMat::zeros(n, n);
    for j in 0..n {
        let pert = base.perturbed(regime, j, Complex::new(0.0, h));
        let f = element_force(method, setup, &pert)?;
        for (i, v) in f.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteResult { column: Some(j) });
            }
            k[(i, j)] = v.im / h;
        }
    }
    Ok(k)
}

/// Force, tangent and equilibrium diagnostics of one element.
#[derive(Debug, Clone)]
pub struct ElementResponse {
    pub f: Vec<f64>,
    pub k: DMat<f64>,
    /// Unbalanced moment norm of the preliminary force.
    pub unbalanced_moment: f64,
    /// `‖g(f, x)‖ / (1 + ‖f‖∞·diam)` for the final force.
    pub equilibrium_residual: f64,
    pub rank_deficient: bool,
}

pub fn element_response(method: Method, setup: &ElementSetup, st: &ElementGlobalState<f64>) -> Result<ElementResponse> {
    let regime = setup.regime();
    let (f, k, fs, rank_deficient) = match method {
        Method::S => {
            let f = force_s(setup, st)?;
            (f.clone(), tangent(ForcePath::S, setup, st)?, f, false)
        }
        Method::SP => {
            let fs = force_s(setup, st)?;
            (force_sp(setup, st)?, tangent(ForcePath::SP, setup, st)?, fs, false)
        }
        _ => {
            let case = method.weight_case().expect("corrected method");
            let fs = force_s(setup, st)?;
            let ks = tangent(ForcePath::S, setup, st)?;
            let c = correction::correct(regime, &fs, &st.x, case)?;
            let kc = correction::correction_tangent(regime, &fs, &ks, &st.x, case, &c)?;
            let f = fs.iter().zip(&c.f_corr).map(|(a, b)| a + b).collect();
            (f, &ks + &kc, fs, c.rank_deficient)
        }
    };
    let unbalanced_moment = unbalanced_moment(regime, &fs, &st.x).norm();
    let g = correction::constraint(regime, &f, &st.x);
    let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let finf = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(ElementResponse {
        f,
        k,
        unbalanced_moment,
        equilibrium_residual: gn / (1.0 + finf * setup.diam),
        rank_deficient,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::Section;

    fn bar() -> ElementSetup {
        let mat = Material { section: Some(Section::bar(2.0)), ..Material::plate(100.0, 0.3, 1.0) };
        ElementSetup::new(
            ElementKind::Bar2,
            FrameStrategy::SideAlign2D,
            mat,
            vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(4.0, 0.0, 0.0)],
            None,
        )
        .unwrap()
    }

    #[test]
    fn stretched_bar() {
        let b = bar();
        let mut st = b.reference_state();
        assert!(force_s(&b, &st).unwrap().iter().all(|v| *v == 0.0));
        st.x[1].0[0] += 0.1;
        let ls = local_state(&b, &st).unwrap();
        assert!((ls.v[2] - 0.1).abs() < 1e-15 && ls.v[3].abs() < 1e-15);
        let f = force_s(&b, &st).unwrap();
        let n = 100.0 * 2.0 * 0.1 / 4.0;
        assert!((f[0] + n).abs() < 1e-12 && (f[2] - n).abs() < 1e-12);
    }

    #[test]
    fn unbalanced_moment_definitions() {
        let x = vec![Vec3::new(1.0, 0.0, 0.0)];
        let f = vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        assert_eq!(unbalanced_moment(Regime::Structural, &f, &x), Vec3::new(0.0, -1.0, 0.0));
        let x = vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(2.0, 1.0, 0.0)];
        let f = vec![-2.0, -1.0, 2.0, 1.0];
        assert_eq!(unbalanced_moment(Regime::Plane, &f, &x), Vec3::zero());
    }

    #[test]
    fn method_names() {
        for m in Method::ALL {
            assert_eq!(Method::parse(m.name()).unwrap(), m);
        }
        assert!(Method::parse("x").is_err());
        assert!(!Method::SC2.supports(Regime::Solid));
    }
}

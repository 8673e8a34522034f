//! Seeded random elements, rigid motions and deformed states for invariant
//! checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corot::{ElementGlobalState, ElementSetup};
use crate::elements::{ElementKind, Material, Regime, Section};
use crate::error::Result;
use crate::frames::FrameStrategy;
use crate::linalg::{Mat3, Vec3};
use crate::rotkit::exp_rotvec;

/// Every `(kind, strategy)` pair the frame module accepts.
pub fn compatible_pairs() -> Vec<(ElementKind, FrameStrategy)> {
    let mut out = Vec::new();
    for k in ElementKind::ALL {
        for s in FrameStrategy::ALL {
            if s.is_compatible(k) {
                out.push((k, s));
            }
        }
    }
    out
}

/// A rigid motion `x ↦ Q x + c`.
#[derive(Debug, Clone, Copy)]
pub struct RigidMotion {
    pub q: Mat3<f64>,
    pub c: Vec3<f64>,
}

impl RigidMotion {
    pub fn apply(&self, p: &Vec3<f64>) -> Vec3<f64> {
        self.q.mul_vec(p) + self.c
    }
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, a: f64, b: f64) -> f64 {
        self.rng.gen_range(a..b)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn vector(&mut self, scale: f64) -> Vec3<f64> {
        Vec3::new(self.uniform(-scale, scale), self.uniform(-scale, scale), self.uniform(-scale, scale))
    }

    pub fn values(&mut self, n: usize, scale: f64) -> Vec<f64> {
        (0..n).map(|_| self.uniform(-scale, scale)).collect()
    }

    /// Rotation with a uniformly random axis and angle below `max_angle`.
    pub fn rotation(&mut self, max_angle: f64) -> Mat3<f64> {
        let axis = loop {
            let v = self.vector(1.0);
            let n = v.norm();
            if n > 0.1 && n <= 1.0 {
                break v.scale(1.0 / n);
            }
        };
        exp_rotvec(&axis.scale(self.uniform(-max_angle, max_angle)))
    }

    pub fn rotation_z(&mut self, max_angle: f64) -> Mat3<f64> {
        exp_rotvec(&Vec3::new(0.0, 0.0, self.uniform(-max_angle, max_angle)))
    }

    /// Random rigid motion compatible with a regime (plane: about z only).
    pub fn rigid_motion(&mut self, regime: Regime) -> RigidMotion {
        if regime == Regime::Plane {
            let q = self.rotation_z(3.0);
            RigidMotion { q, c: Vec3::new(self.uniform(-5.0, 5.0), self.uniform(-5.0, 5.0), 0.0) }
        } else {
            RigidMotion { q: self.rotation(3.0), c: self.vector(5.0) }
        }
    }

    /// Random material for a kind, `E ∈ [1e2, 1e4]`.
    pub fn material(&mut self, kind: ElementKind) -> Material {
        let e = self.uniform(1e2, 1e4);
        let nu = self.uniform(0.0, 0.4);
        match kind {
            ElementKind::Bar2 => Material { section: Some(Section::bar(self.uniform(0.5, 2.0))), ..Material::plate(e, nu, 1.0) },
            ElementKind::Beam2 => Material::beam(e, nu, Section::rectangle(self.uniform(0.05, 0.2), self.uniform(0.05, 0.2))),
            ElementKind::Hex8 => Material::solid(e, nu),
            ElementKind::Cst3 | ElementKind::Quad4 => Material::plate(e, nu, self.uniform(0.1, 1.0)),
            ElementKind::TriShell3 | ElementKind::QuadShell4 => Material::plate(e, nu, self.uniform(0.02, 0.1)),
        }
    }

    /// Reference node coordinates: a jittered canonical shape, scaled,
    /// rotated and shifted (plane kinds stay in `z = 0`).
    pub fn reference_geometry(&mut self, kind: ElementKind) -> Vec<Vec3<f64>> {
        let scale = self.uniform(0.5, 2.0);
        let j = 0.12;
        let base: Vec<[f64; 3]> = match kind {
            ElementKind::Bar2 | ElementKind::Beam2 => vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
            ElementKind::Cst3 | ElementKind::TriShell3 => vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.35, 0.9, 0.0]],
            ElementKind::Quad4 | ElementKind::QuadShell4 => {
                vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]]
            }
            ElementKind::Hex8 => crate::elements::HEX8_CORNERS
                .iter()
                .map(|c| [0.5 * (c[0] + 1.0), 0.5 * (c[1] + 1.0), 0.5 * (c[2] + 1.0)])
                .collect(),
        };
        let solid = kind == ElementKind::Hex8;
        let pts: Vec<Vec3<f64>> = base
            .iter()
            .map(|p| {
                let dz = if solid { self.uniform(-j, j) } else { 0.0 };
                Vec3::new(p[0] + self.uniform(-j, j), p[1] + self.uniform(-j, j), p[2] + dz).scale(scale)
            })
            .collect();
        let motion = match kind.regime() {
            Regime::Plane => self.rigid_motion(Regime::Plane),
            _ => self.rigid_motion(Regime::Structural),
        };
        pts.iter().map(|p| motion.apply(p)).collect()
    }

    pub fn element(&mut self, kind: ElementKind, strategy: FrameStrategy) -> Result<ElementSetup> {
        let mat = self.material(kind);
        let x0 = self.reference_geometry(kind);
        ElementSetup::new(kind, strategy, mat, x0, None)
    }

    /// State after a rigid motion; triads equal `Q`.
    pub fn rigid_state(&mut self, setup: &ElementSetup) -> (ElementGlobalState<f64>, RigidMotion) {
        let m = self.rigid_motion(setup.regime());
        let x = setup.x0.iter().map(|p| m.apply(p)).collect();
        let triads = if setup.regime().has_rotations() { vec![m.q; setup.node_count()] } else { Vec::new() };
        (ElementGlobalState { x, triads }, m)
    }

    /// Rigid motion plus a random deformation of relative size `strain`
    /// (nodal offsets `strain·diam`, nodal rotations up to `strain`).
    pub fn deformed_state(&mut self, setup: &ElementSetup, strain: f64) -> ElementGlobalState<f64> {
        let m = self.rigid_motion(setup.regime());
        let planar = setup.regime() == Regime::Plane;
        let d = strain * setup.diam;
        let x = setup
            .x0
            .iter()
            .map(|p| {
                let mut off = self.vector(d);
                if planar {
                    off.0[2] = 0.0;
                }
                m.apply(&(*p + off))
            })
            .collect();
        let triads = if setup.regime().has_rotations() {
            (0..setup.node_count()).map(|_| m.q * exp_rotvec(&self.vector(strain))).collect()
        } else {
            Vec::new()
        };
        ElementGlobalState { x, triads }
    }

    /// Random element force and node positions in a regime layout.
    pub fn force_and_positions(&mut self, regime: Regime, nodes: usize) -> (Vec<f64>, Vec<Vec3<f64>>) {
        let f = self.values(nodes * regime.dofs_per_node(), 10.0);
        let x = (0..nodes)
            .map(|_| {
                let mut p = self.vector(3.0);
                if regime == Regime::Plane {
                    p.0[2] = 0.0;
                }
                p
            })
            .collect();
        (f, x)
    }
}

//! Linear element stiffness matrices expressed in the element's initial local
//! frame, plus the DOF layout conventions shared with the rest of the crate.

mod beam;
mod continuum;
mod plate;
mod shell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DMat, Vec3};

pub use continuum::{hex8_grad, HEX8_CORNERS, plane_stress_d, quad4_grad, solid_d, tri3_grad};
pub use plate::discrete_kirchhoff;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    Bar2,
    Cst3,
    Quad4,
    Hex8,
    Beam2,
    TriShell3,
    QuadShell4,
}

/// Uniform per-node DOF count of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Plane,
    Solid,
    Structural,
}

impl Regime {
    pub fn dofs_per_node(self) -> usize {
        match self {
            Regime::Plane => 2,
            Regime::Solid => 3,
            Regime::Structural => 6,
        }
    }

    pub fn trans_dims(self) -> usize {
        match self {
            Regime::Plane => 2,
            _ => 3,
        }
    }

    pub fn has_rotations(self) -> bool {
        self == Regime::Structural
    }

    /// Local spin components that are free in this regime.
    pub fn spin_dims(self) -> &'static [usize] {
        match self {
            Regime::Plane => &[2],
            _ => &[0, 1, 2],
        }
    }

    /// Rows of the six-row self-balance constraint retained in this regime.
    pub fn constraint_rows(self) -> &'static [usize] {
        match self {
            Regime::Plane => &[0, 1, 5],
            _ => &[0, 1, 2, 3, 4, 5],
        }
    }

    /// Positions within a six-component node block `[n, m]` used by this regime.
    pub fn node_components(self) -> &'static [usize] {
        match self {
            Regime::Plane => &[0, 1],
            Regime::Solid => &[0, 1, 2],
            Regime::Structural => &[0, 1, 2, 3, 4, 5],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::Plane => "plane",
            Regime::Solid => "solid",
            Regime::Structural => "structural",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofLabel {
    Ux,
    Uy,
    Uz,
    Rx,
    Ry,
    Rz,
}

impl DofLabel {
    pub const ALL: [DofLabel; 6] = [DofLabel::Ux, DofLabel::Uy, DofLabel::Uz, DofLabel::Rx, DofLabel::Ry, DofLabel::Rz];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        ["ux", "uy", "uz", "rx", "ry", "rz"][self as usize]
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.name() == s)
    }
}

impl ElementKind {
    pub const ALL: [ElementKind; 7] = [
        ElementKind::Bar2,
        ElementKind::Cst3,
        ElementKind::Quad4,
        ElementKind::Hex8,
        ElementKind::Beam2,
        ElementKind::TriShell3,
        ElementKind::QuadShell4,
    ];

    pub fn node_count(self) -> usize {
        match self {
            ElementKind::Bar2 | ElementKind::Beam2 => 2,
            ElementKind::Cst3 | ElementKind::TriShell3 => 3,
            ElementKind::Quad4 | ElementKind::QuadShell4 => 4,
            ElementKind::Hex8 => 8,
        }
    }

    pub fn regime(self) -> Regime {
        match self {
            ElementKind::Bar2 | ElementKind::Cst3 | ElementKind::Quad4 => Regime::Plane,
            ElementKind::Hex8 => Regime::Solid,
            _ => Regime::Structural,
        }
    }

    pub fn dofs_per_node(self) -> usize {
        self.regime().dofs_per_node()
    }

    pub fn ndofs(self) -> usize {
        self.node_count() * self.dofs_per_node()
    }

    /// Zero eigenvalues of the local stiffness: rigid modes only, since every
    /// kind here is free of spurious mechanisms.
    pub fn zero_modes(self) -> usize {
        match self.regime() {
            Regime::Plane => 3,
            _ => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementKind::Bar2 => "Bar2",
            ElementKind::Cst3 => "Cst3",
            ElementKind::Quad4 => "Quad4",
            ElementKind::Hex8 => "Hex8",
            ElementKind::Beam2 => "Beam2",
            ElementKind::TriShell3 => "TriShell3",
            ElementKind::QuadShell4 => "QuadShell4",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(s))
    }
}

/// Beam cross-section constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Section {
    #[serde(rename = "A")]
    pub area: f64,
    #[serde(rename = "Iy")]
    pub iy: f64,
    #[serde(rename = "Iz")]
    pub iz: f64,
    #[serde(rename = "J")]
    pub j: f64,
}

impl Section {
    pub fn rectangle(b: f64, h: f64) -> Self {
        let (a, c) = if b >= h { (b, h) } else { (h, b) };
        // Saint-Venant torsion constant, series approximation.
        let j = a * c.powi(3) * (1.0 / 3.0 - 0.21 * c / a * (1.0 - c.powi(4) / (12.0 * a.powi(4))));
        Section { area: b * h, iy: b * h.powi(3) / 12.0, iz: h * b.powi(3) / 12.0, j }
    }

    /// Bar with only an area.
    pub fn bar(area: f64) -> Self {
        Section { area, iy: 0.0, iz: 0.0, j: 0.0 }
    }
}

pub const DEFAULT_DRILL_FACTOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub e: f64,
    pub nu: f64,
    /// Plane and shell thickness.
    pub thickness: f64,
    /// Bar and beam section.
    pub section: Option<Section>,
    /// Drilling stiffness relative to the largest bending diagonal (shells).
    pub drill_factor: f64,
}

impl Material {
    pub fn plate(e: f64, nu: f64, thickness: f64) -> Self {
        Material { e, nu, thickness, section: None, drill_factor: DEFAULT_DRILL_FACTOR }
    }

    pub fn solid(e: f64, nu: f64) -> Self {
        Material { e, nu, thickness: 0.0, section: None, drill_factor: DEFAULT_DRILL_FACTOR }
    }

    pub fn beam(e: f64, nu: f64, section: Section) -> Self {
        Material { e, nu, thickness: 0.0, section: Some(section), drill_factor: DEFAULT_DRILL_FACTOR }
    }

    pub fn shear_modulus(&self) -> f64 {
        self.e / (2.0 * (1.0 + self.nu))
    }

    pub fn validate(&self, kind: ElementKind) -> Result<()> {
        if !(self.e > 0.0 && self.e.is_finite()) {
            return Err(Error::InvalidMaterial(format!("E must be positive, got {}", self.e)));
        }
        if !(self.nu > -1.0 && self.nu < 0.5) {
            return Err(Error::InvalidMaterial(format!("nu must lie in (-1, 0.5), got {}", self.nu)));
        }
        match kind {
            ElementKind::Bar2 | ElementKind::Beam2 => {
                let s = self.section.ok_or_else(|| Error::InvalidMaterial(format!("{} needs a section", kind.name())))?;
                if !(s.area > 0.0) {
                    return Err(Error::InvalidMaterial("section area must be positive".into()));
                }
                if kind == ElementKind::Beam2 && !(s.iy > 0.0 && s.iz > 0.0 && s.j > 0.0) {
                    return Err(Error::InvalidMaterial("beam section needs positive Iy, Iz and J".into()));
                }
            }
            ElementKind::Hex8 => {}
            _ => {
                if !(self.thickness > 0.0) {
                    return Err(Error::InvalidMaterial(format!("{} needs a positive thickness", kind.name())));
                }
            }
        }
        if !(self.drill_factor >= 0.0) {
            return Err(Error::InvalidMaterial("drill factor must be non-negative".into()));
        }
        Ok(())
    }
}

/// Per-node DOF labels, node-major.
pub fn dof_layout(kind: ElementKind) -> Vec<DofLabel> {
    let per: &[DofLabel] = match kind.regime() {
        Regime::Plane => &DofLabel::ALL[..2],
        Regime::Solid => &DofLabel::ALL[..3],
        Regime::Structural => &DofLabel::ALL,
    };
    (0..kind.node_count()).flat_map(|_| per.iter().copied()).collect()
}

/// Local stiffness from node coordinates in the initial local frame. Plane and
/// shell kinds use only the in-plane components; beams and bars use the local
/// x axis as their axis.
pub fn local_stiffness(kind: ElementKind, geometry: &[Vec3<f64>], mat: &Material) -> Result<DMat<f64>> {
    if geometry.len() != kind.node_count() {
        return Err(Error::DegenerateGeometry(format!(
            "{} needs {} nodes, got {}",
            kind.name(),
            kind.node_count(),
            geometry.len()
        )));
    }
    mat.validate(kind)?;
    let xy: Vec<[f64; 2]> = geometry.iter().map(|p| [p.0[0], p.0[1]]).collect();
    match kind {
        ElementKind::Bar2 => beam::bar2(geometry, mat),
        ElementKind::Beam2 => beam::beam2(geometry, mat),
        ElementKind::Cst3 => continuum::cst3(&xy, mat),
        ElementKind::Quad4 => continuum::quad4(&xy, mat),
        ElementKind::Hex8 => continuum::hex8(geometry, mat),
        ElementKind::TriShell3 | ElementKind::QuadShell4 => shell::flat_shell(&xy, mat),
    }
}

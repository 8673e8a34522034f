//! JSON model files.
//!
//! ```json
//! {
//!   "regime": "plane",
//!   "nodes": [[0, 0], [1, 0], [0, 1]],
//!   "elements": [{"kind": "Cst3", "nodes": [0, 1, 2], "E": 1000, "nu": 0.3,
//!                 "thickness": 1, "frame": "polar"}],
//!   "fixed": [{"node": 0, "dofs": ["ux", "uy"], "value": 0}],
//!   "loads": [{"node": 1, "vector": [10, 0]},
//!             {"edge": [1, 2], "traction": [0, -5]}],
//!   "monitors": [{"node": 1, "dof": "ux"}]
//! }
//! ```
//!
//! Node indices are zero based. Edge tractions are force per unit length,
//! lumped half to each end node at the reference geometry. A load entry with
//! `"constant": true` is applied in full from the first step instead of being
//! ramped.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::elements::{DofLabel, ElementKind, Material, Regime, Section, DEFAULT_DRILL_FACTOR};
use crate::error::{Error, Result};
use crate::frames::FrameStrategy;
use crate::linalg::Vec3;
use crate::solver::{ElementDef, Fixed, Model, Monitor, NodalLoad};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub regime: Regime,
    pub nodes: Vec<Vec<f64>>,
    pub elements: Vec<ElementEntry>,
    #[serde(default)]
    pub fixed: Vec<FixedEntry>,
    #[serde(default)]
    pub loads: Vec<LoadEntry>,
    #[serde(default)]
    pub monitors: Vec<MonitorEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementEntry {
    pub kind: String,
    pub nodes: Vec<usize>,
    #[serde(rename = "E")]
    pub e: f64,
    pub nu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thickness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section: Option<Section>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drill_factor: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedEntry {
    pub node: usize,
    pub dofs: Vec<String>,
    #[serde(default)]
    pub value: f64,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LoadEntry {
    Nodal {
        node: usize,
        vector: Vec<f64>,
        #[serde(default, skip_serializing_if = "is_false")]
        constant: bool,
    },
    Edge {
        edge: [usize; 2],
        traction: Vec<f64>,
        #[serde(default, skip_serializing_if = "is_false")]
        constant: bool,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorEntry {
    pub node: usize,
    pub dof: String,
}

fn parse_dof(s: &str, what: &str) -> Result<DofLabel> {
    DofLabel::parse(s).ok_or_else(|| Error::Parse(format!("{what}: unknown dof '{s}' (expected ux, uy, uz, rx, ry, rz)")))
}

impl ModelFile {
    pub fn into_model(self) -> Result<Model> {
        let regime = self.regime;
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (i, c) in self.nodes.iter().enumerate() {
            let p = match c.as_slice() {
                [x, y] => Vec3::new(*x, *y, 0.0),
                [x, y, z] => Vec3::new(*x, *y, *z),
                _ => return Err(Error::Parse(format!("nodes[{i}]: expected 2 or 3 coordinates, got {}", c.len()))),
            };
            nodes.push(p);
        }
        let mut elements = Vec::with_capacity(self.elements.len());
        for (i, e) in self.elements.iter().enumerate() {
            let what = format!("elements[{i}]");
            let kind = ElementKind::parse(&e.kind)
                .ok_or_else(|| Error::Parse(format!("{what}.kind: unknown element kind '{}'", e.kind)))?;
            let strategy = match &e.frame {
                Some(f) => FrameStrategy::parse(f, regime).map_err(|err| Error::Parse(format!("{what}.frame: {err}")))?,
                None => FrameStrategy::default_for(kind),
            };
            let material = Material {
                e: e.e,
                nu: e.nu,
                thickness: e.thickness.unwrap_or(0.0),
                section: e.section,
                drill_factor: e.drill_factor.unwrap_or(DEFAULT_DRILL_FACTOR),
            };
            material.validate(kind).map_err(|err| Error::Parse(format!("{what}: {err}")))?;
            elements.push(ElementDef {
                kind,
                nodes: e.nodes.clone(),
                material,
                strategy,
                orientation: e.orientation.map(Vec3),
            });
        }
        let mut fixed = Vec::new();
        for (i, f) in self.fixed.iter().enumerate() {
            for d in &f.dofs {
                fixed.push(Fixed { node: f.node, dof: parse_dof(d, &format!("fixed[{i}].dofs"))?, value: f.value });
            }
        }
        let mut loads = Vec::new();
        for (i, l) in self.loads.iter().enumerate() {
            match l {
                LoadEntry::Nodal { node, vector, constant } => {
                    loads.push(NodalLoad { node: *node, vector: vector.clone(), constant: *constant })
                }
                LoadEntry::Edge { edge, traction, constant } => {
                    let [a, b] = *edge;
                    if a >= nodes.len() || b >= nodes.len() {
                        return Err(Error::Parse(format!("loads[{i}].edge: node index out of range")));
                    }
                    let half = 0.5 * (nodes[b] - nodes[a]).norm();
                    let v: Vec<f64> = traction.iter().map(|t| half * t).collect();
                    loads.push(NodalLoad { node: a, vector: v.clone(), constant: *constant });
                    loads.push(NodalLoad { node: b, vector: v, constant: *constant });
                }
            }
        }
        let monitors = self
            .monitors
            .iter()
            .enumerate()
            .map(|(i, m)| Ok(Monitor { node: m.node, dof: parse_dof(&m.dof, &format!("monitors[{i}].dof"))? }))
            .collect::<Result<Vec<_>>>()?;
        Model::new(regime, nodes, elements, fixed, loads, monitors)
    }

    pub fn from_model(model: &Model) -> Self {
        let planar = model.regime == Regime::Plane;
        let nodes = model.nodes.iter().map(|p| if planar { vec![p.x(), p.y()] } else { p.0.to_vec() }).collect();
        let elements = model
            .elements
            .iter()
            .map(|e| {
                let has_section = matches!(e.kind, ElementKind::Bar2 | ElementKind::Beam2);
                ElementEntry {
                    kind: e.kind.name().to_string(),
                    nodes: e.nodes.clone(),
                    e: e.material.e,
                    nu: e.material.nu,
                    thickness: (e.kind != ElementKind::Hex8 && !has_section).then_some(e.material.thickness),
                    section: if has_section { e.material.section } else { None },
                    frame: Some(e.strategy.name().to_string()),
                    orientation: e.orientation.map(|v| v.0),
                    drill_factor: (e.material.drill_factor != DEFAULT_DRILL_FACTOR).then_some(e.material.drill_factor),
                }
            })
            .collect();
        let fixed = model
            .fixed
            .iter()
            .map(|f| FixedEntry { node: f.node, dofs: vec![f.dof.name().to_string()], value: f.value })
            .collect();
        let loads = model
            .loads
            .iter()
            .map(|l| LoadEntry::Nodal { node: l.node, vector: l.vector.clone(), constant: l.constant })
            .collect();
        let monitors =
            model.monitors.iter().map(|m| MonitorEntry { node: m.node, dof: m.dof.name().to_string() }).collect();
        ModelFile { regime: model.regime, nodes, elements, fixed, loads, monitors }
    }
}

pub fn parse_model(text: &str) -> Result<Model> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_model()
}

pub fn read_model(path: &Path) -> Result<Model> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_model(&text)
}

pub fn model_to_json(model: &Model) -> String {
    serde_json::to_string_pretty(&ModelFile::from_model(model)).expect("model serializes")
}

pub fn write_model(model: &Model, path: &Path) -> Result<()> {
    std::fs::write(path, model_to_json(model)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = r#"{
        "regime": "plane",
        "nodes": [[0, 0], [1, 0], [0, 1]],
        "elements": [{"kind": "Cst3", "nodes": [0, 1, 2], "E": 1000, "nu": 0.3, "thickness": 1, "frame": "polar"}],
        "fixed": [{"node": 0, "dofs": ["ux", "uy"]}, {"node": 2, "dofs": ["ux"]}],
        "loads": [{"edge": [1, 2], "traction": [2, 0]}],
        "monitors": [{"node": 1, "dof": "ux"}]
    }"#;

    #[test]
    fn parses_and_lumps_edges() {
        let m = parse_model(TRIANGLE).unwrap();
        assert_eq!(m.elements[0].strategy, FrameStrategy::PolarDecomp);
        let f = m.external_load(1.0);
        let half = 2f64.sqrt() * 0.5 * 2.0;
        assert_eq!(f[2], half);
        assert_eq!(f[4], half);
        assert_eq!(m.monitors[0].name(), "n1_ux");
    }

    #[test]
    fn errors_name_the_field() {
        let bad = TRIANGLE.replace("\"nu\"", "\"poisson\"");
        let e = parse_model(&bad).unwrap_err().to_string();
        assert!(e.contains("poisson"), "{e}");
        let bad = TRIANGLE.replace("\"ux\"}]", "\"uq\"}]");
        let e = parse_model(&bad).unwrap_err().to_string();
        assert!(e.contains("monitors[0].dof"), "{e}");
    }

    #[test]
    fn round_trip_is_exact() {
        let m = parse_model(TRIANGLE).unwrap();
        let again = parse_model(&model_to_json(&m)).unwrap();
        assert_eq!(again.nodes, m.nodes);
        assert_eq!(again.external_load(1.0), m.external_load(1.0));
        assert_eq!(again.elements, m.elements);
    }
}

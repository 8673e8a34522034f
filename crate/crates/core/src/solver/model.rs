use crate::corot::ElementSetup;
use crate::elements::{DofLabel, ElementKind, Material, Regime};
use crate::error::{Error, Result};
use crate::frames::FrameStrategy;
use crate::linalg::Vec3;

#[derive(Debug, Clone, PartialEq)]
pub struct ElementDef {
    pub kind: ElementKind,
    pub nodes: Vec<usize>,
    pub material: Material,
    pub strategy: FrameStrategy,
    /// Beam auxiliary direction fixing the section axes.
    pub orientation: Option<Vec3<f64>>,
}

/// Prescribed DOF value at full load; translations are ramped with the load
/// factor, rotations must be held at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixed {
    pub node: usize,
    pub dof: DofLabel,
    pub value: f64,
}

/// Nodal load at full load factor; `constant` loads are applied in full from
/// the first step.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalLoad {
    pub node: usize,
    pub vector: Vec<f64>,
    pub constant: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Monitor {
    pub node: usize,
    pub dof: DofLabel,
}

impl Monitor {
    pub fn name(&self) -> String {
        format!("n{}_{}", self.node, self.dof.name())
    }
}

#[derive(Debug, Clone)]
pub struct Model {
    pub regime: Regime,
    pub nodes: Vec<Vec3<f64>>,
    pub elements: Vec<ElementDef>,
    pub fixed: Vec<Fixed>,
    pub loads: Vec<NodalLoad>,
    pub monitors: Vec<Monitor>,
    setups: Vec<ElementSetup>,
    /// `free[dof]` is the equation number of a global DOF, `None` if fixed.
    free: Vec<Option<usize>>,
    nfree: usize,
    bandwidth: usize,
    ramped: Vec<f64>,
    constant: Vec<f64>,
}

impl Model {
    pub fn new(
        regime: Regime,
        nodes: Vec<Vec3<f64>>,
        elements: Vec<ElementDef>,
        fixed: Vec<Fixed>,
        loads: Vec<NodalLoad>,
        monitors: Vec<Monitor>,
    ) -> Result<Self> {
        let dpn = regime.dofs_per_node();
        let nn = nodes.len();
        if regime == Regime::Plane && nodes.iter().any(|p| p.z() != 0.0) {
            return Err(Error::InvalidModel("plane models need z = 0 for every node".into()));
        }
        let node_ok = |n: usize, what: &str| {
            if n < nn {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!("{what} references node {n}, model has {nn} nodes")))
            }
        };
        let dof_ok = |d: DofLabel, what: &str| {
            if d.index() < dpn {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!("{what}: dof {} does not exist in the {} regime", d.name(), regime.name())))
            }
        };

        let mut setups = Vec::with_capacity(elements.len());
        for (e, el) in elements.iter().enumerate() {
            if el.kind.regime() != regime {
                return Err(Error::InvalidModel(format!(
                    "element {e}: {} belongs to the {} regime, model is {}",
                    el.kind.name(),
                    el.kind.regime().name(),
                    regime.name()
                )));
            }
            if el.nodes.len() != el.kind.node_count() {
                return Err(Error::InvalidModel(format!(
                    "element {e}: {} needs {} nodes, got {}",
                    el.kind.name(),
                    el.kind.node_count(),
                    el.nodes.len()
                )));
            }
            for &n in &el.nodes {
                node_ok(n, &format!("element {e}"))?;
            }
            el.material.validate(el.kind).map_err(|err| Error::Element { element: e, source: Box::new(err) })?;
            let x0 = el.nodes.iter().map(|&n| nodes[n]).collect();
            let setup = ElementSetup::new(el.kind, el.strategy, el.material, x0, el.orientation)
                .map_err(|err| Error::Element { element: e, source: Box::new(err) })?;
            setups.push(setup);
        }

        let mut is_fixed = vec![false; nn * dpn];
        for (i, f) in fixed.iter().enumerate() {
            node_ok(f.node, &format!("fixed entry {i}"))?;
            dof_ok(f.dof, &format!("fixed entry {i}"))?;
            if f.dof.index() >= 3 && f.value != 0.0 {
                return Err(Error::InvalidModel(format!("fixed entry {i}: prescribed rotations must be zero")));
            }
            if !f.value.is_finite() {
                return Err(Error::InvalidModel(format!("fixed entry {i}: value is not finite")));
            }
            is_fixed[f.node * dpn + f.dof.index()] = true;
        }

        let mut ramped = vec![0.0; nn * dpn];
        let mut constant = vec![0.0; nn * dpn];
        for (i, l) in loads.iter().enumerate() {
            node_ok(l.node, &format!("load {i}"))?;
            if l.vector.len() != dpn {
                return Err(Error::InvalidModel(format!(
                    "load {i}: vector has {} components, the {} regime needs {dpn}",
                    l.vector.len(),
                    regime.name()
                )));
            }
            if l.vector.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidModel(format!("load {i}: vector is not finite")));
            }
            let target = if l.constant { &mut constant } else { &mut ramped };
            for (c, v) in l.vector.iter().enumerate() {
                target[l.node * dpn + c] += v;
            }
        }
        for (i, m) in monitors.iter().enumerate() {
            node_ok(m.node, &format!("monitor {i}"))?;
            dof_ok(m.dof, &format!("monitor {i}"))?;
        }

        // Equation numbering: reverse Cuthill–McKee over the node graph.
        let mut adj = vec![Vec::new(); nn];
        for el in &elements {
            for &a in &el.nodes {
                for &b in &el.nodes {
                    if a != b {
                        adj[a].push(b);
                    }
                }
            }
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        let order = super::banded::rcm(&adj);
        let mut free = vec![None; nn * dpn];
        let mut nfree = 0;
        for &node in &order {
            for c in 0..dpn {
                let d = node * dpn + c;
                if !is_fixed[d] {
                    free[d] = Some(nfree);
                    nfree += 1;
                }
            }
        }
        let mut bandwidth = 0;
        for el in &elements {
            let free = &free;
            let eqs: Vec<usize> = el.nodes.iter().flat_map(|&n| (0..dpn).filter_map(move |c| free[n * dpn + c])).collect();
            if let (Some(lo), Some(hi)) = (eqs.iter().min(), eqs.iter().max()) {
                bandwidth = bandwidth.max(hi - lo);
            }
        }

        Ok(Model { regime, nodes, elements, fixed, loads, monitors, setups, free, nfree, bandwidth, ramped, constant })
    }

    pub fn dofs_per_node(&self) -> usize {
        self.regime.dofs_per_node()
    }

    pub fn ndofs(&self) -> usize {
        self.nodes.len() * self.dofs_per_node()
    }

    pub fn free_dofs(&self) -> usize {
        self.nfree
    }

    pub fn equation(&self, dof: usize) -> Option<usize> {
        self.free[dof]
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn setups(&self) -> &[ElementSetup] {
        &self.setups
    }

    /// External load vector at a load factor.
    pub fn external_load(&self, load_factor: f64) -> Vec<f64> {
        self.ramped.iter().zip(&self.constant).map(|(r, c)| load_factor * r + c).collect()
    }

    pub fn global_dof(&self, node: usize, dof: DofLabel) -> usize {
        node * self.dofs_per_node() + dof.index()
    }

    /// Same model with every element using `strategy` where compatible.
    pub fn with_strategy(&self, strategy: FrameStrategy) -> Result<Model> {
        let mut elements = self.elements.clone();
        for el in elements.iter_mut() {
            strategy.check(el.kind)?;
            el.strategy = strategy;
        }
        Model::new(self.regime, self.nodes.clone(), elements, self.fixed.clone(), self.loads.clone(), self.monitors.clone())
    }
}

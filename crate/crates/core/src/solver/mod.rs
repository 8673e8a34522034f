//! Global assembly, load stepping and Newton–Raphson iteration with
//! multiplicative nodal-rotation updates.

pub mod banded;
mod model;

pub use model::{ElementDef, Fixed, Model, Monitor, NodalLoad};

use crate::corot::{self, element_force, element_response, ElementGlobalState, Method};
use crate::error::{Error, Result};
use crate::linalg::{norm2, DMat, Mat3, Vec3};
use crate::rotkit::{exp_rotvec, extract_angle_axis};
use crate::scalar::Scalar;

use banded::BandMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    pub steps: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Maximum depth of load-increment bisection.
    pub max_cuts: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { method: Method::SC1, steps: 20, tol: 1e-5, max_iter: 30, max_cuts: 6 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidModel(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.steps == 0 {
            return Err(Error::InvalidModel("steps must be at least 1".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidModel("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Displacements (rotational entries hold each triad's rotation vector),
/// nodal triads and the load factor they equilibrate.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalState {
    pub u: Vec<f64>,
    pub triads: Vec<Mat3<f64>>,
    pub load_factor: f64,
}

impl GlobalState {
    pub fn initial(model: &Model) -> Self {
        let triads = if model.regime.has_rotations() { vec![Mat3::identity(); model.nodes.len()] } else { Vec::new() };
        GlobalState { u: vec![0.0; model.ndofs()], triads, load_factor: 0.0 }
    }

    pub fn position(&self, model: &Model, node: usize) -> Vec3<f64> {
        let dpn = model.dofs_per_node();
        let mut p = model.nodes[node];
        for c in 0..model.regime.trans_dims() {
            p.0[c] += self.u[node * dpn + c];
        }
        p
    }

    pub fn positions(&self, model: &Model) -> Vec<Vec3<f64>> {
        (0..model.nodes.len()).map(|n| self.position(model, n)).collect()
    }

    pub fn element_state(&self, model: &Model, element: usize) -> ElementGlobalState<f64> {
        let nodes = &model.elements[element].nodes;
        ElementGlobalState {
            x: nodes.iter().map(|&n| self.position(model, n)).collect(),
            triads: if model.regime.has_rotations() { nodes.iter().map(|&n| self.triads[n]).collect() } else { Vec::new() },
        }
    }

    pub fn monitor_values(&self, model: &Model) -> Vec<f64> {
        model.monitors.iter().map(|m| self.u[model.global_dof(m.node, m.dof)]).collect()
    }

    fn apply_prescribed(&mut self, model: &Model) {
        for f in &model.fixed {
            let d = model.global_dof(f.node, f.dof);
            self.u[d] = if f.dof.index() < 3 { self.load_factor * f.value } else { 0.0 };
        }
    }

    fn sync_rotations(&mut self, model: &Model) {
        if !model.regime.has_rotations() {
            return;
        }
        let dpn = model.dofs_per_node();
        for (n, r) in self.triads.iter().enumerate() {
            let (angle, axis) = extract_angle_axis(r);
            for c in 0..3 {
                self.u[n * dpn + 3 + c] = angle * axis.0[c];
            }
        }
    }
}

/// Assembled residual and tangent over free DOFs, with element diagnostics.
#[derive(Debug, Clone)]
pub struct Assembly {
    /// `λF_ext − F_int` in equation numbering.
    pub residual: Vec<f64>,
    pub tangent: BandMatrix,
    /// Internal force in global DOF numbering.
    pub internal: Vec<f64>,
    /// Unbalanced-moment norm of each element's preliminary force.
    pub unbalanced_moments: Vec<f64>,
    /// Largest scaled self-equilibrium residual of the final element forces.
    pub max_equilibrium_residual: f64,
    pub rank_deficient: usize,
}

pub fn assemble(model: &Model, state: &GlobalState, method: Method) -> Result<Assembly> {
    if !method.supports(model.regime) {
        return Err(Error::IncompatibleWeightCase { case: method.name().to_string() });
    }
    let dpn = model.dofs_per_node();
    let nf = model.free_dofs();
    let bw = model.bandwidth();
    let mut tangent = BandMatrix::zeros(nf, bw, bw);
    let mut internal = vec![0.0; model.ndofs()];
    let mut unbalanced_moments = Vec::with_capacity(model.elements.len());
    let mut max_eq: f64 = 0.0;
    let mut rank_deficient = 0;
    for (e, (el, setup)) in model.elements.iter().zip(model.setups()).enumerate() {
        let st = state.element_state(model, e);
        let r = element_response(method, setup, &st).map_err(|err| Error::Element { element: e, source: Box::new(err) })?;
        let dofs: Vec<usize> = el.nodes.iter().flat_map(|&n| (0..dpn).map(move |c| n * dpn + c)).collect();
        for (i, &gi) in dofs.iter().enumerate() {
            internal[gi] += r.f[i];
            let Some(ei) = model.equation(gi) else { continue };
            for (j, &gj) in dofs.iter().enumerate() {
                if let Some(ej) = model.equation(gj) {
                    tangent.add(ei, ej, r.k[(i, j)]);
                }
            }
        }
        unbalanced_moments.push(r.unbalanced_moment);
        if method.is_corrected() {
            max_eq = max_eq.max(r.equilibrium_residual);
        }
        rank_deficient += r.rank_deficient as usize;
    }
    let ext = model.external_load(state.load_factor);
    let mut residual = vec![0.0; nf];
    for d in 0..model.ndofs() {
        if let Some(eq) = model.equation(d) {
            residual[eq] = ext[d] - internal[d];
        }
    }
    Ok(Assembly { residual, tangent, internal, unbalanced_moments, max_equilibrium_residual: max_eq, rank_deficient })
}

/// Assembled internal force for arbitrary nodal positions and triads; the
/// scalar type may carry complex perturbations.
pub fn internal_force<S: Scalar>(model: &Model, x: &[Vec3<S>], triads: &[Mat3<S>], method: Method) -> Result<Vec<S>> {
    let dpn = model.dofs_per_node();
    let mut out = vec![S::zero(); model.ndofs()];
    for (e, (el, setup)) in model.elements.iter().zip(model.setups()).enumerate() {
        let st = ElementGlobalState {
            x: el.nodes.iter().map(|&n| x[n]).collect(),
            triads: if model.regime.has_rotations() { el.nodes.iter().map(|&n| triads[n]).collect() } else { Vec::new() },
        };
        let f = element_force(method, setup, &st).map_err(|err| Error::Element { element: e, source: Box::new(err) })?;
        for (a, &n) in el.nodes.iter().enumerate() {
            for c in 0..dpn {
                out[n * dpn + c] += f[a * dpn + c];
            }
        }
    }
    Ok(out)
}

/// Assembled tangent over all DOFs (constrained ones included), dense.
pub fn assembled_tangent(model: &Model, state: &GlobalState, method: Method) -> Result<DMat<f64>> {
    let dpn = model.dofs_per_node();
    let n = model.ndofs();
    let mut k = DMat::zeros(n, n);
    for (e, el) in model.elements.iter().enumerate() {
        let st = state.element_state(model, e);
        let r = element_response(method, &model.setups()[e], &st)
            .map_err(|err| Error::Element { element: e, source: Box::new(err) })?;
        let dofs: Vec<usize> = el.nodes.iter().flat_map(|&n| (0..dpn).map(move |c| n * dpn + c)).collect();
        for (i, &gi) in dofs.iter().enumerate() {
            for (j, &gj) in dofs.iter().enumerate() {
                k[(gi, gj)] += r.k[(i, j)];
            }
        }
    }
    Ok(k)
}

/// Sum of `½ v̄ᵀK̄v̄` over elements.
pub fn strain_energy(model: &Model, state: &GlobalState) -> Result<f64> {
    let mut total = 0.0;
    for (e, setup) in model.setups().iter().enumerate() {
        let ls = corot::local_state(setup, &state.element_state(model, e))?;
        let kv = setup.kbar.mul_vec(&ls.v);
        total += 0.5 * ls.v.iter().zip(&kv).map(|(a, b)| a * b).sum::<f64>();
    }
    Ok(total)
}

/// Convergence record of one solved increment.
#[derive(Debug, Clone, Default)]
pub struct StepStats {
    pub iterations: usize,
    pub residual_norms: Vec<f64>,
    pub max_equilibrium_residual: f64,
    pub unbalanced_moments: Vec<f64>,
}

/// Newton iterations to equilibrium at `target` load factor.
pub fn solve_step(model: &Model, state: &GlobalState, target: f64, config: &SolverConfig) -> Result<(GlobalState, StepStats)> {
    solve_tracked(model, state, target, config, &mut 0.0)
}

/// As [`solve_step`], also folding every iteration's equilibrium residual
/// into `max_eq`, failed attempts included.
fn solve_tracked(
    model: &Model,
    state: &GlobalState,
    target: f64,
    config: &SolverConfig,
    max_eq: &mut f64,
) -> Result<(GlobalState, StepStats)> {
    let dpn = model.dofs_per_node();
    let rot = model.regime.has_rotations();
    let mut st = state.clone();
    st.load_factor = target;
    st.apply_prescribed(model);
    let mut stats = StepStats::default();
    for it in 0..=config.max_iter {
        let a = assemble(model, &st, config.method)?;
        let rn = norm2(&a.residual);
        stats.residual_norms.push(rn);
        stats.max_equilibrium_residual = stats.max_equilibrium_residual.max(a.max_equilibrium_residual);
        *max_eq = max_eq.max(a.max_equilibrium_residual);
        if !rn.is_finite() {
            return Err(Error::NoConvergence { step: 0, load_factor: target });
        }
        if rn <= config.tol {
            stats.iterations = it;
            stats.unbalanced_moments = a.unbalanced_moments;
            return Ok((st, stats));
        }
        if it == config.max_iter {
            break;
        }
        let du = a.tangent.factor()?.solve(&a.residual);
        for node in 0..model.nodes.len() {
            let mut w = [0.0; 3];
            for c in 0..dpn {
                let d = node * dpn + c;
                let Some(eq) = model.equation(d) else { continue };
                if c < 3 {
                    st.u[d] += du[eq];
                } else {
                    w[c - 3] = du[eq];
                }
            }
            if rot && w != [0.0; 3] {
                st.triads[node] = exp_rotvec(&Vec3(w)) * st.triads[node];
            }
        }
        st.sync_rotations(model);
    }
    Err(Error::NoConvergence { step: 0, load_factor: target })
}

/// Converged state after one load step of the history.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub step: usize,
    pub load_factor: f64,
    pub u: Vec<f64>,
    pub monitors: Vec<f64>,
    /// Newton iterations summed over any bisected sub-increments.
    pub iterations: usize,
    pub cuts: usize,
    /// Residual norms of the last (sub-)increment.
    pub residual_norms: Vec<f64>,
    pub strain_energy: f64,
    pub unbalanced_moments: Vec<f64>,
    pub max_equilibrium_residual: f64,
}

#[derive(Debug, Clone)]
pub struct History {
    pub monitor_names: Vec<String>,
    pub records: Vec<StepRecord>,
    pub steps: usize,
    pub failure: Option<Error>,
}

impl History {
    pub fn converged(&self) -> bool {
        self.failure.is_none() && self.records.len() == self.steps
    }

    pub fn max_unbalanced_moment(&self) -> f64 {
        self.records.iter().flat_map(|r| r.unbalanced_moments.iter()).fold(0.0, |m, v| m.max(*v))
    }

    pub fn max_equilibrium_residual(&self) -> f64 {
        self.records.iter().fold(0.0, |m, r| m.max(r.max_equilibrium_residual))
    }

    /// Values of monitor `k` across converged steps.
    pub fn curve(&self, k: usize) -> Vec<f64> {
        self.records.iter().map(|r| r.monitors[k]).collect()
    }

    /// `step,load_factor,<monitors>` with one row per converged step.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,load_factor");
        for n in &self.monitor_names {
            s.push(',');
            s.push_str(n);
        }
        s.push('\n');
        for r in &self.records {
            s.push_str(&format!("{},{}", r.step, r.load_factor));
            for v in &r.monitors {
                s.push_str(&format!(",{v}"));
            }
            s.push('\n');
        }
        s
    }

    /// `step,element,unbalanced_moment_norm`.
    pub fn diagnostics_csv(&self) -> String {
        let mut s = String::from("step,element,unbalanced_moment_norm\n");
        for r in &self.records {
            for (e, m) in r.unbalanced_moments.iter().enumerate() {
                s.push_str(&format!("{},{e},{m}\n", r.step));
            }
        }
        s
    }
}

struct Progress {
    iterations: usize,
    cuts: usize,
    max_eq: f64,
}

fn advance(
    model: &Model,
    state: &GlobalState,
    to: f64,
    config: &SolverConfig,
    depth: usize,
    progress: &mut Progress,
) -> Result<(GlobalState, StepStats)> {
    match solve_tracked(model, state, to, config, &mut progress.max_eq) {
        Ok((s, stats)) => {
            progress.iterations += stats.iterations;
            Ok((s, stats))
        }
        Err(e) if e.is_recoverable() && depth < config.max_cuts => {
            progress.cuts += 1;
            let mid = 0.5 * (state.load_factor + to);
            let (s1, _) = advance(model, state, mid, config, depth + 1, progress)?;
            advance(model, &s1, to, config, depth + 1, progress)
        }
        Err(e) => Err(e),
    }
}

/// Equal load increments from zero to one, each solved to equilibrium.
pub fn run(model: &Model, config: &SolverConfig) -> History {
    let mut history = History {
        monitor_names: model.monitors.iter().map(|m| m.name()).collect(),
        records: Vec::with_capacity(config.steps),
        steps: config.steps,
        failure: None,
    };
    if let Err(e) = config.validate() {
        history.failure = Some(e);
        return history;
    }
    let mut state = GlobalState::initial(model);
    for step in 1..=config.steps {
        let target = step as f64 / config.steps as f64;
        let mut progress = Progress { iterations: 0, cuts: 0, max_eq: 0.0 };
        match advance(model, &state, target, config, 0, &mut progress) {
            Ok((s, stats)) => {
                let strain_energy = match strain_energy(model, &s) {
                    Ok(v) => v,
                    Err(e) => {
                        history.failure = Some(e);
                        return history;
                    }
                };
                history.records.push(StepRecord {
                    step,
                    load_factor: target,
                    monitors: s.monitor_values(model),
                    u: s.u.clone(),
                    iterations: progress.iterations,
                    cuts: progress.cuts,
                    residual_norms: stats.residual_norms,
                    strain_energy,
                    unbalanced_moments: stats.unbalanced_moments,
                    max_equilibrium_residual: progress.max_eq,
                });
                state = s;
            }
            Err(e) => {
                history.failure = Some(match e {
                    Error::NoConvergence { load_factor, .. } => Error::NoConvergence { step, load_factor },
                    e => e,
                });
                return history;
            }
        }
    }
    history
}

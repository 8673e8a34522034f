//! Built-in benchmark models, method/frame sweeps and curve comparison.
//!
//! Dimensions that only appear in figures are fixed here as defaults:
//! plane angle frame legs 10 × 1 (t = 1, E = 3e7), cantilever 1 × 1 × 10
//! (E = 1e6), beam frame legs 10 with a 0.4 square section (E = 1e6),
//! L-frame legs 240 × 30 (E = 71240), pre-twisted beam 12 × 1.1 (E = 29e6).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::corot::Method;
use crate::elements::{DofLabel, ElementKind, Material, Regime, Section};
use crate::error::{Error, Result};
use crate::frames::FrameStrategy;
use crate::linalg::Vec3;
use crate::solver::{run, ElementDef, Fixed, History, Model, Monitor, NodalLoad, SolverConfig};

pub const NAMES: [&str; 7] = [
    "plane-angle-frame",
    "spatial-cantilever",
    "spatial-angle-frame",
    "l-shaped-frame",
    "pretwisted-beam",
    "slit-annulus",
    "bar-sanity",
];

#[derive(Debug, Clone)]
pub struct Benchmark {
    pub name: &'static str,
    pub model: Model,
    pub steps: usize,
    /// Methods swept by default.
    pub methods: Vec<Method>,
    /// Frame strategies swept by default.
    pub frames: Vec<FrameStrategy>,
}

/// Generator options; `element` selects the mesh variant where a benchmark
/// has one (plane frame: Cst3 or Quad4; L-frame: TriShell3 or QuadShell4).
#[derive(Debug, Clone, Copy, Default)]
pub struct BenchOptions {
    pub element: Option<ElementKind>,
}

pub fn generate(name: &str) -> Result<Benchmark> {
    generate_with(name, &BenchOptions::default())
}

pub fn generate_with(name: &str, opts: &BenchOptions) -> Result<Benchmark> {
    let variant = |default: ElementKind, allowed: &[ElementKind]| -> Result<ElementKind> {
        match opts.element {
            None => Ok(default),
            Some(k) if allowed.contains(&k) => Ok(k),
            Some(k) => Err(Error::InvalidModel(format!("{name} has no {} variant", k.name()))),
        }
    };
    match name {
        "plane-angle-frame" => plane_angle_frame(variant(ElementKind::Cst3, &[ElementKind::Cst3, ElementKind::Quad4])?),
        "spatial-cantilever" => {
            variant(ElementKind::Hex8, &[ElementKind::Hex8])?;
            spatial_cantilever()
        }
        "spatial-angle-frame" => {
            variant(ElementKind::Beam2, &[ElementKind::Beam2])?;
            spatial_angle_frame()
        }
        "l-shaped-frame" => {
            l_shaped_frame(variant(ElementKind::TriShell3, &[ElementKind::TriShell3, ElementKind::QuadShell4])?)
        }
        "pretwisted-beam" => {
            variant(ElementKind::QuadShell4, &[ElementKind::QuadShell4])?;
            pretwisted_beam()
        }
        "slit-annulus" => {
            variant(ElementKind::QuadShell4, &[ElementKind::QuadShell4])?;
            slit_annulus()
        }
        "bar-sanity" => {
            variant(ElementKind::Bar2, &[ElementKind::Bar2])?;
            bar_sanity()
        }
        _ => Err(Error::UnknownBenchmark(name.to_string())),
    }
}

fn element(kind: ElementKind, nodes: Vec<usize>, material: Material) -> ElementDef {
    ElementDef { kind, nodes, material, strategy: FrameStrategy::default_for(kind), orientation: None }
}

fn clamp(regime: Regime, nodes: &[usize]) -> Vec<Fixed> {
    let dofs = &DofLabel::ALL[..regime.dofs_per_node()];
    nodes.iter().flat_map(|&node| dofs.iter().map(move |&dof| Fixed { node, dof, value: 0.0 })).collect()
}

fn monitors(node: usize, dofs: &[DofLabel]) -> Vec<Monitor> {
    dofs.iter().map(|&dof| Monitor { node, dof }).collect()
}

/// Consistent lumping of a uniform traction (force per length) along a
/// polyline of nodes: each segment sends half its resultant to each end.
fn lump_edge(coords: &[Vec3<f64>], edge: &[usize], traction: &[f64], dpn: usize) -> Vec<NodalLoad> {
    let mut acc: HashMap<usize, Vec<f64>> = HashMap::new();
    let mut order = Vec::new();
    for w in edge.windows(2) {
        let len = (coords[w[1]] - coords[w[0]]).norm();
        for &n in w {
            let e = acc.entry(n).or_insert_with(|| {
                order.push(n);
                vec![0.0; dpn]
            });
            for (c, t) in traction.iter().enumerate() {
                e[c] += 0.5 * len * t;
            }
        }
    }
    order.into_iter().map(|n| NodalLoad { node: n, vector: acc.remove(&n).unwrap(), constant: false }).collect()
}

/// Structured mesh over the cells of an `nx × ny` grid accepted by `keep`.
/// Nodes are numbered column by column (`j` fastest); `at(i, j)` maps grid
/// indices to coordinates.
struct Grid {
    coords: Vec<Vec3<f64>>,
    id: Vec<Option<usize>>,
    ny: usize,
    cells: Vec<[usize; 4]>,
}

impl Grid {
    fn new(nx: usize, ny: usize, keep: impl Fn(usize, usize) -> bool, at: impl Fn(usize, usize) -> Vec3<f64>) -> Grid {
        let mut used = vec![false; (nx + 1) * (ny + 1)];
        let idx = |i: usize, j: usize| i * (ny + 1) + j;
        for i in 0..nx {
            for j in 0..ny {
                if keep(i, j) {
                    for (a, b) in [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)] {
                        used[idx(a, b)] = true;
                    }
                }
            }
        }
        let mut id = vec![None; used.len()];
        let mut coords = Vec::new();
        for i in 0..=nx {
            for j in 0..=ny {
                if used[idx(i, j)] {
                    id[idx(i, j)] = Some(coords.len());
                    coords.push(at(i, j));
                }
            }
        }
        let mut cells = Vec::new();
        for i in 0..nx {
            for j in 0..ny {
                if keep(i, j) {
                    let n = |a: usize, b: usize| id[idx(a, b)].unwrap();
                    cells.push([n(i, j), n(i + 1, j), n(i + 1, j + 1), n(i, j + 1)]);
                }
            }
        }
        Grid { coords, id, ny, cells }
    }

    fn node(&self, i: usize, j: usize) -> usize {
        self.id[i * (self.ny + 1) + j].expect("grid node outside the mesh")
    }

    /// Elements of `kind` (quads, or each quad split along its 1–3 diagonal).
    fn elements(&self, kind: ElementKind, material: Material) -> Vec<ElementDef> {
        let mut out = Vec::new();
        for c in &self.cells {
            if kind.node_count() == 4 {
                out.push(element(kind, c.to_vec(), material));
            } else {
                out.push(element(kind, vec![c[0], c[1], c[2]], material));
                out.push(element(kind, vec![c[0], c[2], c[3]], material));
            }
        }
        out
    }
}

fn plane_angle_frame(kind: ElementKind) -> Result<Benchmark> {
    // Column x ∈ [0, 1], y ∈ [0, 10]; arm y ∈ [9, 10], x ∈ [0, 10]; h = 0.5.
    let h = 0.5;
    let n = 20;
    let grid = Grid::new(n, n, |i, j| i < 2 || j >= n - 2, |i, j| Vec3::new(i as f64 * h, j as f64 * h, 0.0));
    let mat = Material::plate(3e7, 0.3, 1.0);
    let elements = grid.elements(kind, mat);
    let base: Vec<usize> = (0..=2).map(|i| grid.node(i, 0)).collect();
    let edge: Vec<usize> = (n - 2..=n).map(|j| grid.node(n, j)).collect();
    let loads = lump_edge(&grid.coords, &edge, &[4e4, 0.0], 2);
    let tip = grid.node(n, n - 1);
    let model = Model::new(
        Regime::Plane,
        grid.coords.clone(),
        elements,
        clamp(Regime::Plane, &base),
        loads,
        monitors(tip, &[DofLabel::Ux, DofLabel::Uy]),
    )?;
    Ok(Benchmark {
        name: "plane-angle-frame",
        model,
        steps: 20,
        methods: vec![Method::S, Method::SP, Method::SC1],
        frames: vec![FrameStrategy::SideAlign2D, FrameStrategy::LeastSquare, FrameStrategy::PolarDecomp],
    })
}

fn spatial_cantilever() -> Result<Benchmark> {
    // 1 × 1 section, length 10 along z, twenty elements along the axis.
    let (nz, dz) = (20, 0.5);
    let mut nodes = Vec::new();
    for k in 0..=nz {
        for (x, y) in [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)] {
            nodes.push(Vec3::new(x, y, k as f64 * dz));
        }
    }
    let mat = Material::solid(1e6, 0.3);
    let elements = (0..nz)
        .map(|k| {
            let b = 4 * k;
            element(ElementKind::Hex8, vec![b, b + 1, b + 2, b + 3, b + 4, b + 5, b + 6, b + 7], mat)
        })
        .collect();
    let tip = 4 * nz + 2;
    let model = Model::new(
        Regime::Solid,
        nodes,
        elements,
        clamp(Regime::Solid, &[0, 1, 2, 3]),
        vec![NodalLoad { node: tip, vector: vec![-1000.0, 200.0, 200.0], constant: false }],
        monitors(tip, &[DofLabel::Ux, DofLabel::Uy, DofLabel::Uz]),
    )?;
    Ok(Benchmark {
        name: "spatial-cantilever",
        model,
        steps: 20,
        methods: vec![Method::S, Method::SP, Method::SC1],
        frames: vec![FrameStrategy::SideAlign3D, FrameStrategy::LeastSquare, FrameStrategy::PolarDecomp],
    })
}

fn spatial_angle_frame() -> Result<Benchmark> {
    // Legs along +y, +x, +z, four elements each; clamped at the origin.
    let l = 10.0;
    let per = 4;
    let corners = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.0, l, 0.0), Vec3::new(l, l, 0.0), Vec3::new(l, l, l)];
    let mut nodes = vec![corners[0]];
    for leg in 0..3 {
        for k in 1..=per {
            let t = k as f64 / per as f64;
            nodes.push(corners[leg] + (corners[leg + 1] - corners[leg]).scale(t));
        }
    }
    let mat = Material::beam(1e6, 0.3, Section::rectangle(0.4, 0.4));
    let elements = (0..3 * per).map(|e| element(ElementKind::Beam2, vec![e, e + 1], mat)).collect();
    let tip = 3 * per;
    let model = Model::new(
        Regime::Structural,
        nodes,
        elements,
        clamp(Regime::Structural, &[0]),
        vec![NodalLoad { node: tip, vector: vec![-5.0, 0.0, -5.0, 0.0, 0.0, 0.0], constant: false }],
        monitors(tip, &[DofLabel::Ux, DofLabel::Uy, DofLabel::Uz]),
    )?;
    Ok(Benchmark {
        name: "spatial-angle-frame",
        model,
        steps: 20,
        methods: Method::ALL.to_vec(),
        frames: vec![FrameStrategy::BeamFrame],
    })
}

fn l_shaped_frame(kind: ElementKind) -> Result<Benchmark> {
    // Clamped leg x ∈ [0, 30], y ∈ [0, 240]; free leg y ∈ [210, 240] out to
    // x = 240. Square cells of 15.
    let h = 15.0;
    let n = 16;
    let grid = Grid::new(n, n, |i, j| i < 2 || j >= n - 2, |i, j| Vec3::new(i as f64 * h, j as f64 * h, 0.0));
    // With the default drilling penalty the quadrilateral mesh stalls at the
    // buckling point under SP and SC*.
    let mat = Material { drill_factor: SHELL_DRILL_FACTOR, ..Material::plate(71240.0, 0.31, 0.6) };
    let elements = grid.elements(kind, mat);
    let base: Vec<usize> = (0..=2).map(|i| grid.node(i, 0)).collect();
    let tip = grid.node(n, n - 1);
    // In-plane load across the free leg ramps to 2; the lateral perturbation
    // is held constant.
    let loads = vec![
        NodalLoad { node: tip, vector: vec![0.0, 2.0, 0.0, 0.0, 0.0, 0.0], constant: false },
        NodalLoad { node: tip, vector: vec![0.0, 0.0, 1e-3, 0.0, 0.0, 0.0], constant: true },
    ];
    let model = Model::new(
        Regime::Structural,
        grid.coords.clone(),
        elements,
        clamp(Regime::Structural, &base),
        loads,
        monitors(tip, &[DofLabel::Uz, DofLabel::Ux, DofLabel::Uy]),
    )?;
    let frames = if kind == ElementKind::TriShell3 {
        vec![FrameStrategy::SideAlign3D]
    } else {
        vec![FrameStrategy::QuadShellFrame]
    };
    Ok(Benchmark { name: "l-shaped-frame", model, steps: 400, methods: Method::ALL.to_vec(), frames })
}

fn pretwisted_beam() -> Result<Benchmark> {
    let (l, w, t) = (12.0, 1.1, 0.05);
    let (nw, nl) = (4, 24);
    let grid = Grid::new(
        nl,
        nw,
        |_, _| true,
        |i, j| {
            let x = l * i as f64 / nl as f64;
            let s = w * (j as f64 / nw as f64 - 0.5);
            let phi = std::f64::consts::FRAC_PI_2 * x / l;
            Vec3::new(x, s * phi.cos(), s * phi.sin())
        },
    );
    let mat = Material::plate(29e6, 0.22, t);
    let elements = grid.elements(ElementKind::QuadShell4, mat);
    let root: Vec<usize> = (0..=nw).map(|j| grid.node(0, j)).collect();
    let share = 60.0 / (nw + 1) as f64;
    let loads = (0..=nw)
        .map(|j| NodalLoad { node: grid.node(nl, j), vector: vec![0.0, 0.0, share, 0.0, 0.0, 0.0], constant: false })
        .collect();
    let tip = grid.node(nl, nw / 2);
    let model = Model::new(
        Regime::Structural,
        grid.coords.clone(),
        elements,
        clamp(Regime::Structural, &root),
        loads,
        monitors(tip, &[DofLabel::Ux, DofLabel::Uy, DofLabel::Uz]),
    )?;
    Ok(Benchmark {
        name: "pretwisted-beam",
        model,
        steps: 20,
        methods: Method::ALL.to_vec(),
        frames: vec![FrameStrategy::QuadShellFrame],
    })
}

/// Drilling penalty factor for the L-frame and slit annulus shells.
pub const SHELL_DRILL_FACTOR: f64 = 1e-4;

fn slit_annulus() -> Result<Benchmark> {
    let (ri, ro, t) = (6.0, 10.0, 0.03);
    let (nr, nt) = (6, 30);
    // i runs round the annulus from the clamped slit face (θ = 0) to the
    // loaded one (θ = 2π); j runs across the radius.
    let grid = Grid::new(
        nt,
        nr,
        |_, _| true,
        |i, j| {
            let r = ri + (ro - ri) * j as f64 / nr as f64;
            let th = std::f64::consts::TAU * i as f64 / nt as f64;
            Vec3::new(r * th.cos(), r * th.sin(), 0.0)
        },
    );
    // With the default drilling penalty, moment corrections under CaseI and
    // CaseII drive the drilling rotations past the local-rotation limit.
    let mat = Material { drill_factor: SHELL_DRILL_FACTOR, ..Material::plate(21e6, 0.0, t) };
    let elements = grid.elements(ElementKind::QuadShell4, mat);
    let clamped: Vec<usize> = (0..=nr).map(|j| grid.node(0, j)).collect();
    let edge: Vec<usize> = (0..=nr).map(|j| grid.node(nt, j)).collect();
    let loads = lump_edge(&grid.coords, &edge, &[0.0, 0.0, 0.8, 0.0, 0.0, 0.0], 6);
    let a = grid.node(nt, 0);
    let b = grid.node(nt, nr);
    let mut mons = monitors(a, &[DofLabel::Uz]);
    mons.extend(monitors(b, &[DofLabel::Uz]));
    let model = Model::new(Regime::Structural, grid.coords.clone(), elements, clamp(Regime::Structural, &clamped), loads, mons)?;
    Ok(Benchmark {
        name: "slit-annulus",
        model,
        steps: 50,
        methods: Method::ALL.to_vec(),
        frames: vec![FrameStrategy::QuadShellFrame],
    })
}

/// Parameters of the bar sanity problem: bar from the origin at 45°, EA,
/// vertical load at the free end whose horizontal motion is suppressed.
pub const BAR_EA: f64 = 1e4;
pub const BAR_LOAD: f64 = 2e3;

fn bar_sanity() -> Result<Benchmark> {
    let nodes = vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 1.0, 0.0)];
    let mat = Material { section: Some(Section::bar(1.0)), ..Material::plate(BAR_EA, 0.0, 1.0) };
    let mut fixed = clamp(Regime::Plane, &[0]);
    fixed.push(Fixed { node: 1, dof: DofLabel::Ux, value: 0.0 });
    let model = Model::new(
        Regime::Plane,
        nodes,
        vec![element(ElementKind::Bar2, vec![0, 1], mat)],
        fixed,
        vec![NodalLoad { node: 1, vector: vec![0.0, BAR_LOAD], constant: false }],
        monitors(1, &[DofLabel::Uy]),
    )?;
    Ok(Benchmark {
        name: "bar-sanity",
        model,
        steps: 10,
        methods: vec![Method::S, Method::SP, Method::SC1],
        frames: vec![FrameStrategy::SideAlign2D],
    })
}

/// Max over monitors of `max_k |a_k − b_k| / max_k |b_k|`; infinite when
/// either history is incomplete or the step counts differ.
pub fn curve_deviation(a: &History, b: &History) -> f64 {
    if !a.converged() || !b.converged() || a.records.len() != b.records.len() {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for k in 0..a.monitor_names.len() {
        let ca = a.curve(k);
        let cb = b.curve(k);
        let scale = cb.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = ca.iter().zip(&cb).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        worst = worst.max(if scale > 0.0 { diff / scale } else if diff == 0.0 { 0.0 } else { f64::INFINITY });
    }
    worst
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub frame: FrameStrategy,
    pub method: Method,
    /// Error when the model could not be built or the method does not apply.
    pub history: std::result::Result<History, Error>,
}

impl Cell {
    pub fn file_stem(&self, bench: &str) -> String {
        format!("{bench}_{}_{}", self.frame.name(), self.method.name().to_lowercase())
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub name: String,
    pub cells: Vec<Cell>,
}

/// Solver settings shared by every cell of a sweep; `None` keeps the
/// benchmark's protocol.
#[derive(Debug, Clone, Copy)]
pub struct MatrixConfig {
    pub steps: Option<usize>,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MatrixConfig {
    fn default() -> Self {
        let d = SolverConfig::default();
        MatrixConfig { steps: None, tol: d.tol, max_iter: d.max_iter }
    }
}

pub fn run_matrix(bench: &Benchmark, methods: &[Method], frames: &[FrameStrategy], cfg: &MatrixConfig) -> Report {
    let mut cells = Vec::new();
    for &frame in frames {
        let model = bench.model.with_strategy(frame);
        for &method in methods {
            let history = model.as_ref().map_err(|e| e.clone()).and_then(|m| {
                if !method.supports(m.regime) {
                    return Err(Error::IncompatibleWeightCase { case: method.name().to_string() });
                }
                let config = SolverConfig {
                    method,
                    steps: cfg.steps.unwrap_or(bench.steps),
                    tol: cfg.tol,
                    max_iter: cfg.max_iter,
                    ..SolverConfig::default()
                };
                Ok(run(m, &config))
            });
            cells.push(Cell { frame, method, history });
        }
    }
    Report { name: bench.name.to_string(), cells }
}

impl Report {
    pub fn cell(&self, frame: FrameStrategy, method: Method) -> Option<&History> {
        self.cells.iter().find(|c| c.frame == frame && c.method == method).and_then(|c| c.history.as_ref().ok())
    }

    /// Deviation of each method from `reference` within every frame.
    pub fn deviations(&self, reference: Method) -> Vec<(FrameStrategy, Method, f64)> {
        let mut out = Vec::new();
        for c in &self.cells {
            if c.method == reference {
                continue;
            }
            let d = match (c.history.as_ref(), self.cell(c.frame, reference)) {
                (Ok(a), Some(b)) => curve_deviation(a, b),
                _ => f64::INFINITY,
            };
            out.push((c.frame, c.method, d));
        }
        out
    }

    /// Human-readable summary: per-cell status, max unbalanced moment of the
    /// preliminary force, and pairwise curve deviations.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "benchmark {}", self.name);
        let _ = writeln!(s, "frame,method,status,steps,iterations,max_unbalanced_moment");
        for c in &self.cells {
            match &c.history {
                Ok(h) => {
                    let status = match &h.failure {
                        None => "converged".to_string(),
                        Some(e) => format!("failed: {e}"),
                    };
                    let iters: usize = h.records.iter().map(|r| r.iterations).sum();
                    let _ = writeln!(
                        s,
                        "{},{},{status},{},{iters},{:e}",
                        c.frame.name(),
                        c.method.name(),
                        h.records.len(),
                        h.max_unbalanced_moment()
                    );
                }
                Err(e) => {
                    let _ = writeln!(s, "{},{},skipped: {e},0,0,", c.frame.name(), c.method.name());
                }
            }
        }
        let _ = writeln!(s, "frame_a,method_a,frame_b,method_b,max_relative_deviation");
        let ok: Vec<(&Cell, &History)> = self.cells.iter().filter_map(|c| c.history.as_ref().ok().map(|h| (c, h))).collect();
        for (i, (ca, ha)) in ok.iter().enumerate() {
            for (cb, hb) in &ok[i + 1..] {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{:e}",
                    ca.frame.name(),
                    ca.method.name(),
                    cb.frame.name(),
                    cb.method.name(),
                    curve_deviation(ha, hb)
                );
            }
        }
        s
    }

    /// Writes `<name>_<frame>_<method>.csv`, the matching
    /// `_diagnostics.csv`, and `<name>_summary.csv`.
    pub fn write(&self, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for c in &self.cells {
            if let Ok(h) = &c.history {
                let stem = c.file_stem(&self.name);
                let p = dir.join(format!("{stem}.csv"));
                std::fs::write(&p, h.to_csv())?;
                written.push(p);
                let p = dir.join(format!("{stem}_diagnostics.csv"));
                std::fs::write(&p, h.diagnostics_csv())?;
                written.push(p);
            }
        }
        let p = dir.join(format!("{}_summary.csv", self.name));
        std::fs::write(&p, self.summary())?;
        written.push(p);
        Ok(written)
    }
}

/// Equilibrium of the bar sanity problem, solved by bisection on the tip
/// rise `v`: `EA·(ℓ − ℓ₀)/ℓ₀ · (1 + v)/ℓ = P`, `ℓ = √(1 + (1 + v)²)`.
pub fn bar_sanity_oracle(load: f64) -> f64 {
    let l0 = 2f64.sqrt();
    let g = |v: f64| {
        let l = (1.0 + (1.0 + v) * (1.0 + v)).sqrt();
        BAR_EA * (l - l0) / l0 * (1.0 + v) / l - load
    };
    let (mut lo, mut hi) = (0.0, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

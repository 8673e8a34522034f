use corot::benchmarks::{self, bar_sanity_oracle, BenchOptions, BAR_LOAD};
use corot::corot::Method;
use corot::elements::{DofLabel, ElementKind, Material, Regime};
use corot::frames::{beam_initial_frame, FrameStrategy};
use corot::linalg::{Mat3, Vec3};
use corot::rotkit::exp_rotvec;
use corot::solver::{
    assemble, run, solve_step, ElementDef, Fixed, GlobalState, Model, Monitor, NodalLoad, SolverConfig,
};

fn square_model(load: f64, prescribed: f64) -> Model {
    let nodes = vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 1.0, 0.0), Vec3::new(0.0, 1.0, 0.0)];
    let mat = Material::plate(1e3, 0.3, 0.1);
    let el = |nodes: Vec<usize>| ElementDef {
        kind: ElementKind::Cst3,
        nodes,
        material: mat,
        strategy: FrameStrategy::PolarDecomp,
        orientation: None,
    };
    let fixed = vec![
        Fixed { node: 0, dof: DofLabel::Ux, value: 0.0 },
        Fixed { node: 0, dof: DofLabel::Uy, value: 0.0 },
        Fixed { node: 3, dof: DofLabel::Ux, value: 0.0 },
        Fixed { node: 1, dof: DofLabel::Uy, value: prescribed },
    ];
    let loads = vec![
        NodalLoad { node: 1, vector: vec![load, 0.0], constant: false },
        NodalLoad { node: 2, vector: vec![load, 0.0], constant: false },
    ];
    let monitors = vec![Monitor { node: 2, dof: DofLabel::Ux }, Monitor { node: 1, dof: DofLabel::Uy }];
    Model::new(Regime::Plane, nodes, vec![el(vec![0, 1, 2]), el(vec![0, 2, 3])], fixed, loads, monitors).unwrap()
}

#[test]
fn zero_load_gives_zero_history() {
    let m = square_model(0.0, 0.0);
    for method in [Method::S, Method::SP, Method::SC1] {
        let h = run(&m, &SolverConfig { method, steps: 3, ..SolverConfig::default() });
        assert!(h.converged());
        assert!(h.records.iter().all(|r| r.u.iter().all(|v| *v == 0.0)));
        let a = assemble(&m, &GlobalState::initial(&m), method).unwrap();
        assert!(a.residual.iter().all(|v| *v == 0.0));
    }
}

#[test]
fn small_load_converges_in_one_iteration() {
    let m = square_model(1e-6, 0.0);
    let st = GlobalState::initial(&m);
    let config = SolverConfig { tol: 1e-12, ..SolverConfig::default() };
    let (_, stats) = solve_step(&m, &st, 1.0, &config).unwrap();
    assert_eq!(stats.iterations, 1, "{:?}", stats.residual_norms);
}

#[test]
fn prescribed_dofs_are_exact() {
    let m = square_model(5.0, 0.0123);
    let h = run(&m, &SolverConfig { steps: 4, ..SolverConfig::default() });
    assert!(h.converged());
    for r in &h.records {
        assert_eq!(r.u[1 * 2 + 1], 0.0123 * r.load_factor);
        assert_eq!(r.u[0], 0.0);
        assert_eq!(r.u[1], 0.0);
        assert_eq!(r.u[6], 0.0);
    }
}

#[test]
fn bar_matches_scalar_oracle() {
    let b = benchmarks::generate("bar-sanity").unwrap();
    for method in [Method::S, Method::SP, Method::SC1] {
        let h = run(&b.model, &SolverConfig { method, steps: b.steps, tol: 1e-10, ..SolverConfig::default() });
        assert!(h.converged());
        let v = h.records.last().unwrap().monitors[0];
        let oracle = bar_sanity_oracle(BAR_LOAD);
        assert!((v - oracle).abs() <= 1e-8 * oracle, "{method:?}: {v} vs {oracle}");
    }
}

#[test]
fn internal_force_balances_globally() {
    let b = benchmarks::generate("spatial-angle-frame").unwrap();
    for method in Method::ALL.into_iter().filter(|m| *m != Method::S) {
        let h = run(&b.model, &SolverConfig { method, steps: 5, ..SolverConfig::default() });
        assert!(h.converged());
        let r = h.records.last().unwrap();
        let st = GlobalState {
            u: r.u.clone(),
            triads: r.u.chunks(6).map(|c| exp_rotvec(&Vec3::new(c[3], c[4], c[5]))).collect(),
            load_factor: r.load_factor,
        };
        let a = assemble(&b.model, &st, method).unwrap();
        let mut sum = Vec3::zero();
        let mut scale: f64 = 0.0;
        for c in a.internal.chunks(6) {
            sum += Vec3::new(c[0], c[1], c[2]);
            scale = scale.max(c.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        }
        assert!(sum.max_abs() <= 1e-10 * scale, "{method:?}: {sum:?}");
    }
}

fn rotate_model(m: &Model, q: &Mat3<f64>) -> Model {
    let nodes = m.nodes.iter().map(|p| q.mul_vec(p)).collect();
    let elements = m
        .elements
        .iter()
        .map(|e| {
            let frame = beam_initial_frame(&m.nodes[e.nodes[0]], &m.nodes[e.nodes[1]], e.orientation).unwrap();
            ElementDef { orientation: Some(q.mul_vec(&frame.col(1))), ..e.clone() }
        })
        .collect();
    let loads = m
        .loads
        .iter()
        .map(|l| {
            let f = q.mul_vec(&Vec3::new(l.vector[0], l.vector[1], l.vector[2]));
            let mo = q.mul_vec(&Vec3::new(l.vector[3], l.vector[4], l.vector[5]));
            NodalLoad { vector: [f.0, mo.0].concat(), ..l.clone() }
        })
        .collect();
    Model::new(m.regime, nodes, elements, m.fixed.clone(), loads, m.monitors.clone()).unwrap()
}

#[test]
fn whole_pipeline_is_objective() {
    let b = benchmarks::generate("spatial-angle-frame").unwrap();
    let q = exp_rotvec(&Vec3::new(0.3, -0.7, 0.4));
    let turned = rotate_model(&b.model, &q);
    for method in [Method::SP, Method::SC1, Method::SC3, Method::S] {
        let config = SolverConfig { method, steps: 5, tol: 1e-9, ..SolverConfig::default() };
        let a = run(&b.model, &config);
        let c = run(&turned, &config);
        assert!(a.converged() && c.converged());
        let ua = &a.records.last().unwrap().u;
        let uc = &c.records.last().unwrap().u;
        let scale = ua.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (pa, pc) in ua.chunks(6).zip(uc.chunks(6)) {
            let d = q.mul_vec(&Vec3::new(pa[0], pa[1], pa[2])) - Vec3::new(pc[0], pc[1], pc[2]);
            assert!(d.max_abs() <= 1e-8 * scale, "{method:?}: {d:?}");
        }
    }
}

#[test]
fn strain_energy_nondecreasing_under_monotone_load() {
    let b = benchmarks::generate("spatial-cantilever").unwrap();
    let h = run(&b.model, &SolverConfig { method: Method::SC1, steps: 6, ..SolverConfig::default() });
    assert!(h.converged());
    for w in h.records.windows(2) {
        assert!(w[1].strain_energy >= w[0].strain_energy, "{} then {}", w[0].strain_energy, w[1].strain_energy);
    }
}

#[test]
fn bisection_recovers_from_large_increments() {
    let b = benchmarks::generate("spatial-angle-frame").unwrap();
    let h = run(&b.model, &SolverConfig { method: Method::SC1, steps: 1, max_iter: 4, ..SolverConfig::default() });
    assert!(h.converged(), "{:?}", h.failure);
    assert!(h.records[0].cuts > 0);
}

#[test]
fn exact_frame_methods_coincide_on_plane_frame() {
    let b = benchmarks::generate_with("plane-angle-frame", &BenchOptions { element: Some(ElementKind::Cst3) }).unwrap();
    let m = b.model.with_strategy(FrameStrategy::PolarDecomp).unwrap();
    let runs: Vec<_> = [Method::S, Method::SP, Method::SC1]
        .into_iter()
        .map(|method| run(&m, &SolverConfig { method, steps: 4, ..SolverConfig::default() }))
        .collect();
    for h in &runs[1..] {
        assert!(benchmarks::curve_deviation(h, &runs[0]) <= 1e-8);
    }
}

#[test]
fn invalid_models_are_rejected() {
    let m = square_model(1.0, 0.0);
    let bad_node = Model::new(
        Regime::Plane,
        m.nodes.clone(),
        vec![ElementDef { nodes: vec![0, 1, 9], ..m.elements[0].clone() }],
        vec![],
        vec![],
        vec![],
    );
    assert!(bad_node.unwrap_err().to_string().contains("element 0"));
    let rotation = Model::new(
        Regime::Plane,
        m.nodes.clone(),
        m.elements.clone(),
        vec![Fixed { node: 0, dof: DofLabel::Rz, value: 0.0 }],
        vec![],
        vec![],
    );
    assert!(rotation.is_err());
    let config = SolverConfig { steps: 0, ..SolverConfig::default() };
    assert!(config.validate().is_err());
}

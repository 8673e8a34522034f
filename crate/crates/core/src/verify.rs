//! Seeded invariant suite covering every module, as run by `corot verify`.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::benchmarks::{self, bar_sanity_oracle};
use crate::correction::{self, WeightCase};
use crate::corot::{self, element_force, element_response, element_tangent_csfd, ElementSetup, Method};
use crate::csfd::{derivative_scalar, jacobian, PerturbSpec};
use crate::elements::{local_stiffness, ElementKind, Regime};
use crate::error::Result;
use crate::linalg::{DMat, Mat3, Vec3};
use crate::rotkit::{exp_rotvec, extract_angle_axis, is_rotation, log_rotvec};
use crate::sample::{compatible_pairs, Sampler};
use crate::scalar::Scalar;
use crate::solver::{assemble, run, GlobalState, SolverConfig};

pub const MODULES: [&str; 8] = ["rotkit", "csfd", "elements", "frames", "corot", "correction", "solver", "bench"];

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed value against its tolerance, or the error hit.
    pub detail: String,
}

struct Suite {
    module: &'static str,
    out: Vec<CheckOutcome>,
}

impl Suite {
    fn record(&mut self, name: &'static str, worst: Result<f64>, tol: f64) {
        let (passed, detail) = match worst {
            Ok(w) => (w <= tol, format!("worst {w:.3e} (tol {tol:.0e})")),
            Err(e) => (false, format!("error: {e}")),
        };
        self.out.push(CheckOutcome { module: self.module, name, passed, detail });
    }
}

/// Runs the suite with a fixed seed; `only` restricts it to one module.
pub fn run_suite(seed: u64, only: Option<&str>) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for (i, &module) in MODULES.iter().enumerate() {
        if only.is_some_and(|m| m != module) {
            continue;
        }
        let mut s = Suite { module, out: Vec::new() };
        let mut rng = Sampler::new(seed.wrapping_mul(0x9e37_79b9).wrapping_add(i as u64));
        match module {
            "rotkit" => rotkit_checks(&mut s, &mut rng),
            "csfd" => csfd_checks(&mut s, &mut rng),
            "elements" => element_checks(&mut s, &mut rng),
            "frames" => frame_checks(&mut s, &mut rng),
            "corot" => corot_checks(&mut s, &mut rng),
            "correction" => correction_checks(&mut s, &mut rng),
            "solver" => solver_checks(&mut s),
            _ => bench_checks(&mut s, &mut rng),
        }
        out.extend(s.out);
    }
    out
}

fn worst_of(n: usize, mut f: impl FnMut() -> Result<f64>) -> Result<f64> {
    let mut w: f64 = 0.0;
    for _ in 0..n {
        w = w.max(f()?);
    }
    Ok(w)
}

fn rel(a: &DMat<f64>, b: &DMat<f64>) -> f64 {
    (a - b).max_abs() / b.max_abs().max(1e-300)
}

fn rotkit_checks(s: &mut Suite, rng: &mut Sampler) {
    s.record(
        "exp_log_round_trip",
        worst_of(200, || {
            let v = rng.vector(1.0);
            let v = v.scale(rng.uniform(0.0, 1.5) / v.norm().max(1e-12));
            Ok((log_rotvec(&exp_rotvec(&v))? - v).max_abs())
        }),
        1e-12,
    );
    s.record(
        "exp_is_rotation",
        worst_of(200, || {
            let r = exp_rotvec(&rng.vector(3.0));
            let e = (r.transpose() * r - Mat3::identity()).max_abs();
            Ok(e.max((r.det() - 1.0).abs()))
        }),
        1e-14,
    );
    s.record(
        "angle_axis_round_trip",
        worst_of(200, || {
            let r = rng.rotation(3.1);
            let (a, n) = extract_angle_axis(&r);
            Ok((exp_rotvec(&n.scale(a)) - r).max_abs())
        }),
        1e-12,
    );
}

fn csfd_checks(s: &mut Suite, rng: &mut Sampler) {
    let d = derivative_scalar(|x: Complex<f64>| Scalar::exp(x) + x * x + Complex::new(1.0, 0.0), 0.5, PerturbSpec::default());
    s.record("exp_polynomial_derivative", d.map(|v| (v - 2.64872127070013).abs()), 1e-12);
    s.record(
        "jacobian_matches_analytic",
        worst_of(20, || {
            let x = rng.values(3, 2.0);
            let j = jacobian(
                |z: &[Complex<f64>]| Ok(vec![z[0] * z[1], Scalar::sin(z[2]) + z[0], z[1] * z[1] * z[2]]),
                &x,
                PerturbSpec::default(),
            )?;
            let exact = DMat::from_row_slice(
                3,
                3,
                &[x[1], x[0], 0.0, 1.0, 0.0, x[2].cos(), 0.0, 2.0 * x[1] * x[2], x[1] * x[1]],
            );
            Ok((&j - &exact).max_abs())
        }),
        1e-14,
    );
}

/// Rigid-body modes of an element in its local layout.
fn rigid_modes(regime: Regime, x: &[Vec3<f64>]) -> Vec<Vec<f64>> {
    let dpn = regime.dofs_per_node();
    let mut modes = Vec::new();
    for t in 0..regime.trans_dims() {
        let mut v = vec![0.0; x.len() * dpn];
        for i in 0..x.len() {
            v[i * dpn + t] = 1.0;
        }
        modes.push(v);
    }
    for &k in regime.spin_dims() {
        let w = Vec3::unit(k);
        let mut v = vec![0.0; x.len() * dpn];
        for (i, p) in x.iter().enumerate() {
            let u = w.cross(p);
            for c in 0..regime.trans_dims() {
                v[i * dpn + c] = u.0[c];
            }
            if regime.has_rotations() {
                v[i * dpn + 3 + k] = 1.0;
            }
        }
        modes.push(v);
    }
    modes
}

pub const ZERO_EIG: f64 = 1e-12;

fn element_checks(s: &mut Suite, rng: &mut Sampler) {
    let mut sym: f64 = 0.0;
    let mut rigid: f64 = 0.0;
    let mut modes_ok = 0.0;
    let mut err = None;
    for kind in ElementKind::ALL {
        for _ in 0..5 {
            let setup = match rng.element(kind, crate::frames::FrameStrategy::default_for(kind)) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    continue;
                }
            };
            let k = match local_stiffness(kind, &setup.xbar0, &setup.material) {
                Ok(k) => k,
                Err(e) => {
                    err = Some(e);
                    continue;
                }
            };
            let scale = k.max_abs();
            sym = sym.max((&k - &k.transpose()).max_abs() / scale);
            for m in rigid_modes(kind.regime(), &setup.xbar0) {
                let f = k.mul_vec(&m);
                rigid = rigid.max(f.iter().fold(0.0f64, |a, v| a.max(v.abs())) / scale);
            }
            let eig = nalgebra::SymmetricEigen::new(k.sym_part().to_nalgebra());
            let emax = eig.eigenvalues.amax();
            // Thin-shell drilling modes sit near 1e-10 of the largest eigenvalue.
            let zeros = eig.eigenvalues.iter().filter(|v| v.abs() < ZERO_EIG * emax).count();
            if zeros != kind.zero_modes() {
                modes_ok = 1.0;
            }
        }
    }
    let res = |v: f64| match &err {
        Some(e) => Err(e.clone()),
        None => Ok(v),
    };
    s.record("stiffness_symmetric", res(sym), 1e-12);
    s.record("rigid_modes_annihilated", res(rigid), 1e-10);
    s.record("zero_mode_count", res(modes_ok), 0.0);
}

fn frame_checks(s: &mut Suite, rng: &mut Sampler) {
    s.record(
        "frame_objectivity",
        worst_of(10, || {
            let mut w: f64 = 0.0;
            for (kind, strat) in compatible_pairs() {
                let setup = rng.element(kind, strat)?;
                let st = rng.deformed_state(&setup, 0.05);
                let m = rng.rigid_motion(setup.regime());
                let moved = corot::ElementGlobalState {
                    x: st.x.iter().map(|p| m.apply(p)).collect(),
                    triads: st.triads.iter().map(|t| m.q * *t).collect(),
                };
                let a = setup.frame(&st)?;
                let b = setup.frame(&moved)?;
                w = w.max((m.q * a.r - b.r).max_abs());
                w = w.max((m.apply(&a.origin) - b.origin).max_abs() / setup.diam);
            }
            Ok(w)
        }),
        1e-10,
    );
    s.record(
        "frame_is_rotation",
        worst_of(10, || {
            let mut w: f64 = 0.0;
            for (kind, strat) in compatible_pairs() {
                let setup = rng.element(kind, strat)?;
                let r = setup.frame(&rng.deformed_state(&setup, 0.1))?.r;
                w = w.max(if is_rotation(&r, 1e-12) { 0.0 } else { 1.0 });
            }
            Ok(w)
        }),
        0.0,
    );
}

fn methods_for(setup: &ElementSetup) -> impl Iterator<Item = Method> + '_ {
    Method::ALL.into_iter().filter(|m| m.supports(setup.regime()))
}

fn corot_checks(s: &mut Suite, rng: &mut Sampler) {
    s.record(
        "rigid_motion_zero_force",
        worst_of(5, || {
            let mut w: f64 = 0.0;
            for (kind, strat) in compatible_pairs() {
                let setup = rng.element(kind, strat)?;
                let (st, _) = rng.rigid_state(&setup);
                for m in methods_for(&setup) {
                    let f = element_force(m, &setup, &st)?;
                    let fm = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                    w = w.max(fm / (setup.material.e * setup.diam));
                }
            }
            Ok(w)
        }),
        1e-9,
    );
    s.record(
        "tangent_matches_complex_step",
        worst_of(2, || {
            let mut w: f64 = 0.0;
            for (kind, strat) in compatible_pairs() {
                let setup = rng.element(kind, strat)?;
                let st = rng.deformed_state(&setup, 0.05);
                for m in methods_for(&setup) {
                    let r = element_response(m, &setup, &st)?;
                    w = w.max(rel(&r.k, &element_tangent_csfd(m, &setup, &st)?));
                }
            }
            Ok(w)
        }),
        1e-8,
    );
    s.record(
        "projected_force_self_equilibrated",
        worst_of(5, || {
            let mut w: f64 = 0.0;
            for (kind, strat) in compatible_pairs() {
                let setup = rng.element(kind, strat)?;
                let st = rng.deformed_state(&setup, 0.05);
                let f = corot::force_sp(&setup, &st)?;
                let g = correction::constraint(setup.regime(), &f, &st.x);
                let fm = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                w = w.max(g.iter().fold(0.0f64, |a, v| a.max(v.abs())) / (1.0 + fm * setup.diam));
            }
            Ok(w)
        }),
        1e-9,
    );
    s.record(
        "bi_orthogonality",
        worst_of(20, || {
            let mut w: f64 = 0.0;
            for (kind, strat) in [
                (ElementKind::Cst3, crate::frames::FrameStrategy::SideAlign2D),
                (ElementKind::TriShell3, crate::frames::FrameStrategy::SideAlign3D),
            ] {
                let setup = rng.element(kind, strat)?;
                let st = rng.deformed_state(&setup, 0.05);
                let ls = corot::local_state(&setup, &st)?;
                let g = corot::spin_fitter(&setup, &st)?;
                let gs = g.matmul(&corot::spin_lever(setup.regime(), &ls.xbar));
                w = w.max((&gs - &DMat::identity(gs.nrows())).max_abs());
            }
            Ok(w)
        }),
        1e-8,
    );
}

/// Dense minimum-norm solve of the weighted correction problem: minimize
/// `½ f̲ᵀ W f̲` subject to `g_f (f + f̲) = 0`, over the components with
/// nonzero `W⁻¹`.
pub fn correction_oracle(regime: Regime, f: &[f64], x: &[Vec3<f64>], case: WeightCase) -> Result<Vec<f64>> {
    let winv = correction::weight_inverse(regime, x.len(), case)?;
    let gf = correction::constraint_jacobian(regime, x);
    let active: Vec<usize> = (0..f.len()).filter(|&i| winv[i] > 0.0).collect();
    let a = DMatrix::from_fn(gf.nrows(), active.len(), |i, j| gf[(i, active[j])]);
    let g = gf.mul_vec(f);
    let rhs = DMatrix::from_fn(g.len(), 1, |i, _| -g[i]);
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let y = svd.solve(&rhs, 1e-10 * smax).map_err(|_| crate::error::Error::SingularMatrix)?;
    let mut out = vec![0.0; f.len()];
    for (j, &i) in active.iter().enumerate() {
        out[i] = y[(j, 0)];
    }
    Ok(out)
}

fn correction_checks(s: &mut Suite, rng: &mut Sampler) {
    let cases = |regime: Regime| {
        if regime.has_rotations() {
            vec![WeightCase::CaseI, WeightCase::CaseII, WeightCase::CaseIII]
        } else {
            vec![WeightCase::CaseI]
        }
    };
    let regimes = [Regime::Plane, Regime::Solid, Regime::Structural];
    s.record(
        "corrected_force_self_equilibrated",
        worst_of(50, || {
            let mut w: f64 = 0.0;
            for regime in regimes {
                let nodes = 3 + rng.index(3);
                let (f, x) = rng.force_and_positions(regime, nodes);
                for case in cases(regime) {
                    let f = if case == WeightCase::CaseII { balance_translations(regime, &f) } else { f.clone() };
                    let c = correction::correct(regime, &f, &x, case)?;
                    let ff: Vec<f64> = f.iter().zip(&c.f_corr).map(|(a, b)| a + b).collect();
                    let g = correction::constraint(regime, &ff, &x);
                    let fm = ff.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                    w = w.max(g.iter().fold(0.0f64, |a, v| a.max(v.abs())) / (1.0 + fm * correction::diameter(&x)));
                }
            }
            Ok(w)
        }),
        1e-10,
    );
    s.record(
        "closed_form_matches_dense_oracle",
        worst_of(100, || {
            let mut w: f64 = 0.0;
            for regime in regimes {
                let nodes = 2 + rng.index(4);
                let (f, x) = rng.force_and_positions(regime, nodes);
                for case in cases(regime) {
                    let f = if case == WeightCase::CaseII { balance_translations(regime, &f) } else { f.clone() };
                    let c = correction::correct(regime, &f, &x, case)?;
                    let o = correction_oracle(regime, &f, &x, case)?;
                    let scale = o.iter().fold(1e-300f64, |a, v| a.max(v.abs()));
                    let d = c.f_corr.iter().zip(&o).fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
                    w = w.max(d / scale);
                }
            }
            Ok(w)
        }),
        1e-11,
    );
    s.record(
        "linear_projector_idempotent",
        worst_of(50, || {
            let regime = regimes[rng.index(3)];
            let nodes = 2 + rng.index(4);
            let (f, x) = rng.force_and_positions(regime, nodes);
            let p = correction::linear_projector_t(regime, &x)?;
            let e1 = (&p.matmul(&p) - &p).max_abs();
            let c = correction::correct(regime, &f, &x, WeightCase::CaseI)?;
            let pf = p.mul_vec(&f);
            let e2 = f.iter().zip(&c.f_corr).zip(&pf).fold(0.0f64, |a, ((fi, ci), pi)| a.max((fi + ci - pi).abs()));
            let fm = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            Ok(e1.max(e2 / fm))
        }),
        1e-12,
    );
    s.record(
        "correction_tangent_matches_complex_step",
        worst_of(3, || {
            let mut w: f64 = 0.0;
            for (kind, strat) in compatible_pairs() {
                let setup = rng.element(kind, strat)?;
                let st = rng.deformed_state(&setup, 0.05);
                for m in methods_for(&setup).filter(|m| m.is_corrected()) {
                    let r = element_response(m, &setup, &st)?;
                    w = w.max(rel(&r.k, &element_tangent_csfd(m, &setup, &st)?));
                }
            }
            Ok(w)
        }),
        1e-8,
    );
}

/// Removes the resultant of the translational components.
pub fn balance_translations(regime: Regime, f: &[f64]) -> Vec<f64> {
    let dpn = regime.dofs_per_node();
    let td = regime.trans_dims();
    let n = f.len() / dpn;
    let mut out = f.to_vec();
    for c in 0..td {
        let mean = (0..n).map(|i| f[i * dpn + c]).sum::<f64>() / n as f64;
        for i in 0..n {
            out[i * dpn + c] -= mean;
        }
    }
    out
}

fn solver_checks(s: &mut Suite) {
    s.record(
        "bar_matches_scalar_oracle",
        (|| {
            let b = benchmarks::generate("bar-sanity")?;
            let h = run(&b.model, &SolverConfig { steps: b.steps, tol: 1e-9, ..SolverConfig::default() });
            if let Some(e) = h.failure {
                return Err(e);
            }
            let oracle = bar_sanity_oracle(benchmarks::BAR_LOAD);
            Ok((h.records.last().unwrap().monitors[0] - oracle).abs() / oracle)
        })(),
        1e-8,
    );
    s.record(
        "reference_state_residual_zero",
        (|| {
            let mut w: f64 = 0.0;
            for name in benchmarks::NAMES {
                let b = benchmarks::generate(name)?;
                let a = assemble(&b.model, &GlobalState::initial(&b.model), Method::SC1)?;
                w = w.max(a.internal.iter().fold(0.0f64, |m, v| m.max(v.abs())));
            }
            Ok(w)
        })(),
        0.0,
    );
    s.record(
        "internal_forces_balance_globally",
        (|| {
            let b = benchmarks::generate("spatial-angle-frame")?;
            let cfg = SolverConfig { steps: 4, ..SolverConfig::default() };
            let h = run(&b.model, &cfg);
            let rec = h.records.last().ok_or_else(|| h.failure.clone().unwrap())?;
            let st = GlobalState {
                u: rec.u.clone(),
                triads: rec.u.chunks(6).map(|c| exp_rotvec(&Vec3([c[3], c[4], c[5]]))).collect(),
                load_factor: rec.load_factor,
            };
            let mut w: f64 = 0.0;
            for m in [Method::SP, Method::SC1, Method::SC2, Method::SC3] {
                let a = assemble(&b.model, &st, m)?;
                let mut sum = Vec3::zero();
                let mut scale: f64 = 0.0;
                for c in a.internal.chunks(6) {
                    sum += Vec3([c[0], c[1], c[2]]);
                    scale = scale.max(c.iter().fold(0.0f64, |m, v| m.max(v.abs())));
                }
                w = w.max(sum.max_abs() / scale);
            }
            Ok(w)
        })(),
        1e-10,
    );
}

fn bench_checks(s: &mut Suite, rng: &mut Sampler) {
    s.record(
        "generated_elements_rigid_and_tangent",
        (|| {
            let mut w: f64 = 0.0;
            for name in benchmarks::NAMES {
                let b = benchmarks::generate(name)?;
                let setups = b.model.setups();
                for _ in 0..3 {
                    let setup = &setups[rng.index(setups.len())];
                    let (st, _) = rng.rigid_state(setup);
                    let f = element_force(Method::S, setup, &st)?;
                    let fm = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                    w = w.max(fm / (setup.material.e * setup.diam) * 1e-1);
                    let st = rng.deformed_state(setup, 0.02);
                    let r = element_response(Method::SC1, setup, &st)?;
                    w = w.max(rel(&r.k, &element_tangent_csfd(Method::SC1, setup, &st)?));
                }
            }
            Ok(w)
        })(),
        1e-8,
    );
    s.record(
        "protocol_parameters",
        (|| {
            let annulus = benchmarks::generate("slit-annulus")?;
            let cant = benchmarks::generate("spatial-cantilever")?;
            let frame = benchmarks::generate("spatial-angle-frame")?;
            let total: f64 = annulus.model.external_load(1.0).chunks(6).map(|c| c[2]).sum();
            let ok = annulus.model.elements.len() == 180
                && annulus.steps == 50
                && (total - 0.8 * 4.0).abs() < 1e-12
                && cant.model.elements.len() == 20
                && frame.model.elements.len() == 12;
            Ok(if ok { 0.0 } else { 1.0 })
        })(),
        0.0,
    );
}

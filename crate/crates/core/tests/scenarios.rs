use bracketflow_core::free_algebra::MultiIndex;
use bracketflow_core::input_signals::Signal;
use bracketflow_core::scenarios::*;
use bracketflow_core::simulator::*;
use bracketflow_core::vector_fields::{iterated_bracket, lie_derivative, ScalarField, VectorField};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H: f64 = 0.8660254037844386;

fn triangle_start() -> Vec<f64> {
    vec![-0.15, 0.1, 0.3, 1.2, -0.1, 1.2, 0.45, H + 0.2, -0.7]
}

fn triangle() -> FormationScenario {
    build_formation_scenario(&FormationConfig::triangle(1.0, triangle_start())).unwrap()
}

fn rhs(d: &dyn Dynamics, t: f64, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    d.rhs(t, x, &mut out);
    out
}

#[test]
fn scalar_linear_limit_is_unit_decay() {
    for family in [InputFamily::Sawtooth, InputFamily::Sinusoid { omegas: vec![1.0] }] {
        let scn = build_linear_scenario(&LinearConfig::scalar(family)).unwrap();
        assert_eq!(scn.closed_limit().matrix(0.3), [-1.0]);
        for x in [-2.0, 0.5, 3.0] {
            let e = scn.extended().eval(0.3, &[x]).unwrap();
            assert!((e[0] + x).abs() < 1e-12, "{e:?}");
        }
        assert_eq!(scn.hurwitz(), Some(true));
        assert!(scn.warnings().is_empty());
    }
}

#[test]
fn origin_is_an_equilibrium_of_every_sigma_j() {
    let cfg = LinearConfig {
        n: 2,
        p: 2,
        a: vec![0.5, 1.0, -0.3, 0.2],
        b: vec![1.0, 0.2, 0.0, 1.0],
        lambdas: vec![Signal::Constant(1.0), Signal::Constant(2.0)],
        family: InputFamily::Sinusoid { omegas: vec![1.0, 2.0] },
    };
    let scn = build_linear_scenario(&cfg).unwrap();
    for j in [1.0, 10.0, 1000.0] {
        let sys = scn.sigma_j(j).unwrap();
        for k in 0..50 {
            assert_eq!(rhs(&sys, 0.137 * k as f64, &[0.0, 0.0]), [0.0, 0.0]);
        }
    }
    let saw = build_linear_scenario(&LinearConfig::scalar(InputFamily::Sawtooth)).unwrap();
    assert_eq!(rhs(&saw.sigma_j(7.0).unwrap(), 0.3, &[0.0]), [0.0]);
}

#[test]
fn two_channel_limit_matches_brackets() {
    let cfg = LinearConfig {
        n: 2,
        p: 2,
        a: vec![0.5, 1.0, -0.3, 0.2],
        b: vec![1.0, 0.2, 0.0, 1.0],
        lambdas: vec![Signal::Constant(1.0), Signal::sum([Signal::Constant(2.0), Signal::sin(0.5, 1.0)])],
        family: InputFamily::Sinusoid { omegas: vec![1.0, 2.0] },
    };
    let scn = build_linear_scenario(&cfg).unwrap();
    assert_eq!(scn.hurwitz(), None);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let t = rng.gen_range(0.0..6.0);
        let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let a = scn.extended().eval(t, &x).unwrap();
        let b = rhs(scn.closed_limit(), t, &x);
        assert!((a[0] - b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9, "{a:?} {b:?}");
    }
}

#[test]
fn linear_config_errors() {
    let mut cfg = LinearConfig::scalar(InputFamily::Sinusoid { omegas: vec![1.0] });
    cfg.b = vec![0.0];
    assert_eq!(build_linear_scenario(&cfg).unwrap_err(), ScenarioError::RankDeficient(0, 1));
    let cfg = LinearConfig { n: 2, p: 1, a: vec![0.0; 4], b: vec![1.0, 1.0], ..LinearConfig::scalar(InputFamily::Sawtooth) };
    assert_eq!(build_linear_scenario(&cfg).unwrap_err(), ScenarioError::RankDeficient(1, 2));
    let cfg = LinearConfig { a: vec![1.0, 2.0], ..LinearConfig::scalar(InputFamily::Sawtooth) };
    assert!(matches!(build_linear_scenario(&cfg), Err(ScenarioError::Shape { what: "A", .. })));
    let cfg = LinearConfig { lambdas: vec![Signal::Constant(2.0)], ..LinearConfig::scalar(InputFamily::Sawtooth) };
    assert_eq!(build_linear_scenario(&cfg).unwrap_err(), ScenarioError::Sawtooth);
    let cfg = LinearConfig { a: vec![3.0], ..LinearConfig::scalar(InputFamily::Sinusoid { omegas: vec![1.0] }) };
    let scn = build_linear_scenario(&cfg).unwrap();
    assert_eq!(scn.hurwitz(), Some(false));
    assert_eq!(scn.warnings().len(), 1);
}

#[test]
fn sawtooth_oscillation_shrinks_with_j() {
    let scn = build_linear_scenario(&LinearConfig::scalar(InputFamily::Sawtooth)).unwrap();
    let p = StepPolicy::default();
    let late = |j: f64| {
        let tr = integrate(&scn.sigma_j(j).unwrap(), 0.0, &[1.0], 6.0, &p).unwrap();
        assert!(tr.completed());
        tr.states()
            .enumerate()
            .filter(|(k, _)| tr.time(*k) >= 1.0)
            .map(|(k, x)| (x[0] - (-tr.time(k)).exp()).abs())
            .fold(0.0, f64::max)
    };
    let d: Vec<f64> = [1.0, 10.0, 100.0, 1000.0].into_iter().map(late).collect();
    assert!(d.windows(2).all(|w| w[0] > w[1]), "{d:?}");
}

#[test]
fn potential_examples() {
    let cfg = FormationConfig::triangle(1.0, triangle_start());
    let scn = build_formation_scenario(&cfg).unwrap();
    let (v, g) = gradient_potential(scn.witness(), &cfg.edges, &cfg.targets);
    assert!(v < 1e-30 && g.iter().all(|x| x.abs() < 1e-15));
    let (v, g) = gradient_potential(&[0.0, 0.0, 2.0, 0.0], &[(0, 1)], &[1.0]);
    assert_eq!(v, 2.25);
    assert_eq!(g, [-6.0, 0.0, 6.0, 0.0]);
}

proptest! {
    #[test]
    fn gradient_matches_central_differences(p in prop::collection::vec(-2.0..2.0f64, 6)) {
        let edges = [(0, 1), (0, 2), (1, 2)];
        let targets = [1.0, 1.3, 0.8];
        let (_, g) = gradient_potential(&p, &edges, &targets);
        let scale = g.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for k in 0..6 {
            let h = 1e-5;
            let (mut a, mut b) = (p.clone(), p.clone());
            a[k] += h;
            b[k] -= h;
            let fd = (gradient_potential(&a, &edges, &targets).0 - gradient_potential(&b, &edges, &targets).0) / (2.0 * h);
            prop_assert!((fd - g[k]).abs() <= 1e-6 * scale, "{} {}", fd, g[k]);
        }
    }

    #[test]
    fn potential_vanishes_exactly_on_rigid_copies(angle in -3.2..3.2f64, dx in -5.0..5.0f64, dy in -5.0..5.0f64, noise in 1e-3..0.3f64) {
        let scn = triangle();
        let w = scn.witness();
        let (c, s) = (angle.cos(), angle.sin());
        let moved: Vec<f64> = (0..3).flat_map(|a| {
            let (x, y) = (w[2 * a], w[2 * a + 1]);
            [c * x - s * y + dx, s * x + c * y + dy]
        }).collect();
        let cfg = scn.config();
        let (v, _) = gradient_potential(&moved, &cfg.edges, &cfg.targets);
        prop_assert!((0.0..1e-24).contains(&v));
        let mut off = moved.clone();
        off[0] += noise;
        prop_assert!(gradient_potential(&off, &cfg.edges, &cfg.targets).0 > 0.0);
    }
}

#[test]
fn lifted_gradient_identity() {
    let scn = triangle();
    let psi = ScalarField::analytic(scn.potential().clone());
    let cfg = scn.config();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..25 {
        let x: Vec<f64> = (0..9).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut lhs = vec![0.0; 6];
        for a in 0..3 {
            let th = x[3 * a + 2];
            let gt = VectorField::analytic(Translational { agent: a, agents: 3 });
            let gp = VectorField::analytic(Perpendicular { agent: a, agents: 3 });
            let (ct, cp) = (lie_derivative(&gt, &psi, 0.0, &x).unwrap(), lie_derivative(&gp, &psi, 0.0, &x).unwrap());
            lhs[2 * a] += ct * th.cos() - cp * th.sin();
            lhs[2 * a + 1] += ct * th.sin() + cp * th.cos();
        }
        let p: Vec<f64> = Projection::Positions.apply(&x);
        let (_, g) = gradient_potential(&p, &cfg.edges, &cfg.targets);
        for (a, b) in lhs.iter().zip(&g) {
            assert!((a - b).abs() <= 1e-8 * (1.0 + b.abs()), "{lhs:?} {g:?}");
        }
    }
}

#[test]
fn perpendicular_field_is_a_bracket() {
    let fields: Vec<VectorField> = {
        let mut r = vec![0.0; 6];
        r[5] = 1.0;
        vec![
            VectorField::analytic(bracketflow_core::vector_fields::ConstantField(r)),
            VectorField::analytic(Translational { agent: 1, agents: 2 }),
        ]
    };
    let gp = Perpendicular { agent: 1, agents: 2 };
    let x = [0.3, -1.0, 2.0, 0.7, 0.1, 0.9];
    let b = iterated_bracket(&fields, &MultiIndex::new(2, [1, 2]).unwrap(), 0.0, &x).unwrap();
    let want = VectorField::analytic(gp).eval(0.0, &x);
    for (u, v) in b.iter().zip(&want) {
        assert!((u - v).abs() < 1e-14, "{b:?} {want:?}");
    }
    assert!((want[3] + 0.9f64.sin()).abs() < 1e-15 && (want[4] - 0.9f64.cos()).abs() < 1e-15);
}

#[test]
fn bracket_limit_matches_closed_form() {
    let scn = triangle();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let x: Vec<f64> = (0..9).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let a = scn.extended().eval(0.0, &x).unwrap();
        let b = rhs(scn.closed_limit(), 0.0, &x);
        let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() <= 1e-9 * scale, "{a:?} {b:?}");
        }
    }
}

#[test]
fn limit_is_stationary_on_the_target_set() {
    let scn = triangle();
    let w = scn.witness();
    let x: Vec<f64> = (0..3).flat_map(|a| [w[2 * a], w[2 * a + 1], 0.4 * a as f64]).collect();
    assert!(rhs(scn.closed_limit(), 0.0, &x).iter().all(|v| v.abs() < 1e-15));
    assert_eq!(scn.dist_to_e(&x), 0.0);
}

#[test]
fn limit_projects_onto_gradient_flow() {
    let scn = triangle();
    let x0 = triangle_start();
    let p = StepPolicy::default();
    let lifted = integrate(scn.closed_limit(), 0.0, &x0, 10.0, &p).unwrap();
    let flow = integrate(&scn.gradient_flow(), 0.0, &Projection::Positions.apply(&x0), 10.0, &p).unwrap();
    assert_eq!(lifted.len(), flow.len());
    let mut worst = 0.0f64;
    for k in 0..lifted.len() {
        let a = Projection::Positions.apply(lifted.state(k));
        worst = a.iter().zip(flow.state(k)).map(|(u, v)| (u - v).abs()).fold(worst, f64::max);
    }
    assert!(worst <= 1e-6, "{worst}");
    for (k, x) in lifted.states().enumerate() {
        for a in 0..3 {
            assert_eq!(x[3 * a + 2], x0[3 * a + 2], "heading moved at step {k}");
        }
    }
}

#[test]
fn potential_decreases_along_limit() {
    let scn = triangle();
    let tr = integrate(scn.closed_limit(), 0.0, &triangle_start(), 3.0, &StepPolicy::default()).unwrap();
    let psi: Vec<f64> = tr.states().map(|x| scn.psi(x)).collect();
    assert!((psi[0] - 0.420042997352384).abs() < 1e-12);
    let resolved: Vec<f64> = psi.iter().copied().take_while(|v| *v > 1e-25).collect();
    assert!(resolved.len() > 100);
    assert!(resolved.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn start_distance_to_target_set() {
    let scn = triangle();
    let d = scn.dist_to_e(&triangle_start());
    assert!((d - 0.3304190132835552).abs() < 1e-9, "{d}");
}

#[test]
fn translation_invariance() {
    let scn = triangle();
    let x0 = triangle_start();
    let p = StepPolicy::default();
    let all = [(1.0, 0.0); 3];
    let r = translation_invariance_residual(scn.closed_limit(), &x0, &all, 0.0, 5.0, &p).unwrap();
    assert!(r <= 1e-9, "{r}");
    let one = [(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)];
    let r = translation_invariance_residual(scn.closed_limit(), &x0, &one, 0.0, 5.0, &p).unwrap();
    assert!(r > 0.1, "{r}");
    let sys = scn.sigma_j(20.0).unwrap();
    let r = translation_invariance_residual(&sys, &x0, &[(0.5, -2.0); 3], 0.0, 2.0, &p).unwrap();
    assert!(r <= 1e-8, "{r}");
    assert!(matches!(
        translation_invariance_residual(scn.closed_limit(), &x0, &[(1.0, 0.0)], 0.0, 1.0, &p),
        Err(SimError::Dimension(9, 3))
    ));
}

#[test]
fn sigma_j_reduces_potential() {
    let scn = triangle();
    let x0 = triangle_start();
    let tr = integrate(&scn.sigma_j(30.0).unwrap(), 0.0, &x0, 10.0, &StepPolicy::default()).unwrap();
    assert!(tr.completed());
    assert!(scn.psi(tr.final_state()) < 1e-6 * scn.psi(&x0));
}

#[test]
fn formation_config_errors() {
    let x0 = triangle_start();
    let mut cfg = FormationConfig::triangle(1.0, x0.clone());
    cfg.edges[1] = (0, 0);
    assert_eq!(build_formation_scenario(&cfg).unwrap_err(), ScenarioError::Edge(0, 0));
    let mut cfg = FormationConfig::triangle(1.0, x0.clone());
    cfg.targets[2] = -1.0;
    assert_eq!(build_formation_scenario(&cfg).unwrap_err(), ScenarioError::Target(-1.0));
    let mut cfg = FormationConfig::triangle(1.0, x0.clone());
    cfg.targets = vec![1.0, 1.0, 3.0];
    assert_eq!(build_formation_scenario(&cfg).unwrap_err(), ScenarioError::NoWitness);
    cfg.witness = Some(vec![0.0, 0.0, 1.0, 0.0, 0.5, H]);
    assert!(matches!(build_formation_scenario(&cfg), Err(ScenarioError::Infeasible { edge: 2, .. })));
    let mut cfg = FormationConfig::triangle(1.0, x0);
    cfg.initial.pop();
    assert!(matches!(build_formation_scenario(&cfg), Err(ScenarioError::Shape { what: "initial state", .. })));
}

#[test]
fn explicit_witness_is_accepted() {
    let cfg = FormationConfig {
        agents: 4,
        edges: vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)],
        targets: vec![1.0, 1.0, 1.0, 1.0, 2f64.sqrt()],
        witness: Some(vec![0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0]),
        initial: vec![0.0; 12],
    };
    let scn = build_formation_scenario(&cfg).unwrap();
    assert_eq!(scn.system().m(), 12);
    assert_eq!(scn.v().m(), 12);
}

#[test]
fn quartic_limit() {
    let scn = build_quartic_scenario(&QuarticConfig { lambda: 2.0, omega: 1.5 }).unwrap();
    for x in [-1.0, 0.3, 0.9] {
        let want = -8.0 * x * x * x;
        assert!((scn.extended().eval(0.0, &[x]).unwrap()[0] - want).abs() < 1e-12);
        assert!((rhs(scn.closed_limit(), 0.0, &[x])[0] - want).abs() < 1e-12);
    }
    assert_eq!(rhs(&scn.sigma_j(10.0).unwrap(), 0.2, &[0.0]), [0.0]);
}

#[test]
fn scenario_table() {
    let names: Vec<&str> = SCENARIOS.iter().map(|(n, _)| *n).collect();
    assert_eq!(names, ["linear", "formation", "quartic"]);
}

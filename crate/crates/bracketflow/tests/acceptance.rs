//! Acceptance battery: one `[PASS]`/`[FAIL]` line per criterion.
//!
//! Criteria listed in `KNOWN_RED` are reported but do not fail the target.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bracketflow::exec::RayonExecutor;
use bracketflow::experiments::{execute, validate, Outcome};
use bracketflow_core::free_algebra::{bracket_polynomial, check_algebraic_identity, rat, MultiIndex, NcPolynomial, Rational};
use bracketflow_core::input_signals::{
    check_frequency_properties, closed_form_sinusoid_gd, esc_limit_structure, gd_convergence_report,
    integrate_generalized_difference, log_log_slope, unicycle_limit_exact, GdMetric, Signal,
};
use bracketflow_core::scenarios::{
    build_formation_scenario, build_linear_scenario, FormationConfig, InputFamily, LinearConfig,
};
use bracketflow_core::simulator::{
    convergence_sweep, integrate, ConvergenceConfig, DistanceSpec, Projection, Sequential, StepPolicy,
};
use bracketflow_core::stability_lab::{probe_lues, probe_pluas, StabilityProbeConfig};
use bracketflow_core::vector_fields::{
    increasing_trees, output_feedback_fields, tree_expansion_lie_derivative, tree_expansion_terms, word_lie_derivative,
    ConstantField, ControlAffineSystem, FieldFn, LinearField, Real, ScalarField, ScalarFn, Shape, VectorField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_RED: [u32; 2] = [6, 9];

/// Sawtooth j = 100 sup-distance to e^{-t} on [0, 6] at the default step.
const SAWTOOTH_J100_BASELINE: f64 = 0.12819714559457662;
/// The same quantity from an independent adaptive integration (scipy, rtol 1e-11).
const SAWTOOTH_J100_ORACLE: f64 = 0.12819714581451702;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_toml(text: &str) -> Result<Outcome, String> {
    let cfg = bracketflow::config::parse(text).map_err(|e| e.to_string())?;
    let plan = validate(&cfg).map_err(|e| e.to_string())?;
    let exec = RayonExecutor::new(plan.threads).map_err(|e| e.to_string())?;
    execute(&plan, &exec).map_err(|e| e.to_string())
}

fn run_shipped(name: &str) -> Result<Outcome, String> {
    run_toml(&std::fs::read_to_string(configs().join(name)).map_err(|e| e.to_string())?)
}

fn failed_required(o: &Outcome) -> Vec<String> {
    o.verdicts.iter().filter(|v| v.required && !v.passed).map(|v| v.name.clone()).collect()
}

// ---------------------------------------------------------------- 1

const M: usize = 3;

fn random_index(rng: &mut ChaCha8Rng, max_len: usize) -> MultiIndex {
    let len = rng.gen_range(1..=max_len);
    MultiIndex::new(M, (0..len).map(|_| rng.gen_range(1..=M)).collect::<Vec<_>>()).unwrap()
}

fn random_poly(rng: &mut ChaCha8Rng) -> NcPolynomial<Rational> {
    let mut p = NcPolynomial::zero(M);
    for _ in 0..rng.gen_range(1..=4) {
        let c = rat(rng.gen_range(-6..=6), rng.gen_range(1..=5));
        p = p.add(&NcPolynomial::monomial(random_index(rng, 3), c)).unwrap();
    }
    p
}

fn exact_algebra() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let br = |a: &NcPolynomial<Rational>, b: &NcPolynomial<Rational>| a.lie_bracket(b).unwrap();
    let cases = 1000;
    for case in 0..cases {
        let (a, b, c) = (random_poly(&mut rng), random_poly(&mut rng), random_poly(&mut rng));
        ensure(br(&a, &b).add(&br(&b, &a)).unwrap().is_zero(), format!("antisymmetry fails in case {case}"))?;
        let jac = br(&a, &br(&b, &c)).add(&br(&b, &br(&c, &a))).unwrap().add(&br(&c, &br(&a, &b))).unwrap();
        ensure(jac.is_zero(), format!("Jacobi fails in case {case}"))?;
        let i = random_index(&mut rng, 5);
        let p: NcPolynomial<Rational> = bracket_polynomial(&i).unwrap();
        ensure(p.is_homogeneous(i.len()), format!("bracket polynomial of {i} is not homogeneous"))?;
    }
    for p in 1..=3 {
        let c = check_algebraic_identity(&esc_limit_structure(p), 2 * p, 2).map_err(|e| e.to_string())?;
        ensure(c.holds && c.residual == 0.0, format!("sinusoid limit, p = {p}: residual {}", c.residual))?;
    }
    for n in 1..=2 {
        let c = check_algebraic_identity(&unicycle_limit_exact(n), 3 * n, 4).map_err(|e| e.to_string())?;
        ensure(c.holds && c.residual == 0.0, format!("unicycle table, N = {n}: residual {}", c.residual))?;
    }
    Ok(format!("{cases} random cases; sinusoid p = 1..3 and unicycle N = 1, 2 identities with residual 0"))
}

// ---------------------------------------------------------------- 2

fn closed_forms() -> Check {
    let g: Vec<f64> = (0..=2000).map(|k| 10.0 * k as f64 / 2000.0).collect();
    let mut worst: f64 = 0.0;
    for &w in &[1.0, 2.0] {
        for lam in [Signal::Constant(1.0), Signal::offset_sin(1.0, 0.1, 1.0)] {
            for &j in &[10.0, 100.0] {
                let cf = closed_form_sinusoid_gd(&[w], std::slice::from_ref(&lam), j).map_err(|e| e.to_string())?;
                let num = integrate_generalized_difference(&cf.u, &cf.v_j, 0.0, &cf.w.values_at(0.0), &g)
                    .map_err(|e| e.to_string())?;
                for (i, e) in num.iter() {
                    for &t in &g {
                        worst = worst.max((e.eval(t) - cf.w.eval(i, t)).abs());
                    }
                }
            }
        }
    }
    ensure(worst <= 1e-6, format!("integrated vs closed form sup error {worst:.3e}"))?;
    let js = [1e2, 1e3, 1e4];
    let mut reports = Vec::new();
    for &j in &js {
        let cf = closed_form_sinusoid_gd(&[1.0], &[Signal::Constant(1.0)], j).map_err(|e| e.to_string())?;
        reports.push(gd_convergence_report(&cf.u, &cf.v, &cf.v_j, &cf.w, 10.0, j).map_err(|e| e.to_string())?);
    }
    let mut slopes = Vec::new();
    for (order, want) in [(1, -0.5), (2, -1.0)] {
        let vals: Vec<f64> = reports.iter().map(|r| r.max(GdMetric::Difference, Some(order))).collect();
        let s = log_log_slope(&js, &vals).ok_or("slope undefined")?;
        ensure((s - want).abs() <= 0.1, format!("order {order} slope {s:.4}, want {want}"))?;
        slopes.push(s);
    }
    Ok(format!("sup error {worst:.2e}; slopes {:.4} and {:.4}", slopes[0], slopes[1]))
}

// ---------------------------------------------------------------- 3

fn frequencies() -> Check {
    let start = Instant::now();
    for n in 1..=3 {
        let r = check_frequency_properties(n).map_err(|e| e.to_string())?;
        ensure(r.all_hold(), format!("N = {n}: {} violations", r.violation_count))?;
        ensure(r.twelve_per_agent(), format!("N = {n}: patterns per agent {:?}", r.patterns_per_agent))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 5.0, format!("took {secs:.2} s"))?;
    Ok("properties (i)-(iv) hold for N = 1, 2, 3 with 12 non-pair quadruple solutions per agent".into())
}

// ---------------------------------------------------------------- 4

const SCALAR_BRACKETS: &str = r#"
experiment = "brackets-verify"
output = "unused"
[scenario]
name = "linear"
family = "sinusoid"
n = 1
p = 1
a = [1.0]
b = [1.0]
lambda = [1.0]
omegas_rad_s = [1.0]
[brackets]
psi_min = 0.01
psi_max = 10.0
points = 100
"#;

fn bracket_law() -> Check {
    let mut worst = (0.0f64, 0.0f64);
    for text in [SCALAR_BRACKETS.to_string(), std::fs::read_to_string(configs().join("linear_brackets.cfg")).unwrap()] {
        let o = run_toml(&text)?;
        ensure(failed_required(&o).is_empty(), format!("failed: {:?}", failed_required(&o)))?;
        for v in &o.verdicts {
            let x = v.value.unwrap_or(0.0);
            if v.name.starts_with("brackets.analytic") {
                worst.0 = worst.0.max(x);
            } else if v.name.starts_with("brackets.fd") {
                worst.1 = worst.1.max(x);
            }
        }
        ensure(o.verdicts.iter().any(|v| v.name.starts_with("brackets.fd")), "no finite-difference check ran")?;
    }
    Ok(format!("n = 1 and n = 2: analytic residual {:.2e}, finite differences {:.2e}", worst.0, worst.1))
}

// ---------------------------------------------------------------- 5

#[derive(Clone, Debug)]
struct Quad([f64; 3]);

impl FieldFn for Quad {
    fn dim(&self) -> usize {
        1
    }
    fn eval<R: Real>(&self, _t: &R, x: &[R]) -> Vec<R> {
        vec![x[0].square() * self.0[2] + x[0].clone() * self.0[1] + self.0[0]]
    }
}

#[derive(Clone, Debug)]
struct Cube;

impl ScalarFn for Cube {
    fn dim(&self) -> usize {
        1
    }
    fn eval<R: Real>(&self, _t: &R, x: &[R]) -> R {
        x[0].square() * x[0].clone()
    }
}

fn hand_h(shape: Shape, y: f64, nu: usize) -> f64 {
    let (s, c) = (y.ln().sin(), y.ln().cos());
    match (shape, nu) {
        (Shape::One, 0) => 1.0,
        (Shape::One, _) => 0.0,
        (Shape::Sine, 0) => y.sqrt() * s,
        (Shape::Cosine, 0) => y.sqrt() * c,
        (Shape::Sine, 1) => (0.5 * s + c) / y.sqrt(),
        (Shape::Cosine, 1) => (0.5 * c - s) / y.sqrt(),
        (Shape::Sine, 2) => -1.25 * s / y.powf(1.5),
        (Shape::Cosine, 2) => -1.25 * c / y.powf(1.5),
        _ => unreachable!(),
    }
}

/// Six summands for `e ≡ 1`, `ψ = x²`, `α = x³`, keyed by tree parent arrays.
fn six_terms(shapes: &[Shape], letters: [usize; 3], x: f64) -> Vec<([usize; 3], f64)> {
    let y = x * x;
    let (p, q) = (2.0 * x, 2.0);
    let (a1, a2, a3) = (3.0 * x * x, 6.0 * x, 6.0);
    let sh = |k: usize| shapes[letters[3 - k] - 1];
    let h = |k: usize, nu: usize| hand_h(sh(k), y, nu);
    vec![
        ([0, 0, 0], a3 * h(1, 0) * h(2, 0) * h(3, 0)),
        ([0, 0, 2], a2 * h(1, 0) * (p * h(2, 1)) * h(3, 0)),
        ([0, 0, 1], a2 * (p * h(1, 1)) * h(2, 0) * h(3, 0)),
        ([0, 1, 0], a2 * (p * h(1, 1)) * h(2, 0) * h(3, 0)),
        ([0, 1, 1], a1 * (h(1, 2) * p * p + h(1, 1) * q) * h(2, 0) * h(3, 0)),
        ([0, 1, 2], a1 * (p * h(1, 1)) * (p * h(2, 1)) * h(3, 0)),
    ]
}

fn scalar_system(e: Vec<VectorField>, shapes: &[Shape]) -> ControlAffineSystem {
    ControlAffineSystem::new(VectorField::analytic(LinearField { n: 1, a: vec![0.0] }), e)
        .unwrap()
        .with_output(ScalarField::squared_norm(1))
        .unwrap()
        .with_shapes(shapes.to_vec())
        .unwrap()
}

fn tree_expansion() -> Check {
    let mut fact = 1;
    for l in 1..=5 {
        fact *= l;
        let n = increasing_trees(l).map_err(|e| e.to_string())?.len();
        ensure(n == fact, format!("{n} increasing trees of order {l}, want {fact}"))?;
    }
    let one = || VectorField::analytic(ConstantField(vec![1.0]));
    let es = [
        vec![one(), one()],
        vec![VectorField::analytic(Quad([1.0, 0.0, 1.0])), VectorField::analytic(Quad([0.5, -1.0, 0.0]))],
    ];
    let alphas = [ScalarField::coordinate(1, 0), ScalarField::analytic(Cube)];
    let shape_sets = [[Shape::Sine, Shape::Cosine], [Shape::One, Shape::Sine], [Shape::One, Shape::One]];
    let mut worst = 0.0f64;
    for shapes in &shape_sets {
        for e in &es {
            let sys = scalar_system(e.clone(), shapes);
            let f = output_feedback_fields(&sys).map_err(|e| e.to_string())?;
            let psi = sys.output().unwrap();
            for alpha in &alphas {
                for i in MultiIndex::all_up_to(2, 3) {
                    for &x in &[0.35, 0.9, 1.3] {
                        let tree = tree_expansion_lie_derivative(sys.controls(), shapes, psi, alpha, &i, 0.0, &[x])
                            .map_err(|e| e.to_string())?;
                        let direct = word_lie_derivative(&f, &i, alpha, 0.0, &[x]).map_err(|e| e.to_string())?;
                        worst = worst.max((tree - direct).abs());
                    }
                }
            }
        }
    }
    ensure(worst <= 1e-8, format!("tree expansion vs nested derivative {worst:.3e}"))?;
    let shapes = [Shape::Sine, Shape::Cosine];
    let sys = scalar_system(vec![one(), one()], &shapes);
    let alpha = ScalarField::analytic(Cube);
    for letters in [[1, 2, 1], [2, 2, 1], [1, 1, 1], [2, 1, 2]] {
        let i = MultiIndex::new(2, letters.to_vec()).unwrap();
        for &x in &[0.3, 0.8, 1.4] {
            let terms = tree_expansion_terms(sys.controls(), &shapes, sys.output().unwrap(), &alpha, &i, 0.0, &[x])
                .map_err(|e| e.to_string())?;
            ensure(terms.len() == 6, format!("{} terms for {i}", terms.len()))?;
            for (parents, want) in six_terms(&shapes, letters, x) {
                let got = terms.iter().find(|t| t.tree.parents() == parents).ok_or("tree missing")?.value;
                ensure((got - want).abs() <= 1e-10 * (1.0 + want.abs()), format!("{i} {parents:?}: {got} vs {want}"))?;
            }
        }
    }
    Ok(format!("tree counts l! for l <= 5; max deviation {worst:.2e}; six-term display matched"))
}

// ---------------------------------------------------------------- 6

fn sawtooth_pluas_at_one() -> Result<String, String> {
    let scn = build_linear_scenario(&LinearConfig::scalar(InputFamily::Sawtooth)).map_err(|e| e.to_string())?;
    let cfg = StabilityProbeConfig {
        distance: scn.distance_to_e(),
        delta: 1.0,
        epsilons: vec![0.5, 0.1],
        attraction_time: 5.0,
        duration: 10.0,
        t0s: vec![0.0, 0.3],
        x0s: vec![vec![1.0], vec![-0.5], vec![0.2]],
        js: vec![1.0],
        policy: StepPolicy::default(),
        samples: 200,
        fit_residual_max: 0.5,
        min_decades: 3.0,
    };
    let r = probe_pluas(&scn, &cfg, &Sequential).map_err(|e| e.to_string())?;
    let v = &r.verdicts[0];
    ensure(v.failures == 0 && v.attracted.iter().all(|a| *a), format!("j = 1 verdict {v:?}"))?;
    Ok(format!("j = 1 attracted for epsilon {:?} (tail max {:.3e})", cfg.epsilons, v.tail_max))
}

fn sawtooth_sweep() -> Result<(bool, f64, Vec<f64>), String> {
    let scn = build_linear_scenario(&LinearConfig::scalar(InputFamily::Sawtooth)).map_err(|e| e.to_string())?;
    let cfg = ConvergenceConfig {
        js: vec![1.0, 10.0, 100.0],
        t0s: vec![0.0],
        x0s: vec![vec![1.0]],
        horizon: 6.0,
        policy: StepPolicy::default(),
        limit_box: None,
    };
    let rep = convergence_sweep(&scn, &DistanceSpec::identity(), &cfg, &Sequential).map_err(|e| e.to_string())?;
    let sups: Vec<f64> = rep.cells.iter().map(|c| c.sup_d).collect();
    Ok((rep.strictly_decreasing(), sups[2], sups))
}

fn linear_sawtooth() -> Check {
    let start = Instant::now();
    let (decreasing, j100, sups) = sawtooth_sweep()?;
    let a = decreasing;
    let b = j100 <= SAWTOOTH_J100_BASELINE * (1.0 + 1e-6)
        && (j100 - SAWTOOTH_J100_ORACLE).abs() <= 1e-6 * SAWTOOTH_J100_ORACLE;
    let c = sawtooth_pluas_at_one();
    let secs = start.elapsed().as_secs_f64();
    let detail = format!(
        "(a) {} sup-distances {:.4} {:.4} {:.4}; (b) {} j=100 {j100:.10}; (c) {}",
        if a { "ok" } else { "not strictly decreasing:" },
        sups[0],
        sups[1],
        sups[2],
        if b { "ok" } else { "off baseline" },
        c.as_ref().map_or_else(|e| format!("failed: {e}"), |s| format!("ok {s}")),
    );
    if a && b && c.is_ok() && secs < 30.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- 7

fn triangle_start() -> Vec<f64> {
    let h = 3f64.sqrt() / 2.0;
    vec![-0.15, 0.1, 0.3, 1.2, -0.1, 1.2, 0.45, h + 0.2, -0.7]
}

const EDGES: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

fn mensa_rhs(p: &[f64]) -> Vec<f64> {
    let mut u = vec![0.0; p.len()];
    for &(a, b) in &EDGES {
        let (dx, dy) = (p[2 * b] - p[2 * a], p[2 * b + 1] - p[2 * a + 1]);
        let e = dx * dx + dy * dy - 1.0;
        u[2 * a] += dx * e;
        u[2 * a + 1] += dy * e;
        u[2 * b] -= dx * e;
        u[2 * b + 1] -= dy * e;
    }
    u
}

fn mensa(p0: &[f64], h: f64, steps: usize) -> Vec<Vec<f64>> {
    let axpy = |x: &[f64], k: &[f64], s: f64| x.iter().zip(k).map(|(a, b)| a + s * b).collect::<Vec<_>>();
    let mut out = vec![p0.to_vec()];
    let mut p = p0.to_vec();
    for _ in 0..steps {
        let k1 = mensa_rhs(&p);
        let k2 = mensa_rhs(&axpy(&p, &k1, h / 2.0));
        let k3 = mensa_rhs(&axpy(&p, &k2, h / 2.0));
        let k4 = mensa_rhs(&axpy(&p, &k3, h));
        for i in 0..p.len() {
            p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out.push(p.clone());
    }
    out
}

fn psi_tilde(p: &[f64]) -> f64 {
    EDGES
        .iter()
        .map(|&(a, b)| {
            let e = (p[2 * b] - p[2 * a]).powi(2) + (p[2 * b + 1] - p[2 * a + 1]).powi(2) - 1.0;
            0.25 * e * e
        })
        .sum()
}

fn formation() -> Check {
    let start = Instant::now();
    let x0 = triangle_start();
    let scn = build_formation_scenario(&FormationConfig::triangle(1.0, x0.clone())).map_err(|e| e.to_string())?;
    let tr = integrate(scn.closed_limit(), 0.0, &x0, 10.0, &StepPolicy::default()).map_err(|e| e.to_string())?;
    let oracle = mensa(&Projection::Positions.apply(&x0), tr.step(), tr.len() - 1);
    let mut gap = 0.0f64;
    for (k, x) in tr.states().enumerate() {
        let p = Projection::Positions.apply(x);
        gap = p.iter().zip(&oracle[k]).map(|(a, b)| (a - b).abs()).fold(gap, f64::max);
    }
    ensure(gap <= 1e-6, format!("(a) projected limit vs gradient flow {gap:.3e}"))?;

    let psi: Vec<f64> = tr.states().map(|x| psi_tilde(&Projection::Positions.apply(x))).collect();
    let resolved: Vec<f64> = psi.iter().copied().take_while(|v| *v > 1e-25).collect();
    ensure(resolved.len() > 100 && resolved.windows(2).all(|w| w[1] < w[0]), "(b) potential not strictly decreasing")?;

    let lues_cfg = StabilityProbeConfig {
        distance: scn.distance_to_e(),
        delta: 0.35,
        epsilons: vec![0.5, 0.1, 0.01],
        attraction_time: 10.0,
        duration: 15.0,
        t0s: vec![0.0],
        x0s: vec![x0.clone()],
        js: vec![f64::INFINITY],
        policy: StepPolicy::default(),
        samples: 150,
        fit_residual_max: 0.5,
        min_decades: 3.0,
    };
    let r = probe_lues(&scn, &lues_cfg, &Sequential).map_err(|e| e.to_string())?;
    let v = &r.verdicts[0];
    let mu = v.envelope.map_or(f64::NAN, |e| e.mu);
    ensure(v.lues && mu > 0.0, format!("(c) limit verdict {v:?}"))?;

    let o = run_shipped("formation.cfg")?;
    ensure(failed_required(&o).is_empty(), format!("(d) failed: {:?}", failed_required(&o)))?;
    let csv = &o.artifacts.iter().find(|a| a.path == Path::new("probe_verdicts.csv")).ok_or("(d) no verdict table")?.contents;
    let largest = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .max_by(|a, b| a[0].parse::<f64>().unwrap().total_cmp(&b[0].parse::<f64>().unwrap()))
        .ok_or("(d) empty verdict table")?;
    ensure(largest[3] == "true", format!("(d) j = {} not attracted", largest[0]))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 300.0, format!("took {secs:.1} s"))?;
    Ok(format!(
        "(a) gap {gap:.2e}; (b) {} decreasing samples; (c) mu {mu:.4}; (d) j = {} reaches 1 % of psi(0)",
        resolved.len(),
        largest[0].parse::<f64>().unwrap()
    ))
}

// ---------------------------------------------------------------- 8

fn expansion() -> Check {
    let o = run_shipped("linear_expansion.cfg")?;
    let get = |n: &str| o.verdicts.iter().find(|v| v.name == n).cloned().ok_or(format!("no verdict {n}"));
    let (max, halving) = (get("expansion.max")?, get("expansion.halving")?);
    let detail = format!("residual {:.3e}, halving ratio {:.2}", max.value.unwrap_or(f64::NAN), halving.value.unwrap_or(f64::NAN));
    if max.passed && halving.passed {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- 9

fn period_shift() -> Result<f64, String> {
    let scn = build_linear_scenario(&LinearConfig::scalar(InputFamily::Sinusoid { omegas: vec![1.0] }))
        .map_err(|e| e.to_string())?;
    let j = 10.0;
    let sweep = |t0: f64| {
        let cfg = ConvergenceConfig {
            js: vec![j],
            t0s: vec![t0],
            x0s: vec![vec![1.0], vec![-0.6]],
            horizon: 3.0,
            policy: StepPolicy::default(),
            limit_box: None,
        };
        convergence_sweep(&scn, &DistanceSpec::identity(), &cfg, &Sequential).map_err(|e| e.to_string())
    };
    let (a, b) = (sweep(0.4)?, sweep(0.4 + TAU / j)?);
    Ok(a.cells.iter().zip(&b.cells).map(|(x, y)| (x.sup_d - y.sup_d).abs()).fold(0.0, f64::max))
}

fn theorems() -> Check {
    let (decreasing, _, sups) = sawtooth_sweep()?;
    let shift = period_shift()?;
    let transfer = sawtooth_pluas_at_one().is_ok() && formation().is_ok();
    let detail = format!(
        "monotone j-convergence {} ({:.4} {:.4} {:.4}); period shift {:.1e}; stability transfer {}",
        if decreasing { "ok" } else { "fails" },
        sups[0],
        sups[1],
        sups[2],
        shift,
        if transfer { "ok" } else { "fails" }
    );
    if decreasing && shift <= 1e-9 && transfer {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    type Criterion = (u32, &'static str, fn() -> Check);
    let criteria: [Criterion; 9] = [
        (1, "exact algebra", exact_algebra),
        (2, "generalized difference closed forms", closed_forms),
        (3, "frequency properties", frequencies),
        (4, "bracket law", bracket_law),
        (5, "tree expansion", tree_expansion),
        (6, "linear sawtooth scenario", linear_sawtooth),
        (7, "triangle formation", formation),
        (8, "integral expansion residual", expansion),
        (9, "convergence and stability transfer", theorems),
    ];
    let mut unexpected = Vec::new();
    let mut summary = BTreeMap::new();
    for (id, name, f) in criteria {
        let start = Instant::now();
        let r = f();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match &r {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        let known = KNOWN_RED.contains(&id);
        let note = match (r.is_ok(), known) {
            (false, true) => " [known red]",
            (true, true) => " [known red, now passing]",
            _ => "",
        };
        println!("[{tag}] {id} {name} ({secs:.2} s){note}: {detail}");
        if r.is_err() && !known {
            unexpected.push(id);
        }
        summary.insert(id, r.is_ok());
    }
    let passed = summary.values().filter(|v| **v).count();
    println!("{passed}/{} criteria pass", summary.len());
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}

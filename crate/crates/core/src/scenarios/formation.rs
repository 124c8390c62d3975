use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::ScenarioError;
use crate::input_signals::{make_unicycle_inputs, unicycle_limit_coefficients, OrdinaryInput, PolynomialInput};
use crate::math;
use crate::simulator::{integrate, DistanceSpec, DrivenSystem, Dynamics, Projection, SimError, StepPolicy, SystemFamily, Weight};
use crate::vector_fields::{
    assemble_extended, ConstantField, ControlAffineSystem, ExtendedSystem, FieldFn, Real, ScalarField, ScalarFn, Shape,
    VectorField,
};

/// Agents `0..agents`, state `(x_ν, y_ν, θ_ν)` per agent.
#[derive(Clone, Debug, PartialEq)]
pub struct FormationConfig {
    pub agents: usize,
    pub edges: Vec<(usize, usize)>,
    pub targets: Vec<f64>,
    /// Positions `(x_ν, y_ν)` realizing every target distance.
    pub witness: Option<Vec<f64>>,
    pub initial: Vec<f64>,
}

impl FormationConfig {
    /// Three agents, complete graph, all distances `d`.
    pub fn triangle(d: f64, initial: Vec<f64>) -> Self {
        FormationConfig { agents: 3, edges: alloc::vec![(0, 1), (0, 2), (1, 2)], targets: alloc::vec![d; 3], witness: None, initial }
    }
}

/// `ψ̃(p) = ¼ Σ (‖p_ν' − p_ν‖² − d²)²`, on positions (`stride = 2`) or on
/// full states (`stride = 3`).
#[derive(Clone, Debug, PartialEq)]
pub struct FormationPotential {
    pub agents: usize,
    pub edges: Vec<(usize, usize)>,
    pub targets: Vec<f64>,
    pub stride: usize,
}

impl ScalarFn for FormationPotential {
    fn dim(&self) -> usize {
        self.stride * self.agents
    }
    fn eval<R: Real>(&self, _t: &R, x: &[R]) -> R {
        let s = self.stride;
        let mut acc = R::cst(0.0);
        for (&(a, b), &d) in self.edges.iter().zip(&self.targets) {
            let dx = x[s * b].clone() - x[s * a].clone();
            let dy = x[s * b + 1].clone() - x[s * a + 1].clone();
            let e = dx.square() + dy.square() - d * d;
            acc = acc + e.square() * 0.25;
        }
        acc
    }
}

/// `(ψ̃(p), ∇ψ̃(p))` for positions `p ∈ ℝ^{2N}`.
pub fn gradient_potential(p: &[f64], edges: &[(usize, usize)], targets: &[f64]) -> (f64, Vec<f64>) {
    let mut value = 0.0;
    let mut grad = alloc::vec![0.0; p.len()];
    for (&(a, b), &d) in edges.iter().zip(targets) {
        let dx = p[2 * b] - p[2 * a];
        let dy = p[2 * b + 1] - p[2 * a + 1];
        let e = dx * dx + dy * dy - d * d;
        value += 0.25 * e * e;
        grad[2 * a] -= dx * e;
        grad[2 * a + 1] -= dy * e;
        grad[2 * b] += dx * e;
        grad[2 * b + 1] += dy * e;
    }
    (value, grad)
}

/// `g_{ν,t} = (cos θ_ν, sin θ_ν)` in the position block of agent `ν`.
#[derive(Clone, Copy, Debug)]
pub struct Translational {
    pub agent: usize,
    pub agents: usize,
}

impl FieldFn for Translational {
    fn dim(&self) -> usize {
        3 * self.agents
    }
    fn eval<R: Real>(&self, _t: &R, x: &[R]) -> Vec<R> {
        let mut out: Vec<R> = (0..3 * self.agents).map(|_| R::cst(0.0)).collect();
        let th = &x[3 * self.agent + 2];
        out[3 * self.agent] = th.cos();
        out[3 * self.agent + 1] = th.sin();
        out
    }
}

/// `g_{ν,p} = [g_{ν,r}, g_{ν,t}] = (−sin θ_ν, cos θ_ν)`.
#[derive(Clone, Copy, Debug)]
pub struct Perpendicular {
    pub agent: usize,
    pub agents: usize,
}

impl FieldFn for Perpendicular {
    fn dim(&self) -> usize {
        3 * self.agents
    }
    fn eval<R: Real>(&self, _t: &R, x: &[R]) -> Vec<R> {
        let mut out: Vec<R> = (0..3 * self.agents).map(|_| R::cst(0.0)).collect();
        let th = &x[3 * self.agent + 2];
        out[3 * self.agent] = -th.sin();
        out[3 * self.agent + 1] = th.cos();
        out
    }
}

fn positions(x: &[f64]) -> Vec<f64> {
    Projection::Positions.apply(x)
}

/// Closed-form limit: `−∇ψ̃(π(x))` lifted to the position components.
#[derive(Clone, Debug)]
pub struct FormationLimit {
    pub edges: Vec<(usize, usize)>,
    pub targets: Vec<f64>,
    pub agents: usize,
}

impl Dynamics for FormationLimit {
    fn dim(&self) -> usize {
        3 * self.agents
    }
    fn rhs(&self, _t: f64, x: &[f64], dx: &mut [f64]) {
        let (_, g) = gradient_potential(&positions(x), &self.edges, &self.targets);
        for a in 0..self.agents {
            dx[3 * a] = -g[2 * a];
            dx[3 * a + 1] = -g[2 * a + 1];
            dx[3 * a + 2] = 0.0;
        }
    }
}

/// `ṗ = −∇ψ̃(p)` on positions.
#[derive(Clone, Debug)]
pub struct GradientFlow {
    pub edges: Vec<(usize, usize)>,
    pub targets: Vec<f64>,
    pub agents: usize,
}

impl Dynamics for GradientFlow {
    fn dim(&self) -> usize {
        2 * self.agents
    }
    fn rhs(&self, _t: f64, p: &[f64], dp: &mut [f64]) {
        let (_, g) = gradient_potential(p, &self.edges, &self.targets);
        for (d, v) in dp.iter_mut().zip(g) {
            *d = -v;
        }
    }
}

#[derive(Clone, Debug)]
pub struct FormationScenario {
    cfg: FormationConfig,
    witness: Vec<f64>,
    potential: FormationPotential,
    system: ControlAffineSystem,
    v: PolynomialInput,
    extended: ExtendedSystem,
    limit: FormationLimit,
}

fn default_witness(cfg: &FormationConfig) -> Option<Vec<f64>> {
    let d = *cfg.targets.first()?;
    if cfg.targets.iter().any(|&t| t != d) {
        return None;
    }
    let mut edges: Vec<(usize, usize)> = cfg.edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    edges.sort();
    match (cfg.agents, edges.as_slice()) {
        (2, [(0, 1)]) => Some(alloc::vec![0.0, 0.0, d, 0.0]),
        (3, [(0, 1), (0, 2), (1, 2)]) => Some(alloc::vec![0.0, 0.0, d, 0.0, 0.5 * d, 0.5 * math::sqrt(3.0) * d]),
        _ => None,
    }
}

/// Unicycle agents with control law `u_{3ν−2} h_s(y) + u_{3ν−1} h_c(y)` on
/// `g_{ν,t}` and `u_{3ν}` on `g_{ν,r} = ∂/∂θ_ν`, where `y = ψ̃(π(x))`.
pub fn build_formation_scenario(cfg: &FormationConfig) -> Result<FormationScenario, ScenarioError> {
    let n = cfg.agents;
    let shape = |what, expected, got| if expected == got { Ok(()) } else { Err(ScenarioError::Shape { what, expected, got }) };
    shape("targets", cfg.edges.len(), cfg.targets.len())?;
    shape("initial state", 3 * n, cfg.initial.len())?;
    for &(a, b) in &cfg.edges {
        if a == b || a >= n || b >= n {
            return Err(ScenarioError::Edge(a, b));
        }
    }
    if let Some(&t) = cfg.targets.iter().find(|t| !(**t > 0.0)) {
        return Err(ScenarioError::Target(t));
    }
    let witness = match &cfg.witness {
        Some(w) => {
            shape("witness", 2 * n, w.len())?;
            w.clone()
        }
        None => default_witness(cfg).ok_or(ScenarioError::NoWitness)?,
    };
    for (k, (&(a, b), &d)) in cfg.edges.iter().zip(&cfg.targets).enumerate() {
        let got = math::hypot(witness[2 * b] - witness[2 * a], witness[2 * b + 1] - witness[2 * a + 1]);
        if (got - d).abs() > 1e-9 * d.max(1.0) {
            return Err(ScenarioError::Infeasible { edge: k, got, want: d });
        }
    }
    let potential = FormationPotential { agents: n, edges: cfg.edges.clone(), targets: cfg.targets.clone(), stride: 3 };
    let mut controls = Vec::with_capacity(3 * n);
    let mut shapes = Vec::with_capacity(3 * n);
    for a in 0..n {
        let t = VectorField::analytic(Translational { agent: a, agents: n });
        let mut r = alloc::vec![0.0; 3 * n];
        r[3 * a + 2] = 1.0;
        controls.extend([t.clone(), t, VectorField::analytic(ConstantField(r))]);
        shapes.extend([Shape::Sine, Shape::Cosine, Shape::One]);
    }
    let system = ControlAffineSystem::new(VectorField::analytic(ConstantField(alloc::vec![0.0; 3 * n])), controls)?
        .with_output(ScalarField::analytic(potential.clone()))?
        .with_shapes(shapes)?;
    let v = unicycle_limit_coefficients(n);
    let extended = assemble_extended(&system, &v)?;
    let limit = FormationLimit { edges: cfg.edges.clone(), targets: cfg.targets.clone(), agents: n };
    Ok(FormationScenario { cfg: cfg.clone(), witness, potential, system, v, extended, limit })
}

impl FormationScenario {
    pub fn config(&self) -> &FormationConfig {
        &self.cfg
    }
    pub fn agents(&self) -> usize {
        self.cfg.agents
    }
    pub fn witness(&self) -> &[f64] {
        &self.witness
    }
    pub fn system(&self) -> &ControlAffineSystem {
        &self.system
    }
    pub fn v(&self) -> &PolynomialInput {
        &self.v
    }
    /// `Σ^∞` assembled from brackets of the feedback fields.
    pub fn extended(&self) -> &ExtendedSystem {
        &self.extended
    }
    pub fn closed_limit(&self) -> &FormationLimit {
        &self.limit
    }
    pub fn potential(&self) -> &FormationPotential {
        &self.potential
    }
    pub fn gradient_flow(&self) -> GradientFlow {
        GradientFlow { edges: self.cfg.edges.clone(), targets: self.cfg.targets.clone(), agents: self.cfg.agents }
    }

    /// `ψ(x) = ψ̃(π(x))`.
    pub fn psi(&self, x: &[f64]) -> f64 {
        gradient_potential(&positions(x), &self.cfg.edges, &self.cfg.targets).0
    }

    pub fn inputs(&self, j: f64) -> OrdinaryInput {
        make_unicycle_inputs(self.cfg.agents, j)
    }

    pub fn sigma_j(&self, j: f64) -> Result<DrivenSystem, ScenarioError> {
        Ok(DrivenSystem::closed_loop(&self.system, self.inputs(j))?)
    }

    /// Upper bound on `d(x, E)`: the projected displacement of the gradient
    /// flow started at `π(x)`; infinite if that flow does not reach `ψ̃ = 0`.
    pub fn dist_to_e(&self, x: &[f64]) -> f64 {
        distance_by_descent(&positions(x), &self.cfg.edges, &self.cfg.targets)
    }

    pub fn distance_to_e(&self) -> crate::simulator::StateFn {
        let (edges, targets) = (self.cfg.edges.clone(), self.cfg.targets.clone());
        Arc::new(move |x: &[f64]| distance_by_descent(&positions(x), &edges, &targets))
    }

    /// Position projection with weight `one`, `sqrt-psi` or `dist-to-E`.
    pub fn distance_spec(&self, weight: &str) -> Option<DistanceSpec> {
        let (edges, targets) = (self.cfg.edges.clone(), self.cfg.targets.clone());
        let w = match weight {
            "one" => Weight::One,
            "sqrt-psi" => Weight::SqrtPsi(Arc::new(move |x: &[f64]| gradient_potential(&positions(x), &edges, &targets).0)),
            "dist-to-E" => Weight::DistToE(self.distance_to_e()),
            _ => return None,
        };
        Some(DistanceSpec { projection: Projection::Positions, weight: w })
    }
}

fn distance_by_descent(p0: &[f64], edges: &[(usize, usize)], targets: &[f64]) -> f64 {
    let dmax = targets.iter().copied().fold(1.0, f64::max);
    let h = 0.02 / (dmax * dmax);
    let flow = |p: &[f64]| gradient_potential(p, edges, targets);
    let mut p = p0.to_vec();
    let n = p.len();
    let mut tmp = alloc::vec![0.0; n];
    for _ in 0..200_000 {
        let (value, g1) = flow(&p);
        if value <= 1e-24 * math::powi(dmax, 4) || math::norm(&g1) <= 1e-14 * math::powi(dmax, 3) {
            break;
        }
        for i in 0..n {
            tmp[i] = p[i] - 0.5 * h * g1[i];
        }
        let (_, g2) = flow(&tmp);
        for i in 0..n {
            tmp[i] = p[i] - 0.5 * h * g2[i];
        }
        let (_, g3) = flow(&tmp);
        for i in 0..n {
            tmp[i] = p[i] - h * g3[i];
        }
        let (_, g4) = flow(&tmp);
        for i in 0..n {
            p[i] -= h / 6.0 * (g1[i] + 2.0 * g2[i] + 2.0 * g3[i] + g4[i]);
        }
    }
    if flow(&p).0 > 1e-16 * math::powi(dmax, 4) {
        return f64::INFINITY;
    }
    math::dist(&p, p0)
}

impl SystemFamily for FormationScenario {
    fn dim(&self) -> usize {
        3 * self.cfg.agents
    }
    fn system(&self, j: f64) -> Result<Box<dyn Dynamics + '_>, SimError> {
        Ok(Box::new(DrivenSystem::closed_loop(&self.system, self.inputs(j))?))
    }
    fn limit(&self) -> Result<Box<dyn Dynamics + '_>, SimError> {
        Ok(Box::new(self.limit.clone()))
    }
}

/// `sup_t ‖Φ(t, x0 + s) − (Φ(t, x0) + s)‖` for per-agent position shifts `s`.
pub fn translation_invariance_residual(
    sys: &dyn Dynamics,
    x0: &[f64],
    shifts: &[(f64, f64)],
    t0: f64,
    horizon: f64,
    policy: &StepPolicy,
) -> Result<f64, SimError> {
    if 3 * shifts.len() != x0.len() {
        return Err(SimError::Dimension(x0.len(), 3 * shifts.len()));
    }
    let offset: Vec<f64> = shifts.iter().flat_map(|&(a, b)| [a, b, 0.0]).collect();
    let moved: Vec<f64> = x0.iter().zip(&offset).map(|(x, s)| x + s).collect();
    let a = integrate(sys, t0, x0, horizon, policy)?;
    let b = integrate(sys, t0, &moved, horizon, policy)?;
    if !a.completed() || !b.completed() || a.len() != b.len() {
        return Err(SimError::Incomplete);
    }
    let mut sup = 0.0f64;
    for k in 0..a.len() {
        let d: f64 = a.state(k).iter().zip(b.state(k)).zip(&offset).map(|((p, q), s)| (q - p - s) * (q - p - s)).sum();
        sup = sup.max(math::sqrt(d));
    }
    Ok(sup)
}

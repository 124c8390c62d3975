use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::linalg::{is_hurwitz, rank};
use super::ScenarioError;
use crate::free_algebra::MultiIndex;
use crate::input_signals::{
    closed_form_sinusoid_gd, make_sawtooth_inputs, make_sinusoid_inputs, OrdinaryInput, PolynomialInput, Signal,
    SignalError, SinusoidGd,
};
use crate::math;
use crate::simulator::{DistanceSpec, DrivenSystem, Dynamics, Projection, SimError, SystemFamily, Weight};
use crate::vector_fields::{
    assemble_extended, ConstantField, ControlAffineSystem, ExtendedSystem, FieldError, LinearField, ScalarField, Shape, VectorField,
};

#[derive(Clone, Debug, PartialEq)]
pub enum InputFamily {
    /// One angular frequency per channel pair.
    Sinusoid { omegas: Vec<f64> },
    Sawtooth,
}

/// `ẋ = Ax + Bu`, `y = ‖x‖²`, with matrices stored row-major.
#[derive(Clone, Debug)]
pub struct LinearConfig {
    pub n: usize,
    pub p: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub lambdas: Vec<Signal>,
    pub family: InputFamily,
}

impl LinearConfig {
    /// `A = B = λ = 1` on ℝ.
    pub fn scalar(family: InputFamily) -> Self {
        LinearConfig { n: 1, p: 1, a: alloc::vec![1.0], b: alloc::vec![1.0], lambdas: alloc::vec![Signal::Constant(1.0)], family }
    }
}

/// Closed-form limit `ẋ = (A − 2 Σ λ_k(t) b_k b_kᵀ) x`.
#[derive(Clone, Debug)]
pub struct LinearLimit {
    n: usize,
    a: Vec<f64>,
    /// `b_k b_kᵀ` per channel.
    outer: Vec<Vec<f64>>,
    lambdas: Vec<Signal>,
}

impl LinearLimit {
    pub fn matrix(&self, t: f64) -> Vec<f64> {
        let mut m = self.a.clone();
        for (o, l) in self.outer.iter().zip(&self.lambdas) {
            let l = l.eval(t);
            for (mi, oi) in m.iter_mut().zip(o) {
                *mi -= 2.0 * l * oi;
            }
        }
        m
    }
}

impl Dynamics for LinearLimit {
    fn dim(&self) -> usize {
        self.n
    }
    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        let m = self.matrix(t);
        for i in 0..self.n {
            dx[i] = (0..self.n).map(|k| m[i * self.n + k] * x[k]).sum();
        }
    }
    fn fastest_angular_frequency(&self) -> f64 {
        self.lambdas.iter().map(Signal::max_angular_frequency).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct LinearScenario {
    cfg: LinearConfig,
    system: ControlAffineSystem,
    v: PolynomialInput,
    extended: ExtendedSystem,
    limit: LinearLimit,
    hurwitz: Option<bool>,
}

/// `Σ^j` under `u_{2k−1} h_s(y) + u_{2k} h_c(y)` along `b_k`, and its limit.
pub fn build_linear_scenario(cfg: &LinearConfig) -> Result<LinearScenario, ScenarioError> {
    let (n, p) = (cfg.n, cfg.p);
    let shape = |what, expected, got| if expected == got { Ok(()) } else { Err(ScenarioError::Shape { what, expected, got }) };
    shape("A", n * n, cfg.a.len())?;
    shape("B", n * p, cfg.b.len())?;
    shape("lambda", p, cfg.lambdas.len())?;
    let rk = rank(&cfg.b, n, p);
    if rk < n {
        return Err(ScenarioError::RankDeficient(rk, n));
    }
    let columns: Vec<Vec<f64>> = (0..p).map(|k| (0..n).map(|i| cfg.b[i * p + k]).collect()).collect();
    let controls: Vec<VectorField> =
        columns.iter().flat_map(|c| [VectorField::analytic(ConstantField(c.clone())), VectorField::analytic(ConstantField(c.clone()))]).collect();
    let system = ControlAffineSystem::new(VectorField::analytic(LinearField { n, a: cfg.a.clone() }), controls)?
        .with_output(ScalarField::squared_norm(n))?
        .with_shapes((0..p).flat_map(|_| [Shape::Sine, Shape::Cosine]).collect())?;
    let v = match &cfg.family {
        InputFamily::Sinusoid { omegas } => closed_form_sinusoid_gd(omegas, &cfg.lambdas, 1.0)?.v,
        InputFamily::Sawtooth => {
            if p != 1 || cfg.lambdas[0].as_constant() != Some(1.0) {
                return Err(ScenarioError::Sawtooth);
            }
            let mut c = BTreeMap::new();
            c.insert(MultiIndex::new(2, [1, 2]).map_err(FieldError::from)?, Signal::Constant(1.0));
            c.insert(MultiIndex::new(2, [2, 1]).map_err(FieldError::from)?, Signal::Constant(-1.0));
            PolynomialInput::new(2, 2, c)?
        }
    };
    let extended = assemble_extended(&system, &v)?;
    let outer = columns.iter().map(|c| (0..n * n).map(|k| c[k / n] * c[k % n]).collect()).collect();
    let limit = LinearLimit { n, a: cfg.a.clone(), outer, lambdas: cfg.lambdas.clone() };
    let hurwitz = if cfg.lambdas.iter().all(|l| l.as_constant().is_some()) { Some(is_hurwitz(&limit.matrix(0.0), n)) } else { None };
    Ok(LinearScenario { cfg: cfg.clone(), system, v, extended, limit, hurwitz })
}

impl LinearScenario {
    pub fn config(&self) -> &LinearConfig {
        &self.cfg
    }
    pub fn system(&self) -> &ControlAffineSystem {
        &self.system
    }
    /// Limit coefficients `v_I`.
    pub fn v(&self) -> &PolynomialInput {
        &self.v
    }
    /// `Σ^∞` assembled from brackets.
    pub fn extended(&self) -> &ExtendedSystem {
        &self.extended
    }
    /// `Σ^∞` in closed form.
    pub fn closed_limit(&self) -> &LinearLimit {
        &self.limit
    }
    /// `Some(false)` means `A − 2λBBᵀ` is not Hurwitz; `None` for
    /// time-varying `λ`.
    pub fn hurwitz(&self) -> Option<bool> {
        self.hurwitz
    }
    pub fn warnings(&self) -> Vec<&'static str> {
        match self.hurwitz {
            Some(false) => alloc::vec!["A - 2 lambda B B^T is not Hurwitz"],
            _ => Vec::new(),
        }
    }

    pub fn inputs(&self, j: f64) -> Result<OrdinaryInput, SignalError> {
        Ok(match &self.cfg.family {
            InputFamily::Sinusoid { omegas } => make_sinusoid_inputs(omegas, &self.cfg.lambdas, j)?,
            InputFamily::Sawtooth => make_sawtooth_inputs(j),
        })
    }

    /// Closed-form `v^j`, `W̃^j` for the sinusoid family.
    pub fn generalized_difference(&self, j: f64) -> Result<Option<SinusoidGd>, ScenarioError> {
        match &self.cfg.family {
            InputFamily::Sinusoid { omegas } => Ok(Some(closed_form_sinusoid_gd(omegas, &self.cfg.lambdas, j)?)),
            InputFamily::Sawtooth => Ok(None),
        }
    }

    pub fn sigma_j(&self, j: f64) -> Result<DrivenSystem, ScenarioError> {
        Ok(DrivenSystem::closed_loop(&self.system, self.inputs(j)?)?)
    }

    /// Identity projection with the requested weight (`one`, `sqrt-psi`,
    /// `dist-to-E`).
    pub fn distance_spec(&self, weight: &str) -> Option<DistanceSpec> {
        let w = match weight {
            "one" => Weight::One,
            "sqrt-psi" => Weight::SqrtPsi(Arc::new(|x: &[f64]| x.iter().map(|v| v * v).sum())),
            "dist-to-E" => Weight::DistToE(Arc::new(|x: &[f64]| math::norm(x))),
            _ => return None,
        };
        Some(DistanceSpec { projection: Projection::Identity, weight: w })
    }

    /// `d(x, {0}) = ‖x‖`.
    pub fn distance_to_e(&self) -> crate::simulator::StateFn {
        Arc::new(|x: &[f64]| math::norm(x))
    }
}

impl SystemFamily for LinearScenario {
    fn dim(&self) -> usize {
        self.cfg.n
    }
    fn system(&self, j: f64) -> Result<Box<dyn Dynamics + '_>, SimError> {
        Ok(Box::new(DrivenSystem::closed_loop(&self.system, self.inputs(j)?)?))
    }
    fn limit(&self) -> Result<Box<dyn Dynamics + '_>, SimError> {
        Ok(Box::new(self.limit.clone()))
    }
}

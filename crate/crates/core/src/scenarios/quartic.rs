use alloc::boxed::Box;
use alloc::sync::Arc;
use crate::math;

use super::ScenarioError;
use crate::input_signals::{closed_form_sinusoid_gd, make_sinusoid_inputs, OrdinaryInput, PolynomialInput, Signal, SignalError};
use crate::simulator::{DistanceSpec, DrivenSystem, Dynamics, Projection, SimError, SystemFamily, Weight};
use crate::vector_fields::{
    assemble_extended, ConstantField, ControlAffineSystem, ExtendedSystem, Real, ScalarField, ScalarFn, Shape, VectorField,
};

/// `ẋ = u₁ h_s(x⁴) + u₂ h_c(x⁴)` on ℝ.
#[derive(Clone, Debug, PartialEq)]
pub struct QuarticConfig {
    pub lambda: f64,
    pub omega: f64,
}

impl Default for QuarticConfig {
    fn default() -> Self {
        QuarticConfig { lambda: 1.0, omega: 1.0 }
    }
}

/// `y = x⁴`.
#[derive(Clone, Copy, Debug)]
pub struct QuarticOutput;

impl ScalarFn for QuarticOutput {
    fn dim(&self) -> usize {
        1
    }
    fn eval<R: Real>(&self, _t: &R, x: &[R]) -> R {
        x[0].square().square()
    }
}

#[derive(Clone, Debug)]
struct QuarticLimit {
    lambda: f64,
}

impl Dynamics for QuarticLimit {
    fn dim(&self) -> usize {
        1
    }
    fn rhs(&self, _t: f64, x: &[f64], dx: &mut [f64]) {
        dx[0] = -4.0 * self.lambda * x[0] * x[0] * x[0];
    }
}

#[derive(Clone, Debug)]
pub struct QuarticScenario {
    cfg: QuarticConfig,
    system: ControlAffineSystem,
    v: PolynomialInput,
    extended: ExtendedSystem,
    limit: QuarticLimit,
}

/// The limit `ẋ = −4λx³` is asymptotically but not exponentially stable.
pub fn build_quartic_scenario(cfg: &QuarticConfig) -> Result<QuarticScenario, ScenarioError> {
    let e = || VectorField::analytic(ConstantField(alloc::vec![1.0]));
    let system = ControlAffineSystem::new(VectorField::analytic(ConstantField(alloc::vec![0.0])), alloc::vec![e(), e()])?
        .with_output(ScalarField::analytic(QuarticOutput))?
        .with_shapes(alloc::vec![Shape::Sine, Shape::Cosine])?;
    let v = closed_form_sinusoid_gd(&[cfg.omega], &[Signal::Constant(cfg.lambda)], 1.0)?.v;
    let extended = assemble_extended(&system, &v)?;
    Ok(QuarticScenario { cfg: cfg.clone(), system, v, extended, limit: QuarticLimit { lambda: cfg.lambda } })
}

impl QuarticScenario {
    pub fn config(&self) -> &QuarticConfig {
        &self.cfg
    }
    pub fn system(&self) -> &ControlAffineSystem {
        &self.system
    }
    pub fn v(&self) -> &PolynomialInput {
        &self.v
    }
    pub fn extended(&self) -> &ExtendedSystem {
        &self.extended
    }
    pub fn closed_limit(&self) -> &dyn Dynamics {
        &self.limit
    }

    pub fn inputs(&self, j: f64) -> Result<OrdinaryInput, SignalError> {
        make_sinusoid_inputs(&[self.cfg.omega], &[Signal::Constant(self.cfg.lambda)], j)
    }

    pub fn sigma_j(&self, j: f64) -> Result<DrivenSystem, ScenarioError> {
        Ok(DrivenSystem::closed_loop(&self.system, self.inputs(j)?)?)
    }

    pub fn distance_to_e(&self) -> crate::simulator::StateFn {
        Arc::new(|x: &[f64]| x[0].abs())
    }

    pub fn distance_spec(&self, weight: &str) -> Option<DistanceSpec> {
        let w = match weight {
            "one" => Weight::One,
            "sqrt-psi" => Weight::SqrtPsi(Arc::new(|x: &[f64]| math::powi(x[0], 4))),
            "dist-to-E" => Weight::DistToE(self.distance_to_e()),
            _ => return None,
        };
        Some(DistanceSpec { projection: Projection::Identity, weight: w })
    }
}

impl SystemFamily for QuarticScenario {
    fn dim(&self) -> usize {
        1
    }
    fn system(&self, j: f64) -> Result<Box<dyn Dynamics + '_>, SimError> {
        Ok(Box::new(DrivenSystem::closed_loop(&self.system, self.inputs(j)?)?))
    }
    fn limit(&self) -> Result<Box<dyn Dynamics + '_>, SimError> {
        Ok(Box::new(self.limit.clone()))
    }
}


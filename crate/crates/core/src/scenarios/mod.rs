//! The built-in scenarios: linear extremum seeking with quadratic output,
//! distance-based unicycle formations, and a quartic-output control whose
//! limit decays only algebraically.

mod formation;
mod linalg;
mod linear;
mod quartic;

pub use formation::{
    build_formation_scenario, gradient_potential, translation_invariance_residual, FormationConfig, FormationLimit,
    FormationPotential, FormationScenario, GradientFlow, Perpendicular, Translational,
};
pub use linalg::{characteristic_polynomial, is_hurwitz, rank};
pub use linear::{build_linear_scenario, InputFamily, LinearConfig, LinearLimit, LinearScenario};
pub use quartic::{build_quartic_scenario, QuarticConfig, QuarticOutput, QuarticScenario};

use crate::input_signals::SignalError;
use crate::simulator::SimError;
use crate::vector_fields::FieldError;

/// Names and one-line descriptions of the built-in scenarios.
pub const SCENARIOS: [(&str, &str); 3] = [
    ("linear", "x' = Ax + Bu with output |x|^2 under sinusoid or sawtooth extremum seeking"),
    ("formation", "unicycle agents driven to prescribed inter-agent distances"),
    ("quartic", "scalar extremum seeking on |x|^4, whose minimum is degenerate"),
];

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("{what}: expected {expected} entries, got {got}")]
    Shape { what: &'static str, expected: usize, got: usize },
    #[error("B has rank {0} < n = {1}")]
    RankDeficient(usize, usize),
    #[error("the sawtooth family needs p = 1 and lambda = 1")]
    Sawtooth,
    #[error("edge ({0}, {1}) is not a pair of distinct agents")]
    Edge(usize, usize),
    #[error("target distance {0} is not positive")]
    Target(f64),
    #[error("no witness configuration for the target distances")]
    NoWitness,
    #[error("witness violates edge {edge}: distance {got}, target {want}")]
    Infeasible { edge: usize, got: f64, want: f64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

//! Fixed-step integration of `Σ^j` and `Σ^∞`, trajectory distances and
//! convergence sweeps.

mod distance;
mod expansion;
mod integrate;
mod sweep;

pub use distance::{trajectory_distance, DistanceSpec, Projection, StateFn, Weight};
pub use expansion::{integral_expansion_residual, ExpansionData, ExpansionResidual};
pub use integrate::{integrate, DrivenSystem, Dynamics, Failure, FnDynamics, StepPolicy, Trajectory};
pub use sweep::{
    convergence_sweep, ConvergenceCell, ConvergenceConfig, ConvergenceReport, Executor, Sequential, SystemFamily,
    ZERO_WEIGHT_FLOOR,
};

use crate::input_signals::SignalError;
use crate::vector_fields::FieldError;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SimError {
    #[error("horizon must be positive and finite, got {0}")]
    Horizon(f64),
    #[error("dimension mismatch: expected {0}, got {1}")]
    Dimension(usize, usize),
    #[error("trajectory incomplete on the requested window")]
    Incomplete,
    #[error("trajectories start at different times")]
    StartMismatch,
    #[error("output vanishes along the trajectory at t = {0}")]
    ZeroOutput(f64),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

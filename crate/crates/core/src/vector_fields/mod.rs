//! Vector fields on ℝⁿ with nested derivative oracles, Lie brackets,
//! output feedback through `h_s`/`h_c` and the limit system.

mod derivatives;
mod extended;
mod feedback;
mod field;
mod jet;
mod trees;

pub use derivatives::{gradient_dot, iterated_bracket, iterated_lie_derivative, lie_derivative, word_lie_derivative, Op};
pub use extended::{assemble_extended, ExtendedSystem};
pub use feedback::{h_c, h_s, output_feedback_fields, verify_magic_bracket, ControlAffineSystem, FeedbackField, Shape, SHAPE_FLOOR};
pub use field::{
    Analytic, ConstantField, Coordinate, FdPolicy, FieldFn, FloatField, FloatScalar, JetField, JetScalar, LinearField,
    ScalarField, ScalarFn, SquaredNorm, VectorField,
};
pub use jet::{Jet, Real};
pub use trees::{
    increasing_trees, set_partitions, tree_expansion_lie_derivative, tree_expansion_terms, IncreasingTree, TreeTerm,
};

use crate::free_algebra::AlgebraError;
use crate::input_signals::SignalError;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("dimension mismatch: expected {0}, got {1}")]
    Dimension(usize, usize),
    #[error("non-finite value from a derivative oracle")]
    NonFinite,
    #[error("letter {0} has no field (only {1} fields)")]
    Letter(usize, usize),
    #[error("empty multi-index")]
    EmptyIndex,
    #[error("system has no output")]
    MissingOutput,
    #[error("output is not positive at an evaluation point")]
    ZeroOutput,
    #[error("channel count mismatch: expected {0}, got {1}")]
    Channels(usize, usize),
    #[error("order {0} outside the supported range {1}..={2}")]
    OrderRange(usize, usize, usize),
    #[error("input is not Lie-valued (residual {0:e})")]
    NotLieValued(f64),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

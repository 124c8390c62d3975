//! Ordinary and polynomial inputs, generalized differences, the concrete
//! oscillatory input families and the GD(r) convergence metrics.

mod expsum;
mod frequencies;
mod generators;
mod inputs;
mod report;
mod signal;

pub use expsum::{exponential_gd, real_signal, ExponentialGd, Mode};
pub use frequencies::{
    check_frequency_properties, check_frequency_table, FrequencyReport, FrequencyTable, FrequencyViolation,
    ENUMERATION_BOUND,
};
pub use generators::{
    closed_form_sinusoid_gd, esc_limit_structure, make_sawtooth_inputs, make_sinusoid_inputs, make_unicycle_inputs,
    nth_prime, sinusoid_exponential_gd, unicycle_frequencies, unicycle_gd, unicycle_limit_coefficients,
    unicycle_limit_exact, unicycle_table, SinusoidGd, UNICYCLE_FREQUENCY_COORDS,
};
pub use inputs::{
    integrate_generalized_difference, integrate_generalized_difference_with, GdEntry, GeneralizedDifference,
    OrdinaryInput, PolynomialInput, Provenance, Sampled, GD_SAMPLES_PER_PERIOD,
};
pub use report::{
    gd_convergence_report, gd_convergence_report_with, gd_sweep, log_log_slope, GdMetric, GdReport,
    GdReportOptions, GdRow, GdSweep,
};
pub use signal::{common_period, saw, sup_norm, Period, Profile, Signal, SupMethod, SupNorm, Wave, SAMPLES_PER_PERIOD};

use crate::free_algebra::{AlgebraError, MultiIndex};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SignalError {
    #[error("channel count mismatch: {0} vs {1}")]
    ChannelMismatch(usize, usize),
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("coefficient {0} outside 0 < |I| <= {1}")]
    Support(MultiIndex, usize),
    #[error("time grid is empty")]
    EmptyGrid,
    #[error("time grid is not strictly increasing")]
    GridNotIncreasing,
    #[error("time grid does not contain t0 = {0}")]
    GridMissingStart(f64),
    #[error("window must be positive, got {0}")]
    Window(f64),
    #[error("frequency must be positive and finite, got {0}")]
    Frequency(f64),
    #[error("repeated frequency {0}")]
    RepeatedFrequency(f64),
    #[error("no input channels")]
    NoChannels,
    #[error("gain {0} has no derivative descriptor")]
    MissingDerivative(usize),
    #[error("agent count {0} outside 1..={1}")]
    EnumerationBound(usize, usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

//! Run configuration documents (TOML).
//!
//! Times carry an `_s` suffix and angular frequencies `_rad_s`. Horizons and
//! windows have no defaults.

use std::path::PathBuf;

use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    GdReport,
    Converge,
    Pluas,
    Lues,
    BracketsVerify,
    FreqCheck,
    ExpansionResidual,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::GdReport => "gd-report",
            ExperimentKind::Converge => "converge",
            ExperimentKind::Pluas => "pluas",
            ExperimentKind::Lues => "lues",
            ExperimentKind::BracketsVerify => "brackets-verify",
            ExperimentKind::FreqCheck => "freq-check",
            ExperimentKind::ExpansionResidual => "expansion-residual",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    /// Output directory, relative to the output root.
    pub output: PathBuf,
    #[serde(default = "one")]
    pub threads: usize,
    pub scenario: ScenarioSpec,
    #[serde(default)]
    pub step: StepSpec,
    pub grid: Option<GridSpec>,
    pub probe: Option<ProbeSpec>,
    pub gd: Option<GdSpec>,
    pub brackets: Option<BracketSpec>,
    pub frequencies: Option<FrequencySpec>,
    pub expansion: Option<ExpansionSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn one() -> usize {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilySpec {
    Sinusoid,
    Sawtooth,
}

/// `λ_k`: a constant, or `offset + amplitude · sin(omega t)`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Constant(f64),
    Modulated { offset: f64, amplitude: f64, omega_rad_s: f64 },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase", deny_unknown_fields)]
pub enum ScenarioSpec {
    Linear {
        family: FamilySpec,
        n: usize,
        p: usize,
        /// Row-major `n × n`.
        a: Vec<f64>,
        /// Row-major `n × p`.
        b: Vec<f64>,
        lambda: Vec<LambdaSpec>,
        #[serde(default)]
        omegas_rad_s: Vec<f64>,
        initial: Option<Vec<f64>>,
    },
    Formation {
        agents: usize,
        edges: Vec<[usize; 2]>,
        targets: Vec<f64>,
        /// `(x, y, θ)` per agent, θ in radians.
        initial: Vec<f64>,
        witness: Option<Vec<f64>>,
    },
    Quartic {
        lambda: f64,
        omega_rad_s: f64,
        initial: Option<Vec<f64>>,
    },
}

impl ScenarioSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioSpec::Linear { .. } => "linear",
            ScenarioSpec::Formation { .. } => "formation",
            ScenarioSpec::Quartic { .. } => "quartic",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSpec {
    #[serde(default = "h_max")]
    pub h_max_s: f64,
    #[serde(default = "samples_per_period")]
    pub samples_per_period: f64,
    #[serde(default = "blowup_bound")]
    pub blowup_bound: f64,
}

fn h_max() -> f64 {
    1e-2
}
fn samples_per_period() -> f64 {
    64.0
}
fn blowup_bound() -> f64 {
    1e6
}

impl Default for StepSpec {
    fn default() -> Self {
        StepSpec { h_max_s: h_max(), samples_per_period: samples_per_period(), blowup_bound: blowup_bound() }
    }
}

/// Random initial states `center + r·ξ` with `ξ` uniform in the unit ball.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub center: Vec<f64>,
    pub radius: f64,
    pub count: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub js: Vec<f64>,
    pub horizon_s: f64,
    #[serde(default = "zero_t0")]
    pub t0s_s: Vec<f64>,
    pub x0s: Option<Vec<Vec<f64>>>,
    pub sample: Option<SampleSpec>,
    #[serde(default = "weight_one")]
    pub weight: String,
    pub limit_box: Option<f64>,
}

fn zero_t0() -> Vec<f64> {
    vec![0.0]
}
fn weight_one() -> String {
    "one".into()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    /// `j = inf` stands for the limit system.
    pub js: Vec<f64>,
    pub delta: f64,
    pub epsilons: Vec<f64>,
    pub attraction_time_s: f64,
    pub duration_s: f64,
    #[serde(default = "zero_t0")]
    pub t0s_s: Vec<f64>,
    pub x0s: Option<Vec<Vec<f64>>>,
    pub sample: Option<SampleSpec>,
    /// `dist-to-E`, or `psi` for the output itself.
    #[serde(default = "dist_to_e")]
    pub distance: String,
    #[serde(default = "probe_samples")]
    pub samples: usize,
    /// Expected outcome; a mismatch fails the run.
    #[serde(default = "yes")]
    pub expect: bool,
}

fn dist_to_e() -> String {
    "dist-to-E".into()
}
fn probe_samples() -> usize {
    400
}
fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GdSpec {
    pub js: Vec<f64>,
    pub window_s: f64,
    /// Order of the generalized differences for the unicycle family.
    #[serde(default = "four")]
    pub order: usize,
}

fn four() -> usize {
    4
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketSpec {
    pub psi_min: f64,
    pub psi_max: f64,
    #[serde(default = "hundred")]
    pub points: usize,
    #[serde(default = "yes")]
    pub finite_differences: bool,
}

fn hundred() -> usize {
    100
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySpec {
    pub agents: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionSpec {
    pub j: f64,
    pub horizon_s: f64,
    #[serde(default)]
    pub t0_s: f64,
    pub x0: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize, serde::Serialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "bracket_analytic")]
    pub bracket_analytic: f64,
    #[serde(default = "bracket_fd")]
    pub bracket_fd: f64,
    #[serde(default = "expansion_max")]
    pub expansion_max: f64,
    #[serde(default = "expansion_halving")]
    pub expansion_halving: f64,
    #[serde(default = "fit_residual_max")]
    pub fit_residual_max: f64,
    #[serde(default = "min_decades")]
    pub min_decades: f64,
    #[serde(default = "gd_slope")]
    pub gd_slope: f64,
}

fn bracket_analytic() -> f64 {
    1e-6
}
fn bracket_fd() -> f64 {
    1e-3
}
fn expansion_max() -> f64 {
    1e-3
}
fn expansion_halving() -> f64 {
    8.0
}
fn fit_residual_max() -> f64 {
    0.5
}
fn min_decades() -> f64 {
    3.0
}
fn gd_slope() -> f64 {
    0.1
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            bracket_analytic: bracket_analytic(),
            bracket_fd: bracket_fd(),
            expansion_max: expansion_max(),
            expansion_halving: expansion_halving(),
            fit_residual_max: fit_residual_max(),
            min_decades: min_decades(),
            gd_slope: gd_slope(),
        }
    }
}

pub fn parse(text: &str) -> Result<RunConfig, toml::de::Error> {
    toml::from_str(text)
}

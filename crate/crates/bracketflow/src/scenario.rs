use bracketflow_core::input_signals::{PolynomialInput, Signal};
use bracketflow_core::scenarios::{
    build_formation_scenario, build_linear_scenario, build_quartic_scenario, FormationConfig, FormationScenario,
    InputFamily, LinearConfig, LinearScenario, QuarticConfig, QuarticScenario, ScenarioError,
};
use bracketflow_core::simulator::{DistanceSpec, StateFn, SystemFamily};
use bracketflow_core::vector_fields::{ControlAffineSystem, ExtendedSystem};

use crate::config::{FamilySpec, LambdaSpec, ScenarioSpec};

pub enum Built {
    Linear(LinearScenario),
    Formation(FormationScenario),
    Quartic(QuarticScenario),
}

impl std::fmt::Debug for Built {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub fn lambda_signal(l: &LambdaSpec) -> Signal {
    match *l {
        LambdaSpec::Constant(c) => Signal::Constant(c),
        LambdaSpec::Modulated { offset, amplitude, omega_rad_s } => Signal::offset_sin(offset, amplitude, omega_rad_s),
    }
}

pub fn build(spec: &ScenarioSpec) -> Result<Built, ScenarioError> {
    Ok(match spec {
        ScenarioSpec::Linear { family, n, p, a, b, lambda, omegas_rad_s, .. } => {
            let family = match family {
                FamilySpec::Sawtooth => InputFamily::Sawtooth,
                FamilySpec::Sinusoid => InputFamily::Sinusoid { omegas: omegas_rad_s.clone() },
            };
            let cfg = LinearConfig {
                n: *n,
                p: *p,
                a: a.clone(),
                b: b.clone(),
                lambdas: lambda.iter().map(lambda_signal).collect(),
                family,
            };
            Built::Linear(build_linear_scenario(&cfg)?)
        }
        ScenarioSpec::Formation { agents, edges, targets, initial, witness } => {
            let cfg = FormationConfig {
                agents: *agents,
                edges: edges.iter().map(|e| (e[0], e[1])).collect(),
                targets: targets.clone(),
                witness: witness.clone(),
                initial: initial.clone(),
            };
            Built::Formation(build_formation_scenario(&cfg)?)
        }
        ScenarioSpec::Quartic { lambda, omega_rad_s, .. } => {
            Built::Quartic(build_quartic_scenario(&QuarticConfig { lambda: *lambda, omega: *omega_rad_s })?)
        }
    })
}

impl Built {
    pub fn name(&self) -> &'static str {
        match self {
            Built::Linear(_) => "linear",
            Built::Formation(_) => "formation",
            Built::Quartic(_) => "quartic",
        }
    }

    pub fn family(&self) -> &dyn SystemFamily {
        match self {
            Built::Linear(s) => s,
            Built::Formation(s) => s,
            Built::Quartic(s) => s,
        }
    }

    pub fn system(&self) -> &ControlAffineSystem {
        match self {
            Built::Linear(s) => s.system(),
            Built::Formation(s) => s.system(),
            Built::Quartic(s) => s.system(),
        }
    }

    pub fn v(&self) -> &PolynomialInput {
        match self {
            Built::Linear(s) => s.v(),
            Built::Formation(s) => s.v(),
            Built::Quartic(s) => s.v(),
        }
    }

    pub fn extended(&self) -> &ExtendedSystem {
        match self {
            Built::Linear(s) => s.extended(),
            Built::Formation(s) => s.extended(),
            Built::Quartic(s) => s.extended(),
        }
    }

    pub fn distance_spec(&self, weight: &str) -> Option<DistanceSpec> {
        match self {
            Built::Linear(s) => s.distance_spec(weight),
            Built::Formation(s) => s.distance_spec(weight),
            Built::Quartic(s) => s.distance_spec(weight),
        }
    }

    /// `dist-to-E`, or `psi` for the output evaluated on the state.
    pub fn distance(&self, kind: &str) -> Option<StateFn> {
        match kind {
            "dist-to-E" => Some(match self {
                Built::Linear(s) => s.distance_to_e(),
                Built::Formation(s) => s.distance_to_e(),
                Built::Quartic(s) => s.distance_to_e(),
            }),
            "psi" => {
                let psi = self.system().output()?.clone();
                Some(std::sync::Arc::new(move |x: &[f64]| psi.eval(0.0, x)))
            }
            _ => None,
        }
    }

    pub fn warnings(&self) -> Vec<&'static str> {
        match self {
            Built::Linear(s) => s.warnings(),
            _ => Vec::new(),
        }
    }
}

pub fn initial(spec: &ScenarioSpec) -> Option<&Vec<f64>> {
    match spec {
        ScenarioSpec::Linear { initial, .. } | ScenarioSpec::Quartic { initial, .. } => initial.as_ref(),
        ScenarioSpec::Formation { initial, .. } => Some(initial),
    }
}

//! Validation of a run configuration into a plan, and execution of the plan.

use std::fmt::Write as _;

use bracketflow_core::input_signals::{
    check_frequency_properties, gd_convergence_report, gd_sweep, log_log_slope, unicycle_gd, GdMetric, GdReport,
    ENUMERATION_BOUND,
};
use bracketflow_core::simulator::{
    convergence_sweep, integral_expansion_residual, integrate, ConvergenceConfig, ConvergenceReport, DistanceSpec,
    ExpansionData, SimError, StepPolicy,
};
use bracketflow_core::stability_lab::{probe_lues, probe_pluas, FitOutcome, ProbeError, StabilityProbeConfig, StabilityReport};
use bracketflow_core::vector_fields::{
    output_feedback_fields, verify_magic_bracket, ControlAffineSystem, FieldError, ScalarField, VectorField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentKind, RunConfig, SampleSpec, ScenarioSpec, StepSpec, Tolerances};
use crate::exec::RayonExecutor;
use crate::output::{self, j_label, num, Artifact, Csv, PlotData, Verdict};
use crate::scenario::{self, Built};

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("{0}")]
pub struct ValidationError(pub String);

fn invalid<T>(msg: impl Into<String>) -> Result<T, ValidationError> {
    Err(ValidationError(msg.into()))
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Signal(#[from] bracketflow_core::input_signals::SignalError),
    #[error(transparent)]
    Scenario(#[from] bracketflow_core::scenarios::ScenarioError),
}

#[derive(Debug)]
pub enum Task {
    Converge { spec: DistanceSpec, cfg: ConvergenceConfig },
    Probe { cfg: StabilityProbeConfig, lues: bool, expect: bool },
    Gd { js: Vec<f64>, window: f64, order: usize },
    Brackets { grid: Vec<(f64, Vec<f64>)>, fd: bool },
    Frequencies { agents: usize },
    Expansion { j: f64, t0: f64, x0: Vec<f64>, horizon: f64 },
}

/// A validated configuration, ready to run.
#[derive(Debug)]
pub struct Plan {
    pub kind: ExperimentKind,
    pub built: Option<Built>,
    pub task: Task,
    pub policy: StepPolicy,
    pub tolerances: Tolerances,
    pub threads: usize,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub verdicts: Vec<Verdict>,
    pub summary: Vec<String>,
}

fn policy(s: &StepSpec) -> Result<StepPolicy, ValidationError> {
    if !(s.h_max_s > 0.0 && s.h_max_s.is_finite()) {
        return invalid(format!("step.h_max_s must be positive, got {}", s.h_max_s));
    }
    if !(s.samples_per_period > 0.0 && s.samples_per_period.is_finite()) {
        return invalid(format!("step.samples_per_period must be positive, got {}", s.samples_per_period));
    }
    if !(s.blowup_bound > 0.0) {
        return invalid(format!("step.blowup_bound must be positive, got {}", s.blowup_bound));
    }
    Ok(StepPolicy { h_max: s.h_max_s, samples_per_period: s.samples_per_period, blowup_bound: s.blowup_bound })
}

fn positive(what: &str, x: f64) -> Result<f64, ValidationError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        invalid(format!("{what} must be positive and finite, got {x}"))
    }
}

fn sample_ball(s: &SampleSpec) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let n = s.center.len();
    (0..s.count)
        .map(|_| {
            let mut g: Vec<f64> = (0..n)
                .map(|_| {
                    let (u1, u2): (f64, f64) = (rng.gen::<f64>().max(f64::MIN_POSITIVE), rng.gen());
                    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
                })
                .collect();
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            let r = s.radius * rng.gen::<f64>().powf(1.0 / n as f64);
            for (gi, ci) in g.iter_mut().zip(&s.center) {
                *gi = ci + r * *gi / norm;
            }
            g
        })
        .collect()
}

fn initial_states(
    x0s: &Option<Vec<Vec<f64>>>,
    sample: &Option<SampleSpec>,
    spec: &ScenarioSpec,
    dim: usize,
    section: &str,
) -> Result<Vec<Vec<f64>>, ValidationError> {
    let mut out = Vec::new();
    if let Some(x) = x0s {
        out.extend(x.iter().cloned());
    }
    if let Some(s) = sample {
        positive(&format!("{section}.sample.radius"), s.radius)?;
        if s.center.len() != dim {
            return invalid(format!("{section}.sample.center has {} entries, the state has {dim}", s.center.len()));
        }
        out.extend(sample_ball(s));
    }
    if x0s.is_none() && sample.is_none() {
        match scenario::initial(spec) {
            Some(x) => out.push(x.clone()),
            None => return invalid(format!("{section} needs x0s, a sample block, or scenario.initial")),
        }
    }
    for (k, x) in out.iter().enumerate() {
        if x.len() != dim {
            return invalid(format!("{section}: initial state {k} has {} entries, the state has {dim}", x.len()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return invalid(format!("{section}: initial state {k} is not finite"));
        }
    }
    Ok(out)
}

fn finite_times(what: &str, ts: &[f64]) -> Result<(), ValidationError> {
    match ts.iter().find(|t| !t.is_finite()) {
        Some(t) => invalid(format!("{what} contains {t}")),
        None => Ok(()),
    }
}

/// Points along rays through the origin at which the output takes
/// logarithmically spaced values in `[psi_min, psi_max]`.
fn bracket_grid(sys: &ControlAffineSystem, psi_min: f64, psi_max: f64, points: usize) -> Result<Vec<(f64, Vec<f64>)>, ValidationError> {
    let psi = sys.output().ok_or_else(|| ValidationError("brackets-verify needs an output".into()))?;
    let n = sys.n();
    let mut grid = Vec::with_capacity(points);
    for k in 0..points {
        let frac = if points > 1 { k as f64 / (points - 1) as f64 } else { 0.0 };
        let target = psi_min * (psi_max / psi_min).powf(frac);
        let angle = 0.7 * k as f64;
        let mut dir = vec![0.0; n];
        dir[0] = angle.cos();
        if n > 1 {
            dir[1] = angle.sin();
        }
        let at = |s: f64| psi.eval(0.0, &dir.iter().map(|d| s * d).collect::<Vec<_>>());
        let mut hi = 1.0;
        while at(hi) < target {
            hi *= 2.0;
            if hi > 1e12 {
                return invalid("brackets-verify: the output does not reach psi_max along the grid rays");
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if at(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        grid.push((0.1 * k as f64, dir.iter().map(|d| hi * d).collect()));
    }
    Ok(grid)
}

pub fn validate(cfg: &RunConfig) -> Result<Plan, ValidationError> {
    if cfg.threads == 0 || cfg.threads > 1024 {
        return invalid(format!("threads must lie in 1..=1024, got {}", cfg.threads));
    }
    let policy = policy(&cfg.step)?;
    let tol = cfg.tolerances.clone();
    for (what, v) in [
        ("tolerances.bracket_analytic", tol.bracket_analytic),
        ("tolerances.bracket_fd", tol.bracket_fd),
        ("tolerances.expansion_max", tol.expansion_max),
        ("tolerances.expansion_halving", tol.expansion_halving),
        ("tolerances.fit_residual_max", tol.fit_residual_max),
        ("tolerances.gd_slope", tol.gd_slope),
    ] {
        positive(what, v)?;
    }
    if !(tol.min_decades >= 0.0) {
        return invalid("tolerances.min_decades must be non-negative");
    }
    let needs_scenario = cfg.experiment != ExperimentKind::FreqCheck;
    let built = if needs_scenario {
        Some(scenario::build(&cfg.scenario).map_err(|e| ValidationError(format!("scenario {}: {e}", cfg.scenario.name())))?)
    } else {
        None
    };
    let missing = |s: &str| ValidationError(format!("experiment {} needs a [{s}] section", cfg.experiment.name()));
    let task = match cfg.experiment {
        ExperimentKind::Converge => {
            let g = cfg.grid.as_ref().ok_or_else(|| missing("grid"))?;
            let b = built.as_ref().expect("scenario built");
            positive("grid.horizon_s", g.horizon_s)?;
            finite_times("grid.t0s_s", &g.t0s_s)?;
            if let Some(j) = g.js.iter().find(|j| !(**j >= 1.0 && j.is_finite())) {
                return invalid(format!("grid.js entries must be finite and at least 1, got {j}"));
            }
            if let Some(l) = g.limit_box {
                positive("grid.limit_box", l)?;
            }
            let spec = b
                .distance_spec(&g.weight)
                .ok_or_else(|| ValidationError(format!("grid.weight: unknown weight {:?}", g.weight)))?;
            let x0s = initial_states(&g.x0s, &g.sample, &cfg.scenario, b.family().dim(), "grid")?;
            let cfg = ConvergenceConfig { js: g.js.clone(), t0s: g.t0s_s.clone(), x0s, horizon: g.horizon_s, policy, limit_box: g.limit_box };
            Task::Converge { spec, cfg }
        }
        ExperimentKind::Pluas | ExperimentKind::Lues => {
            let p = cfg.probe.as_ref().ok_or_else(|| missing("probe"))?;
            let b = built.as_ref().expect("scenario built");
            finite_times("probe.t0s_s", &p.t0s_s)?;
            if let Some(j) = p.js.iter().find(|j| !(**j >= 1.0)) {
                return invalid(format!("probe.js entries must be at least 1 (inf for the limit), got {j}"));
            }
            if p.js.is_empty() {
                return invalid("probe.js is empty");
            }
            if p.epsilons.is_empty() {
                return invalid("probe.epsilons is empty");
            }
            if p.samples < 2 {
                return invalid("probe.samples must be at least 2");
            }
            positive("probe.duration_s", p.duration_s)?;
            let distance = b
                .distance(&p.distance)
                .ok_or_else(|| ValidationError(format!("probe.distance: unknown distance {:?}", p.distance)))?;
            let x0s = initial_states(&p.x0s, &p.sample, &cfg.scenario, b.family().dim(), "probe")?;
            let probe = StabilityProbeConfig {
                distance,
                delta: p.delta,
                epsilons: p.epsilons.clone(),
                attraction_time: p.attraction_time_s,
                duration: p.duration_s,
                t0s: p.t0s_s.clone(),
                x0s,
                js: p.js.clone(),
                policy,
                samples: p.samples,
                fit_residual_max: tol.fit_residual_max,
                min_decades: tol.min_decades,
            };
            probe.validate().map_err(|e| ValidationError(format!("probe: {e}")))?;
            Task::Probe { cfg: probe, lues: cfg.experiment == ExperimentKind::Lues, expect: p.expect }
        }
        ExperimentKind::GdReport => {
            let g = cfg.gd.as_ref().ok_or_else(|| missing("gd"))?;
            positive("gd.window_s", g.window_s)?;
            if let Some(j) = g.js.iter().find(|j| !(**j >= 1.0 && j.is_finite())) {
                return invalid(format!("gd.js entries must be finite and at least 1, got {j}"));
            }
            match built.as_ref() {
                Some(Built::Linear(s)) if s.generalized_difference(1.0).ok().flatten().is_some() => {}
                Some(Built::Formation(_)) => {
                    if !(1..=4).contains(&g.order) {
                        return invalid(format!("gd.order must lie in 1..=4, got {}", g.order));
                    }
                }
                _ => return invalid("gd-report needs the linear scenario with sinusoid inputs or the formation scenario"),
            }
            Task::Gd { js: g.js.clone(), window: g.window_s, order: g.order }
        }
        ExperimentKind::BracketsVerify => {
            let s = cfg.brackets.as_ref().ok_or_else(|| missing("brackets"))?;
            let b = built.as_ref().expect("scenario built");
            if matches!(b, Built::Formation(_)) {
                return invalid("brackets-verify works on scenarios whose channels come in sine/cosine pairs");
            }
            positive("brackets.psi_min", s.psi_min)?;
            positive("brackets.psi_max", s.psi_max)?;
            if s.psi_min > s.psi_max {
                return invalid("brackets.psi_min exceeds psi_max");
            }
            if s.points == 0 {
                return invalid("brackets.points must be positive");
            }
            let grid = bracket_grid(b.system(), s.psi_min, s.psi_max, s.points)?;
            Task::Brackets { grid, fd: s.finite_differences }
        }
        ExperimentKind::FreqCheck => {
            let f = cfg.frequencies.as_ref().ok_or_else(|| missing("frequencies"))?;
            if f.agents == 0 || f.agents > ENUMERATION_BOUND {
                return invalid(format!("frequencies.agents must lie in 1..={ENUMERATION_BOUND}, got {}", f.agents));
            }
            Task::Frequencies { agents: f.agents }
        }
        ExperimentKind::ExpansionResidual => {
            let e = cfg.expansion.as_ref().ok_or_else(|| missing("expansion"))?;
            let b = built.as_ref().expect("scenario built");
            let Built::Linear(s) = b else {
                return invalid("expansion-residual needs the linear scenario");
            };
            if s.generalized_difference(1.0).ok().flatten().is_none() {
                return invalid("expansion-residual needs sinusoid inputs");
            }
            if !(e.j >= 1.0 && e.j.is_finite()) {
                return invalid(format!("expansion.j must be finite and at least 1, got {}", e.j));
            }
            positive("expansion.horizon_s", e.horizon_s)?;
            finite_times("expansion.t0_s", &[e.t0_s])?;
            let x0 = match (&e.x0, scenario::initial(&cfg.scenario)) {
                (Some(x), _) | (None, Some(x)) => x.clone(),
                (None, None) => return invalid("expansion needs x0 or scenario.initial"),
            };
            if x0.len() != b.family().dim() {
                return invalid(format!("expansion.x0 has {} entries, the state has {}", x0.len(), b.family().dim()));
            }
            Task::Expansion { j: e.j, t0: e.t0_s, x0, horizon: e.horizon_s }
        }
    };
    Ok(Plan { kind: cfg.experiment, built, task, policy, tolerances: tol, threads: cfg.threads })
}

pub fn execute(plan: &Plan, exec: &RayonExecutor) -> Result<Outcome, ExperimentError> {
    match &plan.task {
        Task::Converge { spec, cfg } => converge(plan.built.as_ref().expect("scenario"), spec, cfg, exec),
        Task::Probe { cfg, lues, expect } => probe(plan.built.as_ref().expect("scenario"), cfg, *lues, *expect, exec),
        Task::Gd { js, window, order } => gd(plan.built.as_ref().expect("scenario"), js, *window, *order, &plan.tolerances),
        Task::Brackets { grid, fd } => brackets(plan.built.as_ref().expect("scenario"), grid, *fd, &plan.tolerances),
        Task::Frequencies { agents } => frequencies(*agents),
        Task::Expansion { j, t0, x0, horizon } => {
            expansion(plan.built.as_ref().expect("scenario"), *j, *t0, x0, *horizon, &plan.policy, &plan.tolerances)
        }
    }
}

fn converge(b: &Built, spec: &DistanceSpec, cfg: &ConvergenceConfig, exec: &RayonExecutor) -> Result<Outcome, ExperimentError> {
    let rep = convergence_sweep(b.family(), spec, cfg, exec)?;
    let mut out = Outcome::default();
    out.artifacts.push(Artifact::new("convergence.csv", output::convergence_csv(&rep, b.family().dim())));
    out.artifacts.push(Artifact::new("plotdata/decay.dat", output::decay_plot(&rep)));
    if let (Some(&t0), Some(x0)) = (cfg.t0s.first(), cfg.x0s.first()) {
        let mut js: Vec<f64> = rep.js.clone();
        js.dedup();
        let runs: Vec<Result<_, SimError>> = bracketflow_core::simulator::Executor::map(exec, js.len() + 1, |k| {
            let sys = if k == 0 { b.family().limit()? } else { b.family().system(js[k - 1])? };
            integrate(sys.as_ref(), t0, x0, cfg.horizon, &cfg.policy)
        });
        for (k, tr) in runs.into_iter().enumerate() {
            let tr = tr?;
            let label = if k == 0 { "limit".to_string() } else { format!("j_{}", j_label(js[k - 1])) };
            out.artifacts.push(Artifact::new(format!("trajectories/{label}.csv"), output::trajectory_csv(&tr)));
            let title = if k == 0 { "limit system".to_string() } else { format!("j = {}", num(js[k - 1])) };
            out.artifacts.push(Artifact::new(format!("plotdata/trajectory_{label}.dat"), output::trajectory_plot(&tr, &title)));
        }
    }
    convergence_verdicts(&rep, &mut out);
    Ok(out)
}

fn convergence_verdicts(rep: &ConvergenceReport, out: &mut Outcome) {
    let complete = rep.cells.iter().all(|c| c.complete);
    out.verdicts.push(Verdict::new("converge.complete", complete));
    out.verdicts.push(Verdict::new("converge.zero-weight", rep.violations() == 0).value(rep.violations() as f64));
    out.verdicts.push(Verdict::new("converge.limit-box", rep.limits_in_box()));
    out.verdicts.push(Verdict::new("converge.non-increasing", rep.monotone()));
    out.verdicts.push(Verdict::new("converge.strictly-decreasing", rep.strictly_decreasing()).informational());
    for &j in &rep.js {
        if let Some(r) = rep.max_ratio(j) {
            out.summary.push(format!("j = {}: max sup-distance ratio {}", num(j), num(r)));
        }
    }
}

fn probe(b: &Built, cfg: &StabilityProbeConfig, lues: bool, expect: bool, exec: &RayonExecutor) -> Result<Outcome, ExperimentError> {
    let rep = if lues { probe_lues(b.family(), cfg, exec)? } else { probe_pluas(b.family(), cfg, exec)? };
    let mut out = Outcome::default();
    out.artifacts.push(Artifact::new("probe_cells.csv", probe_cells_csv(&rep, cfg)));
    out.artifacts.push(Artifact::new("probe_verdicts.csv", probe_verdicts_csv(&rep)));
    for v in &rep.verdicts {
        let label = j_label(v.j);
        let cells: Vec<_> = rep.cells.iter().filter(|c| c.j == v.j && c.t0 == cfg.t0s[0]).collect();
        let cols: Vec<String> = std::iter::once("t".to_string()).chain(cells.iter().map(|c| format!("d{}", c.x0 + 1))).collect();
        let mut p = PlotData::new(
            &format!("distance to the target set, j = {}", num(v.j)),
            &[format!("t0 = {}", num(cfg.t0s[0]))],
            &cols.iter().map(String::as_str).collect::<Vec<_>>(),
        );
        if let Some(first) = cells.first() {
            for (k, &t) in first.times.iter().enumerate() {
                let mut row = vec![t];
                row.extend(cells.iter().map(|c| c.distances.get(k).copied().unwrap_or(f64::NAN)));
                p.row(&row);
            }
        }
        out.artifacts.push(Artifact::new(format!("plotdata/distance_j_{label}.dat"), p.finish()));
    }
    let summary = probe_summary(&rep, lues);
    out.artifacts.push(Artifact::new("summary.txt", summary.join("\n") + "\n"));
    out.summary = summary;

    let failures: usize = rep.verdicts.iter().map(|v| v.failures).sum();
    out.verdicts.push(Verdict::new("probe.complete", failures == 0).value(failures as f64).informational());
    let monotone = rep.verdicts.iter().all(|v| {
        let mut order: Vec<usize> = (0..rep.epsilons.len()).collect();
        order.sort_by(|&a, &b| rep.epsilons[a].total_cmp(&rep.epsilons[b]));
        order.windows(2).all(|w| (!v.stable[w[0]] || v.stable[w[1]]) && (!v.attracted[w[0]] || v.attracted[w[1]]))
    });
    out.verdicts.push(Verdict::new("probe.monotone-thresholds", monotone));
    if lues {
        let got = rep.lues_j0.is_some();
        let mu = rep.verdicts.last().and_then(|v| v.envelope).map_or(f64::NAN, |e| e.mu);
        out.verdicts.push(
            Verdict::new("lues.verdict", got == expect)
                .value(mu)
                .detail(format!("exponential verdict {got}, expected {expect}")),
        );
    } else {
        let got = rep.attraction_j0.iter().all(Option::is_some);
        out.verdicts.push(
            Verdict::new("pluas.attraction", got == expect).detail(format!("attraction for every epsilon {got}, expected {expect}")),
        );
    }
    Ok(out)
}

fn fit_cells(f: &FitOutcome) -> [String; 4] {
    match f {
        FitOutcome::Fit(e) => [num(e.lambda), num(e.mu), num(e.residual), num(e.decades)],
        FitOutcome::Converged => ["converged".into(), "".into(), "".into(), "".into()],
        FitOutcome::Insufficient => ["insufficient".into(), "".into(), "".into(), "".into()],
    }
}

fn probe_cells_csv(rep: &StabilityReport, cfg: &StabilityProbeConfig) -> String {
    let mut c = Csv::new(&[
        "j", "t0", "x0_index", "d0", "complete", "max_d", "tail_max", "fit_lambda", "fit_mu", "fit_residual", "fit_decades",
    ]);
    for cell in &rep.cells {
        let mut row = vec![
            num(cell.j),
            num(cell.t0),
            (cell.x0 + 1).to_string(),
            num(cell.d0),
            cell.complete.to_string(),
            num(cell.max_d),
            num(cell.tail_max),
        ];
        row.extend(fit_cells(&cell.fit));
        c.row(row);
    }
    debug_assert!(cfg.x0s.len() * cfg.t0s.len() * rep.verdicts.len() == rep.cells.len());
    c.finish()
}

fn probe_verdicts_csv(rep: &StabilityReport) -> String {
    let mut c = Csv::new(&["j", "epsilon", "stable", "attracted", "lues", "envelope_lambda", "envelope_mu"]);
    for v in &rep.verdicts {
        for (k, &e) in rep.epsilons.iter().enumerate() {
            let (l, m) = v.envelope.map_or((f64::NAN, f64::NAN), |e| (e.lambda, e.mu));
            c.row([num(v.j), num(e), v.stable[k].to_string(), v.attracted[k].to_string(), v.lues.to_string(), num(l), num(m)]);
        }
    }
    c.finish()
}

fn probe_summary(rep: &StabilityReport, lues: bool) -> Vec<String> {
    let fmt_j0 = |j: Option<f64>| j.map_or_else(|| "none".to_string(), num);
    let mut s = Vec::new();
    for (k, &e) in rep.epsilons.iter().enumerate() {
        s.push(format!(
            "epsilon {}: stability from j0 = {}, attraction from j0 = {}",
            num(e),
            fmt_j0(rep.stability_j0[k]),
            fmt_j0(rep.attraction_j0[k])
        ));
    }
    for v in &rep.verdicts {
        let mut line = format!("j = {}: max d {}, tail max {}, failures {}", num(v.j), num(v.max_d), num(v.tail_max), v.failures);
        if let Some(e) = v.envelope {
            let _ = write!(line, ", envelope lambda {} mu {}", num(e.lambda), num(e.mu));
        }
        if lues {
            let _ = write!(line, ", exponential {}", v.lues);
        }
        s.push(line);
    }
    if lues {
        s.push(format!("exponential from j0 = {}", fmt_j0(rep.lues_j0)));
    }
    s
}

fn gd(b: &Built, js: &[f64], window: f64, order: usize, tol: &Tolerances) -> Result<Outcome, ExperimentError> {
    let mut js = js.to_vec();
    js.sort_by(f64::total_cmp);
    js.dedup();
    let mut reports: Vec<GdReport> = Vec::with_capacity(js.len());
    for &j in &js {
        let r = match b {
            Built::Linear(s) => {
                let g = s.generalized_difference(j)?.expect("validated sinusoid family");
                gd_convergence_report(&g.u, &g.v, &g.v_j, &g.w, window, j)?
            }
            Built::Formation(s) => {
                let g = unicycle_gd(s.agents(), j, order)?;
                gd_convergence_report(&g.u, &g.v, &g.v, &g.w, window, j)?
            }
            Built::Quartic(_) => unreachable!("rejected during validation"),
        };
        reports.push(r);
    }
    let mut out = Outcome::default();
    let mut c = Csv::new(&["j", "index", "channel", "metric", "value", "method"]);
    for r in &reports {
        for row in &r.rows {
            c.row([
                num(r.j),
                row.index.to_string(),
                row.channel.map_or_else(String::new, |k| k.to_string()),
                row.metric.name().to_string(),
                num(row.value),
                format!("{:?}", row.method).to_lowercase(),
            ]);
        }
    }
    out.artifacts.push(Artifact::new("gd_report.csv", c.finish()));

    let max_order = reports.iter().flat_map(|r| r.rows.iter().map(|x| x.index.len())).max().unwrap_or(0);
    let mut cols = vec!["j".to_string()];
    let mut series: Vec<(GdMetric, Option<usize>)> = Vec::new();
    for metric in [GdMetric::LimitGap, GdMetric::Difference, GdMetric::Coupling] {
        for o in 1..=max_order {
            if reports.iter().any(|r| r.rows.iter().any(|x| x.metric == metric && x.index.len() == o)) {
                cols.push(format!("{}_order{o}", metric.name()));
                series.push((metric, Some(o)));
            }
        }
    }
    let mut p = PlotData::new(
        "GD sup-norms against j",
        &["largest value per metric and order".into(), format!("window {} s", num(window))],
        &cols.iter().map(String::as_str).collect::<Vec<_>>(),
    );
    for r in &reports {
        let mut row = vec![r.j];
        row.extend(series.iter().map(|&(m, o)| r.max(m, o)));
        p.row(&row);
    }
    out.artifacts.push(Artifact::new("plotdata/gd_decay.dat", p.finish()));

    let sweep = gd_sweep(&reports);
    for (metric, dec) in &sweep.decreasing {
        out.verdicts.push(Verdict::new(format!("gd.decreasing.{}", metric.name()), *dec));
    }
    if js.len() >= 2 {
        for &(metric, o) in &series {
            let vals: Vec<f64> = reports.iter().map(|r| r.max(metric, o)).collect();
            if vals.iter().all(|v| *v > 0.0) {
                if let Some(s) = log_log_slope(&js, &vals) {
                    let name = format!("gd.slope.{}_order{}", metric.name(), o.unwrap_or(0));
                    out.summary.push(format!("{name} = {}", num(s)));
                    out.verdicts.push(Verdict::new(name, true).value(s).informational());
                }
            }
        }
    }
    let _ = tol;
    Ok(out)
}

fn brackets(b: &Built, grid: &[(f64, Vec<f64>)], fd: bool, tol: &Tolerances) -> Result<Outcome, ExperimentError> {
    let sys = b.system();
    let pairs = sys.m() / 2;
    let fd_sys = if fd {
        let controls: Vec<VectorField> = sys.controls().iter().map(VectorField::to_finite_difference).collect();
        let out = sys.output().map(ScalarField::to_finite_difference).ok_or(FieldError::MissingOutput)?;
        Some(
            ControlAffineSystem::new(sys.drift().clone(), controls)?
                .with_output(out)?
                .with_shapes(sys.shapes().ok_or(FieldError::MissingOutput)?.to_vec())?,
        )
    } else {
        None
    };
    let mut out = Outcome::default();
    let mut c = Csv::new(&["k", "residual_analytic", "residual_fd"]);
    for k in 1..=pairs {
        let a = verify_magic_bracket(sys, k, grid)?;
        let f = fd_sys.as_ref().map(|s| verify_magic_bracket(s, k, grid)).transpose()?;
        c.row([k.to_string(), num(a), f.map_or_else(String::new, num)]);
        out.verdicts.push(Verdict::new(format!("brackets.analytic.k{k}"), a <= tol.bracket_analytic).value(a));
        if let Some(f) = f {
            out.verdicts.push(Verdict::new(format!("brackets.fd.k{k}"), f <= tol.bracket_fd).value(f));
        }
    }
    out.artifacts.push(Artifact::new("brackets.csv", c.finish()));
    let psi = sys.output().ok_or(FieldError::MissingOutput)?;
    let mut g = Csv::new(&output::state_header(sys.n()).iter().map(String::as_str).chain(["psi"]).collect::<Vec<_>>());
    for (t, x) in grid {
        g.row(std::iter::once(num(*t)).chain(x.iter().map(|v| num(*v))).chain([num(psi.eval(*t, x))]));
    }
    out.artifacts.push(Artifact::new("bracket_grid.csv", g.finish()));
    Ok(out)
}

fn frequencies(agents: usize) -> Result<Outcome, ExperimentError> {
    let r = check_frequency_properties(agents)?;
    let mut out = Outcome::default();
    let mut c = Csv::new(&["agent", "non_pair_patterns", "signed_tuples"]);
    for (k, (p, t)) in r.patterns_per_agent.iter().zip(&r.tuples_per_agent).enumerate() {
        c.row([(k + 1).to_string(), p.to_string(), t.to_string()]);
    }
    out.artifacts.push(Artifact::new("frequencies.csv", c.finish()));
    let mut v = Csv::new(&["property", "tuple"]);
    for viol in &r.violations {
        let tuple: Vec<String> = viol.tuple.iter().map(|(i, s)| format!("{}{}", if *s < 0 { "-" } else { "+" }, i)).collect();
        v.row([viol.property.to_string(), tuple.join(" ")]);
    }
    out.artifacts.push(Artifact::new("frequency_violations.csv", v.finish()));
    out.verdicts.push(Verdict::new("freq.i.no-zero-frequency", r.singles_ok));
    out.verdicts.push(Verdict::new("freq.ii.pairs-cancel-only-trivially", r.pairs_ok));
    out.verdicts.push(Verdict::new("freq.iii.no-zero-triple", r.triples_ok));
    out.verdicts.push(Verdict::new("freq.iv.quadruples", r.quadruples_ok).value(r.violation_count as f64));
    let twelve = r.twelve_per_agent();
    let label = if twelve {
        "12 non-pair quadruple solutions".to_string()
    } else {
        format!("non-pair quadruple solutions per agent: {:?}", r.patterns_per_agent)
    };
    out.verdicts.push(Verdict::new("freq.twelve-per-agent", twelve).detail(label.clone()));
    out.summary.push(label);
    Ok(out)
}

fn expansion(
    b: &Built,
    j: f64,
    t0: f64,
    x0: &[f64],
    horizon: f64,
    policy: &StepPolicy,
    tol: &Tolerances,
) -> Result<Outcome, ExperimentError> {
    let Built::Linear(s) = b else { unreachable!("rejected during validation") };
    let g = s.generalized_difference(j)?.expect("validated sinusoid family");
    let fields = output_feedback_fields(s.system())?;
    let data = ExpansionData {
        drift: s.system().drift(),
        fields: &fields,
        u: &g.u,
        v: s.v(),
        v_j: &g.v_j,
        w: &g.w,
        limit: s.extended(),
        psi: s.system().output(),
    };
    let alphas: Vec<ScalarField> = (0..x0.len()).map(|i| ScalarField::coordinate(x0.len(), i)).collect();
    let sys = s.sigma_j(j)?;
    let mut out = Outcome::default();
    let mut maxima = Vec::new();
    for (name, p) in [("default", *policy), ("halved", policy.halved())] {
        let tr = integrate(&sys, t0, x0, horizon, &p)?;
        if !tr.completed() {
            return Err(SimError::Incomplete.into());
        }
        let r = integral_expansion_residual(&data, &alphas, &tr)?;
        let cols: Vec<String> = std::iter::once("t".to_string()).chain((1..=x0.len()).map(|i| format!("residual_x{i}"))).collect();
        let mut c = Csv::new(&cols.iter().map(String::as_str).collect::<Vec<_>>());
        for (k, &t) in r.times.iter().enumerate() {
            c.row(std::iter::once(num(t)).chain(r.residuals.iter().map(|s| num(s[k]))));
        }
        out.artifacts.push(Artifact::new(format!("expansion_{name}.csv"), c.finish()));
        out.summary.push(format!("{name} step {}: max residual {}", num(tr.step()), num(r.max)));
        maxima.push(r.max);
    }
    let ratio = maxima[0] / maxima[1];
    out.verdicts.push(Verdict::new("expansion.max", maxima[0] <= tol.expansion_max).value(maxima[0]));
    out.verdicts.push(Verdict::new("expansion.halving", ratio >= tol.expansion_halving).value(ratio));
    Ok(out)
}

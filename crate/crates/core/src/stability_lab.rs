//! Empirical probes for practical uniform attractivity and exponential
//! decay of `d(Φ(t), E)` over `(t0, x0, j)` grids.

use alloc::vec::Vec;

use crate::math;
use crate::simulator::{integrate, Dynamics, Executor, SimError, StateFn, StepPolicy, SystemFamily, Trajectory};

/// Distances below this are clamped before taking logarithms.
pub const DISTANCE_FLOOR: f64 = 1e-9;
/// Slack factors of the envelope check.
pub const ENVELOPE_LAMBDA_SLACK: f64 = 1.05;
pub const ENVELOPE_MU_SLACK: f64 = 0.95;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ProbeError {
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("duration {0} is shorter than the attraction time {1}")]
    Duration(f64, f64),
    #[error("initial state {0} lies outside the delta ball (distance {1})")]
    OutsideBall(usize, f64),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// `d(t) ≤ λ d(x0, E) e^{−μ (t − t0)}` on the samples, with `μ` the
/// negated least-squares slope of `ln d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpFit {
    /// Smallest factor for which the bound with rate `mu` covers every sample.
    pub lambda: f64,
    pub mu: f64,
    /// `e^{intercept} / d(x0, E)` of the least-squares line.
    pub intercept: f64,
    /// Root mean square residual of the log-linear fit.
    pub residual: f64,
    /// `log10(d(x0, E) / min d)` over the samples, floor applied.
    pub decades: f64,
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FitOutcome {
    Fit(ExpFit),
    /// Every distance is below the floor: converged, no fit.
    Converged,
    /// Fewer than two usable samples.
    Insufficient,
}

impl FitOutcome {
    pub fn fit(&self) -> Option<&ExpFit> {
        match self {
            FitOutcome::Fit(f) => Some(f),
            _ => None,
        }
    }
}

fn dominated(times: &[f64], d: &[f64], t0: f64, d0: f64, lambda: f64, mu: f64) -> bool {
    times.iter().zip(d).all(|(&t, &v)| v <= lambda * d0 * math::exp(-mu * (t - t0)) * (1.0 + 1e-12) + 1e-300)
}

/// Least squares on `ln d` against `t − t0` over samples above the floor.
pub fn fit_exponential(times: &[f64], distances: &[f64], t0: f64, d0: f64) -> FitOutcome {
    let kept: Vec<(f64, f64)> = times.iter().zip(distances).filter(|(_, &d)| d > DISTANCE_FLOOR).map(|(&t, &d)| (t, d)).collect();
    if kept.is_empty() || !(d0 > DISTANCE_FLOOR) {
        return FitOutcome::Converged;
    }
    let x: Vec<f64> = kept.iter().map(|(t, _)| t - t0).collect();
    let y: Vec<f64> = kept.iter().map(|(_, d)| math::ln(*d)).collect();
    let Some((icpt, slope, residual)) = math::linear_fit(&x, &y) else {
        return FitOutcome::Insufficient;
    };
    let mu = -slope;
    let lambda = kept.iter().map(|&(t, d)| d * math::exp(mu * (t - t0)) / d0).fold(0.0, f64::max);
    let low = distances.iter().map(|d| d.max(DISTANCE_FLOOR)).fold(f64::INFINITY, f64::min);
    let decades = math::ln(d0 / low) / core::f64::consts::LN_10;
    FitOutcome::Fit(ExpFit { lambda, mu, intercept: math::exp(icpt) / d0, residual, decades, samples: x.len() })
}

#[derive(Clone)]
pub struct StabilityProbeConfig {
    /// `x ↦ d(x, E)`, possibly an upper bound.
    pub distance: StateFn,
    pub delta: f64,
    pub epsilons: Vec<f64>,
    /// `T`: attraction is checked on `[t0 + T, t0 + duration]`.
    pub attraction_time: f64,
    pub duration: f64,
    pub t0s: Vec<f64>,
    pub x0s: Vec<Vec<f64>>,
    /// `f64::INFINITY` stands for the limit system.
    pub js: Vec<f64>,
    pub policy: StepPolicy,
    /// Distance evaluations per trajectory.
    pub samples: usize,
    /// Largest fit residual accepted for the exponential verdict.
    pub fit_residual_max: f64,
    /// Decay, in decades, that every fitted cell must show for the
    /// exponential verdict.
    pub min_decades: f64,
}

impl core::fmt::Debug for StabilityProbeConfig {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("StabilityProbeConfig")
            .field("delta", &self.delta)
            .field("epsilons", &self.epsilons)
            .field("attraction_time", &self.attraction_time)
            .field("duration", &self.duration)
            .field("t0s", &self.t0s)
            .field("x0s", &self.x0s)
            .field("js", &self.js)
            .field("fit_residual_max", &self.fit_residual_max)
            .field("min_decades", &self.min_decades)
            .finish()
    }
}

impl StabilityProbeConfig {
    pub fn validate(&self) -> Result<(), ProbeError> {
        if !(self.delta > 0.0) {
            return Err(ProbeError::NonPositive("delta"));
        }
        if self.epsilons.iter().any(|e| !(*e > 0.0)) {
            return Err(ProbeError::NonPositive("epsilon"));
        }
        if !(self.attraction_time > 0.0) {
            return Err(ProbeError::NonPositive("attraction time"));
        }
        if !(self.duration >= self.attraction_time) {
            return Err(ProbeError::Duration(self.duration, self.attraction_time));
        }
        for (k, x0) in self.x0s.iter().enumerate() {
            let d = (self.distance)(x0);
            if !(d <= self.delta * (1.0 + 1e-12)) {
                return Err(ProbeError::OutsideBall(k, d));
            }
        }
        Ok(())
    }
}

/// One `(j, t0, x0)` run.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeCell {
    pub j: f64,
    pub t0: f64,
    pub x0: usize,
    pub d0: f64,
    pub complete: bool,
    pub max_d: f64,
    /// `max d` over `t ≥ t0 + T`.
    pub tail_max: f64,
    pub fit: FitOutcome,
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Envelope {
    pub lambda: f64,
    pub mu: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JVerdict {
    pub j: f64,
    /// Per epsilon: `d ≤ ε` on the whole run for every cell.
    pub stable: Vec<bool>,
    /// Per epsilon: `d ≤ ε` after `t0 + T` for every cell.
    pub attracted: Vec<bool>,
    pub failures: usize,
    pub max_d: f64,
    pub tail_max: f64,
    /// `(max λ̂, min μ̂)` over the fitted cells.
    pub envelope: Option<Envelope>,
    pub lues: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub epsilons: Vec<f64>,
    /// Ordered by `j`.
    pub verdicts: Vec<JVerdict>,
    pub cells: Vec<ProbeCell>,
    /// Per epsilon, the first listed `j` from which stability holds on.
    pub stability_j0: Vec<Option<f64>>,
    pub attraction_j0: Vec<Option<f64>>,
    pub lues_j0: Option<f64>,
}

impl StabilityReport {
    pub fn verdict(&self, j: f64) -> Option<&JVerdict> {
        self.verdicts.iter().find(|v| v.j == j)
    }
}

fn threshold(verdicts: &[JVerdict], pass: impl Fn(&JVerdict) -> bool) -> Option<f64> {
    let mut j0 = None;
    for v in verdicts.iter().rev() {
        if !pass(v) {
            break;
        }
        j0 = Some(v.j);
    }
    j0
}

fn sample(tr: &Trajectory, samples: usize, distance: &StateFn) -> (Vec<f64>, Vec<f64>) {
    let stride = tr.len().div_ceil(samples.max(2));
    let stride = stride.max(1);
    let mut idx: Vec<usize> = (0..tr.len()).step_by(stride).collect();
    if idx.last() != Some(&(tr.len() - 1)) {
        idx.push(tr.len() - 1);
    }
    idx.iter().map(|&k| (tr.time(k), distance(tr.state(k)))).unzip()
}

fn run_cell(family: &dyn SystemFamily, cfg: &StabilityProbeConfig, j: f64, t0: f64, xi: usize) -> Result<ProbeCell, ProbeError> {
    let x0 = &cfg.x0s[xi];
    let sys: alloc::boxed::Box<dyn Dynamics + '_> = if j.is_infinite() { family.limit()? } else { family.system(j)? };
    let tr = integrate(sys.as_ref(), t0, x0, cfg.duration, &cfg.policy)?;
    let d0 = (cfg.distance)(x0);
    let (times, distances) = sample(&tr, cfg.samples, &cfg.distance);
    let complete = tr.completed();
    let max_d = if complete { distances.iter().copied().fold(0.0, f64::max) } else { f64::INFINITY };
    let t_tail = t0 + cfg.attraction_time;
    let tail_max = if complete {
        times.iter().zip(&distances).filter(|(t, _)| **t >= t_tail - 1e-12).map(|(_, d)| *d).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let fit = if complete { fit_exponential(&times, &distances, t0, d0) } else { FitOutcome::Insufficient };
    Ok(ProbeCell { j, t0, x0: xi, d0, complete, max_d, tail_max, fit, times, distances })
}

fn verdict(cfg: &StabilityProbeConfig, j: f64, cells: &[&ProbeCell]) -> JVerdict {
    let failures = cells.iter().filter(|c| !c.complete).count();
    let max_d = cells.iter().map(|c| c.max_d).fold(0.0, f64::max);
    let tail_max = cells.iter().map(|c| c.tail_max).fold(0.0, f64::max);
    let stable = cfg.epsilons.iter().map(|&e| failures == 0 && max_d <= e).collect();
    let attracted = cfg.epsilons.iter().map(|&e| failures == 0 && tail_max <= e).collect();
    let mut ok = failures == 0;
    let mut lam = 0.0f64;
    let mut mu = f64::INFINITY;
    let mut any = false;
    for c in cells {
        match c.fit {
            FitOutcome::Fit(f) => {
                any = true;
                ok &= f.residual <= cfg.fit_residual_max && f.decades >= cfg.min_decades;
                lam = lam.max(f.lambda);
                mu = mu.min(f.mu);
            }
            FitOutcome::Converged => {}
            FitOutcome::Insufficient => ok = false,
        }
    }
    let envelope = any.then_some(Envelope { lambda: lam, mu });
    let lues = ok
        && envelope.is_some_and(|e| {
            e.mu > 0.0
                && cells.iter().all(|c| {
                    dominated(&c.times, &c.distances, c.t0, c.d0, ENVELOPE_LAMBDA_SLACK * e.lambda, ENVELOPE_MU_SLACK * e.mu)
                })
        });
    JVerdict { j, stable, attracted, failures, max_d, tail_max, envelope, lues }
}

fn run_probe<E: Executor>(family: &dyn SystemFamily, cfg: &StabilityProbeConfig, exec: &E) -> Result<StabilityReport, ProbeError> {
    cfg.validate()?;
    let mut js = cfg.js.clone();
    js.sort_by(f64::total_cmp);
    js.dedup();
    let (nt, nx) = (cfg.t0s.len(), cfg.x0s.len());
    let per_j = nt * nx;
    let cells: Vec<Result<ProbeCell, ProbeError>> = exec.map(js.len() * per_j, |k| {
        let (ji, rest) = (k / per_j.max(1), k % per_j.max(1));
        run_cell(family, cfg, js[ji], cfg.t0s[rest / nx], rest % nx)
    });
    let cells: Vec<ProbeCell> = cells.into_iter().collect::<Result<_, _>>()?;
    let verdicts: Vec<JVerdict> = js
        .iter()
        .map(|&j| {
            let mine: Vec<&ProbeCell> = cells.iter().filter(|c| c.j == j).collect();
            verdict(cfg, j, &mine)
        })
        .collect();
    let stability_j0 = (0..cfg.epsilons.len()).map(|e| threshold(&verdicts, |v| v.stable[e])).collect();
    let attraction_j0 = (0..cfg.epsilons.len()).map(|e| threshold(&verdicts, |v| v.attracted[e])).collect();
    let lues_j0 = threshold(&verdicts, |v| v.lues);
    Ok(StabilityReport { epsilons: cfg.epsilons.clone(), verdicts, cells, stability_j0, attraction_j0, lues_j0 })
}

/// Stability and attraction verdicts per `j` and `ε`, with thresholds `j_0(ε)`.
pub fn probe_pluas<E: Executor>(family: &dyn SystemFamily, cfg: &StabilityProbeConfig, exec: &E) -> Result<StabilityReport, ProbeError> {
    run_probe(family, cfg, exec)
}

/// Exponential envelope verdicts per `j`; `lues_j0` is the first listed `j`
/// from which a single positive envelope covers every cell.
pub fn probe_lues<E: Executor>(family: &dyn SystemFamily, cfg: &StabilityProbeConfig, exec: &E) -> Result<StabilityReport, ProbeError> {
    run_probe(family, cfg, exec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_parameters() {
        let t: Vec<f64> = (0..50).map(|k| 0.1 * k as f64).collect();
        let d: Vec<f64> = t.iter().map(|&s| 2.0 * math::exp(-3.0 * s)).collect();
        let FitOutcome::Fit(f) = fit_exponential(&t, &d, 0.0, 1.0) else { panic!() };
        assert!((f.lambda - 2.0).abs() < 1e-12 && (f.mu - 3.0).abs() < 1e-12);
        assert!((f.intercept - 2.0).abs() < 1e-12 && f.residual < 1e-12);
    }

    #[test]
    fn floor_and_degenerate_inputs() {
        assert_eq!(fit_exponential(&[0.0, 1.0], &[1e-12, 0.0], 0.0, 1.0), FitOutcome::Converged);
        assert_eq!(fit_exponential(&[0.0, 1.0], &[1.0, 1e-12], 0.0, 1.0), FitOutcome::Insufficient);
    }
}

use alloc::boxed::Box;
use alloc::vec::Vec;

use super::distance::{trajectory_distance, DistanceSpec};
use super::integrate::{integrate, Dynamics, StepPolicy, Trajectory};
use super::SimError;
use crate::math;

/// Weights at or below this count as zero; a zero weight gives ratio 0
/// when the sup-distance is also at or below it, else a violation.
pub const ZERO_WEIGHT_FLOOR: f64 = 1e-9;

/// A sequence of systems `Σ^j` together with the limit `Σ^∞`.
pub trait SystemFamily: Sync {
    fn dim(&self) -> usize;
    fn system(&self, j: f64) -> Result<Box<dyn Dynamics + '_>, SimError>;
    fn limit(&self) -> Result<Box<dyn Dynamics + '_>, SimError>;
}

/// Runs independent cells; results come back in index order.
pub trait Executor {
    fn map<R: Send, F: Fn(usize) -> R + Sync>(&self, n: usize, f: F) -> Vec<R>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<R: Send, F: Fn(usize) -> R + Sync>(&self, n: usize, f: F) -> Vec<R> {
        (0..n).map(f).collect()
    }
}

#[derive(Clone, Debug)]
pub struct ConvergenceConfig {
    pub js: Vec<f64>,
    pub t0s: Vec<f64>,
    pub x0s: Vec<Vec<f64>>,
    pub horizon: f64,
    pub policy: StepPolicy,
    /// Bound on `‖x‖` that limit trajectories must respect.
    pub limit_box: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceCell {
    pub j: f64,
    pub t0: f64,
    pub x0: Vec<f64>,
    pub sup_d: f64,
    pub b: f64,
    /// `sup_d / b`, or `None` if undefined.
    pub ratio: Option<f64>,
    pub complete: bool,
    /// Zero weight with a distance above the floor.
    pub violation: bool,
    pub limit_in_box: bool,
}

impl ConvergenceCell {
    fn new(j: f64, t0: f64, x0: Vec<f64>, sup_d: Option<f64>, b: f64, limit_in_box: bool) -> Self {
        let (ratio, violation, sup) = match sup_d {
            None => (None, false, f64::INFINITY),
            Some(d) if b > ZERO_WEIGHT_FLOOR => (Some(d / b), false, d),
            Some(d) if d <= ZERO_WEIGHT_FLOOR => (Some(0.0), false, d),
            Some(d) => (None, true, d),
        };
        ConvergenceCell { j, t0, x0, sup_d: sup, b, ratio, complete: sup_d.is_some(), violation, limit_in_box }
    }
}

/// Cells ordered by `(t0, x0, j)` with `j` ascending.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ConvergenceReport {
    pub js: Vec<f64>,
    pub cells: Vec<ConvergenceCell>,
}

impl ConvergenceReport {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cells sharing `(t0, x0)`, each series ordered by `j`.
    pub fn series(&self) -> impl Iterator<Item = &[ConvergenceCell]> {
        let n = self.js.len().max(1);
        self.cells.chunks(n)
    }

    fn ratio_key(c: &ConvergenceCell) -> f64 {
        c.ratio.unwrap_or(f64::INFINITY)
    }

    /// Ratios non-increasing in `j` for every `(t0, x0)`.
    pub fn monotone(&self) -> bool {
        self.series().all(|s| s.windows(2).all(|w| Self::ratio_key(&w[1]) <= Self::ratio_key(&w[0])))
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.series().all(|s| s.windows(2).all(|w| Self::ratio_key(&w[1]) < Self::ratio_key(&w[0])))
    }

    pub fn violations(&self) -> usize {
        self.cells.iter().filter(|c| c.violation).count()
    }

    pub fn limits_in_box(&self) -> bool {
        self.cells.iter().all(|c| c.limit_in_box)
    }

    /// Largest ratio over the cells with the given `j`.
    pub fn max_ratio(&self, j: f64) -> Option<f64> {
        self.cells.iter().filter(|c| c.j == j).map(Self::ratio_key).reduce(f64::max)
    }
}

/// Integrates `Σ^∞` once per `(t0, x0)` and `Σ^j` per cell, and records
/// `sup d(Φ^j, Φ^∞) / b(x0)`.
pub fn convergence_sweep<E: Executor>(
    family: &dyn SystemFamily,
    spec: &DistanceSpec,
    cfg: &ConvergenceConfig,
    exec: &E,
) -> Result<ConvergenceReport, SimError> {
    let mut js = cfg.js.clone();
    js.sort_by(f64::total_cmp);
    if js.is_empty() || cfg.t0s.is_empty() || cfg.x0s.is_empty() {
        return Ok(ConvergenceReport { js, cells: Vec::new() });
    }
    let (nt, nx, nj) = (cfg.t0s.len(), cfg.x0s.len(), js.len());
    let limits: Vec<Result<Trajectory, SimError>> = exec.map(nt * nx, |k| {
        let sys = family.limit()?;
        integrate(sys.as_ref(), cfg.t0s[k / nx], &cfg.x0s[k % nx], cfg.horizon, &cfg.policy)
    });
    let limits: Vec<Trajectory> = limits.into_iter().collect::<Result<_, _>>()?;
    let cells: Vec<Result<ConvergenceCell, SimError>> = exec.map(nt * nx * nj, |k| {
        let (pair, ji) = (k / nj, k % nj);
        let (t0, x0) = (cfg.t0s[pair / nx], &cfg.x0s[pair % nx]);
        let limit = &limits[pair];
        let in_box = cfg.limit_box.map_or(true, |r| limit.states().all(|x| math::norm(x) <= r));
        let sys = family.system(js[ji])?;
        let tr = integrate(sys.as_ref(), t0, x0, cfg.horizon, &cfg.policy)?;
        let sup = if tr.completed() && limit.completed() {
            Some(trajectory_distance(&tr, limit, spec, cfg.horizon)?)
        } else {
            None
        };
        Ok(ConvergenceCell::new(js[ji], t0, x0.clone(), sup, spec.weight.eval(x0), in_box))
    });
    Ok(ConvergenceReport { js, cells: cells.into_iter().collect::<Result<_, _>>()? })
}

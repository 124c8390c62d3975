use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use super::integrate::Trajectory;
use super::SimError;
use crate::math;

pub type StateFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Map `π` applied before the Euclidean distance.
#[derive(Clone, Debug, PartialEq)]
pub enum Projection {
    Identity,
    /// Keeps `(x_ν, y_ν)` of each `(x_ν, y_ν, θ_ν)` block.
    Positions,
    Coordinates(Vec<usize>),
}

impl Projection {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Projection::Identity => x.to_vec(),
            Projection::Positions => x.chunks(3).flat_map(|b| b.iter().take(2).copied()).collect(),
            Projection::Coordinates(ks) => ks.iter().map(|&k| x[k]).collect(),
        }
    }
}

/// Weight `b(x_0)` of the approximation property.
#[derive(Clone)]
pub enum Weight {
    One,
    SqrtPsi(StateFn),
    DistToE(StateFn),
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weight::One => "One",
            Weight::SqrtPsi(_) => "SqrtPsi",
            Weight::DistToE(_) => "DistToE",
        })
    }
}

impl Weight {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Weight::One => 1.0,
            Weight::SqrtPsi(psi) => math::sqrt(psi(x).max(0.0)),
            Weight::DistToE(d) => d(x),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Weight::One => "one",
            Weight::SqrtPsi(_) => "sqrt-psi",
            Weight::DistToE(_) => "dist-to-E",
        }
    }
}

/// `d(x, x') = ‖π(x') − π(x)‖` with weight `b`.
#[derive(Clone, Debug)]
pub struct DistanceSpec {
    pub projection: Projection,
    pub weight: Weight,
}

impl DistanceSpec {
    pub fn identity() -> Self {
        DistanceSpec { projection: Projection::Identity, weight: Weight::One }
    }
    pub fn with_weight(mut self, weight: Weight) -> Self {
        self.weight = weight;
        self
    }
    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        math::dist(&self.projection.apply(x), &self.projection.apply(y))
    }
}

/// `sup_{t ∈ [t0, t0+T]} d(a(t), b(t))` over the union of both grids.
pub fn trajectory_distance(a: &Trajectory, b: &Trajectory, spec: &DistanceSpec, horizon: f64) -> Result<f64, SimError> {
    if !(horizon > 0.0) {
        return Err(SimError::Horizon(horizon));
    }
    if a.dim() != b.dim() {
        return Err(SimError::Dimension(a.dim(), b.dim()));
    }
    let t0 = a.t0();
    if (b.t0() - t0).abs() > 1e-12 * (1.0 + t0.abs()) {
        return Err(SimError::StartMismatch);
    }
    let end = t0 + horizon;
    let slack = 1e-9 * (1.0 + end.abs());
    for tr in [a, b] {
        if tr.end_time() < end - slack {
            return Err(SimError::Incomplete);
        }
    }
    let mut times: Vec<f64> = a.times().iter().chain(b.times()).copied().filter(|&t| t <= end + slack).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut sup = 0.0f64;
    for t in times {
        let t = t.min(a.end_time()).min(b.end_time());
        let (Some(xa), Some(xb)) = (a.at(t), b.at(t)) else {
            return Err(SimError::Incomplete);
        };
        sup = sup.max(spec.distance(&xa, &xb));
    }
    Ok(sup)
}

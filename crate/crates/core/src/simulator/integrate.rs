use alloc::vec::Vec;
use core::fmt;

use super::SimError;
use crate::input_signals::OrdinaryInput;
use crate::math;
use crate::vector_fields::{ControlAffineSystem, FieldError, ScalarField, Shape, VectorField};

/// Right-hand side `ẋ = F(t, x)`.
pub trait Dynamics: Send + Sync {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]);
    /// Left limit in `t`, used for the last stage of each step.
    fn rhs_left(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        self.rhs(t, x, dx)
    }
    /// Fastest angular frequency of the time dependence, 0 if none.
    fn fastest_angular_frequency(&self) -> f64 {
        0.0
    }
}

/// Closure-backed dynamics.
pub struct FnDynamics<F> {
    dim: usize,
    omega: f64,
    f: F,
}

impl<F> FnDynamics<F>
where
    F: Fn(f64, &[f64], &mut [f64]) + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnDynamics { dim, omega: 0.0, f }
    }
    pub fn with_frequency(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }
}

impl<F> fmt::Debug for FnDynamics<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnDynamics(dim={}, omega={})", self.dim, self.omega)
    }
}

impl<F> Dynamics for FnDynamics<F>
where
    F: Fn(f64, &[f64], &mut [f64]) + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        (self.f)(t, x, dx)
    }
    fn fastest_angular_frequency(&self) -> f64 {
        self.omega
    }
}

/// `ẋ = f_0(t, x) + Σ u_i(t) f_i(t, x)`; with output feedback
/// `f_i = h_i(ψ) e_i` the output is evaluated once per call.
#[derive(Clone, Debug)]
pub struct DrivenSystem {
    drift: VectorField,
    fields: Vec<VectorField>,
    feedback: Option<(ScalarField, Vec<Shape>)>,
    u: OrdinaryInput,
}

impl DrivenSystem {
    pub fn new(drift: VectorField, fields: Vec<VectorField>, u: OrdinaryInput) -> Result<Self, SimError> {
        if fields.len() != u.m() {
            return Err(SimError::Dimension(fields.len(), u.m()));
        }
        for f in &fields {
            if f.dim() != drift.dim() {
                return Err(SimError::Dimension(drift.dim(), f.dim()));
            }
        }
        Ok(DrivenSystem { drift, fields, feedback: None, u })
    }

    /// `Σ^j` for a control-affine system under `u`, using its feedback
    /// shapes when present.
    pub fn closed_loop(sys: &ControlAffineSystem, u: OrdinaryInput) -> Result<Self, SimError> {
        let mut d = DrivenSystem::new(sys.drift().clone(), sys.controls().to_vec(), u)?;
        if let Some(shapes) = sys.shapes() {
            let psi = sys.output().ok_or(FieldError::MissingOutput)?;
            d.feedback = Some((psi.clone(), shapes.to_vec()));
        }
        Ok(d)
    }

    pub fn input(&self) -> &OrdinaryInput {
        &self.u
    }
}

impl DrivenSystem {
    fn rhs_side(&self, t: f64, x: &[f64], dx: &mut [f64], left: bool) {
        dx.copy_from_slice(&self.drift.eval(t, x));
        let y = self.feedback.as_ref().map(|(psi, _)| psi.eval(t, x));
        for (i, (f, s)) in self.fields.iter().zip(self.u.channels()).enumerate() {
            let mut c = if left { s.eval_left(t) } else { s.eval(t) };
            if let (Some(y), Some((_, shapes))) = (y, &self.feedback) {
                c *= shapes[i].value(y);
            }
            if c == 0.0 {
                continue;
            }
            for (d, v) in dx.iter_mut().zip(f.eval(t, x)) {
                *d += c * v;
            }
        }
    }
}

impl Dynamics for DrivenSystem {
    fn dim(&self) -> usize {
        self.drift.dim()
    }
    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        self.rhs_side(t, x, dx, false)
    }
    fn rhs_left(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        self.rhs_side(t, x, dx, true)
    }
    fn fastest_angular_frequency(&self) -> f64 {
        self.u.max_angular_frequency()
    }
}

/// `h = min(h_max, 2π / (samples_per_period · ω_max))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepPolicy {
    pub h_max: f64,
    pub samples_per_period: f64,
    /// The run stops once `‖x‖` exceeds this bound.
    pub blowup_bound: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy { h_max: 1e-2, samples_per_period: 64.0, blowup_bound: 1e6 }
    }
}

impl StepPolicy {
    pub fn step_for(&self, omega: f64) -> f64 {
        if omega > 0.0 {
            self.h_max.min(math::TAU / (self.samples_per_period * omega))
        } else {
            self.h_max
        }
    }

    pub fn halved(&self) -> Self {
        StepPolicy { h_max: 0.5 * self.h_max, samples_per_period: 2.0 * self.samples_per_period, ..*self }
    }
}

/// Why a run stopped early.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Failure {
    BlowUp { t: f64 },
    NonFinite { t: f64 },
}

/// States on a uniform grid, stored row by row.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    dim: usize,
    t0: f64,
    h: f64,
    times: Vec<f64>,
    states: Vec<f64>,
    failure: Option<Failure>,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn t0(&self) -> f64 {
        self.t0
    }
    pub fn step(&self) -> f64 {
        self.h
    }
    pub fn len(&self) -> usize {
        self.times.len()
    }
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn time(&self, k: usize) -> f64 {
        self.times[k]
    }
    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.dim..(k + 1) * self.dim]
    }
    pub fn states(&self) -> impl Iterator<Item = &[f64]> {
        self.states.chunks(self.dim)
    }
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }
    pub fn failure(&self) -> Option<Failure> {
        self.failure
    }
    pub fn end_time(&self) -> f64 {
        *self.times.last().unwrap_or(&self.t0)
    }
    pub fn final_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    /// Cubic Lagrange interpolation through the four nearest grid points
    /// (linear on two-point trajectories), `None` outside the stored window.
    pub fn at(&self, t: f64) -> Option<Vec<f64>> {
        let last = self.len().checked_sub(1)?;
        if t < self.t0 || t > self.end_time() {
            return None;
        }
        let k = if self.h > 0.0 { (((t - self.t0) / self.h) as usize).min(last) } else { 0 };
        let k = if k > 0 && self.times[k] > t { k - 1 } else { k };
        if k == last || self.times[k] == t {
            return Some(self.state(k).to_vec());
        }
        let (lo, hi) = if last < 3 { (k, k + 1) } else { let lo = k.saturating_sub(1).min(last - 3); (lo, lo + 3) };
        let mut out = alloc::vec![0.0; self.dim()];
        for a in lo..=hi {
            let mut w = 1.0;
            for b in lo..=hi {
                if b != a {
                    w *= (t - self.times[b]) / (self.times[a] - self.times[b]);
                }
            }
            for (o, x) in out.iter_mut().zip(self.state(a)) {
                *o += w * x;
            }
        }
        Some(out)
    }
}

/// Classical fourth-order Runge–Kutta on the uniform grid `t0 + kh` with
/// `h ≤ policy.step_for(ω_max)` dividing the horizon.
pub fn integrate(
    sys: &dyn Dynamics,
    t0: f64,
    x0: &[f64],
    horizon: f64,
    policy: &StepPolicy,
) -> Result<Trajectory, SimError> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(SimError::Horizon(horizon));
    }
    let n = sys.dim();
    if x0.len() != n {
        return Err(SimError::Dimension(n, x0.len()));
    }
    let h_target = policy.step_for(sys.fastest_angular_frequency());
    let steps = math::ceil(horizon / h_target - 1e-9).max(1.0) as usize;
    let h = horizon / steps as f64;

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity((steps + 1) * n);
    times.push(t0);
    states.extend_from_slice(x0);
    let mut failure = None;
    let mut x = x0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (alloc::vec![0.0; n], alloc::vec![0.0; n], alloc::vec![0.0; n], alloc::vec![0.0; n]);
    let mut tmp = alloc::vec![0.0; n];
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        sys.rhs(t, &x, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        sys.rhs(t + 0.5 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        sys.rhs(t + 0.5 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + h * k3[i];
        }
        sys.rhs_left(t + h, &tmp, &mut k4);
        for i in 0..n {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t_next = t0 + (k + 1) as f64 * h;
        if x.iter().any(|v| !v.is_finite()) {
            failure = Some(Failure::NonFinite { t: t_next });
            break;
        }
        if math::norm(&x) > policy.blowup_bound {
            failure = Some(Failure::BlowUp { t: t_next });
            break;
        }
        times.push(t_next);
        states.extend_from_slice(&x);
    }
    Ok(Trajectory { dim: n, t0, h, times, states, failure })
}

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::free_algebra::{check_algebraic_identity, IdentityCheck, MultiIndex};
use crate::math;

use super::{Signal, SignalError};

/// Channels `u_1..u_m` of an ordinary input.
#[derive(Clone, Debug)]
pub struct OrdinaryInput {
    channels: Vec<Signal>,
}

impl OrdinaryInput {
    pub fn new(channels: Vec<Signal>) -> Self {
        OrdinaryInput { channels }
    }
    pub fn m(&self) -> usize {
        self.channels.len()
    }
    pub fn channel(&self, i: usize) -> &Signal {
        &self.channels[i - 1]
    }
    pub fn channels(&self) -> &[Signal] {
        &self.channels
    }
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.channels) {
            *o = c.eval(t);
        }
    }
    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.channels.iter().map(|c| c.eval(t)).collect()
    }
    pub fn max_angular_frequency(&self) -> f64 {
        self.channels.iter().map(Signal::max_angular_frequency).fold(0.0, f64::max)
    }
    /// The same input viewed as a polynomial input of order one.
    pub fn as_polynomial(&self) -> PolynomialInput {
        let m = self.m().max(1);
        let coeffs = self
            .channels
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.is_zero())
            .filter_map(|(k, s)| MultiIndex::new(m, [k + 1]).ok().map(|i| (i, s.clone())))
            .collect();
        PolynomialInput { m, r: 1, coeffs }
    }
    pub fn shifted(&self, dt: f64) -> Self {
        OrdinaryInput { channels: self.channels.iter().map(|c| c.shifted(dt)).collect() }
    }
}

/// Coefficients `v_I` of a polynomial input of order at most `r`.
#[derive(Clone, Debug)]
pub struct PolynomialInput {
    m: usize,
    r: usize,
    coeffs: BTreeMap<MultiIndex, Signal>,
}

impl PolynomialInput {
    pub fn new(m: usize, r: usize, coeffs: BTreeMap<MultiIndex, Signal>) -> Result<Self, SignalError> {
        for i in coeffs.keys() {
            if i.alphabet() != m {
                return Err(SignalError::ChannelMismatch(m, i.alphabet()));
            }
            if i.is_empty() || i.len() > r {
                return Err(SignalError::Support(i.clone(), r));
            }
        }
        let coeffs = coeffs.into_iter().filter(|(_, s)| !s.is_zero()).collect();
        Ok(PolynomialInput { m, r, coeffs })
    }
    pub fn zero(m: usize, r: usize) -> Self {
        PolynomialInput { m, r, coeffs: BTreeMap::new() }
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn get(&self, i: &MultiIndex) -> Option<&Signal> {
        self.coeffs.get(i)
    }
    pub fn eval(&self, i: &MultiIndex, t: f64) -> f64 {
        self.coeffs.get(i).map_or(0.0, |s| s.eval(t))
    }
    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Signal)> {
        self.coeffs.iter()
    }
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn values_at(&self, t: f64) -> BTreeMap<MultiIndex, f64> {
        self.coeffs.iter().map(|(i, s)| (i.clone(), s.eval(t))).collect()
    }
    pub fn max_angular_frequency(&self) -> f64 {
        self.coeffs.values().map(Signal::max_angular_frequency).fold(0.0, f64::max)
    }
    pub fn shifted(&self, dt: f64) -> Self {
        PolynomialInput { m: self.m, r: self.r, coeffs: self.coeffs.iter().map(|(i, s)| (i.clone(), s.shifted(dt))).collect() }
    }

    /// Pointwise identity check at the given times; returns the worst case.
    pub fn lie_check(&self, times: &[f64]) -> Result<IdentityCheck<f64>, SignalError> {
        let mut worst: Option<IdentityCheck<f64>> = None;
        for &t in times {
            let c = check_algebraic_identity(&self.values_at(t), self.m, self.r)?;
            let replace = match &worst {
                None => true,
                Some(w) => (!c.holds && w.holds) || (c.holds == w.holds && c.residual > w.residual),
            };
            if replace {
                worst = Some(c);
            }
        }
        worst.ok_or(SignalError::EmptyGrid)
    }

    /// Default sample times for `lie_check`: one common period if there is
    /// one, else `[0, 10]`, 33 points.
    pub fn lie_check_times(&self) -> Vec<f64> {
        let w = self.max_angular_frequency();
        let span = if w > 0.0 { math::TAU / w * 4.0 } else { 10.0 };
        (0..33).map(|k| span * (k as f64) / 32.0 + 0.123 * span / 32.0).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Integrated,
}

/// Values on a shared grid, linearly interpolated in between.
#[derive(Clone, Debug)]
pub struct Sampled {
    pub grid: Arc<Vec<f64>>,
    pub values: Vec<f64>,
}

impl Sampled {
    pub fn eval(&self, t: f64) -> f64 {
        let g = &self.grid;
        let n = g.len();
        if n == 1 || t <= g[0] {
            return self.values[0];
        }
        if t >= g[n - 1] {
            return self.values[n - 1];
        }
        let k = g.partition_point(|&s| s <= t).saturating_sub(1).min(n - 2);
        let w = (t - g[k]) / (g[k + 1] - g[k]);
        self.values[k] * (1.0 - w) + self.values[k + 1] * w
    }
    pub fn max_abs(&self, window: Option<(f64, f64)>) -> f64 {
        self.grid
            .iter()
            .zip(&self.values)
            .filter(|(t, _)| window.map_or(true, |(a, b)| **t >= a && **t <= b))
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub enum GdEntry {
    Closed(Signal),
    Sampled(Sampled),
}

impl GdEntry {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            GdEntry::Closed(s) => s.eval(t),
            GdEntry::Sampled(s) => s.eval(t),
        }
    }
}

/// Generalized difference `W̃_I`, `0 < |I| ≤ r`.
#[derive(Clone, Debug)]
pub struct GeneralizedDifference {
    m: usize,
    r: usize,
    provenance: Provenance,
    entries: BTreeMap<MultiIndex, GdEntry>,
}

impl GeneralizedDifference {
    pub fn closed_form(m: usize, r: usize, entries: BTreeMap<MultiIndex, Signal>) -> Self {
        GeneralizedDifference {
            m,
            r,
            provenance: Provenance::ClosedForm,
            entries: entries.into_iter().map(|(i, s)| (i, GdEntry::Closed(s))).collect(),
        }
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
    pub fn get(&self, i: &MultiIndex) -> Option<&GdEntry> {
        self.entries.get(i)
    }
    pub fn closed(&self, i: &MultiIndex) -> Option<&Signal> {
        match self.entries.get(i) {
            Some(GdEntry::Closed(s)) => Some(s),
            _ => None,
        }
    }
    pub fn eval(&self, i: &MultiIndex, t: f64) -> f64 {
        self.entries.get(i).map_or(0.0, |e| e.eval(t))
    }
    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &GdEntry)> {
        self.entries.iter()
    }
    pub fn values_at(&self, t: f64) -> BTreeMap<MultiIndex, f64> {
        self.entries.iter().map(|(i, e)| (i.clone(), e.eval(t))).collect()
    }
    pub fn shifted(&self, dt: f64) -> Option<Self> {
        let mut entries = BTreeMap::new();
        for (i, e) in &self.entries {
            match e {
                GdEntry::Closed(s) => {
                    entries.insert(i.clone(), GdEntry::Closed(s.shifted(dt)));
                }
                GdEntry::Sampled(_) => return None,
            }
        }
        Some(GeneralizedDifference { m: self.m, r: self.r, provenance: self.provenance, entries })
    }
}

/// Default sub-step density for the generalized-difference recursion.
pub const GD_SAMPLES_PER_PERIOD: f64 = 256.0;

/// Integrates `Ẇ_i = v_i − u_i`, `Ẇ_{iI} = v_{iI} − u_i W_I` with the
/// classical fourth order Runge–Kutta scheme, forwards and backwards from
/// `t0`, and stores the values on `grid`. Missing entries of `p0` start at 0.
pub fn integrate_generalized_difference(
    u: &OrdinaryInput,
    v: &PolynomialInput,
    t0: f64,
    p0: &BTreeMap<MultiIndex, f64>,
    grid: &[f64],
) -> Result<GeneralizedDifference, SignalError> {
    integrate_generalized_difference_with(u, v, t0, p0, grid, GD_SAMPLES_PER_PERIOD)
}

pub fn integrate_generalized_difference_with(
    u: &OrdinaryInput,
    v: &PolynomialInput,
    t0: f64,
    p0: &BTreeMap<MultiIndex, f64>,
    grid: &[f64],
    samples_per_period: f64,
) -> Result<GeneralizedDifference, SignalError> {
    if grid.is_empty() {
        return Err(SignalError::EmptyGrid);
    }
    if u.m() != v.m() {
        return Err(SignalError::ChannelMismatch(u.m(), v.m()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(SignalError::GridNotIncreasing);
    }
    let start = grid
        .iter()
        .position(|&t| (t - t0).abs() <= 1e-12 * (1.0 + t0.abs()))
        .ok_or(SignalError::GridMissingStart(t0))?;
    let m = v.m();
    let r = v.r();
    let words = MultiIndex::all_up_to(m, r);
    for k in p0.keys() {
        if k.alphabet() != m || k.is_empty() || k.len() > r {
            return Err(SignalError::Support(k.clone(), r));
        }
    }
    let pos: BTreeMap<&MultiIndex, usize> = words.iter().enumerate().map(|(k, w)| (w, k)).collect();
    let mut plan = Vec::with_capacity(words.len());
    for w in &words {
        let (i, rest) = w.split_first().ok_or(SignalError::EmptyGrid)?;
        let parent = if rest.is_empty() { None } else { pos.get(&rest).copied() };
        plan.push((i - 1, parent, v.get(w).cloned()));
    }
    let nstate = words.len();
    let mut uval = alloc::vec![0.0; m];
    let rhs = |t: f64, w: &[f64], dw: &mut [f64], uval: &mut [f64]| {
        u.eval_into(t, uval);
        for (k, (i, parent, vs)) in plan.iter().enumerate() {
            let vk = vs.as_ref().map_or(0.0, |s| s.eval(t));
            let carried = parent.map_or(1.0, |p| w[p]);
            dw[k] = vk - uval[*i] * carried;
        }
    };
    let wmax = u.max_angular_frequency().max(v.max_angular_frequency());
    let hmax = if wmax > 0.0 { math::TAU / (wmax * samples_per_period) } else { f64::INFINITY };

    let mut values = alloc::vec![alloc::vec![0.0; grid.len()]; nstate];
    let init: Vec<f64> = words.iter().map(|w| p0.get(w).copied().unwrap_or(0.0)).collect();
    for (k, x) in init.iter().enumerate() {
        values[k][start] = *x;
    }
    let mut k1 = alloc::vec![0.0; nstate];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();
    for dir in [1isize, -1] {
        let mut w = init.clone();
        let mut idx = start as isize;
        loop {
            let next = idx + dir;
            if next < 0 || next as usize >= grid.len() {
                break;
            }
            let (ta, tb) = (grid[idx as usize], grid[next as usize]);
            let n = math::ceil(((tb - ta).abs() / hmax).max(1.0)) as usize;
            let h = (tb - ta) / n as f64;
            for s in 0..n {
                let t = ta + s as f64 * h;
                rhs(t, &w, &mut k1, &mut uval);
                for q in 0..nstate {
                    tmp[q] = w[q] + 0.5 * h * k1[q];
                }
                rhs(t + 0.5 * h, &tmp, &mut k2, &mut uval);
                for q in 0..nstate {
                    tmp[q] = w[q] + 0.5 * h * k2[q];
                }
                rhs(t + 0.5 * h, &tmp, &mut k3, &mut uval);
                for q in 0..nstate {
                    tmp[q] = w[q] + h * k3[q];
                }
                rhs(t + h, &tmp, &mut k4, &mut uval);
                for q in 0..nstate {
                    w[q] += h / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
                }
            }
            for q in 0..nstate {
                values[q][next as usize] = w[q];
            }
            idx = next;
        }
    }
    let grid = Arc::new(grid.to_vec());
    let entries = words
        .into_iter()
        .zip(values)
        .map(|(w, vals)| (w, GdEntry::Sampled(Sampled { grid: grid.clone(), values: vals })))
        .collect();
    Ok(GeneralizedDifference { m, r, provenance: Provenance::Integrated, entries })
}

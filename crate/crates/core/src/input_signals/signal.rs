use alloc::boxed::Box;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::math;

use super::SignalError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wave {
    Cos,
    Sin,
}

/// `saw(t) = 2(t − ⌊t⌋) − 1`, period 1, values in `[−1, 1)`.
/// Arguments within `1e−9` (relative) of an integer count as the jump.
pub fn saw(t: f64) -> f64 {
    if on_jump(t) {
        return -1.0;
    }
    2.0 * (t - math::floor(t)) - 1.0
}

/// Left limit of [`saw`]: `1` at the jumps.
pub fn saw_left(t: f64) -> f64 {
    if on_jump(t) {
        return 1.0;
    }
    saw(t)
}

fn on_jump(t: f64) -> bool {
    (t - math::round(t)).abs() <= 1e-9 * t.abs().max(1.0)
}

/// A user supplied slowly varying coefficient with a stated bound.
#[derive(Clone)]
pub struct Profile {
    pub label: String,
    value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub bound: f64,
    derivative: Option<Arc<Profile>>,
    pub period: Option<f64>,
}

impl Profile {
    pub fn new(
        label: impl Into<String>,
        bound: f64,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Profile { label: label.into(), value: Arc::new(value), bound, derivative: None, period: None }
    }
    pub fn with_derivative(mut self, d: Profile) -> Self {
        self.derivative = Some(Arc::new(d));
        self
    }
    pub fn with_period(mut self, p: f64) -> Self {
        self.period = Some(p);
        self
    }
    pub fn eval(&self, t: f64) -> f64 {
        (self.value)(t)
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Profile")
            .field("label", &self.label)
            .field("bound", &self.bound)
            .field("has_derivative", &self.derivative.is_some())
            .field("period", &self.period)
            .finish()
    }
}

/// Time signal described by a small expression tree.
#[derive(Clone, Debug)]
pub enum Signal {
    Constant(f64),
    /// `amplitude · wave(omega·t + phase)`
    Sinusoid { amplitude: f64, omega: f64, phase: f64, wave: Wave },
    /// `amplitude · saw(frequency·t + phase)`
    Sawtooth { amplitude: f64, frequency: f64, phase: f64 },
    Scaled { factor: f64, inner: Box<Signal> },
    Sum(Vec<Signal>),
    Product(Vec<Signal>),
    Custom(Profile),
}

/// Periodicity of a descriptor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Period {
    /// Constant signals: every shift is a period.
    Any,
    Finite(f64),
    None,
}

/// Smallest common multiple of two periods when their ratio is a rational
/// with denominator at most `10^4` (to relative precision `1e−10`).
pub fn common_period(p: f64, q: f64) -> Option<f64> {
    let r = q / p;
    let (mut h0, mut h1) = (0.0f64, 1.0f64);
    let (mut k0, mut k1) = (1.0f64, 0.0f64);
    let mut x = r;
    for _ in 0..40 {
        let a = math::floor(x);
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > 1e4 {
            return None;
        }
        if (r - h2 / k2).abs() <= 1e-10 * r.abs() {
            return Some(h2 * p);
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = x - a;
        if frac.abs() < 1e-15 {
            return None;
        }
        x = 1.0 / frac;
    }
    None
}

impl Signal {
    pub fn constant(c: f64) -> Self {
        Signal::Constant(c)
    }
    pub fn zero() -> Self {
        Signal::Constant(0.0)
    }
    pub fn cos(amplitude: f64, omega: f64) -> Self {
        Signal::Sinusoid { amplitude, omega, phase: 0.0, wave: Wave::Cos }
    }
    pub fn sin(amplitude: f64, omega: f64) -> Self {
        Signal::Sinusoid { amplitude, omega, phase: 0.0, wave: Wave::Sin }
    }
    pub fn sawtooth(amplitude: f64, frequency: f64, phase: f64) -> Self {
        Signal::Sawtooth { amplitude, frequency, phase }
    }
    pub fn custom(p: Profile) -> Self {
        Signal::Custom(p)
    }

    /// `1 + a sin(ω t)` style helper used for time-varying gains.
    pub fn offset_sin(offset: f64, a: f64, omega: f64) -> Self {
        Signal::sum([Signal::Constant(offset), Signal::sin(a, omega)])
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Signal::Constant(c) => *c == 0.0,
            Signal::Sinusoid { amplitude, .. } | Signal::Sawtooth { amplitude, .. } => *amplitude == 0.0,
            Signal::Scaled { factor, inner } => *factor == 0.0 || inner.is_zero(),
            Signal::Sum(s) => s.iter().all(Signal::is_zero),
            Signal::Product(s) => s.iter().any(Signal::is_zero),
            Signal::Custom(_) => false,
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Signal::Constant(c) => Some(*c),
            Signal::Sinusoid { amplitude, omega, .. } if *amplitude == 0.0 || *omega == 0.0 => Some(self.eval(0.0)),
            Signal::Sawtooth { amplitude, .. } if *amplitude == 0.0 => Some(0.0),
            Signal::Scaled { factor, inner } => inner.as_constant().map(|c| c * factor),
            _ => None,
        }
    }

    /// Scales a signal, folding the factor into leaf amplitudes.
    pub fn scaled(factor: f64, s: Signal) -> Signal {
        if factor == 1.0 {
            return s;
        }
        if factor == 0.0 {
            return Signal::zero();
        }
        match s {
            Signal::Constant(c) => Signal::Constant(c * factor),
            Signal::Sinusoid { amplitude, omega, phase, wave } => {
                Signal::Sinusoid { amplitude: amplitude * factor, omega, phase, wave }
            }
            Signal::Sawtooth { amplitude, frequency, phase } => {
                Signal::Sawtooth { amplitude: amplitude * factor, frequency, phase }
            }
            Signal::Scaled { factor: f, inner } => Signal::scaled(f * factor, *inner),
            Signal::Sum(parts) => Signal::Sum(parts.into_iter().map(|p| Signal::scaled(factor, p)).collect()),
            other => Signal::Scaled { factor, inner: Box::new(other) },
        }
    }

    /// Flattened sum with zero terms dropped and constants merged.
    pub fn sum(parts: impl IntoIterator<Item = Signal>) -> Signal {
        let mut out = Vec::new();
        let mut c = 0.0;
        for p in parts {
            match p {
                Signal::Sum(inner) => {
                    for q in inner {
                        match q.as_constant() {
                            Some(v) => c += v,
                            None => out.push(q),
                        }
                    }
                }
                q => match q.as_constant() {
                    Some(v) => c += v,
                    None => out.push(q),
                },
            }
        }
        out.retain(|s| !s.is_zero());
        if c != 0.0 {
            out.insert(0, Signal::Constant(c));
        }
        match out.len() {
            0 => Signal::zero(),
            1 => out.pop().unwrap_or_else(Signal::zero),
            _ => Signal::Sum(out),
        }
    }

    /// Flattened product with constant factors folded into the amplitude.
    pub fn product(parts: impl IntoIterator<Item = Signal>) -> Signal {
        let mut out = Vec::new();
        let mut c = 1.0;
        for p in parts {
            let items = match p {
                Signal::Product(inner) => inner,
                q => alloc::vec![q],
            };
            for q in items {
                match q {
                    Signal::Scaled { factor, inner } => {
                        c *= factor;
                        out.push(*inner);
                    }
                    q => match q.as_constant() {
                        Some(v) => c *= v,
                        None => out.push(q),
                    },
                }
            }
        }
        if c == 0.0 {
            return Signal::zero();
        }
        match out.len() {
            0 => Signal::Constant(c),
            1 => Signal::scaled(c, out.pop().unwrap_or_else(Signal::zero)),
            _ => Signal::scaled(c, Signal::Product(out)),
        }
    }

    pub fn difference(a: Signal, b: Signal) -> Signal {
        Signal::sum([a, Signal::scaled(-1.0, b)])
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_side(t, false)
    }

    /// Left limit at `t`; differs from [`Signal::eval`] only at sawtooth jumps.
    pub fn eval_left(&self, t: f64) -> f64 {
        self.eval_side(t, true)
    }

    fn eval_side(&self, t: f64, left: bool) -> f64 {
        match self {
            Signal::Constant(c) => *c,
            Signal::Sinusoid { amplitude, omega, phase, wave } => {
                let s = omega * t + phase;
                amplitude * match wave {
                    Wave::Cos => math::cos(s),
                    Wave::Sin => math::sin(s),
                }
            }
            Signal::Sawtooth { amplitude, frequency, phase } => {
                let s = frequency * t + phase;
                amplitude * if left { saw_left(s) } else { saw(s) }
            }
            Signal::Scaled { factor, inner } => factor * inner.eval_side(t, left),
            Signal::Sum(parts) => parts.iter().map(|p| p.eval_side(t, left)).sum(),
            Signal::Product(parts) => parts.iter().map(|p| p.eval_side(t, left)).product(),
            Signal::Custom(p) => p.eval(t),
        }
    }

    /// Symbolic time derivative. `None` when some leaf is not differentiable
    /// (sawtooth) or a custom profile carries no derivative.
    pub fn derivative(&self) -> Option<Signal> {
        Some(match self {
            Signal::Constant(_) => Signal::zero(),
            Signal::Sinusoid { amplitude, omega, phase, wave } => match wave {
                Wave::Cos => Signal::Sinusoid { amplitude: -amplitude * omega, omega: *omega, phase: *phase, wave: Wave::Sin },
                Wave::Sin => Signal::Sinusoid { amplitude: amplitude * omega, omega: *omega, phase: *phase, wave: Wave::Cos },
            },
            Signal::Sawtooth { .. } => return None,
            Signal::Scaled { factor, inner } => Signal::scaled(*factor, inner.derivative()?),
            Signal::Sum(parts) => {
                let mut d = Vec::with_capacity(parts.len());
                for p in parts {
                    d.push(p.derivative()?);
                }
                Signal::sum(d)
            }
            Signal::Product(parts) => {
                let mut terms = Vec::with_capacity(parts.len());
                for k in 0..parts.len() {
                    let dk = parts[k].derivative()?;
                    if dk.is_zero() {
                        continue;
                    }
                    let factors = parts
                        .iter()
                        .enumerate()
                        .map(|(i, p)| if i == k { dk.clone() } else { p.clone() });
                    terms.push(Signal::product(factors));
                }
                Signal::sum(terms)
            }
            Signal::Custom(p) => Signal::Custom((**p.derivative.as_ref()?).clone()),
        })
    }

    /// Interval enclosing the range of the signal over ℝ.
    pub fn range(&self) -> (f64, f64) {
        match self {
            Signal::Constant(c) => (*c, *c),
            Signal::Sinusoid { amplitude, omega, .. } => {
                if *omega == 0.0 {
                    let v = self.eval(0.0);
                    (v, v)
                } else {
                    (-amplitude.abs(), amplitude.abs())
                }
            }
            Signal::Sawtooth { amplitude, .. } => (-amplitude.abs(), amplitude.abs()),
            Signal::Scaled { factor, inner } => {
                let (lo, hi) = inner.range();
                if *factor >= 0.0 {
                    (factor * lo, factor * hi)
                } else {
                    (factor * hi, factor * lo)
                }
            }
            Signal::Sum(parts) => parts.iter().fold((0.0, 0.0), |(a, b), p| {
                let (lo, hi) = p.range();
                (a + lo, b + hi)
            }),
            Signal::Product(parts) => parts.iter().fold((1.0, 1.0), |(a, b), p| {
                let (lo, hi) = p.range();
                let c = [a * lo, a * hi, b * lo, b * hi];
                (c.iter().copied().fold(f64::INFINITY, f64::min), c.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            }),
            Signal::Custom(p) => (-p.bound, p.bound),
        }
    }

    /// Upper bound on `sup_t |s(t)|` from interval analysis of the tree.
    pub fn sup_bound(&self) -> f64 {
        let (lo, hi) = self.range();
        lo.abs().max(hi.abs())
    }

    /// Whether `sup_bound` is attained, i.e. the bound is the exact sup-norm.
    pub fn sup_is_exact(&self) -> bool {
        match self {
            Signal::Constant(_) | Signal::Sinusoid { .. } | Signal::Sawtooth { .. } => true,
            Signal::Scaled { inner, .. } => inner.sup_is_exact(),
            Signal::Product(parts) => {
                // one oscillating carrier times factors that are constant in sign
                // and attain their extreme value at every carrier phase
                let carriers = parts.iter().filter(|p| !matches!(p, Signal::Constant(_))).count();
                carriers <= 1 && parts.iter().all(|p| p.sup_is_exact())
            }
            Signal::Sum(parts) => parts.len() <= 1 && parts.iter().all(|p| p.sup_is_exact()),
            Signal::Custom(_) => false,
        }
    }

    pub fn period(&self) -> Period {
        match self {
            Signal::Constant(_) => Period::Any,
            Signal::Sinusoid { amplitude, omega, .. } => {
                if *omega == 0.0 || *amplitude == 0.0 {
                    Period::Any
                } else {
                    Period::Finite(math::TAU / omega.abs())
                }
            }
            Signal::Sawtooth { amplitude, frequency, .. } => {
                if *frequency == 0.0 || *amplitude == 0.0 {
                    Period::Any
                } else {
                    Period::Finite(1.0 / frequency.abs())
                }
            }
            Signal::Scaled { inner, .. } => inner.period(),
            Signal::Sum(parts) | Signal::Product(parts) => {
                let mut acc = Period::Any;
                for p in parts {
                    acc = match (acc, p.period()) {
                        (Period::None, _) | (_, Period::None) => return Period::None,
                        (Period::Any, q) => q,
                        (a, Period::Any) => a,
                        (Period::Finite(a), Period::Finite(b)) => match common_period(a, b) {
                            Some(c) => Period::Finite(c),
                            None => return Period::None,
                        },
                    };
                }
                acc
            }
            Signal::Custom(p) => match p.period {
                Some(q) => Period::Finite(q),
                None => Period::None,
            },
        }
    }

    /// Largest angular frequency present in the descriptor, as far as the
    /// tree knows. Products add frequencies.
    pub fn max_angular_frequency(&self) -> f64 {
        match self {
            Signal::Constant(_) => 0.0,
            Signal::Sinusoid { omega, .. } => omega.abs(),
            Signal::Sawtooth { frequency, .. } => math::TAU * frequency.abs(),
            Signal::Scaled { inner, .. } => inner.max_angular_frequency(),
            Signal::Sum(parts) => parts.iter().map(Signal::max_angular_frequency).fold(0.0, f64::max),
            Signal::Product(parts) => parts.iter().map(Signal::max_angular_frequency).sum(),
            Signal::Custom(p) => p.period.map(|q| math::TAU / q).unwrap_or(0.0),
        }
    }

    /// Time shift `t ↦ s(t + dt)`.
    pub fn shifted(&self, dt: f64) -> Signal {
        match self {
            Signal::Constant(c) => Signal::Constant(*c),
            Signal::Sinusoid { amplitude, omega, phase, wave } => {
                Signal::Sinusoid { amplitude: *amplitude, omega: *omega, phase: phase + omega * dt, wave: *wave }
            }
            Signal::Sawtooth { amplitude, frequency, phase } => {
                Signal::Sawtooth { amplitude: *amplitude, frequency: *frequency, phase: phase + frequency * dt }
            }
            Signal::Scaled { factor, inner } => Signal::Scaled { factor: *factor, inner: Box::new(inner.shifted(dt)) },
            Signal::Sum(parts) => Signal::Sum(parts.iter().map(|p| p.shifted(dt)).collect()),
            Signal::Product(parts) => Signal::Product(parts.iter().map(|p| p.shifted(dt)).collect()),
            Signal::Custom(p) => {
                let inner = p.clone();
                let mut q = Profile::new(p.label.clone(), p.bound, move |t| inner.eval(t + dt));
                q.period = p.period;
                if let Some(d) = &p.derivative {
                    let d = (**d).clone();
                    let db = d.bound;
                    q = q.with_derivative(Profile::new(d.label.clone(), db, move |t| d.eval(t + dt)));
                }
                Signal::Custom(q)
            }
        }
    }
}

/// How a sup-norm value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupMethod {
    /// Read off the descriptor; exact over ℝ.
    Exact,
    /// Dense sampling of one common period; equals the sup over ℝ up to
    /// sampling error.
    Period,
    /// Dense sampling of `[0, window]` only.
    Window,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupNorm {
    pub value: f64,
    /// Descriptor upper bound valid on all of ℝ.
    pub bound: f64,
    pub method: SupMethod,
}

pub const SAMPLES_PER_PERIOD: f64 = 64.0;
const MAX_SAMPLES: f64 = 8.0e6;

fn sample_max(s: &Signal, t_start: f64, length: f64) -> f64 {
    let w = s.max_angular_frequency();
    let per = if w > 0.0 { length * w / math::TAU } else { 1.0 };
    let n = math::ceil((per * SAMPLES_PER_PERIOD).max(SAMPLES_PER_PERIOD)).min(MAX_SAMPLES) as usize;
    let h = length / n as f64;
    let mut best = 0.0f64;
    for k in 0..=n {
        best = best.max(s.eval(t_start + k as f64 * h).abs());
    }
    best
}

/// Sup-norm of a signal: exact from the descriptor where possible, else the
/// max over one common period, else the max over `[0, window]`.
pub fn sup_norm(s: &Signal, window: f64) -> Result<SupNorm, SignalError> {
    let bound = s.sup_bound();
    if s.sup_is_exact() {
        return Ok(SupNorm { value: bound, bound, method: SupMethod::Exact });
    }
    match s.period() {
        Period::Any => {
            let v = s.eval(0.0).abs();
            Ok(SupNorm { value: v, bound, method: SupMethod::Exact })
        }
        Period::Finite(p) if p.is_finite() => {
            let v = sample_max(s, 0.0, p);
            Ok(SupNorm { value: v.min(bound), bound, method: SupMethod::Period })
        }
        _ => {
            if !(window > 0.0) {
                return Err(SignalError::Window(window));
            }
            let v = sample_max(s, 0.0, window);
            Ok(SupNorm { value: v.min(bound), bound, method: SupMethod::Window })
        }
    }
}

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use super::jet::{Jet, Real};

/// A vector field written once, generically over the number type, so that
/// the same code gives fast float evaluation and exact nested derivatives.
pub trait FieldFn: Send + Sync {
    fn dim(&self) -> usize;
    fn eval<R: Real>(&self, t: &R, x: &[R]) -> Vec<R>;
}

/// Scalar counterpart of `FieldFn`.
pub trait ScalarFn: Send + Sync {
    fn dim(&self) -> usize;
    fn eval<R: Real>(&self, t: &R, x: &[R]) -> R;
}

/// Object-safe view of an analytic vector field.
pub trait JetField: Send + Sync {
    fn dim(&self) -> usize;
    fn eval_f64(&self, t: f64, x: &[f64]) -> Vec<f64>;
    fn eval_jet(&self, t: &Jet, x: &[Jet]) -> Vec<Jet>;
}

/// Object-safe view of an analytic scalar field.
pub trait JetScalar: Send + Sync {
    fn dim(&self) -> usize;
    fn eval_f64(&self, t: f64, x: &[f64]) -> f64;
    fn eval_jet(&self, t: &Jet, x: &[Jet]) -> Jet;
}

/// Adapter from `FieldFn`/`ScalarFn` to the object-safe traits.
#[derive(Clone, Debug)]
pub struct Analytic<F>(pub F);

impl<F: FieldFn> JetField for Analytic<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval_f64(&self, t: f64, x: &[f64]) -> Vec<f64> {
        self.0.eval(&t, x)
    }
    fn eval_jet(&self, t: &Jet, x: &[Jet]) -> Vec<Jet> {
        self.0.eval(t, x)
    }
}

impl<F: ScalarFn> JetScalar for Analytic<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval_f64(&self, t: f64, x: &[f64]) -> f64 {
        self.0.eval(&t, x)
    }
    fn eval_jet(&self, t: &Jet, x: &[Jet]) -> Jet {
        self.0.eval(t, x)
    }
}

pub type FloatField = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;
pub type FloatScalar = Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;

/// Step policy of the finite-difference oracle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdPolicy {
    /// Base step, scaled by `1 + ‖x‖`.
    pub step: f64,
    pub richardson: bool,
}

impl Default for FdPolicy {
    fn default() -> Self {
        FdPolicy { step: math_cbrt_eps(), richardson: true }
    }
}

impl FdPolicy {
    /// Base step for `k` nested differences: `step^{3/(k+2)}`, so a single
    /// difference uses `step` itself.
    pub fn nested_step(&self, k: usize) -> f64 {
        crate::math::powf(self.step, 3.0 / (k.max(1) as f64 + 2.0))
    }
}

fn math_cbrt_eps() -> f64 {
    crate::math::cbrt(f64::EPSILON)
}

/// Time-varying vector field on ℝⁿ together with its derivative oracle.
#[derive(Clone)]
pub enum VectorField {
    Analytic(Arc<dyn JetField>),
    FiniteDifference { dim: usize, eval: FloatField, policy: FdPolicy },
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorField::Analytic(a) => write!(f, "VectorField::Analytic(dim={})", a.dim()),
            VectorField::FiniteDifference { dim, policy, .. } => {
                write!(f, "VectorField::FiniteDifference(dim={}, {:?})", dim, policy)
            }
        }
    }
}

impl VectorField {
    pub fn analytic<F: FieldFn + 'static>(f: F) -> Self {
        VectorField::Analytic(Arc::new(Analytic(f)))
    }
    pub fn finite_difference(dim: usize, f: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        VectorField::FiniteDifference { dim, eval: Arc::new(f), policy: FdPolicy::default() }
    }
    pub fn dim(&self) -> usize {
        match self {
            VectorField::Analytic(a) => a.dim(),
            VectorField::FiniteDifference { dim, .. } => *dim,
        }
    }
    pub fn is_analytic(&self) -> bool {
        matches!(self, VectorField::Analytic(_))
    }
    pub fn eval(&self, t: f64, x: &[f64]) -> Vec<f64> {
        match self {
            VectorField::Analytic(a) => a.eval_f64(t, x),
            VectorField::FiniteDifference { eval, .. } => eval(t, x),
        }
    }
    /// Float-only view of the field, used by the finite-difference oracle.
    pub fn float_view(&self) -> FloatField {
        match self {
            VectorField::Analytic(a) => {
                let a = a.clone();
                Arc::new(move |t, x| a.eval_f64(t, x))
            }
            VectorField::FiniteDifference { eval, .. } => eval.clone(),
        }
    }
    /// Forgets the analytic oracle.
    pub fn to_finite_difference(&self) -> Self {
        VectorField::FiniteDifference { dim: self.dim(), eval: self.float_view(), policy: FdPolicy::default() }
    }
}

/// Scalar field such as an output `ψ` or a test function `α`.
#[derive(Clone)]
pub enum ScalarField {
    Analytic(Arc<dyn JetScalar>),
    FiniteDifference { dim: usize, eval: FloatScalar, policy: FdPolicy },
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Analytic(a) => write!(f, "ScalarField::Analytic(dim={})", a.dim()),
            ScalarField::FiniteDifference { dim, .. } => write!(f, "ScalarField::FiniteDifference(dim={})", dim),
        }
    }
}

impl ScalarField {
    pub fn analytic<F: ScalarFn + 'static>(f: F) -> Self {
        ScalarField::Analytic(Arc::new(Analytic(f)))
    }
    pub fn finite_difference(dim: usize, f: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField::FiniteDifference { dim, eval: Arc::new(f), policy: FdPolicy::default() }
    }
    pub fn dim(&self) -> usize {
        match self {
            ScalarField::Analytic(a) => a.dim(),
            ScalarField::FiniteDifference { dim, .. } => *dim,
        }
    }
    pub fn is_analytic(&self) -> bool {
        matches!(self, ScalarField::Analytic(_))
    }
    pub fn eval(&self, t: f64, x: &[f64]) -> f64 {
        match self {
            ScalarField::Analytic(a) => a.eval_f64(t, x),
            ScalarField::FiniteDifference { eval, .. } => eval(t, x),
        }
    }
    pub fn float_view(&self) -> FloatScalar {
        match self {
            ScalarField::Analytic(a) => {
                let a = a.clone();
                Arc::new(move |t, x| a.eval_f64(t, x))
            }
            ScalarField::FiniteDifference { eval, .. } => eval.clone(),
        }
    }
    pub fn to_finite_difference(&self) -> Self {
        ScalarField::FiniteDifference { dim: self.dim(), eval: self.float_view(), policy: FdPolicy::default() }
    }

    /// `α(x) = x_k`.
    pub fn coordinate(dim: usize, k: usize) -> Self {
        ScalarField::analytic(Coordinate { dim, k })
    }
    /// `α(x) = ‖x‖²`.
    pub fn squared_norm(dim: usize) -> Self {
        ScalarField::analytic(SquaredNorm { dim })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Coordinate {
    pub dim: usize,
    pub k: usize,
}

impl ScalarFn for Coordinate {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval<R: Real>(&self, _t: &R, x: &[R]) -> R {
        x[self.k].clone()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SquaredNorm {
    pub dim: usize,
}

impl ScalarFn for SquaredNorm {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval<R: Real>(&self, _t: &R, x: &[R]) -> R {
        x.iter().fold(R::cst(0.0), |acc, v| acc + v.square())
    }
}

/// `f(t, x) = A x` for a row-major `n×n` matrix.
#[derive(Clone, Debug)]
pub struct LinearField {
    pub n: usize,
    pub a: Vec<f64>,
}

impl FieldFn for LinearField {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval<R: Real>(&self, _t: &R, x: &[R]) -> Vec<R> {
        (0..self.n)
            .map(|i| (0..self.n).fold(R::cst(0.0), |acc, k| acc + x[k].clone() * self.a[i * self.n + k]))
            .collect()
    }
}

/// Constant field `f(t, x) = c`.
#[derive(Clone, Debug)]
pub struct ConstantField(pub Vec<f64>);

impl FieldFn for ConstantField {
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn eval<R: Real>(&self, _t: &R, _x: &[R]) -> Vec<R> {
        self.0.iter().map(|&c| R::cst(c)).collect()
    }
}

use alloc::sync::Arc;
use alloc::vec::Vec;

use super::derivatives::{iterated_bracket, lie_derivative};
use super::field::{FdPolicy, JetField, JetScalar, ScalarField, VectorField};
use super::jet::{Jet, Real};
use super::FieldError;
use crate::math;

/// Below this output value the dither shapes return exactly 0.
pub const SHAPE_FLOOR: f64 = 1e-300;

/// Output-feedback multiplier `h_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    One,
    /// `h_s(y) = √y sin(ln y)`
    Sine,
    /// `h_c(y) = √y cos(ln y)`
    Cosine,
}

impl Shape {
    pub fn eval<R: Real>(&self, y: &R) -> R {
        match self {
            Shape::One => R::cst(1.0),
            _ if !(y.value() >= SHAPE_FLOOR) => y.clone() * 0.0,
            Shape::Sine => y.sqrt() * y.ln().sin(),
            Shape::Cosine => y.sqrt() * y.ln().cos(),
        }
    }

    pub fn value(&self, y: f64) -> f64 {
        self.eval(&y)
    }

    /// `h^{(ν)}(y)` for `y > 0`.
    pub fn derivative(&self, y: f64, nu: usize) -> f64 {
        if nu == 0 {
            return self.value(y);
        }
        let mut c = alloc::vec![0.0; 1 << nu];
        c[0] = y;
        for d in 0..nu {
            c[1 << d] = 1.0;
        }
        self.eval(&Jet::from_components(c)).coefficient((1 << nu) - 1)
    }
}

/// `h_s(y)`, zero for `y ≤ 0`.
pub fn h_s(y: f64) -> f64 {
    Shape::Sine.value(y)
}

/// `h_c(y)`, zero for `y ≤ 0`.
pub fn h_c(y: f64) -> f64 {
    Shape::Cosine.value(y)
}

/// `f(t, x) = h(ψ(x)) e(t, x)`.
pub struct FeedbackField {
    pub shape: Shape,
    pub psi: Arc<dyn JetScalar>,
    pub e: Arc<dyn JetField>,
}

impl core::fmt::Debug for FeedbackField {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "FeedbackField({:?})", self.shape)
    }
}

impl JetField for FeedbackField {
    fn dim(&self) -> usize {
        self.e.dim()
    }
    fn eval_f64(&self, t: f64, x: &[f64]) -> Vec<f64> {
        let h = self.shape.value(self.psi.eval_f64(t, x));
        if h == 0.0 {
            return alloc::vec![0.0; x.len()];
        }
        self.e.eval_f64(t, x).into_iter().map(|v| v * h).collect()
    }
    fn eval_jet(&self, t: &Jet, x: &[Jet]) -> Vec<Jet> {
        let y = self.psi.eval_jet(t, x);
        if self.shape != Shape::One && !(y.value() >= SHAPE_FLOOR) {
            return x.iter().map(|xi| xi.clone() * 0.0).collect();
        }
        let h = self.shape.eval(&y);
        self.e.eval_jet(t, x).into_iter().map(|v| v * h.clone()).collect()
    }
}

/// `ẋ = f_0(t, x) + Σ u_i f_i(t, x)`, optionally with an output `ψ` and
/// feedback shapes turning `e_i` into `f_i = h_i(ψ) e_i`.
#[derive(Clone, Debug)]
pub struct ControlAffineSystem {
    drift: VectorField,
    controls: Vec<VectorField>,
    output: Option<ScalarField>,
    shapes: Option<Vec<Shape>>,
}

impl ControlAffineSystem {
    pub fn new(drift: VectorField, controls: Vec<VectorField>) -> Result<Self, FieldError> {
        let n = drift.dim();
        for c in &controls {
            if c.dim() != n {
                return Err(FieldError::Dimension(n, c.dim()));
            }
        }
        Ok(ControlAffineSystem { drift, controls, output: None, shapes: None })
    }

    pub fn with_output(mut self, psi: ScalarField) -> Result<Self, FieldError> {
        if psi.dim() != self.n() {
            return Err(FieldError::Dimension(self.n(), psi.dim()));
        }
        self.output = Some(psi);
        Ok(self)
    }

    pub fn with_shapes(mut self, shapes: Vec<Shape>) -> Result<Self, FieldError> {
        if shapes.len() != self.m() {
            return Err(FieldError::Channels(self.m(), shapes.len()));
        }
        self.shapes = Some(shapes);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.drift.dim()
    }
    pub fn m(&self) -> usize {
        self.controls.len()
    }
    pub fn drift(&self) -> &VectorField {
        &self.drift
    }
    /// The base fields `e_i` (equal to `f_i` without feedback).
    pub fn controls(&self) -> &[VectorField] {
        &self.controls
    }
    pub fn output(&self) -> Option<&ScalarField> {
        self.output.as_ref()
    }
    pub fn shapes(&self) -> Option<&[Shape]> {
        self.shapes.as_deref()
    }

    /// `f_1..f_m`: feedback fields when shapes are set, else the controls.
    pub fn input_fields(&self) -> Result<Vec<VectorField>, FieldError> {
        match self.shapes {
            Some(_) => output_feedback_fields(self),
            None => Ok(self.controls.clone()),
        }
    }
}

/// `f_i(t, x) = h_i(ψ(x)) e_i(t, x)`; shapes default to `h ≡ 1`.
pub fn output_feedback_fields(sys: &ControlAffineSystem) -> Result<Vec<VectorField>, FieldError> {
    let psi = sys.output.as_ref().ok_or(FieldError::MissingOutput)?;
    let shapes: Vec<Shape> = match &sys.shapes {
        Some(s) => s.clone(),
        None => alloc::vec![Shape::One; sys.m()],
    };
    let mut out = Vec::with_capacity(sys.m());
    for (e, shape) in sys.controls.iter().zip(shapes) {
        let f = match (e, psi) {
            (VectorField::Analytic(e), ScalarField::Analytic(p)) => {
                VectorField::Analytic(Arc::new(FeedbackField { shape, psi: p.clone(), e: e.clone() }))
            }
            _ => {
                let ef = e.float_view();
                let pf = psi.float_view();
                VectorField::FiniteDifference {
                    dim: e.dim(),
                    eval: Arc::new(move |t, x| {
                        let h = shape.value(pf(t, x));
                        ef(t, x).into_iter().map(|v| v * h).collect()
                    }),
                    policy: FdPolicy::default(),
                }
            }
        };
        out.push(f);
    }
    Ok(out)
}

/// Largest relative residual `‖[f_{2k−1}, f_{2k}] + (g_kψ)g_k‖ / (1 + ‖(g_kψ)g_k‖)`
/// over the grid, with `g_k = e_{2k−1}` and `k` counted from 1.
pub fn verify_magic_bracket(sys: &ControlAffineSystem, k: usize, grid: &[(f64, Vec<f64>)]) -> Result<f64, FieldError> {
    let psi = sys.output.as_ref().ok_or(FieldError::MissingOutput)?;
    if k == 0 || 2 * k > sys.m() {
        return Err(FieldError::Channels(sys.m(), 2 * k));
    }
    let fields = output_feedback_fields(sys)?;
    let pair = [fields[2 * k - 2].clone(), fields[2 * k - 1].clone()];
    let idx = crate::free_algebra::MultiIndex::new(2, [1, 2])?;
    let g = &sys.controls[2 * k - 2];
    let mut worst = 0.0f64;
    for (t, x) in grid {
        let y = psi.eval(*t, x);
        if !(y > 0.0) {
            return Err(FieldError::ZeroOutput);
        }
        let br = iterated_bracket(&pair, &idx, *t, x)?;
        let gpsi = lie_derivative(g, psi, *t, x)?;
        let target: Vec<f64> = g.eval(*t, x).into_iter().map(|v| -gpsi * v).collect();
        let err = math::dist(&br, &target);
        worst = worst.max(err / (1.0 + math::norm(&target)));
    }
    Ok(worst)
}

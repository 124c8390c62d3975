use alloc::vec::Vec;

use super::derivatives::iterated_bracket;
use super::feedback::ControlAffineSystem;
use super::field::VectorField;
use super::FieldError;
use crate::free_algebra::MultiIndex;
use crate::input_signals::{PolynomialInput, Signal};
use crate::simulator::Dynamics;

/// Tolerance of the pointwise identity check run before assembly.
pub const LIE_CHECK_TOL: f64 = 1e-9;

/// Limit system `ẋ = f_0(t, x) + Σ (v_I(t)/|I|) [f_I](t, x)`.
#[derive(Clone, Debug)]
pub struct ExtendedSystem {
    base: ControlAffineSystem,
    v: PolynomialInput,
    fields: Vec<VectorField>,
    terms: Vec<(MultiIndex, Signal)>,
}

/// Assembles the limit system, refusing `v` that is not Lie-valued at the
/// sample times of `PolynomialInput::lie_check_times`.
pub fn assemble_extended(sys: &ControlAffineSystem, v: &PolynomialInput) -> Result<ExtendedSystem, FieldError> {
    if v.m() != sys.m() {
        return Err(FieldError::Channels(sys.m(), v.m()));
    }
    let check = v.lie_check(&v.lie_check_times())?;
    let scale = v.iter().map(|(_, s)| s.sup_bound()).fold(1.0f64, f64::max);
    if check.residual > LIE_CHECK_TOL * scale {
        return Err(FieldError::NotLieValued(check.residual));
    }
    let fields = sys.input_fields()?;
    let terms = v
        .iter()
        .map(|(i, s)| (i.clone(), Signal::scaled(1.0 / i.len() as f64, s.clone())))
        .collect();
    Ok(ExtendedSystem { base: sys.clone(), v: v.clone(), fields, terms })
}

impl ExtendedSystem {
    pub fn base(&self) -> &ControlAffineSystem {
        &self.base
    }
    pub fn v(&self) -> &PolynomialInput {
        &self.v
    }
    /// The fields `f_1..f_m` whose brackets enter the right-hand side.
    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    pub fn eval(&self, t: f64, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        let mut out = self.base.drift().eval(t, x);
        for (i, c) in &self.terms {
            let c = c.eval(t);
            if c == 0.0 {
                continue;
            }
            let b = iterated_bracket(&self.fields, i, t, x)?;
            for (o, bk) in out.iter_mut().zip(&b) {
                *o += c * bk;
            }
        }
        Ok(out)
    }
}

impl Dynamics for ExtendedSystem {
    fn dim(&self) -> usize {
        self.base.n()
    }
    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        match self.eval(t, x) {
            Ok(v) => dx.copy_from_slice(&v),
            Err(_) => dx.fill(f64::NAN),
        }
    }
    fn fastest_angular_frequency(&self) -> f64 {
        self.v.max_angular_frequency()
    }
}

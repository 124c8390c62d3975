use alloc::vec::Vec;

use super::integrate::Trajectory;
use super::SimError;
use crate::free_algebra::MultiIndex;
use crate::input_signals::{GeneralizedDifference, OrdinaryInput, PolynomialInput};
use crate::vector_fields::{gradient_dot, iterated_lie_derivative, ExtendedSystem, Op, ScalarField, VectorField};

/// Everything entering the integral expansion of `α(γ(t))` along a
/// solution `γ` of `Σ^j`.
#[derive(Clone, Copy, Debug)]
pub struct ExpansionData<'a> {
    pub drift: &'a VectorField,
    pub fields: &'a [VectorField],
    pub u: &'a OrdinaryInput,
    /// Limit coefficients `v_I`.
    pub v: &'a PolynomialInput,
    pub v_j: &'a PolynomialInput,
    pub w: &'a GeneralizedDifference,
    pub limit: &'a ExtendedSystem,
    /// Output whose zero set the trajectory must avoid.
    pub psi: Option<&'a ScalarField>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionResidual {
    /// Every second grid time, where the Simpson sums close.
    pub times: Vec<f64>,
    /// One series per test function.
    pub residuals: Vec<Vec<f64>>,
    pub max: f64,
}

struct Integrands {
    alpha: f64,
    limit: f64,
    d1: f64,
    d2: f64,
}

fn ops<'a>(head: &[Op<'a>], fields: &'a [VectorField], i: &MultiIndex) -> Vec<Op<'a>> {
    head.iter().cloned().chain(i.letters().iter().map(|&l| Op::Lie(&fields[l - 1]))).collect()
}

fn integrands(data: &ExpansionData<'_>, alpha: &ScalarField, t: f64, x: &[f64]) -> Result<Integrands, SimError> {
    let fields = data.fields;
    let r = data.w.r();
    let word = |head: &[Op<'_>], i: &MultiIndex| iterated_lie_derivative(&ops(head, fields, i), alpha, t, x);
    let limit = gradient_dot(alpha, t, x, &data.limit.eval(t, x)?)?;
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for (i, entry) in data.w.iter() {
        let w = entry.eval(t);
        if w == 0.0 {
            continue;
        }
        d1 -= w * word(&[], i)?;
        d2 += w * (word(&[Op::Time], i)? + word(&[Op::Lie(data.drift)], i)?);
        if i.len() == r {
            for (k, f) in fields.iter().enumerate() {
                let u = data.u.channel(k + 1).eval(t);
                if u != 0.0 {
                    d2 += u * w * word(&[Op::Lie(f)], i)?;
                }
            }
        }
    }
    let mut keys: Vec<&MultiIndex> = data.v.iter().map(|(i, _)| i).chain(data.v_j.iter().map(|(i, _)| i)).collect();
    keys.sort();
    keys.dedup();
    for i in keys {
        let dv = data.v_j.eval(i, t) - data.v.eval(i, t);
        if dv != 0.0 {
            d2 += dv * word(&[], i)?;
        }
    }
    Ok(Integrands { alpha: alpha.eval(t, x), limit, d1, d2 })
}

/// `α(γ(t)) − α(γ(t0)) − ∫(f^∞α) − D_1(t) + D_1(t0) − ∫D_2` at every second
/// grid time, with composite Simpson quadrature on the trajectory grid.
pub fn integral_expansion_residual(
    data: &ExpansionData<'_>,
    alphas: &[ScalarField],
    tr: &Trajectory,
) -> Result<ExpansionResidual, SimError> {
    if tr.len() < 3 {
        return Err(SimError::Incomplete);
    }
    if data.fields.len() != data.u.m() {
        return Err(SimError::Dimension(data.fields.len(), data.u.m()));
    }
    if let Some(psi) = data.psi {
        for (k, x) in tr.states().enumerate() {
            if !(psi.eval(tr.time(k), x) > 0.0) {
                return Err(SimError::ZeroOutput(tr.time(k)));
            }
        }
    }
    let h = tr.step();
    let last = tr.len() - 1 - (tr.len() - 1) % 2;
    let times: Vec<f64> = (0..=last).step_by(2).map(|k| tr.time(k)).collect();
    let mut residuals = Vec::with_capacity(alphas.len());
    let mut max = 0.0f64;
    for alpha in alphas {
        let vals: Vec<Integrands> =
            (0..=last).map(|k| integrands(data, alpha, tr.time(k), tr.state(k))).collect::<Result<_, _>>()?;
        let first = &vals[0];
        let mut series = Vec::with_capacity(times.len());
        let (mut int_limit, mut int_d2) = (0.0, 0.0);
        series.push(0.0);
        for k in (2..=last).step_by(2) {
            let (a, b, c) = (&vals[k - 2], &vals[k - 1], &vals[k]);
            int_limit += h / 3.0 * (a.limit + 4.0 * b.limit + c.limit);
            int_d2 += h / 3.0 * (a.d2 + 4.0 * b.d2 + c.d2);
            let res = c.alpha - first.alpha - int_limit - c.d1 + first.d1 - int_d2;
            max = max.max(res.abs());
            series.push(res);
        }
        residuals.push(series);
    }
    Ok(ExpansionResidual { times, residuals, max })
}

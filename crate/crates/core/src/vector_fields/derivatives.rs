use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::free_algebra::MultiIndex;
use crate::math;

use super::field::{FdPolicy, FloatField, FloatScalar, JetField, JetScalar, ScalarField, VectorField};
use super::jet::Jet;
use super::FieldError;

/// One differential operator in a chain applied to a scalar field.
#[derive(Clone, Debug)]
pub enum Op<'a> {
    /// Lie derivative `β ↦ ∇β · f`.
    Lie(&'a VectorField),
    /// Partial time derivative.
    Time,
}

fn lift(x: &[f64]) -> Vec<Jet> {
    x.iter().map(|&v| Jet::constant(v)).collect()
}

fn check_dim(expected: usize, got: usize) -> Result<(), FieldError> {
    if expected != got {
        return Err(FieldError::Dimension(expected, got));
    }
    Ok(())
}

enum AOp<'a> {
    Lie(&'a dyn JetField),
    Time,
}

fn chain_jet(ops: &[AOp<'_>], alpha: &dyn JetScalar, t: &Jet, x: &[Jet], depth: usize) -> Jet {
    let Some((op, rest)) = ops.split_first() else {
        return alpha.eval_jet(t, x);
    };
    match op {
        AOp::Lie(f) => {
            let v = f.eval_jet(t, x);
            let xs: Vec<Jet> = x.iter().zip(&v).map(|(a, b)| a.clone() + b.times_new_dir(depth)).collect();
            chain_jet(rest, alpha, t, &xs, depth + 1).part_along(depth)
        }
        AOp::Time => {
            let ts = t.clone() + Jet::variable(0.0, depth, 1.0);
            chain_jet(rest, alpha, &ts, x, depth + 1).part_along(depth)
        }
    }
}

enum FOp {
    Lie(FloatField),
    Time,
}

fn directional_fd<F: Fn(&[f64]) -> f64>(g: &F, x: &[f64], v: &[f64], policy: &FdPolicy, base: f64) -> f64 {
    let nv = math::norm(v);
    if nv == 0.0 {
        return 0.0;
    }
    let h = base * (1.0 + math::norm(x)) / nv;
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    let mut central = |h: f64| {
        for k in 0..x.len() {
            xp[k] = x[k] + h * v[k];
            xm[k] = x[k] - h * v[k];
        }
        (g(&xp) - g(&xm)) / (2.0 * h)
    };
    let d1 = central(h);
    if !policy.richardson {
        return d1;
    }
    let d2 = central(0.5 * h);
    (4.0 * d2 - d1) / 3.0
}

fn time_fd<F: Fn(f64) -> f64>(g: &F, t: f64, policy: &FdPolicy, base: f64) -> f64 {
    let h = base * (1.0 + t.abs());
    let d1 = (g(t + h) - g(t - h)) / (2.0 * h);
    if !policy.richardson {
        return d1;
    }
    let d2 = (g(t + 0.5 * h) - g(t - 0.5 * h)) / h;
    (4.0 * d2 - d1) / 3.0
}

fn chain_fd(ops: &[FOp], alpha: &FloatScalar, t: f64, x: &[f64], policy: &FdPolicy, base: f64) -> f64 {
    let Some((op, rest)) = ops.split_first() else {
        return alpha(t, x);
    };
    match op {
        FOp::Lie(f) => {
            let v = f(t, x);
            directional_fd(&|y: &[f64]| chain_fd(rest, alpha, t, y, policy, base), x, &v, policy, base)
        }
        FOp::Time => time_fd(&|s: f64| chain_fd(rest, alpha, s, x, policy, base), t, policy, base),
    }
}

/// `(f α)(t, x) = ∇α(x) · f(t, x)`.
pub fn lie_derivative(f: &VectorField, alpha: &ScalarField, t: f64, x: &[f64]) -> Result<f64, FieldError> {
    iterated_lie_derivative(&[Op::Lie(f)], alpha, t, x)
}

/// Applies the operators right to left: `ops = [A, B]` gives `A(B(α))`.
pub fn iterated_lie_derivative(ops: &[Op<'_>], alpha: &ScalarField, t: f64, x: &[f64]) -> Result<f64, FieldError> {
    check_dim(alpha.dim(), x.len())?;
    for op in ops {
        if let Op::Lie(f) = op {
            check_dim(f.dim(), x.len())?;
        }
    }
    if let ScalarField::Analytic(a) = alpha {
        let aops: Option<Vec<AOp<'_>>> = ops
            .iter()
            .map(|o| match o {
                Op::Lie(VectorField::Analytic(f)) => Some(AOp::Lie(f.as_ref())),
                Op::Time => Some(AOp::Time),
                Op::Lie(_) => None,
            })
            .collect();
        if let Some(aops) = aops {
            let r = chain_jet(&aops, a.as_ref(), &Jet::constant(t), &lift(x), 0);
            return finite(r.value());
        }
    }
    let policy = match alpha {
        ScalarField::FiniteDifference { policy, .. } => *policy,
        _ => FdPolicy::default(),
    };
    let fops: Vec<FOp> = ops
        .iter()
        .map(|o| match o {
            Op::Lie(f) => FOp::Lie(f.float_view()),
            Op::Time => FOp::Time,
        })
        .collect();
    finite(chain_fd(&fops, &alpha.float_view(), t, x, &policy, policy.nested_step(ops.len())))
}

fn finite(v: f64) -> Result<f64, FieldError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(FieldError::NonFinite)
    }
}

/// `f_I α = f_{i_1}(f_{i_2}(⋯ f_{i_ℓ} α))` for fields indexed from 1.
pub fn word_lie_derivative(
    fields: &[VectorField],
    index: &MultiIndex,
    alpha: &ScalarField,
    t: f64,
    x: &[f64],
) -> Result<f64, FieldError> {
    let ops = word_ops(fields, index.letters())?;
    iterated_lie_derivative(&ops, alpha, t, x)
}

pub(crate) fn word_ops<'a>(fields: &'a [VectorField], letters: &[usize]) -> Result<Vec<Op<'a>>, FieldError> {
    letters
        .iter()
        .map(|&l| fields.get(l.wrapping_sub(1)).map(Op::Lie).ok_or(FieldError::Letter(l, fields.len())))
        .collect()
}

fn bracket_jet(fields: &[&dyn JetField], letters: &[usize], t: &Jet, x: &[Jet], depth: usize) -> Vec<Jet> {
    let f = fields[letters[0] - 1];
    if letters.len() == 1 {
        return f.eval_jet(t, x);
    }
    let rest = &letters[1..];
    let fx = f.eval_jet(t, x);
    let gx = bracket_jet(fields, rest, t, x, depth);
    let shift = |dir: &[Jet]| -> Vec<Jet> { x.iter().zip(dir).map(|(a, b)| a.clone() + b.times_new_dir(depth)).collect() };
    let g_along_f = bracket_jet(fields, rest, t, &shift(&fx), depth + 1);
    let f_along_g = f.eval_jet(t, &shift(&gx));
    g_along_f.iter().zip(&f_along_g).map(|(a, b)| a.part_along(depth) - b.part_along(depth)).collect()
}

fn jacobian_vector_fd<F: Fn(&[f64]) -> Vec<f64>>(g: &F, x: &[f64], v: &[f64], policy: &FdPolicy, base: f64) -> Vec<f64> {
    let nv = math::norm(v);
    let n = x.len();
    if nv == 0.0 {
        return alloc::vec![0.0; n];
    }
    let h = base * (1.0 + math::norm(x)) / nv;
    let central = |h: f64| {
        let xp: Vec<f64> = (0..n).map(|k| x[k] + h * v[k]).collect();
        let xm: Vec<f64> = (0..n).map(|k| x[k] - h * v[k]).collect();
        let (a, b) = (g(&xp), g(&xm));
        a.iter().zip(&b).map(|(p, m)| (p - m) / (2.0 * h)).collect::<Vec<f64>>()
    };
    let d1 = central(h);
    if !policy.richardson {
        return d1;
    }
    let d2 = central(0.5 * h);
    d1.iter().zip(&d2).map(|(a, b)| (4.0 * b - a) / 3.0).collect()
}

fn bracket_fd(fields: &[FloatField], letters: &[usize], t: f64, x: &[f64], policy: &FdPolicy, base: f64) -> Vec<f64> {
    let f = &fields[letters[0] - 1];
    if letters.len() == 1 {
        return f(t, x);
    }
    let rest = &letters[1..];
    let fx = f(t, x);
    let gx = bracket_fd(fields, rest, t, x, policy, base);
    let dg_f = jacobian_vector_fd(&|y: &[f64]| bracket_fd(fields, rest, t, y, policy, base), x, &fx, policy, base);
    let df_g = jacobian_vector_fd(&|y: &[f64]| f(t, y), x, &gx, policy, base);
    dg_f.iter().zip(&df_g).map(|(a, b)| a - b).collect()
}

/// Right-nested bracket `[f_I](t, x)` with `[f, g] = Dg·f − Df·g`.
pub fn iterated_bracket(fields: &[VectorField], index: &MultiIndex, t: f64, x: &[f64]) -> Result<Vec<f64>, FieldError> {
    if index.is_empty() {
        return Err(FieldError::EmptyIndex);
    }
    for &l in index.letters() {
        let f = fields.get(l.wrapping_sub(1)).ok_or(FieldError::Letter(l, fields.len()))?;
        check_dim(f.dim(), x.len())?;
    }
    let out = if fields.iter().all(VectorField::is_analytic) {
        let views: Vec<&dyn JetField> = fields
            .iter()
            .filter_map(|f| match f {
                VectorField::Analytic(a) => Some(a.as_ref()),
                _ => None,
            })
            .collect();
        bracket_jet(&views, index.letters(), &Jet::constant(t), &lift(x), 0).iter().map(Jet::value).collect()
    } else {
        let policy = fields
            .iter()
            .find_map(|f| match f {
                VectorField::FiniteDifference { policy, .. } => Some(*policy),
                _ => None,
            })
            .unwrap_or_default();
        let views: Vec<FloatField> = fields.iter().map(VectorField::float_view).collect();
        bracket_fd(&views, index.letters(), t, x, &policy, policy.nested_step(index.len() - 1))
    };
    if out.iter().any(|v| !v.is_finite()) {
        return Err(FieldError::NonFinite);
    }
    Ok(out)
}

/// `∇α(t, x) · v` for a fixed vector `v`.
pub fn gradient_dot(alpha: &ScalarField, t: f64, x: &[f64], v: &[f64]) -> Result<f64, FieldError> {
    let dir = VectorField::FiniteDifference {
        dim: v.len(),
        eval: {
            let v = v.to_vec();
            Arc::new(move |_, _| v.clone())
        },
        policy: FdPolicy::default(),
    };
    match alpha {
        ScalarField::Analytic(a) => {
            check_dim(a.dim(), x.len())?;
            let xs: Vec<Jet> = x.iter().zip(v).map(|(p, q)| Jet::constant(*p) + Jet::constant(*q).times_new_dir(0)).collect();
            finite(a.eval_jet(&Jet::constant(t), &xs).part_along(0).value())
        }
        _ => lie_derivative(&dir, alpha, t, x),
    }
}

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::free_algebra::{rat, LinearForm, MultiIndex, QSqrt2};
use crate::math;

use super::expsum::{exponential_gd, merge_modes, real_signal, ExponentialGd, Mode};
use super::{GeneralizedDifference, OrdinaryInput, PolynomialInput, Signal, SignalError};

fn validate_frequencies(omegas: &[f64], lambdas: usize) -> Result<(), SignalError> {
    if omegas.is_empty() {
        return Err(SignalError::NoChannels);
    }
    if omegas.len() != lambdas {
        return Err(SignalError::ChannelMismatch(omegas.len(), lambdas));
    }
    for (k, &w) in omegas.iter().enumerate() {
        if !(w > 0.0) || !w.is_finite() {
            return Err(SignalError::Frequency(w));
        }
        if omegas[..k].contains(&w) {
            return Err(SignalError::RepeatedFrequency(w));
        }
    }
    Ok(())
}

/// `u_{2k−1} = √(2ω_k j) λ_k(t) cos(ω_k j t)`, `u_{2k} = √(2ω_k j) sin(ω_k j t)`.
pub fn make_sinusoid_inputs(omegas: &[f64], lambdas: &[Signal], j: f64) -> Result<OrdinaryInput, SignalError> {
    validate_frequencies(omegas, lambdas.len())?;
    let mut ch = Vec::with_capacity(2 * omegas.len());
    for (&w, lam) in omegas.iter().zip(lambdas) {
        let a = math::sqrt(2.0 * w * j);
        ch.push(Signal::product([lam.clone(), Signal::cos(a, w * j)]));
        ch.push(Signal::sin(a, w * j));
    }
    Ok(OrdinaryInput::new(ch))
}

/// `u_1 = 10√(j/π) saw(jt + 1/4)`, `u_2 = 10√(j/π) saw(jt)`.
pub fn make_sawtooth_inputs(j: f64) -> OrdinaryInput {
    let a = 10.0 * math::sqrt(j / math::PI);
    OrdinaryInput::new(alloc::vec![Signal::sawtooth(a, j, 0.25), Signal::sawtooth(a, j, 0.0)])
}

/// Symbolic limit `v` of the sinusoid family: `v_{(2k−1,2k)} = s_k`,
/// `v_{(2k,2k−1)} = −s_k`, where `s_k` stands for `λ_k`.
pub fn esc_limit_structure(p: usize) -> BTreeMap<MultiIndex, LinearForm> {
    let m = 2 * p;
    let mut v = BTreeMap::new();
    for k in 1..=p {
        let lam = LinearForm::symbol(k as u32);
        if let (Ok(a), Ok(b)) = (MultiIndex::new(m, [2 * k - 1, 2 * k]), MultiIndex::new(m, [2 * k, 2 * k - 1])) {
            v.insert(a, lam.clone());
            v.insert(b, -lam);
        }
    }
    v
}

/// Closed forms of the sinusoid family up to order two.
#[derive(Clone, Debug)]
pub struct SinusoidGd {
    pub u: OrdinaryInput,
    /// Limit coefficients `v_I`.
    pub v: PolynomialInput,
    /// `v^j_I`.
    pub v_j: PolynomialInput,
    pub w: GeneralizedDifference,
}

struct ChannelModes {
    modes: Vec<(Complex64, f64, usize)>,
    lambda: Option<usize>,
}

fn group_signal(modulator: &Signal, modes: &[Mode], tol: f64) -> Signal {
    let carrier = real_signal(&merge_modes(modes.to_vec(), tol), tol);
    Signal::product([modulator.clone(), carrier])
}

/// `v^j`, `W̃^j` of order 2 for the sinusoid inputs, as real parts of the
/// complex exponential sums with `η_{±ω_k,2k−1} = √(2ω_k)λ_k/2` and
/// `η_{±ω_k,2k} = ±√(2ω_k)/(2i)`.
pub fn closed_form_sinusoid_gd(omegas: &[f64], lambdas: &[Signal], j: f64) -> Result<SinusoidGd, SignalError> {
    validate_frequencies(omegas, lambdas.len())?;
    let mut dl = Vec::with_capacity(lambdas.len());
    for (k, l) in lambdas.iter().enumerate() {
        dl.push(l.derivative().ok_or(SignalError::MissingDerivative(k + 1))?);
    }
    let p = omegas.len();
    let m = 2 * p;
    let i_unit = Complex64::new(0.0, 1.0);
    let mut chans = Vec::with_capacity(m);
    for (k, &w) in omegas.iter().enumerate() {
        let c = math::sqrt(2.0 * w) / 2.0;
        chans.push(ChannelModes { modes: alloc::vec![(Complex64::new(c, 0.0), w, k), (Complex64::new(c, 0.0), -w, k)], lambda: Some(k) });
        chans.push(ChannelModes {
            modes: alloc::vec![(Complex64::new(0.0, -c), w, k), (Complex64::new(0.0, c), -w, k)],
            lambda: None,
        });
    }
    let wmax = omegas.iter().copied().fold(0.0, f64::max);
    let tol = 1e-12 * j * wmax;
    let modulator = |ls: &[Option<usize>]| Signal::product(ls.iter().flatten().map(|&k| lambdas[k].clone()));

    let sj = math::sqrt(j);
    let mut w_entries = BTreeMap::new();
    let mut v_lim = BTreeMap::new();
    let mut v_j = BTreeMap::new();
    for (l, ch) in chans.iter().enumerate() {
        let idx = MultiIndex::new(m, [l + 1])?;
        let modes: Vec<Mode> =
            ch.modes.iter().map(|&(eta, w, _)| Mode { c: -eta / (i_unit * w) / sj, theta: j * w }).collect();
        let g = modulator(&[ch.lambda]);
        w_entries.insert(idx.clone(), group_signal(&g, &modes, tol));
        if let Some(k) = ch.lambda {
            let vj = group_signal(&dl[k], &modes, tol);
            if !vj.is_zero() {
                v_j.insert(idx, vj);
            }
        }
    }
    for (l, a) in chans.iter().enumerate() {
        for (l2, b) in chans.iter().enumerate() {
            let idx = MultiIndex::new(m, [l + 1, l2 + 1])?;
            let g = modulator(&[a.lambda, b.lambda]);
            let dg = g.derivative().ok_or(SignalError::MissingDerivative(0))?;
            let mut zero = Complex64::new(0.0, 0.0);
            let mut osc = Vec::new();
            for &(ea, wa, ka) in &a.modes {
                for &(eb, wb, kb) in &b.modes {
                    let ee = ea * eb;
                    if ka == kb && wa == -wb {
                        zero += -ee / (i_unit * wb);
                    } else {
                        osc.push(Mode { c: -ee / (wb * (wa + wb)) / j, theta: j * (wa + wb) });
                    }
                }
            }
            w_entries.insert(idx.clone(), group_signal(&g, &osc, tol));
            let lim = if zero.norm() > 1e-14 { Signal::product([g.clone(), Signal::Constant(zero.re)]) } else { Signal::zero() };
            let corr = group_signal(&dg, &osc, tol);
            let total = Signal::sum([lim.clone(), corr]);
            if !lim.is_zero() {
                v_lim.insert(idx.clone(), lim);
            }
            if !total.is_zero() {
                v_j.insert(idx, total);
            }
        }
    }
    Ok(SinusoidGd {
        u: make_sinusoid_inputs(omegas, lambdas, j)?,
        v: PolynomialInput::new(m, 2, v_lim)?,
        v_j: PolynomialInput::new(m, 2, v_j)?,
        w: GeneralizedDifference::closed_form(m, 2, w_entries),
    })
}

/// Closed forms for the sinusoid family with constant `λ_k`, computed by the
/// generic constant-coefficient recursion to any order `r`.
pub fn sinusoid_exponential_gd(omegas: &[f64], lambdas: &[f64], j: f64, r: usize) -> Result<ExponentialGd, SignalError> {
    validate_frequencies(omegas, lambdas.len())?;
    let mut ch = Vec::new();
    for (&w, &l) in omegas.iter().zip(lambdas) {
        let c = math::sqrt(2.0 * w) / 2.0;
        ch.push(alloc::vec![(Complex64::new(c * l, 0.0), w), (Complex64::new(c * l, 0.0), -w)]);
        ch.push(alloc::vec![(Complex64::new(0.0, -c), w), (Complex64::new(0.0, c), -w)]);
    }
    exponential_gd(&ch, math::sqrt(j), j, r)
}

/// The `n`th prime, `κ_1 = 2`.
pub fn nth_prime(n: usize) -> u64 {
    let mut count = 0;
    let mut k = 1u64;
    while count < n {
        k += 1;
        if (2..k).take_while(|d| d * d <= k).all(|d| k % d != 0) {
            count += 1;
        }
    }
    k
}

/// `(ω_{ν,1}, ω_{ν,2}, ω_{ν,3})` for agent `ν ≥ 1`, with `κ = κ_{ν+1}`.
pub fn unicycle_frequencies(nu: usize) -> [f64; 3] {
    let s = math::sqrt(nth_prime(nu + 1) as f64);
    [s * (3.0 + 2.0 * math::SQRT_2), s, s * (2.0 + math::SQRT_2)]
}

/// Integer coordinates `(a, b)` of `ω_{ν,k} = a√κ + b√(2κ)`.
pub const UNICYCLE_FREQUENCY_COORDS: [(i64, i64); 3] = [(3, 2), (1, 0), (2, 1)];

fn unicycle_channels(n: usize) -> Vec<Vec<(Complex64, f64)>> {
    let g = math::powf(2.0, 13.0 / 8.0);
    let mut ch = Vec::with_capacity(3 * n);
    for nu in 1..=n {
        let [w1, w2, w3] = unicycle_frequencies(nu);
        let a1 = math::powf(w1, 0.75) / 2.0;
        let a2 = math::powf(w2, 0.75) / 2.0;
        let a3 = g * math::powf(w3, 0.75) / 2.0;
        ch.push(alloc::vec![(Complex64::new(a1, 0.0), w1), (Complex64::new(a1, 0.0), -w1)]);
        ch.push(alloc::vec![(Complex64::new(0.0, -a2), w2), (Complex64::new(0.0, a2), -w2)]);
        ch.push(alloc::vec![(Complex64::new(a3, 0.0), w3), (Complex64::new(a3, 0.0), -w3)]);
    }
    ch
}

/// Channels `3ν−2, 3ν−1, 3ν` drive agent `ν`.
pub fn make_unicycle_inputs(n: usize, j: f64) -> OrdinaryInput {
    let g = math::powf(2.0, 13.0 / 8.0);
    let mut ch = Vec::with_capacity(3 * n);
    for nu in 1..=n {
        let [w1, w2, w3] = unicycle_frequencies(nu);
        ch.push(Signal::cos(math::powf(w1 * j, 0.75), w1 * j));
        ch.push(Signal::sin(math::powf(w2 * j, 0.75), w2 * j));
        ch.push(Signal::cos(g * math::powf(w3 * j, 0.75), w3 * j));
    }
    OrdinaryInput::new(ch)
}

/// Closed-form `W̃^j`, `v^j` of order `r` for the unicycle inputs.
pub fn unicycle_gd(n: usize, j: f64, r: usize) -> Result<ExponentialGd, SignalError> {
    if n == 0 {
        return Err(SignalError::NoChannels);
    }
    exponential_gd(&unicycle_channels(n), math::powf(j, 0.75), j, r)
}

/// Per-agent table of the twelve fourth-order limit coefficients
/// `v_{(k1,k2,k3,k4)}` in Q(√2).
pub fn unicycle_table() -> [([usize; 4], QSqrt2); 12] {
    let q = |a: (i128, i128), b: (i128, i128)| QSqrt2::new(rat(a.0, a.1), rat(b.0, b.1));
    [
        ([1, 2, 3, 3], q((-1, 2), (1, 2))),
        ([1, 3, 2, 3], q((2, 1), (-1, 1))),
        ([1, 3, 3, 2], q((-2, 1), (0, 1))),
        ([2, 1, 3, 3], q((1, 2), (1, 2))),
        ([2, 3, 1, 3], q((-2, 1), (-1, 1))),
        ([2, 3, 3, 1], q((2, 1), (0, 1))),
        ([3, 1, 2, 3], q((-1, 1), (0, 1))),
        ([3, 1, 3, 2], q((2, 1), (1, 1))),
        ([3, 2, 1, 3], q((1, 1), (0, 1))),
        ([3, 2, 3, 1], q((-2, 1), (1, 1))),
        ([3, 3, 1, 2], q((-1, 2), (-1, 2))),
        ([3, 3, 2, 1], q((1, 2), (-1, 2))),
    ]
}

/// Exact limit coefficients for `N` agents, with the offset map
/// `(k1,…,k4)_ν = (3(ν−1)+k1, …, 3(ν−1)+k4)`.
pub fn unicycle_limit_exact(n: usize) -> BTreeMap<MultiIndex, QSqrt2> {
    let m = 3 * n;
    let mut out = BTreeMap::new();
    for nu in 1..=n {
        for (k, val) in unicycle_table() {
            let letters: Vec<usize> = k.iter().map(|&x| 3 * (nu - 1) + x).collect();
            if let Ok(i) = MultiIndex::new(m, letters) {
                out.insert(i, val);
            }
        }
    }
    out
}

/// The same coefficients as constant signals.
pub fn unicycle_limit_coefficients(n: usize) -> PolynomialInput {
    let m = (3 * n).max(1);
    let coeffs = unicycle_limit_exact(n).into_iter().map(|(i, q)| (i, Signal::Constant(q.to_f64()))).collect();
    PolynomialInput::new(m, 4, coeffs).unwrap_or_else(|_| PolynomialInput::zero(m, 4))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert_eq!((1..=6).map(nth_prime).collect::<Vec<_>>(), [2, 3, 5, 7, 11, 13]);
    }

    #[test]
    fn sinusoid_examples() {
        let u = make_sinusoid_inputs(&[1.0], &[Signal::Constant(1.0)], 4.0).unwrap();
        for &t in &[0.0, 0.2, 1.1] {
            assert!((u.channel(1).eval(t) - math::sqrt(8.0) * math::cos(4.0 * t)).abs() < 1e-14);
            assert!((u.channel(2).eval(t) - math::sqrt(8.0) * math::sin(4.0 * t)).abs() < 1e-14);
        }
        assert_eq!(u.channel(2).eval(0.0), 0.0);
        assert!(make_sinusoid_inputs(&[1.0, 1.0], &[Signal::Constant(1.0), Signal::Constant(1.0)], 1.0).is_err());
        assert!(make_sinusoid_inputs(&[-1.0], &[Signal::Constant(1.0)], 1.0).is_err());
    }

    #[test]
    fn limit_of_closed_form() {
        let lam = Signal::offset_sin(1.0, 0.1, 1.0);
        let gd = closed_form_sinusoid_gd(&[1.0], std::slice::from_ref(&lam), 100.0).unwrap();
        let a = MultiIndex::new(2, [1, 2]).unwrap();
        let b = MultiIndex::new(2, [2, 1]).unwrap();
        for &t in &[0.0, 0.5, 2.0] {
            assert!((gd.v.eval(&a, t) - lam.eval(t)).abs() < 1e-15);
            assert!((gd.v.eval(&b, t) + lam.eval(t)).abs() < 1e-15);
        }
        assert_eq!(gd.v.len(), 2);
    }

    #[test]
    fn first_order_vanishes_for_constant_lambda() {
        let gd = closed_form_sinusoid_gd(&[1.0, 2.0], &[Signal::Constant(1.0), Signal::Constant(2.0)], 10.0).unwrap();
        for l in 1..=4 {
            assert!(gd.v_j.get(&MultiIndex::new(4, [l]).unwrap()).is_none());
        }
    }

    #[test]
    fn unicycle_frequency_relations() {
        let [w1, w2, w3] = unicycle_frequencies(1);
        assert!((w2 - math::sqrt(3.0)).abs() < 1e-15);
        assert!((w3 - (w1 + w2) / 2.0).abs() < 1e-14);
        let u = make_unicycle_inputs(1, 7.0);
        let plain = math::powf(w3 * 7.0, 0.75);
        assert!((u.channel(3).sup_bound() / plain - math::powf(2.0, 13.0 / 8.0)).abs() < 1e-13);
    }

    #[test]
    fn unicycle_limit_entries() {
        let v = unicycle_limit_exact(2);
        assert_eq!(v.len(), 24);
        let i = MultiIndex::new(6, [1, 3, 3, 2]).unwrap();
        assert_eq!(v[&i], QSqrt2::rational(rat(-2, 1)));
        let i = MultiIndex::new(6, [6, 6, 5, 4]).unwrap();
        assert_eq!(v[&i], QSqrt2::new(rat(1, 2), rat(-1, 2)));
        assert!(!v.contains_key(&MultiIndex::new(6, [1, 1, 2, 3]).unwrap()));
    }
}

//! Finite sums `Σ c e^{iθt}` and their real parts as signal descriptors.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::free_algebra::MultiIndex;
use crate::math;

use super::{GeneralizedDifference, OrdinaryInput, PolynomialInput, Signal, SignalError};

/// One complex exponential `c e^{iθt}`; `theta` already includes `j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mode {
    pub c: Complex64,
    pub theta: f64,
}

/// Merges modes whose frequencies agree to `tol` and drops negligible ones.
pub fn merge_modes(mut modes: Vec<Mode>, tol: f64) -> Vec<Mode> {
    modes.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    let mut out: Vec<Mode> = Vec::with_capacity(modes.len());
    for md in modes {
        match out.last_mut() {
            Some(last) if (last.theta - md.theta).abs() <= tol => last.c += md.c,
            _ => out.push(md),
        }
    }
    let scale = out.iter().map(|m| m.c.norm()).fold(0.0, f64::max);
    out.retain(|m| m.c.norm() > 1e-15 * scale);
    out
}

/// Real part of `Σ c e^{iθt}` as a sum of phase-shifted cosines, one per
/// distinct `|θ|`.
pub fn real_signal(modes: &[Mode], tol: f64) -> Signal {
    let mut groups: Vec<(f64, f64, f64)> = Vec::new();
    let mut sorted: Vec<Mode> = modes.to_vec();
    sorted.sort_by(|a, b| a.theta.abs().total_cmp(&b.theta.abs()));
    for md in sorted {
        let w = md.theta.abs();
        let (ca, cb) = if md.theta >= 0.0 { (md.c.re, -md.c.im) } else { (md.c.re, md.c.im) };
        match groups.last_mut() {
            Some(g) if (g.0 - w).abs() <= tol => {
                g.1 += ca;
                g.2 += cb;
            }
            _ => groups.push((w, ca, cb)),
        }
    }
    let scale = groups.iter().map(|g| math::hypot(g.1, g.2)).fold(0.0, f64::max);
    let mut parts = Vec::new();
    for (w, a, b) in groups {
        if w <= tol {
            parts.push(Signal::Constant(a));
            continue;
        }
        let amp = math::hypot(a, b);
        if amp <= 1e-14 * scale {
            continue;
        }
        let phi = math::atan2(b, a);
        parts.push(Signal::Sinusoid { amplitude: amp, omega: w, phase: -phi, wave: super::Wave::Cos });
    }
    Signal::sum(parts)
}

/// Zero-frequency part of a mode list.
pub fn zero_part(modes: &[Mode], tol: f64) -> Complex64 {
    modes.iter().filter(|m| m.theta.abs() <= tol).map(|m| m.c).sum()
}

/// Generalized difference of constant-coefficient exponential inputs.
#[derive(Clone, Debug)]
pub struct ExponentialGd {
    pub u: OrdinaryInput,
    /// Zero-frequency parts; for constant coefficients these equal both
    /// `v^j_I` and the limit `v_I`.
    pub v: PolynomialInput,
    pub w: GeneralizedDifference,
    pub modes: BTreeMap<MultiIndex, Vec<Mode>>,
}

/// For inputs `u_ℓ(t) = A Σ_ω η_{ω,ℓ} e^{ijωt}` with constant `η` (given as
/// `(η, ω)` pairs per channel), computes `W̃^j_I` and `v^j_I` for all
/// `0 < |I| ≤ r` by the recursion
/// `W̃_{(ℓ,Ī)} = −Σ_{nonzero} A η c_q e^{i(jω+θ_q)t} / (i(jω+θ_q))`.
pub fn exponential_gd(
    channels: &[Vec<(Complex64, f64)>],
    amplitude: f64,
    j: f64,
    r: usize,
) -> Result<ExponentialGd, SignalError> {
    let m = channels.len();
    if m == 0 {
        return Err(SignalError::NoChannels);
    }
    let wmax = channels.iter().flatten().map(|(_, w)| w.abs()).fold(0.0, f64::max);
    let tol = 1e-9 * j * wmax.max(1.0);
    let unit = alloc::vec![Mode { c: Complex64::new(1.0, 0.0), theta: 0.0 }];
    let mut modes: BTreeMap<MultiIndex, Vec<Mode>> = BTreeMap::new();
    let mut vcoef: BTreeMap<MultiIndex, Signal> = BTreeMap::new();
    let i_unit = Complex64::new(0.0, 1.0);
    for word in MultiIndex::all_up_to(m, r) {
        let (l, rest) = word.split_first().ok_or(SignalError::NoChannels)?;
        let tail = if rest.is_empty() { &unit } else { &modes[&rest] };
        let mut prod = Vec::with_capacity(channels[l - 1].len() * tail.len());
        for &(eta, w) in &channels[l - 1] {
            for q in tail {
                prod.push(Mode { c: eta * q.c * amplitude, theta: j * w + q.theta });
            }
        }
        let prod = merge_modes(prod, tol);
        let z = zero_part(&prod, tol);
        if z.norm() > 0.0 {
            vcoef.insert(word.clone(), Signal::Constant(z.re));
        }
        let integrated: Vec<Mode> = prod
            .iter()
            .filter(|md| md.theta.abs() > tol)
            .map(|md| Mode { c: -md.c / (i_unit * md.theta), theta: md.theta })
            .collect();
        modes.insert(word, integrated);
    }
    let u = OrdinaryInput::new(
        channels
            .iter()
            .map(|ch| {
                let ms: Vec<Mode> = ch.iter().map(|&(eta, w)| Mode { c: eta * amplitude, theta: j * w }).collect();
                real_signal(&ms, tol)
            })
            .collect(),
    );
    let entries = modes.iter().map(|(i, ms)| (i.clone(), real_signal(ms, tol))).collect();
    let v = PolynomialInput::new(m, r, vcoef)?;
    Ok(ExponentialGd { u, v, w: GeneralizedDifference::closed_form(m, r, entries), modes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_part_of_conjugate_pair() {
        let c = Complex64::new(0.3, -0.4);
        let modes = [Mode { c, theta: 2.0 }, Mode { c: c.conj(), theta: -2.0 }];
        let s = real_signal(&modes, 1e-12);
        for &t in &[0.0, 0.4, 1.3] {
            let want = 2.0 * (c * Complex64::new(0.0, 2.0 * t).exp()).re;
            assert!((s.eval(t) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn cosine_input_first_order() {
        // u = cos(jt) = (e^{ijt} + e^{−ijt})/2, W̃ = −sin(jt)/j
        let ch = alloc::vec![alloc::vec![(Complex64::new(0.5, 0.0), 1.0), (Complex64::new(0.5, 0.0), -1.0)]];
        let gd = exponential_gd(&ch, 1.0, 10.0, 1).unwrap();
        let i = MultiIndex::new(1, [1]).unwrap();
        for &t in &[0.0, 0.1, 0.7] {
            assert!((gd.w.eval(&i, t) + libm::sin(10.0 * t) / 10.0).abs() < 1e-15);
            assert!((gd.u.channel(1).eval(t) - libm::cos(10.0 * t)).abs() < 1e-15);
        }
        assert!(gd.v.is_empty());
    }
}

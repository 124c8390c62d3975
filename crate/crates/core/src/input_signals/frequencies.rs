//! Exact enumeration of zero-sum frequency tuples for the unicycle inputs.
//!
//! Every frequency is an integer vector over the basis
//! `√κ_2, √(2κ_2), √κ_3, √(2κ_3), …`, which is linearly independent over Q,
//! so a sum vanishes iff its coordinate vector does.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::generators::UNICYCLE_FREQUENCY_COORDS;
use super::SignalError;

pub const ENUMERATION_BOUND: usize = 4;

/// Frequency coordinates of each channel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyTable {
    agents: usize,
    coords: Vec<Vec<i64>>,
}

impl FrequencyTable {
    pub fn unicycle(n: usize) -> Self {
        let dim = 2 * n;
        let mut coords = Vec::with_capacity(3 * n);
        for nu in 0..n {
            for &(a, b) in &UNICYCLE_FREQUENCY_COORDS {
                let mut v = alloc::vec![0; dim];
                v[2 * nu] = a;
                v[2 * nu + 1] = b;
                coords.push(v);
            }
        }
        FrequencyTable { agents: n, coords }
    }

    /// Replaces the frequency of channel `target` (1-based) by that of `source`.
    pub fn with_copied_channel(mut self, target: usize, source: usize) -> Self {
        let v = self.coords[source - 1].clone();
        self.coords[target - 1] = v;
        self
    }

    pub fn agents(&self) -> usize {
        self.agents
    }
    pub fn channels(&self) -> usize {
        self.coords.len()
    }
}

/// A zero sum that the properties forbid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyViolation {
    pub property: u8,
    /// `(channel, sign)` pairs, channels 1-based.
    pub tuple: Vec<(usize, i8)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyReport {
    pub agents: usize,
    pub singles_ok: bool,
    pub pairs_ok: bool,
    pub triples_ok: bool,
    pub quadruples_ok: bool,
    /// Distinct channel patterns `(ℓ_1,…,ℓ_4)` with a non-pair zero sum.
    pub patterns_per_agent: Vec<usize>,
    /// Signed tuples behind those patterns.
    pub tuples_per_agent: Vec<usize>,
    pub violation_count: usize,
    /// First few violations.
    pub violations: Vec<FrequencyViolation>,
}

impl FrequencyReport {
    pub fn all_hold(&self) -> bool {
        self.singles_ok && self.pairs_ok && self.triples_ok && self.quadruples_ok
    }
    pub fn twelve_per_agent(&self) -> bool {
        self.patterns_per_agent.iter().all(|&c| c == 12)
    }
}

/// Properties (i)–(iv) for the unicycle frequencies of `n ≤ 4` agents.
pub fn check_frequency_properties(n: usize) -> Result<FrequencyReport, SignalError> {
    if n == 0 || n > ENUMERATION_BOUND {
        return Err(SignalError::EnumerationBound(n, ENUMERATION_BOUND));
    }
    Ok(check_frequency_table(&FrequencyTable::unicycle(n)))
}

const MAX_KEPT: usize = 32;

pub fn check_frequency_table(table: &FrequencyTable) -> FrequencyReport {
    let dim = 2 * table.agents;
    let mut signed: Vec<(usize, i8, Vec<i64>)> = Vec::new();
    for (l, v) in table.coords.iter().enumerate() {
        for s in [1i8, -1] {
            signed.push((l + 1, s, v.iter().map(|x| x * s as i64).collect()));
        }
    }
    let mut report = FrequencyReport {
        agents: table.agents,
        singles_ok: true,
        pairs_ok: true,
        triples_ok: true,
        quadruples_ok: true,
        patterns_per_agent: alloc::vec![0; table.agents],
        tuples_per_agent: alloc::vec![0; table.agents],
        violation_count: 0,
        violations: Vec::new(),
    };
    let flag = |report: &mut FrequencyReport, property: u8, tuple: Vec<(usize, i8)>| {
        match property {
            1 => report.singles_ok = false,
            2 => report.pairs_ok = false,
            3 => report.triples_ok = false,
            _ => report.quadruples_ok = false,
        }
        report.violation_count += 1;
        if report.violations.len() < MAX_KEPT {
            report.violations.push(FrequencyViolation { property, tuple });
        }
    };
    let zero = |vs: &[&Vec<i64>]| (0..dim).all(|d| vs.iter().map(|v| v[d]).sum::<i64>() == 0);

    for a in &signed {
        if zero(&[&a.2]) {
            flag(&mut report, 1, alloc::vec![(a.0, a.1)]);
        }
    }
    for a in &signed {
        for b in &signed {
            if zero(&[&a.2, &b.2]) && a.0 != b.0 {
                flag(&mut report, 2, alloc::vec![(a.0, a.1), (b.0, b.1)]);
            }
        }
    }
    for a in &signed {
        for b in &signed {
            for c in &signed {
                if zero(&[&a.2, &b.2, &c.2]) {
                    flag(&mut report, 3, alloc::vec![(a.0, a.1), (b.0, b.1), (c.0, c.1)]);
                }
            }
        }
    }
    let mut patterns: Vec<BTreeSet<[usize; 4]>> = alloc::vec![BTreeSet::new(); table.agents];
    let mut partial = alloc::vec![0i64; dim];
    for a in &signed {
        for b in &signed {
            for c in &signed {
                for d in 0..dim {
                    partial[d] = a.2[d] + b.2[d] + c.2[d];
                }
                for e in &signed {
                    if (0..dim).any(|k| partial[k] + e.2[k] != 0) {
                        continue;
                    }
                    let q = [a, b, c, e];
                    let cancels = |x: usize, y: usize| zero(&[&q[x].2, &q[y].2]);
                    if (cancels(0, 1) && cancels(2, 3)) || (cancels(0, 2) && cancels(1, 3)) || (cancels(0, 3) && cancels(1, 2)) {
                        continue;
                    }
                    let tuple: Vec<(usize, i8)> = q.iter().map(|t| (t.0, t.1)).collect();
                    match agent_pattern(&tuple) {
                        Some(nu) if nu < table.agents => {
                            report.tuples_per_agent[nu] += 1;
                            patterns[nu].insert([tuple[0].0, tuple[1].0, tuple[2].0, tuple[3].0]);
                        }
                        _ => flag(&mut report, 4, tuple),
                    }
                }
            }
        }
    }
    report.patterns_per_agent = patterns.iter().map(BTreeSet::len).collect();
    report
}

/// Agent (0-based) if the tuple is a permutation of
/// `(ω_{ν,1}, ω_{ν,2}, −ω_{ν,3}, −ω_{ν,3})` or of its negative.
fn agent_pattern(tuple: &[(usize, i8)]) -> Option<usize> {
    let nu = (tuple[0].0 - 1) / 3;
    if tuple.iter().any(|t| (t.0 - 1) / 3 != nu) {
        return None;
    }
    let mut local: Vec<(usize, i8)> = tuple.iter().map(|t| ((t.0 - 1) % 3 + 1, t.1)).collect();
    local.sort();
    let plus = [(1, 1), (2, 1), (3, -1), (3, -1)];
    let minus = [(1, -1), (2, -1), (3, 1), (3, 1)];
    (local == plus || local == minus).then_some(nu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_agent() {
        let r = check_frequency_properties(1).unwrap();
        assert!(r.all_hold(), "{:?}", r.violations);
        assert_eq!(r.patterns_per_agent, [12]);
        assert_eq!(r.tuples_per_agent, [24]);
    }

    #[test]
    fn bound_enforced() {
        assert!(check_frequency_properties(5).is_err());
        assert!(check_frequency_properties(0).is_err());
    }

    #[test]
    fn copied_frequency_breaks_pairs() {
        let t = FrequencyTable::unicycle(1).with_copied_channel(3, 1);
        let r = check_frequency_table(&t);
        assert!(!r.pairs_ok);
        assert!(!r.all_hold());
    }
}

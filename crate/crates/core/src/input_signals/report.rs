use alloc::vec::Vec;

use crate::free_algebra::MultiIndex;
use crate::math;

use super::signal::{sup_norm, SupMethod};
use super::{GdEntry, GeneralizedDifference, OrdinaryInput, PolynomialInput, Signal, SignalError};

/// Which condition of GD(r)-convergence a row measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GdMetric {
    /// `sup |v^j_I − v_I|`
    LimitGap,
    /// `sup |W̃^j_I|`
    Difference,
    /// `sup |u^j_i W̃^j_I|` for `|I| = r`
    Coupling,
}

impl GdMetric {
    pub fn name(self) -> &'static str {
        match self {
            GdMetric::LimitGap => "c1_limit_gap",
            GdMetric::Difference => "c2_difference",
            GdMetric::Coupling => "c3_coupling",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GdRow {
    pub index: MultiIndex,
    /// Input channel for coupling rows.
    pub channel: Option<usize>,
    pub metric: GdMetric,
    pub value: f64,
    pub method: SupMethod,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GdReport {
    pub j: f64,
    pub window: f64,
    pub rows: Vec<GdRow>,
}

impl GdReport {
    pub fn value(&self, index: &MultiIndex, metric: GdMetric, channel: Option<usize>) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| &r.index == index && r.metric == metric && r.channel == channel)
            .map(|r| r.value)
    }
    /// Largest value of the metric over rows with `|I| = order`.
    pub fn max(&self, metric: GdMetric, order: Option<usize>) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.metric == metric && order.map_or(true, |o| r.index.len() == o))
            .map(|r| r.value)
            .fold(0.0, f64::max)
    }
}

/// Options for `gd_convergence_report`.
#[derive(Clone, Debug)]
#[derive(Default)]
pub struct GdReportOptions {
    /// Restricts the coupling rows to these channels and indices; `None`
    /// means all `i` and all `|I| = r`.
    pub coupling: Option<Vec<(usize, MultiIndex)>>,
}


fn entry_sup(e: &GdEntry, window: f64) -> Result<(f64, SupMethod), SignalError> {
    Ok(match e {
        GdEntry::Closed(s) => {
            let n = sup_norm(s, window)?;
            (n.value, n.method)
        }
        GdEntry::Sampled(s) => (s.max_abs(Some((0.0, window))), SupMethod::Window),
    })
}

fn sample_product(u: &Signal, e: &GdEntry, window: f64) -> f64 {
    let w = u.max_angular_frequency()
        + match e {
            GdEntry::Closed(s) => s.max_angular_frequency(),
            GdEntry::Sampled(_) => 0.0,
        };
    let n = math::ceil((window * w / math::TAU * 64.0).max(64.0)).min(8.0e6) as usize;
    (0..=n)
        .map(|k| {
            let t = window * k as f64 / n as f64;
            (u.eval(t) * e.eval(t)).abs()
        })
        .fold(0.0, f64::max)
}

/// Sup-norms behind conditions c1(r)–c3(r) at one `j`.
pub fn gd_convergence_report(
    u: &OrdinaryInput,
    v: &PolynomialInput,
    v_j: &PolynomialInput,
    w: &GeneralizedDifference,
    window: f64,
    j: f64,
) -> Result<GdReport, SignalError> {
    gd_convergence_report_with(u, v, v_j, w, window, j, &GdReportOptions::default())
}

pub fn gd_convergence_report_with(
    u: &OrdinaryInput,
    v: &PolynomialInput,
    v_j: &PolynomialInput,
    w: &GeneralizedDifference,
    window: f64,
    j: f64,
    opts: &GdReportOptions,
) -> Result<GdReport, SignalError> {
    if !(window > 0.0) || !window.is_finite() {
        return Err(SignalError::Window(window));
    }
    let m = v.m();
    if u.m() != m || v_j.m() != m || w.m() != m {
        return Err(SignalError::ChannelMismatch(u.m(), m));
    }
    if v.r() != v_j.r() || w.r() != v.r() {
        return Err(SignalError::OrderMismatch(v.r(), w.r()));
    }
    let r = v.r();
    let mut rows = Vec::new();
    for index in MultiIndex::all_up_to(m, r) {
        let a = v_j.get(&index).cloned().unwrap_or_else(Signal::zero);
        let b = v.get(&index).cloned().unwrap_or_else(Signal::zero);
        let gap = Signal::difference(a, b);
        let n = sup_norm(&gap, window)?;
        rows.push(GdRow { index: index.clone(), channel: None, metric: GdMetric::LimitGap, value: n.value, method: n.method });
        let (val, method) = match w.get(&index) {
            Some(e) => entry_sup(e, window)?,
            None => (0.0, SupMethod::Exact),
        };
        rows.push(GdRow { index, channel: None, metric: GdMetric::Difference, value: val, method });
    }
    let pairs: Vec<(usize, MultiIndex)> = match &opts.coupling {
        Some(p) => p.clone(),
        None => {
            let top: Vec<MultiIndex> = MultiIndex::all_up_to(m, r).into_iter().filter(|i| i.len() == r).collect();
            (1..=m).flat_map(|i| top.iter().map(move |x| (i, x.clone()))).collect()
        }
    };
    for (i, index) in pairs {
        let ui = u.channel(i);
        let (value, method) = match w.get(&index) {
            None => (0.0, SupMethod::Exact),
            Some(GdEntry::Closed(s)) => {
                let n = sup_norm(&Signal::product([ui.clone(), s.clone()]), window)?;
                (n.value, n.method)
            }
            Some(e) => (sample_product(ui, e, window), SupMethod::Window),
        };
        rows.push(GdRow { index, channel: Some(i), metric: GdMetric::Coupling, value, method });
    }
    Ok(GdReport { j, window, rows })
}

/// Least-squares slope of `log value` against `log j`.
pub fn log_log_slope(js: &[f64], values: &[f64]) -> Option<f64> {
    let x: Vec<f64> = js.iter().map(|&j| math::ln(j)).collect();
    let y: Vec<f64> = values.iter().map(|&v| math::ln(v)).collect();
    if y.iter().any(|v| !v.is_finite()) {
        return None;
    }
    math::linear_fit(&x, &y).map(|(_, b, _)| b)
}

/// Summary of a j-sweep of reports.
#[derive(Clone, Debug, PartialEq)]
pub struct GdSweep {
    pub js: Vec<f64>,
    /// For each metric, the per-j maximum over rows.
    pub maxima: Vec<(GdMetric, Vec<f64>)>,
    /// Whether each metric family is non-increasing in `j`.
    pub decreasing: Vec<(GdMetric, bool)>,
}

pub fn gd_sweep(reports: &[GdReport]) -> GdSweep {
    let mut sorted: Vec<&GdReport> = reports.iter().collect();
    sorted.sort_by(|a, b| a.j.total_cmp(&b.j));
    let js = sorted.iter().map(|r| r.j).collect();
    let mut maxima = Vec::new();
    let mut decreasing = Vec::new();
    for metric in [GdMetric::LimitGap, GdMetric::Difference, GdMetric::Coupling] {
        let vals: Vec<f64> = sorted.iter().map(|r| r.max(metric, None)).collect();
        let dec = vals.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-300);
        maxima.push((metric, vals));
        decreasing.push((metric, dec));
    }
    GdSweep { js, maxima, decreasing }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_order_one_input_has_zero_metrics() {
        let u = OrdinaryInput::new(alloc::vec![Signal::cos(2.0, 3.0), Signal::sin(1.0, 1.0)]);
        let v = u.as_polynomial();
        let w = GeneralizedDifference::closed_form(2, 1, Default::default());
        let rep = gd_convergence_report(&u, &v, &v, &w, 5.0, 1.0).unwrap();
        assert!(rep.rows.iter().all(|r| r.value == 0.0));
        assert!(gd_convergence_report(&u, &v, &v, &w, 0.0, 1.0).is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let js = [1e2, 1e3, 1e4];
        let vals: Vec<f64> = js.iter().map(|j: &f64| 3.0 * libm::pow(*j, -0.5)).collect();
        assert!((log_log_slope(&js, &vals).unwrap() + 0.5).abs() < 1e-12);
    }
}

//! A quick battery of exact and numerical invariants, run by `bracketflow selftest`.

use bracketflow_core::free_algebra::check_algebraic_identity;
use bracketflow_core::input_signals::{
    check_frequency_properties, closed_form_sinusoid_gd, esc_limit_structure, gd_convergence_report, saw, unicycle_limit_exact,
    GdMetric, Signal,
};
use bracketflow_core::vector_fields::{h_c, h_s};

pub struct Check {
    pub name: String,
    pub passed: bool,
}

fn check(name: impl Into<String>, passed: bool) -> Check {
    Check { name: name.into(), passed }
}

pub fn checks() -> Vec<Check> {
    let mut out = Vec::new();
    for p in 1..=3 {
        let ok = check_algebraic_identity(&esc_limit_structure(p), 2 * p, 2).is_ok_and(|c| c.holds && c.residual == 0.0);
        out.push(check(format!("sinusoid limit coefficients are Lie valued, p = {p}"), ok));
    }
    for n in 1..=2 {
        let ok = check_algebraic_identity(&unicycle_limit_exact(n), 3 * n, 4).is_ok_and(|c| c.holds && c.residual == 0.0);
        out.push(check(format!("unicycle limit coefficients are Lie valued, N = {n}"), ok));
    }
    let f = check_frequency_properties(1);
    out.push(check("unicycle frequencies, N = 1", f.is_ok_and(|r| r.all_hold() && r.twelve_per_agent())));
    out.push(check("sawtooth values", saw(0.0) == -1.0 && saw(0.25) == -0.5 && saw(0.75) == 0.5));
    let y = 0.37f64;
    let pair = h_s(y).powi(2) + h_c(y).powi(2);
    out.push(check("shape pair squares sum to y", (pair - y).abs() < 1e-15));
    let gd = |j: f64| {
        closed_form_sinusoid_gd(&[1.0], &[Signal::Constant(1.0)], j)
            .ok()
            .and_then(|g| gd_convergence_report(&g.u, &g.v, &g.v_j, &g.w, std::f64::consts::TAU, j).ok())
            .map(|r| r.max(GdMetric::Difference, None))
    };
    let decreasing = matches!((gd(1.0), gd(10.0), gd(100.0)), (Some(a), Some(b), Some(c)) if a > b && b > c);
    out.push(check("sinusoid generalized differences shrink with j", decreasing));
    out
}

/// Prints one line per check; returns whether all passed.
pub fn run() -> bool {
    let mut all = true;
    for c in checks() {
        println!("{} {}", if c.passed { "ok  " } else { "FAIL" }, c.name);
        all &= c.passed;
    }
    all
}

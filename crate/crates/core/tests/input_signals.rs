use std::collections::BTreeMap;

use bracketflow_core::free_algebra::{check_algebraic_identity, MultiIndex, QSqrt2};
use bracketflow_core::input_signals::*;

fn mi(m: usize, l: &[usize]) -> MultiIndex {
    MultiIndex::new(m, l.to_vec()).unwrap()
}

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect()
}

fn lambdas() -> Vec<Signal> {
    vec![Signal::Constant(1.0), Signal::offset_sin(1.0, 0.1, 1.0)]
}

#[test]
fn integrated_matches_closed_form() {
    let g = grid(0.0, 10.0, 2000);
    for &w in &[1.0, 2.0] {
        for lam in lambdas() {
            for &j in &[10.0, 100.0] {
                let cf = closed_form_sinusoid_gd(&[w], std::slice::from_ref(&lam), j).unwrap();
                let p0 = cf.w.values_at(0.0);
                let num = integrate_generalized_difference(&cf.u, &cf.v_j, 0.0, &p0, &g).unwrap();
                let mut worst: f64 = 0.0;
                for (i, e) in num.iter() {
                    for &t in &g {
                        worst = worst.max((e.eval(t) - cf.w.eval(i, t)).abs());
                    }
                }
                assert!(worst <= 1e-6, "omega {w} j {j}: {worst}");
            }
        }
    }
}

#[test]
fn closed_form_first_order_sup() {
    for &j in &[10.0, 100.0, 1e4] {
        let cf = closed_form_sinusoid_gd(&[1.0], &[Signal::Constant(1.0)], j).unwrap();
        let s = cf.w.closed(&mi(2, &[2])).unwrap();
        let n = sup_norm(s, 1.0).unwrap();
        assert_eq!(n.method, SupMethod::Exact);
        assert!((n.value - 2f64.sqrt() / j.sqrt()).abs() < 1e-15);
    }
}

#[test]
fn generic_recursion_agrees_with_closed_form() {
    let cf = closed_form_sinusoid_gd(&[1.0, 2.0], &[Signal::Constant(1.5), Signal::Constant(0.5)], 30.0).unwrap();
    let ex = sinusoid_exponential_gd(&[1.0, 2.0], &[1.5, 0.5], 30.0, 2).unwrap();
    for i in MultiIndex::all_up_to(4, 2) {
        for &t in &[0.0, 0.13, 0.9, 4.2] {
            assert!((cf.w.eval(&i, t) - ex.w.eval(&i, t)).abs() < 1e-13, "{i}");
            assert!((cf.v_j.eval(&i, t) - ex.v.eval(&i, t)).abs() < 1e-13, "{i}");
        }
    }
}

#[test]
fn closed_form_limit_is_lie_valued() {
    let lam = Signal::offset_sin(1.0, 0.1, 1.0);
    let cf = closed_form_sinusoid_gd(&[1.0, 2.0], &[lam.clone(), Signal::Constant(2.0)], 10.0).unwrap();
    let structure = esc_limit_structure(2);
    assert!(check_algebraic_identity(&structure, 4, 2).unwrap().holds);
    for &t in &[0.0, 0.7, 3.3] {
        for (i, form) in &structure {
            let lam_k: f64 = form
                .symbols()
                .map(|(k, c)| {
                    let l = if *k == 1 { lam.eval(t) } else { 2.0 };
                    l * (*c.numer() as f64) / (*c.denom() as f64)
                })
                .sum();
            assert!((cf.v.eval(i, t) - lam_k).abs() < 1e-15);
        }
    }
    let c = cf.v.lie_check(&cf.v.lie_check_times()).unwrap();
    assert!(c.holds && c.residual == 0.0);
}

#[test]
fn decay_slopes() {
    let js = [1e2, 1e3, 1e4];
    let mut reports = Vec::new();
    for &j in &js {
        let cf = closed_form_sinusoid_gd(&[1.0], &[Signal::Constant(1.0)], j).unwrap();
        reports.push(gd_convergence_report(&cf.u, &cf.v, &cf.v_j, &cf.w, 10.0, j).unwrap());
    }
    for (order, want) in [(1, -0.5), (2, -1.0)] {
        let vals: Vec<f64> = reports.iter().map(|r| r.max(GdMetric::Difference, Some(order))).collect();
        let s = log_log_slope(&js, &vals).unwrap();
        assert!((s - want).abs() < 0.1, "order {order}: {s}");
    }
    let sweep = gd_sweep(&reports);
    assert!(sweep.decreasing.iter().all(|(_, d)| *d));
}

#[test]
fn unicycle_table_matches_recursion() {
    let ex = unicycle_gd(1, 1.0, 4).unwrap();
    let exact = unicycle_limit_exact(1);
    let mut nonzero = 0;
    for i in MultiIndex::all_up_to(3, 4) {
        let got = ex.v.eval(&i, 0.0);
        let want = exact.get(&i).map_or(0.0, QSqrt2::to_f64);
        assert!((got - want).abs() < 1e-9, "{i}: {got} vs {want}");
        if got.abs() > 1e-9 {
            nonzero += 1;
        }
    }
    assert_eq!(nonzero, 12);
}

#[test]
fn unicycle_table_is_lie_valued_exactly() {
    for n in 1..=3 {
        let c = check_algebraic_identity(&unicycle_limit_exact(n), 3 * n, 4).unwrap();
        assert!(c.holds);
        assert_eq!(c.residual, 0.0);
    }
}

#[test]
fn unicycle_coupling_decay() {
    let js = [1e2, 1e3, 1e4];
    let probe = vec![(1usize, mi(3, &[1, 3, 3, 2])), (3, mi(3, &[2, 1, 3, 3]))];
    let mut vals = vec![Vec::new(); probe.len()];
    for &j in &js {
        let ex = unicycle_gd(1, j, 4).unwrap();
        let opts = GdReportOptions { coupling: Some(probe.clone()) };
        let rep = gd_convergence_report_with(&ex.u, &ex.v, &ex.v, &ex.w, 400.0 / j, j, &opts).unwrap();
        for (k, (i, idx)) in probe.iter().enumerate() {
            vals[k].push(rep.value(idx, GdMetric::Coupling, Some(*i)).unwrap());
        }
    }
    for v in vals {
        let s = log_log_slope(&js, &v).unwrap();
        assert!((s + 0.25).abs() < 0.02, "{s}");
    }
}

#[test]
fn sawtooth_inputs() {
    let u = make_sawtooth_inputs(9.0);
    let amp = 10.0 * (9.0 / std::f64::consts::PI).sqrt();
    assert_eq!(sup_norm(u.channel(2), 1.0).unwrap().value, amp);
    assert!((u.channel(1).eval(0.0) + 0.5 * amp).abs() < 1e-12);
}

#[test]
fn period_shift_leaves_report_unchanged() {
    let j = 20.0;
    let cf = closed_form_sinusoid_gd(&[1.0, 2.0], &[Signal::Constant(1.0), Signal::Constant(1.0)], j).unwrap();
    let period = match cf.u.channel(1).period() {
        Period::Finite(p) => p,
        other => panic!("{other:?}"),
    };
    let a = gd_convergence_report(&cf.u, &cf.v, &cf.v_j, &cf.w, 10.0, j).unwrap();
    let w2 = cf.w.shifted(period).unwrap();
    let b = gd_convergence_report(&cf.u.shifted(period), &cf.v.shifted(period), &cf.v_j.shifted(period), &w2, 10.0, j)
        .unwrap();
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert!((x.value - y.value).abs() <= 1e-9 * (1.0 + x.value.abs()), "{x:?} {y:?}");
    }
}

#[test]
fn frequency_properties_up_to_three_agents() {
    for n in 1..=3 {
        let r = check_frequency_properties(n).unwrap();
        assert!(r.all_hold(), "{n}: {:?}", r.violations);
        assert!(r.twelve_per_agent());
    }
}

#[test]
fn constant_limit_map() {
    let v = unicycle_limit_coefficients(1);
    let map: BTreeMap<_, _> = v.values_at(0.0);
    assert_eq!(map.len(), 12);
    assert!((map[&mi(3, &[3, 3, 2, 1])] - (0.5 - 0.5f64.sqrt())).abs() < 1e-15);
}

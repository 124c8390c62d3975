use bracketflow_core::free_algebra::*;
use bracketflow_core::input_signals::{esc_limit_structure, unicycle_limit_exact};
use proptest::prelude::*;

const M: usize = 3;

fn arb_index(max_len: usize) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(1..=M, 1..=max_len).prop_map(|l| MultiIndex::new(M, l).unwrap())
}

fn arb_poly() -> impl Strategy<Value = NcPolynomial<Rational>> {
    prop::collection::vec((arb_index(3), -6i128..=6, 1i128..=4), 0..5).prop_map(|terms| {
        terms.into_iter().fold(NcPolynomial::zero(M), |acc, (i, a, b)| {
            acc.add(&NcPolynomial::monomial(i, rat(a, b))).unwrap()
        })
    })
}

fn br(a: &NcPolynomial<Rational>, b: &NcPolynomial<Rational>) -> NcPolynomial<Rational> {
    a.lie_bracket(b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bracket_is_antisymmetric(a in arb_poly(), b in arb_poly()) {
        prop_assert!(br(&a, &b).add(&br(&b, &a)).unwrap().is_zero());
    }

    #[test]
    fn jacobi(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        let s = br(&a, &br(&b, &c)).add(&br(&b, &br(&c, &a))).unwrap().add(&br(&c, &br(&a, &b))).unwrap();
        prop_assert!(s.is_zero());
    }

    #[test]
    fn product_is_associative(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        let l = a.mul(&b).unwrap().mul(&c).unwrap();
        let r = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn bracket_polynomial_is_homogeneous(i in arb_index(5)) {
        let p: NcPolynomial<Rational> = bracket_polynomial(&i).unwrap();
        prop_assert!(p.is_homogeneous(i.len()));
        let mut want = i.letters().to_vec();
        want.sort_unstable();
        for (w, _) in p.terms() {
            let mut got = w.letters().to_vec();
            got.sort_unstable();
            prop_assert_eq!(&got, &want);
        }
    }

    #[test]
    fn bracket_polynomials_are_lie_valued(i in arb_index(4), c in -5i128..=5) {
        // v = c·[X_I], expanded into words
        let p: NcPolynomial<Rational> = bracket_polynomial(&i).unwrap();
        let v = p.terms().map(|(w, b)| (w.clone(), *b * rat(c, 1))).collect();
        let chk = check_algebraic_identity(&v, M, 4).unwrap();
        prop_assert!(chk.holds);
        prop_assert_eq!(chk.residual, 0.0);
    }
}

#[test]
fn sinusoid_limit_is_lie_valued() {
    for p in 1..=3 {
        let c = check_algebraic_identity(&esc_limit_structure(p), 2 * p, 2).unwrap();
        assert!(c.holds && c.residual == 0.0);
        assert!(c.difference.is_zero());
    }
}

#[test]
fn unicycle_table_is_lie_valued() {
    let c = check_algebraic_identity(&unicycle_limit_exact(2), 6, 4).unwrap();
    assert!(c.holds && c.residual == 0.0);
}

#[test]
fn multi_index_enumeration() {
    let b = MultiIndex::new(2, [1, 1]).unwrap();
    assert_eq!(MultiIndex::all_up_to(2, 3).len(), 14);
    assert_eq!(b.to_string(), "(1,1)");
}

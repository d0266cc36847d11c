use pauli_bounds::bounds::*;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

#[test]
fn electron_values_in_three_dimensions() {
    let q = BoundQuery::electrons(1);
    assert!((heisenberg_lower_bound(&q).unwrap() - 1.17005).abs() < 1e-5);
    assert!((a_2(3.0).unwrap() - 9.0 / 16.0 * 6f64.powf(2.0 / 3.0)).abs() < 1e-12);
    let f = fisher_lower_bound(&q).unwrap();
    assert!((f - 3f64.powf(8.0 / 3.0)).abs() < 1e-10);
    assert!((f.log10() - 1.2723).abs() < 1e-4);
    let spinless = fisher_lower_bound(&BoundQuery::new(3.0, 1, 1)).unwrap();
    assert!((spinless - 9.0 * 6f64.powf(2.0 / 3.0)).abs() < 1e-10);
}

#[test]
fn frozen_constants() {
    // independent evaluations of the closed forms
    assert!(rel(k_const(3.0).unwrap(), 9.115599744691194) < 1e-13);
    assert!(rel(f_const(2.0, 3.0).unwrap(), 0.2037533601214681) < 1e-13);
    assert!(rel(k_const(1.0).unwrap(), 4.0 * std::f64::consts::PI / 3.0 * 0.25 * std::f64::consts::PI) < 1e-13);
    assert!(rel(a_2(1.0).unwrap(), 0.25) < 1e-14);
    assert!(rel(a_2(2.0).unwrap(), 8.0 / 9.0) < 1e-14);
}

#[test]
fn constant_and_variational_forms_agree() {
    for alpha in [0.5, 1.0, 2.0, 3.0, 4.0] {
        for d in [1.0, 2.0, 3.0, 6.0, 10.0] {
            let a = f_const(alpha, d).unwrap();
            let b = f_var(alpha, 1.0 + 2.0 / d, d).unwrap();
            assert!(rel(a, b) < 1e-10, "alpha={alpha} d={d}: {a} {b}");
        }
    }
    for d in 1..=20 {
        let d = d as f64;
        assert!(rel(a_general(2.0, d, 1.0).unwrap(), a_2(d).unwrap()) < 1e-10, "d={d}");
    }
}

#[test]
fn large_dimension_limits() {
    let d = 1000.0;
    let h = a_2(d).unwrap() / (0.13533 * d * d);
    assert!((0.99..=1.02).contains(&h), "{h}");
    let f = fisher_constant(0, 0, d).unwrap() / (2.16536 * d * d);
    assert!((0.99..=1.02).contains(&f), "{f}");
    assert!((asymptotic_ratio(BoundKind::Heisenberg, 1e6).unwrap() - 1.0).abs() < 1e-4);
}

#[test]
fn spin_multiplicity_lowers_bounds() {
    for d in [3.0, 4.0, 7.0] {
        let one = heisenberg_lower_bound(&BoundQuery::new(d, 10, 1)).unwrap();
        let two = heisenberg_lower_bound(&BoundQuery::new(d, 10, 2)).unwrap();
        assert!(rel(one / two, 2f64.powf(2.0 / d)) < 1e-12);
        let one = fisher_lower_bound(&BoundQuery::new(d, 10, 1)).unwrap();
        let two = fisher_lower_bound(&BoundQuery::new(d, 10, 2)).unwrap();
        assert!(rel(one / two, 2f64.powf(2.0 / d)) < 1e-12);
    }
}

#[test]
fn angular_prefactor() {
    let base = fisher_constant(0, 0, 3.0).unwrap();
    assert!(rel(fisher_constant(1, 1, 3.0).unwrap(), base / 9.0) < 1e-12);
    assert!(rel(fisher_constant(2, 0, 3.0).unwrap(), base) < 1e-12);
    assert!(fisher_constant(1, 2, 3.0).is_err());
    assert!(fisher_constant(0, 0, 1.0).is_err());
}

#[test]
fn report_is_complete() {
    let reports = report_all(&BoundQuery::electrons(4)).unwrap();
    let names: Vec<_> = reports.iter().map(|r| r.constant_name.as_str()).collect();
    for want in ["K(d)", "F(alpha,d)", "A(alpha,d)", "A(2,d)", "C(l,m,d)", "heisenberg_bound", "fisher_bound"] {
        assert!(names.contains(&want), "{want} missing");
    }
    assert!(reports.iter().all(|r| r.value.is_finite() && r.value > 0.0));
}

proptest! {
    #[test]
    fn particle_number_scaling(n in 1u64..10_000, d in 1u32..12, alpha in 0.25f64..6.0) {
        let d = d as f64;
        let q1 = BoundQuery::new(d, 1, 2).with_alpha(alpha);
        let qn = BoundQuery::new(d, n, 2).with_alpha(alpha);
        let ratio = heisenberg_lower_bound(&qn).unwrap() / heisenberg_lower_bound(&q1).unwrap();
        let expected = (n as f64).powf(2.0 / d + 2.0 / alpha + 1.0);
        prop_assert!(rel(ratio, expected) < 1e-10);
    }

    #[test]
    fn fisher_scaling(n in 1u64..10_000, d in 3u32..12) {
        let d = d as f64;
        let ratio = fisher_lower_bound(&BoundQuery::new(d, n, 2)).unwrap()
            / fisher_lower_bound(&BoundQuery::new(d, 1, 2)).unwrap();
        prop_assert!(rel(ratio, (n as f64).powf(2.0 / d + 2.0)) < 1e-10);
    }

    #[test]
    fn finite_in_log_space(d in 1.0f64..20_000.0, alpha in 0.1f64..10.0) {
        prop_assert!(f_const(alpha, d).unwrap().is_finite());
        prop_assert!(a_general(alpha, d, 1.0).unwrap().is_finite());
    }
}

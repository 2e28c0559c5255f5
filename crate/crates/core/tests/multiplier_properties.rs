use std::sync::Arc;

use mdlab::family::FamilyPoint;
use mdlab::group::{Element, Group};
use mdlab::linalg::C64;
use mdlab::multiplier::{
    certificate_from_ub_rep, cstar_norm_finite, cyclic_in_free, folner_approximant, folner_certificate,
    fourier_norm_finite, l2_certificate, pairing, restrict, verify_certificate, FinitelySupportedVector, Multiplier,
    VerifyConfig,
};
use mdlab::schur::{schur_norm, SchurProblem};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| C64::new(re, im))
}

fn cyclic_pair() -> impl Strategy<Value = (usize, Vec<C64>, Vec<C64>)> {
    (2usize..8)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec(complex(), n), proptest::collection::vec(complex(), n)))
}

fn on_cyclic(values: &[C64]) -> Vec<(Element, C64)> {
    values.iter().enumerate().map(|(i, &v)| (Element::Index(i), v)).collect()
}

fn free_support() -> impl Strategy<Value = Vec<(usize, C64)>> {
    // indices into the radius-2 ball of F_2 (17 elements)
    proptest::collection::vec((0usize..17, complex()), 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pairing_is_dominated_by_dual_norms((n, phi_vals, g_vals) in cyclic_pair()) {
        let group = Arc::new(Group::cyclic(n).unwrap());
        let phi = Multiplier::finite(group.clone(), on_cyclic(&phi_vals), "phi").unwrap();
        let g = FinitelySupportedVector::new(group.clone(), on_cyclic(&g_vals)).unwrap();
        let lhs = pairing(&phi, &g).unwrap().norm();
        let rhs = fourier_norm_finite(&phi).unwrap() * cstar_norm_finite(&g).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12, "{lhs} > {rhs}");
        // pairing against a point mass is evaluation
        let delta = FinitelySupportedVector::delta(group.clone(), Element::Index(n - 1)).unwrap();
        prop_assert_eq!(pairing(&phi, &delta).unwrap(), phi_vals[n - 1]);
    }

    #[test]
    fn submatrix_and_restriction_monotonicity(entries in free_support(), keep in proptest::collection::vec(any::<bool>(), 17)) {
        let f2 = Arc::new(Group::free(2));
        let ball = f2.ball(2).unwrap();
        let phi = Multiplier::finite(f2.clone(), entries.iter().map(|&(i, v)| (ball.element(i).clone(), v)), "phi").unwrap();
        let full = schur_norm(&SchurProblem::new(phi.gram_matrix(ball.elements()).unwrap())).unwrap();
        let subset: Vec<Element> = ball.elements().iter().zip(&keep).filter(|(_, &k)| k).map(|(t, _)| t.clone()).collect();
        prop_assume!(!subset.is_empty());
        let sub = schur_norm(&SchurProblem::new(phi.gram_matrix(&subset).unwrap())).unwrap();
        prop_assert!(sub.lower <= full.upper + 1e-9, "{} > {}", sub.lower, full.upper);

        // pulling back along ℤ → F_2, n ↦ aⁿ, reproduces the Gram matrix on {e, a, a²}
        let z = Arc::new(Group::zn(1));
        let psi = restrict(&phi, z.clone(), cyclic_in_free(1));
        let zs: Vec<Element> = (0..3).map(|i| Element::Vector(vec![i])).collect();
        let words: Vec<Element> = ["e", "a", "aa"].iter().map(|s| f2.parse_element(s).unwrap()).collect();
        prop_assert_eq!(psi.gram_matrix(&zs).unwrap(), phi.gram_matrix(&words).unwrap());
        let restricted = schur_norm(&SchurProblem::new(psi.gram_matrix(&zs).unwrap())).unwrap();
        prop_assert!(restricted.lower <= full.upper + 1e-9);
    }

    #[test]
    fn folner_certificates_have_norm_one(n in 1usize..3, k in 0usize..4, d in 1usize..4) {
        let group = Arc::new(Group::zn(n));
        let reach = d;
        let cert = folner_certificate(group.clone(), k, reach, d).unwrap();
        prop_assert!((cert.bound() - 1.0).abs() < 1e-12, "bound {}", cert.bound());
        let phi = folner_approximant(group.clone(), k).unwrap();
        let report = verify_certificate(&cert, &phi, &group.ball(1).unwrap(), &VerifyConfig::default()).unwrap();
        prop_assert!(report.residual < 1e-12 && report.exhaustive);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn certificate_bounds_grow_with_degree(re in -0.8f64..0.8, im in -0.8f64..0.8) {
        prop_assume!(re * re + im * im < 0.64);
        let f2 = Arc::new(Group::free(2));
        let ball = Arc::new(f2.ball(4).unwrap());
        let fp = Arc::new(FamilyPoint::on_ball(f2, ball, C64::new(re, im)).unwrap());
        let b = fp.empirical_bound();
        prop_assert!(b >= 1.0 - 1e-12);
        let xi = fp.basepoint();
        let bounds: Vec<f64> = (1..5)
            .map(|d| certificate_from_ub_rep(fp.clone(), xi.clone(), xi.clone(), d).unwrap().bound())
            .collect();
        for w in bounds.windows(2) {
            prop_assert!(w[1] >= w[0]);
            prop_assert!((w[1] / w[0] - b).abs() < 1e-12);
        }
    }
}

#[test]
fn unitary_certificates_do_not_grow_with_degree() {
    let f2 = Arc::new(Group::free(2));
    let phi = Multiplier::finite(
        f2.clone(),
        [(f2.parse_element("a").unwrap(), C64::new(0.6, 0.0)), (f2.parse_element("Ab").unwrap(), C64::new(0.0, 0.8))],
        "phi",
    )
    .unwrap();
    let bounds: Vec<f64> = (1..4).map(|d| l2_certificate(&phi, 1, d).unwrap().bound()).collect();
    for b in bounds {
        assert!((b - 1.0).abs() < 1e-12);
    }
}

#[test]
fn fourier_norm_of_positive_definite_is_value_at_identity() {
    // φ = g * g̃ is positive definite on ℤ/6, so ‖φ‖_B = φ(e)
    let group = Arc::new(Group::cyclic(6).unwrap());
    let g = [1.0, -0.5, 0.25, 0.0, 2.0, 0.5];
    let vals: Vec<(Element, C64)> = (0..6)
        .map(|t| {
            let v: f64 = (0..6).map(|s| g[(s + t) % 6] * g[s]).sum();
            (Element::Index(t), C64::new(v, 0.0))
        })
        .collect();
    let phi = Multiplier::finite(group, vals.clone(), "gg*").unwrap();
    let norm = fourier_norm_finite(&phi).unwrap();
    assert!((norm - vals[0].1.re).abs() < 1e-12, "{norm}");
}

use mockmaass::lattice::presets::{cohen_cosets, nontrivial_cosets};
use mockmaass::lattice::TParam;
use mockmaass::specfun::QuadratureSpec;
use mockmaass::thetaseries::{siegel_theta, theta_11, vartheta_fourier, vartheta_hat_plus, vartheta_hat_quadrature, EvalPoint, Tau};
use proptest::prelude::*;

fn spec() -> QuadratureSpec {
    QuadratureSpec { abs_tol: 1e-12, rel_tol: 1e-12, max_depth: 60 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn unfolding_at_random_points(u in -0.5f64..0.5, v in 0.6f64..1.6, i in 0usize..2) {
        let c = &nontrivial_cosets()[i];
        let tau = Tau::new(u, v).unwrap();
        let el = TParam::from_elem(&c.lattice().eps_l().eps_l).unwrap();
        let q = vartheta_hat_quadrature(c, tau, 1.0, el.value(), &spec()).unwrap().value;
        let f = vartheta_fourier(c, tau, &TParam::one(6), &el, 1e-13).unwrap().value;
        prop_assert!((q - f).norm() < 1e-8, "{q} {f}");
    }

    #[test]
    fn harmonic_part_matches_quadrature_on_maass_cosets(u in -0.5f64..0.5, v in 0.6f64..1.6, i in 0usize..4) {
        // theta^(1,1) vanishes at both ends, so vartheta^ has no non-holomorphic correction
        let c = &cohen_cosets()[i];
        let tau = Tau::new(u, v).unwrap();
        let eps = TParam::from_elem(&c.lattice().field().totally_positive_unit()).unwrap();
        let q = vartheta_hat_quadrature(c, tau, 1.0, eps.value(), &spec()).unwrap().value;
        let p = vartheta_hat_plus(c, tau, &TParam::one(6), &eps, 1e-13).unwrap().value;
        prop_assert!((q - p).norm() < 1e-8, "{q} {p}");
        for t in [1.0, eps.value()] {
            prop_assert!(theta_11(c, &EvalPoint::new(u, v, t).unwrap(), 1e-15).unwrap().value.norm() < 1e-12);
        }
    }

    #[test]
    fn theta_is_periodic_in_t(u in -0.5f64..0.5, v in 0.5f64..2.0, t in 0.5f64..3.0) {
        let c = &nontrivial_cosets()[0];
        let el = c.lattice().eps_l().eps_l.to_f64();
        let a = siegel_theta(c, &EvalPoint::new(u, v, t).unwrap(), 1e-14).unwrap().value;
        let b = siegel_theta(c, &EvalPoint::new(u, v, t * el).unwrap(), 1e-14).unwrap().value;
        prop_assert!((a - b).norm() < 1e-9 * a.norm().max(1.0));
    }
}

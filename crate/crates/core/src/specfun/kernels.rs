use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

use super::bessel::bessel_k0_incomplete;
use super::quadrature::{adaptive_simpson, QuadResult, QuadratureSpec};

/// B_1(x) = frac(x) - 1/2, and 0 at integers.
pub fn periodic_bernoulli_b1(x: f64) -> f64 {
    let f = x - x.floor();
    if f == 0.0 {
        0.0
    } else {
        f - 0.5
    }
}

pub fn periodic_bernoulli_b1_exact(x: &BigRational) -> BigRational {
    let f = x - x.floor();
    if f.is_zero() {
        f
    } else {
        f - BigRational::new(1.into(), 2.into())
    }
}

// exp(-pi (w1^2 e^{-2nu} + w2^2 e^{2nu})) = e^{-2 pi Q0(w)} e^{-4 pi (w_t^-)^2} at t = e^nu
pub(crate) fn gauss_nu(w: (f64, f64), nu: f64) -> f64 {
    let e = (2.0 * nu).exp();
    (-PI * (w.0 * w.0 / e + w.1 * w.1 * e)).exp()
}

fn check_anisotropic(w: (f64, f64)) -> Result<()> {
    if w.0 == 0.0 || w.1 == 0.0 {
        return Err(Error::InvalidParameter(format!("beta kernel needs w1 w2 != 0, got ({}, {})", w.0, w.1)));
    }
    Ok(())
}

/// beta_{t0}(w) = K_0(2 pi |w1 w2|; log(t0^2 |w2/w1|)) / 2.
pub fn beta_kernel(w: (f64, f64), t0: f64) -> Result<f64> {
    check_anisotropic(w)?;
    if !(t0 > 0.0) {
        return Err(Error::InvalidParameter(format!("t0 must be positive, got {t0}")));
    }
    let a = 2.0 * t0.ln() + (w.1 / w.0).abs().ln();
    Ok(0.5 * bessel_k0_incomplete(2.0 * PI * (w.0 * w.1).abs(), a)?)
}

/// beta_{t0}(w) from its defining integral over t in (t0, inf) or (0, t0).
pub fn beta_kernel_quadrature(w: (f64, f64), t0: f64, spec: &QuadratureSpec) -> Result<QuadResult<f64>> {
    check_anisotropic(w)?;
    let nu0 = t0.ln();
    let minus = 0.5 * (-w.0 / t0 + w.1 * t0);
    let plus = 0.5 * (w.0 / t0 + w.1 * t0);
    let s = minus * plus;
    if s == 0.0 {
        return Ok(QuadResult { value: 0.0, error: 0.0, evaluations: 0 });
    }
    // the integrand is below e^-800 once pi w2^2 e^{2nu} > 800 (resp. w1 for nu -> -inf)
    let f = |nu: f64| gauss_nu(w, nu);
    if s > 0.0 {
        let hi = (0.5 * (800.0 / (PI * w.1 * w.1)).ln()).max(nu0) + 1.0;
        Ok(adaptive_simpson(f, nu0, hi, spec))
    } else {
        let lo = (-0.5 * (800.0 / (PI * w.0 * w.0)).ln()).min(nu0) - 1.0;
        let r = adaptive_simpson(f, lo, nu0, spec);
        Ok(QuadResult { value: -r.value, ..r })
    }
}

/// beta~_{t0}(w) = int_{t0}^{t0 eps_L} e^{-pi(w1^2/t^2 + w2^2 t^2)} log t dt/t.
pub fn beta_tilde_kernel(w: (f64, f64), t0: f64, eps_l: f64, spec: &QuadratureSpec) -> Result<QuadResult<f64>> {
    if !(t0 > 0.0) || !(eps_l > 1.0) {
        return Err(Error::InvalidParameter(format!("need t0 > 0 and eps_L > 1, got {t0}, {eps_l}")));
    }
    let nu0 = t0.ln();
    let nu1 = nu0 + eps_l.ln();
    if w.0 == 0.0 && w.1 == 0.0 {
        return Ok(QuadResult { value: 0.5 * (nu1 * nu1 - nu0 * nu0), error: 0.0, evaluations: 0 });
    }
    Ok(adaptive_simpson(|nu: f64| gauss_nu(w, nu) * nu, nu0, nu1, spec))
}

/// Sign form of a_lambda(t1, t2) through the projections at t1 and t2.
pub fn a_sign_form(w: (f64, f64), t1: f64, t2: f64) -> f64 {
    let q = w.0 * w.1;
    let comp = |t: f64| {
        if q < 0.0 {
            0.5 * (w.0 / t + w.1 * t)
        } else {
            0.5 * (-w.0 / t + w.1 * t)
        }
    };
    let sg = |x: f64| if x == 0.0 { 0.0 } else { x.signum() };
    0.5 * (1.0 - sg(comp(t1)) * sg(comp(t2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel::bessel_k0;
    use crate::specfun::fd::{derivative, second_derivative};
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn b1_values() {
        assert_eq!(periodic_bernoulli_b1(0.0), 0.0);
        assert_eq!(periodic_bernoulli_b1(0.25), -0.25);
        assert_eq!(periodic_bernoulli_b1(-0.25), 0.25);
        assert_eq!(periodic_bernoulli_b1_exact(&rat(7, 4)), rat(1, 4));
        assert_eq!(periodic_bernoulli_b1_exact(&rat(-3, 1)), rat(0, 1));
    }

    #[test]
    fn beta_boundary_and_known() {
        // t0^2 |w2/w1| = 1
        assert_eq!(beta_kernel((4.0, 1.0), 2.0).unwrap(), 0.0);
        let b = beta_kernel((1.0, 1.0), 2.0).unwrap();
        let k = bessel_k0_incomplete(2.0 * PI, 4f64.ln()).unwrap();
        assert_eq!(b, 0.5 * k);
        let q = beta_kernel_quadrature((1.0, 1.0), 2.0, &QuadratureSpec::default()).unwrap();
        assert!((q.value - b).abs() < 1e-12);
        assert!(beta_kernel((0.0, 1.0), 1.0).is_err());
    }

    #[test]
    fn beta_tilde_zero_vector() {
        let t0: f64 = 1.7;
        let e: f64 = 49.0 + 20.0 * 6f64.sqrt();
        let r = beta_tilde_kernel((0.0, 0.0), t0, e, &QuadratureSpec::default()).unwrap().value;
        let expect = 0.5 * ((t0 * e).ln().powi(2) - t0.ln().powi(2));
        assert!((r - expect).abs() < 1e-13);
    }

    #[test]
    fn beta_differential_relation() {
        // (v d_v^2 + d_v - 4 pi^2 Q^2 v) beta(lambda sqrt v) = 2 pi l+ l- exp(-2 pi v (l+^2 + l-^2))
        let lam = (1.3, -0.4);
        let t0 = 1.2;
        let q = lam.0 * lam.1;
        let lp = 0.5 * (lam.0 / t0 + lam.1 * t0);
        let lm = 0.5 * (-lam.0 / t0 + lam.1 * t0);
        for &v in &[0.5, 1.0, 2.0] {
            let f = |v: f64| beta_kernel((lam.0 * v.sqrt(), lam.1 * v.sqrt()), t0).unwrap();
            let h = 1e-2 * v;
            let lhs = v * second_derivative(&f, v, h) + derivative(&f, v, h) - 4.0 * PI * PI * q * q * v * f(v);
            let rhs = 2.0 * PI * lp * lm * (-2.0 * PI * v * (lp * lp + lm * lm)).exp();
            assert!(((lhs - rhs) / rhs).abs() < 1e-5, "v = {v}: {lhs} vs {rhs}");
        }
    }

    fn window() -> impl Strategy<Value = ((f64, f64), f64, f64)> {
        (0.1f64..3.0, 0.1f64..3.0, any::<bool>(), 0.3f64..2.0, 1.05f64..4.0)
            .prop_map(|(a, b, neg, t1, r)| ((a, if neg { -b } else { b }), t1, t1 * r))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn b1_odd_periodic(x in -50.0f64..50.0, n in -20i32..20) {
            let s = periodic_bernoulli_b1(x + n as f64) + periodic_bernoulli_b1(-x);
            prop_assert!(s.abs() < 1e-9);
        }

        #[test]
        fn beta_closed_form_matches_definition(((w1, w2), t0, _) in window()) {
            let c = beta_kernel((w1, w2), t0).unwrap();
            let q = beta_kernel_quadrature((w1, w2), t0, &QuadratureSpec::default()).unwrap();
            prop_assert!((c - q.value).abs() < 1e-11, "{} vs {}", c, q.value);
        }

        #[test]
        fn mock_maass_check(((w1, w2), t1, t2) in window()) {
            let lhs = adaptive_simpson(|nu: f64| gauss_nu((w1, w2), nu), t1.ln(), t2.ln(), &QuadratureSpec::default()).value;
            let a = a_sign_form((w1, w2), t1, t2);
            let rhs = a * bessel_k0(2.0 * PI * (w1 * w2).abs()).unwrap()
                + beta_kernel((w1, w2), t1).unwrap() - beta_kernel((w1, w2), t2).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10, "{} vs {}", lhs, rhs);
        }
    }
}

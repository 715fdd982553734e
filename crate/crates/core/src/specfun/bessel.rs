use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::quadrature::{adaptive_simpson, QuadratureSpec};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// K_0(x), with K_0(0) = 0.
pub fn bessel_k0(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::InvalidParameter(format!("K0 needs x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(if x <= 2.0 { k0_series(x) } else { k0_steed(x) })
}

// -(log(x/2) + gamma) I_0(x) + sum_k (x^2/4)^k / (k!)^2 H_k
fn k0_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut total = -lg;
    for k in 1..200 {
        let kf = k as f64;
        term *= y / (kf * kf);
        harmonic += 1.0 / kf;
        let add = term * (harmonic - lg);
        total += add;
        if term * (harmonic + lg.abs()) < 1e-17 * total.abs() {
            break;
        }
    }
    total
}

// Steed's method for the second continued fraction (Temme), order zero.
fn k0_steed(x: f64) -> f64 {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..100_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    (PI / (2.0 * x)).sqrt() * (-x).exp() / s
}

// beyond this exponent the remaining integrand is below e^-60 of its peak
const TAIL_EXPONENT: f64 = 60.0;

/// K_0(x; a) = sgn(a) * int_{|a|}^inf exp(-x cosh T) dT.
pub fn bessel_k0_incomplete(x: f64, a: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!("incomplete K0 needs x > 0, got {x}")));
    }
    if a == 0.0 || a.is_nan() {
        return Ok(0.0);
    }
    let s = a.abs();
    let lead = x * s.cosh();
    if lead > 745.0 {
        return Ok(0.0);
    }
    // shift T = |a| + s; cosh(|a|+s) - cosh|a| = 2 sinh(|a| + s/2) sinh(s/2)
    let s_max = ((s.cosh() + TAIL_EXPONENT / x).acosh() - s).max(1e-3);
    let spec = QuadratureSpec { abs_tol: 1e-300, rel_tol: 1e-14, max_depth: 60 };
    let r = adaptive_simpson(|t: f64| (-2.0 * x * (s + 0.5 * t).sinh() * (0.5 * t).sinh()).exp(), 0.0, s_max, &spec);
    Ok(a.signum() * (-lead).exp() * r.value)
}

/// Upper bound for |K_0(x; a)|: the smaller of the sinh(a/2) bound and
/// exp(-x cosh a) sqrt(pi/(2x)).
pub fn k0_incomplete_bound(x: f64, a: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let s = a.abs();
    let generic = (-x * s.cosh()).exp() * (PI / (2.0 * x)).sqrt();
    let b = (0.5 * s).sinh();
    let half_angle = (-x * (1.0 + 2.0 * b * b)).exp() / (x * b);
    generic.min(half_angle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::fd::{derivative, second_derivative};
    use proptest::prelude::*;

    // int_0^inf by the trapezoid rule (spectrally accurate: the integrand is even in T),
    // minus int_0^from by composite Simpson on a fine grid
    fn k0_trapezoid(x: f64, from: f64) -> f64 {
        let h: f64 = 1e-3;
        let mut full = 0.5 * (-x).exp();
        let mut t = h;
        while x * t.cosh() < 745.0 {
            full += (-x * t.cosh()).exp();
            t += h;
        }
        let n = 20_000;
        let hs = from / n as f64;
        let mut head = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            head += w * (-x * (i as f64 * hs).cosh()).exp();
        }
        full * h - head * hs / 3.0
    }

    #[test]
    fn k0_matches_integral() {
        for &x in &[0.01, 0.1, 0.5, 1.0, 1.9, 2.0, 2.1, 3.0, 7.5, 20.0, 50.0] {
            let k = bessel_k0(x).unwrap();
            let o = k0_trapezoid(x, 0.0);
            assert!(((k - o) / o).abs() < 1e-12, "x = {x}: {k} vs {o}");
        }
    }

    #[test]
    fn k0_conventions() {
        assert_eq!(bessel_k0(0.0).unwrap(), 0.0);
        assert!(bessel_k0(-1.0).is_err());
        let x = 50.0;
        let asym = (PI / (2.0 * x)).sqrt() * (-x).exp();
        assert!((bessel_k0(x).unwrap() / asym - 1.0).abs() < 0.01);
    }

    #[test]
    fn k0_ode() {
        let mut x = 0.5;
        while x <= 20.0 {
            let h = 2e-2 * x;
            let f = |y: f64| bessel_k0(y).unwrap();
            let d1 = derivative(&f, x, h);
            let d2 = second_derivative(&f, x, h);
            let r = (x * d2 + d1 - x * f(x)) / (x * f(x));
            assert!(r.abs() < 1e-6, "x = {x}: {r}");
            x += 0.5;
        }
    }

    #[test]
    fn incomplete_matches_integral() {
        for &(x, a) in &[(0.3, 0.2), (1.0, 1.0), (5.0, 0.01), (2.0, -0.7), (30.0, 0.5)] {
            let k = bessel_k0_incomplete(x, a).unwrap();
            let o = a.signum() * k0_trapezoid(x, a.abs());
            assert!((k - o).abs() <= 1e-12 * o.abs().max(1e-300), "({x},{a}): {k} vs {o}");
        }
        assert_eq!(bessel_k0_incomplete(1.0, 0.0).unwrap(), 0.0);
        assert!(bessel_k0_incomplete(0.0, 1.0).is_err());
    }

    #[test]
    fn incomplete_ratio_decreases() {
        let a = 0.3;
        let r: Vec<f64> = [10.0, 20.0, 40.0]
            .iter()
            .map(|&x| bessel_k0_incomplete(x, a).unwrap() / bessel_k0(x).unwrap())
            .collect();
        assert!(r[0] > r[1] && r[1] > r[2] && r[2] > 0.0);
    }

    proptest! {
        #[test]
        fn incomplete_antisymmetric(x in 0.05f64..30.0, a in 0.001f64..3.0) {
            prop_assert_eq!(bessel_k0_incomplete(x, -a).unwrap(), -bessel_k0_incomplete(x, a).unwrap());
        }

        #[test]
        fn incomplete_bounded(x in 0.05f64..30.0, a in 0.001f64..3.0) {
            let k = bessel_k0_incomplete(x, a).unwrap();
            let b = (0.5 * a).sinh();
            prop_assert!(k < (-x * (1.0 + 2.0 * b * b)).exp() / (x * b));
            prop_assert!(k <= k0_incomplete_bound(x, a) * (1.0 + 1e-12));
            prop_assert!(k <= bessel_k0(x).unwrap() * (1.0 + 1e-12));
        }
    }
}

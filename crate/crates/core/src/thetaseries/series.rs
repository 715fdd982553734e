use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::coeffs::{a_coefficient_exact, a_coefficient_f64, c_tilde, CoefficientValue, LogBasis};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_orbits, point, Coset, TParam};
use crate::qfield::rat;
use crate::specfun::{adaptive_simpson, bessel_k0, bessel_k0_incomplete, QuadratureSpec};

use super::points::{e, gaussian_points, orbit_cutoff, window_points, Geometry, KahanSum};
use super::{EvalPoint, SeriesValue, Tau, WeightPolynomial};

fn c(r: f64) -> Complex64 {
    Complex64::new(r, 0.0)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// theta(tau, t) = sqrt(v) sum e(Q u) exp(-pi v (lambda_1^2/t^2 + lambda_2^2 t^2)).
pub fn siegel_theta(coset: &Coset, p: &EvalPoint, tol: f64) -> Result<SeriesValue> {
    check_tol(tol)?;
    let geom = Geometry::new(coset);
    let sv = p.v.sqrt();
    let cut = gaussian_points(coset, &geom, p.t, p.t, PI * p.v, tol / sv)?;
    let mut s = KahanSum::default();
    for q in &cut.points {
        s.add(e(q.q * p.u) * (-PI * p.v * q.qt(p.t)).exp());
    }
    Ok(SeriesValue { value: s.value() * sv, tail_bound: sv * cut.tail, quad_error: 0.0 })
}

/// theta^{(1,1)}(tau, t) = v^{3/2} sum lambda_t^+ lambda_t^- e(Q u) exp(-pi v qt).
pub fn theta_11(coset: &Coset, p: &EvalPoint, tol: f64) -> Result<SeriesValue> {
    check_tol(tol)?;
    let geom = Geometry::new(coset);
    let pref = p.v.powf(1.5);
    let cc = PI * p.v;
    // |l+ l-| <= qt/4 and qt exp(-c qt) <= 2/(e c) exp(-c qt/2)
    let scale = pref * 0.25 * 2.0 / (std::f64::consts::E * cc);
    let cut = gaussian_points(coset, &geom, p.t, p.t, 0.5 * cc, tol / scale)?;
    let mut s = KahanSum::default();
    for q in &cut.points {
        s.add(e(q.q * p.u) * (q.plus_minus(p.t) * (-cc * q.qt(p.t)).exp()));
    }
    Ok(SeriesValue { value: s.value() * pref, tail_bound: scale * cut.tail, quad_error: 0.0 })
}

// int_{nu1}^{nu2} theta(tau, e^nu) w(nu) dnu
fn integrate_theta<W: Fn(f64) -> Complex64>(
    coset: &Coset,
    tau: Tau,
    nu1: f64,
    nu2: f64,
    weight: W,
    weight_sup: f64,
    spec: &QuadratureSpec,
) -> Result<SeriesValue> {
    spec.validate()?;
    if nu1 == nu2 {
        return Ok(SeriesValue { value: c(0.0), tail_bound: 0.0, quad_error: 0.0 });
    }
    if nu2 < nu1 {
        return Err(Error::InvalidParameter("need t1 <= t2".into()));
    }
    let geom = Geometry::new(coset);
    let sv = tau.v.sqrt();
    let width = nu2 - nu1;
    let pref = sv * width * weight_sup.max(1e-300);
    let cut = gaussian_points(coset, &geom, nu1.exp(), nu2.exp(), PI * tau.v, spec.abs_tol / pref)?;
    let phases: Vec<Complex64> = cut.points.iter().map(|q| e(q.q * tau.u) * sv).collect();
    let cc = PI * tau.v;
    let f = |nu: f64| {
        let t = nu.exp();
        let mut s = KahanSum::default();
        for (q, ph) in cut.points.iter().zip(&phases) {
            s.add(*ph * (-cc * q.qt(t)).exp());
        }
        s.value() * weight(nu)
    };
    let r = adaptive_simpson(f, nu1, nu2, spec);
    Ok(SeriesValue { value: r.value, tail_bound: pref * cut.tail, quad_error: r.error })
}

fn log_bounds(t1: f64, t2: f64) -> Result<(f64, f64)> {
    if !(t1 > 0.0 && t2 >= t1) {
        return Err(Error::InvalidParameter(format!("need 0 < t1 <= t2, got {t1}, {t2}")));
    }
    Ok((t1.ln(), t2.ln()))
}

/// Integral of theta(tau, t) dt/t over [t1, t2].
pub fn vartheta_hat_quadrature(coset: &Coset, tau: Tau, t1: f64, t2: f64, spec: &QuadratureSpec) -> Result<SeriesValue> {
    let (a, b) = log_bounds(t1, t2)?;
    integrate_theta(coset, tau, a, b, |_| c(1.0), 1.0, spec)
}

/// Integral of theta(tau, e^nu) P(nu) dnu over [log t1, log t2].
pub fn vartheta_hat_p(
    coset: &Coset,
    tau: Tau,
    t1: f64,
    t2: f64,
    p: &WeightPolynomial,
    spec: &QuadratureSpec,
) -> Result<SeriesValue> {
    let (a, b) = log_bounds(t1, t2)?;
    integrate_theta(coset, tau, a, b, |nu| p.eval(nu), p.sup_on(a, b), spec)
}

/// Integral of theta(tau, t) log t dt/t over [t0, t0 eps_L].
pub fn vartheta_tilde(coset: &Coset, tau: Tau, t0: f64, spec: &QuadratureSpec) -> Result<SeriesValue> {
    let le = coset.lattice().eps_l().log();
    let (a, _) = log_bounds(t0, t0)?;
    integrate_theta(coset, tau, a, a + le, |nu| c(nu), a.abs().max((a + le).abs()), spec)
}

fn norm_bound(b: f64) -> BigRational {
    rat((b * 1000.0).ceil() as i64, 1000)
}

// sqrt(v) (sum_k coef_k e(Q_k u) K_0(2 pi |Q_k| v) + zero)
fn k0_sum(terms: &[(f64, f64)], zero: f64, tau: Tau, tail: f64) -> Result<SeriesValue> {
    let sv = tau.v.sqrt();
    let mut s = KahanSum::default();
    s.add(c(zero));
    for &(q, coef) in terms {
        if coef != 0.0 {
            s.add(e(q * tau.u) * (coef * bessel_k0(2.0 * PI * q.abs() * tau.v)?));
        }
    }
    Ok(SeriesValue { value: s.value() * sv, tail_bound: sv * tail, quad_error: 0.0 })
}

/// Power k >= 1 with t2/t1 = eps_L^k, decided exactly.
pub fn unit_power(coset: &Coset, t1: &TParam, t2: &TParam) -> Result<u64> {
    let eps = &coset.lattice().eps_l().eps_l;
    let ratio = t2.exact_square()?.checked_div(t1.exact_square()?)?;
    let est = ((t2.value() / t1.value()).ln() / eps.to_f64().ln()).round();
    if est < 1.0 || est > 1e6 {
        return Err(Error::NotUnitPower);
    }
    let k = est as u64;
    if eps.pow(2 * k as i64)? == ratio {
        Ok(k)
    } else {
        Err(Error::NotUnitPower)
    }
}

/// Unfolded form of the integral over [t1, t2] when t2/t1 = eps_L^k:
/// sqrt(v) k sum_{orbits} e(Q u) K_0(2 pi |Q| v), plus sqrt(v) log(t2/t1) when h is in L.
pub fn vartheta_fourier(coset: &Coset, tau: Tau, t1: &TParam, t2: &TParam, tol: f64) -> Result<SeriesValue> {
    check_tol(tol)?;
    let k = unit_power(coset, t1, t2)? as f64;
    let lat = coset.lattice();
    let el = lat.eps_l().eps_l.to_f64();
    let geom = Geometry::new(coset);
    let (b, tail) = orbit_cutoff(&geom, el, 1.0, tau.v, k, tol / tau.v.sqrt());
    let orbits = enumerate_orbits(coset, &TParam::one(lat.d()), &norm_bound(b))?;
    let mut zero = 0.0;
    let mut terms = Vec::with_capacity(orbits.len());
    for o in &orbits {
        if o.is_zero() {
            zero = (t2.value() / t1.value()).ln();
        } else {
            terms.push((o.q_value.to_f64().unwrap_or(f64::NAN), k));
        }
    }
    k0_sum(&terms, zero, tau, tail)
}

/// sqrt(v) sum_lambda a_lambda(t1, t2) e(Q u) K_0(2 pi |Q| v), with sqrt(v) log(t2/t1) for lambda = 0.
pub fn vartheta_hat_plus(coset: &Coset, tau: Tau, t1: &TParam, t2: &TParam, tol: f64) -> Result<SeriesValue> {
    check_tol(tol)?;
    let (t1f, t2f) = (t1.value(), t2.value());
    if !(t2f > t1f) {
        return Err(Error::InvalidParameter(format!("need t1 < t2, got {t1f}, {t2f}")));
    }
    let exact = t1.square().is_some() && t2.square().is_some();
    let geom = Geometry::new(coset);
    let (b, tail) = orbit_cutoff(&geom, t2f, 1.0 / t1f, tau.v, 1.0, tol / tau.v.sqrt());
    let pts = window_points(coset, &geom, t1f * t1f, t2f * t2f, b)?;
    let mut zero = 0.0;
    let mut terms = Vec::with_capacity(pts.len());
    for p in &pts {
        if p.is_zero() {
            zero = (t2f / t1f).ln();
            continue;
        }
        let a = if exact {
            a_coefficient_exact(&point(coset, p.m, p.n), t1, t2)?.to_f64().unwrap_or(f64::NAN)
        } else {
            a_coefficient_f64((p.l1, p.l2), t1f, t2f)?
        };
        terms.push((p.q, a));
    }
    k0_sum(&terms, zero, tau, tail)
}

/// sqrt(v) sum_{lambda != 0} beta_{t0}(lambda sqrt v) e(Q u).
pub fn phi_c0(coset: &Coset, tau: Tau, t0: f64, tol: f64) -> Result<SeriesValue> {
    check_tol(tol)?;
    if !(t0 > 0.0) {
        return Err(Error::InvalidParameter(format!("t0 must be positive, got {t0}")));
    }
    let geom = Geometry::new(coset);
    let sv = tau.v.sqrt();
    // |beta| <= (1/2) (4 |Q| v)^{-1/2} exp(-pi v q_{t0}) and |Q| >= q_min
    let pref = sv * 0.5 / (4.0 * geom.q_min() * tau.v).sqrt();
    let cut = gaussian_points(coset, &geom, t0, t0, PI * tau.v, tol / pref)?;
    let mut s = KahanSum::default();
    let lt = 2.0 * t0.ln();
    for p in &cut.points {
        if p.is_zero() {
            continue;
        }
        let a = lt + (p.l2 / p.l1).abs().ln();
        let beta = 0.5 * bessel_k0_incomplete(2.0 * PI * p.q.abs() * tau.v, a)?;
        s.add(e(p.q * tau.u) * beta);
    }
    Ok(SeriesValue { value: s.value() * sv, tail_bound: pref * cut.tail, quad_error: 0.0 })
}

/// sqrt(v) sum_{orbits} c~_{t0} e(Q u) K_0(2 pi |Q| v), with sqrt(v) c~_{t0}(0) for the zero orbit.
pub fn vartheta_tilde_plus(coset: &Coset, tau: Tau, t0: &TParam, tol: f64) -> Result<SeriesValue> {
    check_tol(tol)?;
    let lat = coset.lattice();
    let basis = LogBasis::of(lat);
    let el = basis.eps_l.to_f64();
    let t0f = t0.value();
    let cmax = t0f.ln().abs().max((t0f * el).ln().abs());
    let geom = Geometry::new(coset);
    let (b, tail) = orbit_cutoff(&geom, t0f * el, 1.0 / t0f, tau.v, cmax, tol / tau.v.sqrt());
    let orbits = enumerate_orbits(coset, t0, &norm_bound(b))?;
    let mut zero = 0.0;
    let mut terms = Vec::with_capacity(orbits.len());
    for o in &orbits {
        let v = c_tilde(&o, &basis)?;
        if o.is_zero() {
            zero = v.to_f64();
        } else {
            terms.push((o.q_value.to_f64().unwrap_or(f64::NAN), v.to_f64()));
        }
    }
    k0_sum(&terms, zero, tau, tail)
}

/// Exact c~ values for the orbits used by vartheta_tilde_plus.
pub fn vartheta_tilde_plus_coefficients(coset: &Coset, t0: &TParam, norm_bound: &BigRational) -> Result<Vec<(BigRational, CoefficientValue)>> {
    let basis = LogBasis::of(coset.lattice());
    enumerate_orbits(coset, t0, norm_bound)?
        .into_iter()
        .map(|o| Ok((o.q_value.clone(), c_tilde(&o, &basis)?)))
        .collect()
}

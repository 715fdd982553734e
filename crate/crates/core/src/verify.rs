//! Numerical checks of the identities satisfied by the theta series, reported as JSON lines.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::coeffs::{aggregate_by_index, c_tilde, c_tilde_table, telescoping_check, LogBasis};
use crate::cohen;
use crate::error::{Error, Result};
use crate::lattice::presets::Preset;
use crate::lattice::{enumerate_orbits, reduce, Coset, TParam};
use crate::qfield::{rat, QuadElem};
use crate::specfun::fd::second_derivative;
use crate::specfun::kernels::{a_sign_form, gauss_nu};
use crate::specfun::{
    adaptive_simpson, bessel_k0, bessel_k0_incomplete, beta_kernel, beta_tilde_kernel, eta_cubed, QSeries, QuadratureSpec,
};
use crate::thetaseries::{
    phi_c0, siegel_theta, theta_11, vartheta_fourier, vartheta_hat_p, vartheta_hat_plus, vartheta_hat_quadrature, vartheta_tilde,
    vartheta_tilde_plus, EvalPoint, Tau, WeightPolynomial,
};

pub const POINTWISE_TOL: f64 = 1e-8;
pub const FD_TOL: f64 = 1e-4;
pub const VANISHING_TOL: f64 = 1e-12;
pub const SPECFUN_TOL: f64 = 1e-10;
/// Truncation target handed to the series inside checks.
pub const SERIES_TOL: f64 = 1e-13;

/// Fixed sample points in the upper half plane.
pub const SAMPLE_TAUS: [(f64, f64); 5] = [(0.1, 0.8), (0.2, 0.9), (0.3, 0.7), (-0.17, 1.1), (0.41, 0.65)];
/// Sample points with v >= 1 for comparisons against truncated q-expansions.
pub const LARGE_V_TAUS: [(f64, f64); 3] = [(0.13, 1.1), (0.3, 1.0), (-0.2, 1.5)];
pub const RNG_SEED: u64 = 0x6d6f636b;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub inputs: Value,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckReport {
    pub fn new(check_id: impl Into<String>, inputs: Value, residual: f64, tolerance: f64) -> Self {
        CheckReport { check_id: check_id.into(), inputs, residual, tolerance, passed: residual <= tolerance }
    }

    fn failed(check_id: impl Into<String>, inputs: Value, err: &Error) -> Self {
        let mut inputs = inputs;
        if let Value::Object(m) = &mut inputs {
            m.insert("error".into(), Value::String(err.to_string()));
        }
        CheckReport { check_id: check_id.into(), inputs, residual: f64::NAN, tolerance: 0.0, passed: false }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self.passed = self.residual <= tol;
        self
    }

    pub fn to_json_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

fn tau_of((u, v): (f64, f64)) -> Tau {
    Tau { u, v }
}

fn coset_json(c: &Coset) -> Value {
    json!(c.h().to_string())
}

fn fd_spec() -> QuadratureSpec {
    QuadratureSpec { abs_tol: 1e-14, rel_tol: 1e-14, max_depth: 60 }
}

fn quad_spec() -> QuadratureSpec {
    QuadratureSpec { abs_tol: 1e-12, rel_tol: 1e-12, max_depth: 60 }
}

/// Step for the differences in u and v.
pub fn fd_step(v: f64) -> f64 {
    1e-3 * v
}

// FD-scaled residual: absolute for values below 1, relative above
fn scaled(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / rhs.norm().max(1.0)
}

/// Delta~ f = v^2 (f_uu + f_vv) + f/4 by central differences.
pub fn tilde_laplacian<F: Fn(Tau) -> Result<Complex64>>(f: F, tau: Tau, h: f64) -> Result<Complex64> {
    let err = RefCell::new(None);
    let g = |t: Tau| match f(t) {
        Ok(z) => z,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            Complex64::new(f64::NAN, f64::NAN)
        }
    };
    let fuu = second_derivative(&|u: f64| g(Tau { u, v: tau.v }), tau.u, h);
    let fvv = second_derivative(&|v: f64| g(Tau { u: tau.u, v }), tau.v, h);
    let f0 = g(tau);
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok((fuu + fvv) * (tau.v * tau.v) + f0 * 0.25)
}

fn theta(c: &Coset, tau: Tau, t: f64) -> Result<Complex64> {
    Ok(siegel_theta(c, &EvalPoint::new(tau.u, tau.v, t)?, SERIES_TOL)?.value)
}

fn theta11(c: &Coset, tau: Tau, t: f64) -> Result<Complex64> {
    Ok(theta_11(c, &EvalPoint::new(tau.u, tau.v, t)?, SERIES_TOL)?.value)
}

fn eps_of(c: &Coset) -> Result<TParam> {
    TParam::from_elem(&c.lattice().field().totally_positive_unit())
}

fn log_eps_l(c: &Coset) -> f64 {
    c.lattice().eps_l().log()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LaplacianSeries {
    Phi,
    VarthetaHat,
    VarthetaTilde,
}

impl FromStr for LaplacianSeries {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "phi" => Ok(LaplacianSeries::Phi),
            "vartheta_hat" => Ok(LaplacianSeries::VarthetaHat),
            "vartheta_tilde" => Ok(LaplacianSeries::VarthetaTilde),
            _ => Err(Error::Unknown { kind: "series", name: s.to_string() }),
        }
    }
}

fn param(params: &[f64], i: usize) -> Result<f64> {
    params.get(i).copied().ok_or_else(|| Error::InvalidParameter(format!("missing parameter {}", i + 1)))
}

/// Delta~ of phi, vartheta^ or vartheta~ against the theta^{(1,1)} side.
pub fn check_laplacian(series_id: &str, coset: &Coset, tau: Tau, params: &[f64], tol: f64) -> Result<CheckReport> {
    let which = LaplacianSeries::from_str(series_id)?;
    let h = fd_step(tau.v);
    let spec = fd_spec();
    let (lhs, rhs) = match which {
        LaplacianSeries::Phi => {
            let t0 = param(params, 0)?;
            let lhs = tilde_laplacian(|z| Ok(phi_c0(coset, z, t0, 1e-15)?.value), tau, h)?;
            (lhs, theta11(coset, tau, t0)? * (2.0 * PI))
        }
        LaplacianSeries::VarthetaHat => {
            let (t1, t2) = (param(params, 0)?, param(params, 1)?);
            let lhs = tilde_laplacian(|z| Ok(vartheta_hat_quadrature(coset, z, t1, t2, &spec)?.value), tau, h)?;
            (lhs, (theta11(coset, tau, t1)? - theta11(coset, tau, t2)?) * (2.0 * PI))
        }
        LaplacianSeries::VarthetaTilde => {
            let t0 = param(params, 0)?;
            let lhs = tilde_laplacian(|z| Ok(vartheta_tilde(coset, z, t0, &spec)?.value), tau, h)?;
            (lhs, theta11(coset, tau, t0)? * (-2.0 * PI * log_eps_l(coset)))
        }
    };
    let inputs = json!({"series": series_id, "coset": coset_json(coset), "tau": [tau.u, tau.v], "params": params});
    Ok(CheckReport::new(format!("laplacian:{series_id}"), inputs, scaled(lhs, rhs), tol))
}

/// 4 Delta~ theta(tau, t) = (t d/dt)^2 theta(tau, t), both sides by differences.
pub fn check_kernel_pde(coset: &Coset, tau: Tau, t: f64, tol: f64) -> Result<CheckReport> {
    let lhs = tilde_laplacian(|z| theta(coset, z, t), tau, fd_step(tau.v))? * 4.0;
    let err = RefCell::new(None);
    let g = |nu: f64| {
        theta(coset, tau, nu.exp()).unwrap_or_else(|e| {
            err.borrow_mut().get_or_insert(e);
            Complex64::new(f64::NAN, 0.0)
        })
    };
    let rhs = second_derivative(&g, t.ln(), 1e-3);
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    let inputs = json!({"coset": coset_json(coset), "tau": [tau.u, tau.v], "t": t});
    Ok(CheckReport::new("kernel-pde", inputs, scaled(lhs, rhs), tol))
}

fn poly_name(p: &WeightPolynomial) -> Value {
    json!(p.coefficients().iter().map(|c| [c.re, c.im]).collect::<Vec<_>>())
}

/// 4 Delta~ vartheta^(tau; P) against the boundary terms, with t d/dt theta = -8 pi theta^{(1,1)}.
pub fn check_tdp(coset: &Coset, tau: Tau, t1: f64, t2: f64, p: &WeightPolynomial, tol: f64) -> Result<CheckReport> {
    if p.degree() > 3 {
        return Err(Error::InvalidParameter(format!("weight degree {} exceeds 3", p.degree())));
    }
    let spec = fd_spec();
    let lhs = tilde_laplacian(|z| Ok(vartheta_hat_p(coset, z, t1, t2, p, &spec)?.value), tau, fd_step(tau.v))? * 4.0;
    let (n1, n2) = (t1.ln(), t2.ln());
    let dp = p.derivative();
    let d2p = dp.derivative();
    let tdt = |t: f64| -> Result<Complex64> { Ok(theta11(coset, tau, t)? * (-8.0 * PI)) };
    let rhs = tdt(t2)? * p.eval(n2) - tdt(t1)? * p.eval(n1) - (theta(coset, tau, t2)? * dp.eval(n2) - theta(coset, tau, t1)? * dp.eval(n1))
        + vartheta_hat_p(coset, tau, t1, t2, &d2p, &spec)?.value;
    let inputs = json!({"coset": coset_json(coset), "tau": [tau.u, tau.v], "t1": t1, "t2": t2, "P": poly_name(p)});
    Ok(CheckReport::new(format!("tdp:deg{}", p.degree()), inputs, scaled(lhs, rhs), tol))
}

/// First identity of the higher depth corollary:
/// 4 Delta~ (vartheta^(X) + log t1/log eps_L vartheta~^{t1} - log t2/log eps_L vartheta~^{t2}) = theta(t1) - theta(t2).
pub fn check_higher_first(coset: &Coset, tau: Tau, t1: f64, t2: f64, tol: f64) -> Result<CheckReport> {
    let spec = fd_spec();
    let le = log_eps_l(coset);
    let x = WeightPolynomial::monomial(1)?;
    let f = |z: Tau| -> Result<Complex64> {
        Ok(vartheta_hat_p(coset, z, t1, t2, &x, &spec)?.value + vartheta_tilde(coset, z, t1, &spec)?.value * (t1.ln() / le)
            - vartheta_tilde(coset, z, t2, &spec)?.value * (t2.ln() / le))
    };
    let lhs = tilde_laplacian(f, tau, fd_step(tau.v))? * 4.0;
    let rhs = theta(coset, tau, t1)? - theta(coset, tau, t2)?;
    let inputs = json!({"coset": coset_json(coset), "tau": [tau.u, tau.v], "t1": t1, "t2": t2});
    Ok(CheckReport::new("higher:first", inputs, scaled(lhs, rhs), tol))
}

/// Second identity, in the normalization that follows from the weighted lemma:
/// 4 Delta~ (vartheta^(X^2) - log(t0^2 eps_L) vartheta~^{t0}) = -2 log(eps_L) theta(t0) + 2 vartheta.
/// With `printed` the operator and the constant are taken as 1 and 4 log(t0^2 eps_L) instead.
pub fn check_higher_second(coset: &Coset, tau: Tau, t0: f64, printed: bool, tol: f64) -> Result<CheckReport> {
    let spec = fd_spec();
    let le = log_eps_l(coset);
    let el = coset.lattice().eps_l().eps_l.to_f64();
    let x2 = WeightPolynomial::monomial(2)?;
    let lc = (t0 * t0 * el).ln();
    let (outer, inner) = if printed { (1.0, 4.0 * lc) } else { (4.0, lc) };
    let f = |z: Tau| -> Result<Complex64> {
        Ok(vartheta_hat_p(coset, z, t0, t0 * el, &x2, &spec)?.value - vartheta_tilde(coset, z, t0, &spec)?.value * inner)
    };
    let lhs = tilde_laplacian(f, tau, fd_step(tau.v))? * outer;
    let full = vartheta_hat_quadrature(coset, tau, 1.0, el, &spec)?.value;
    let rhs = theta(coset, tau, t0)? * (-2.0 * le) + full * 2.0;
    let id = if printed { "higher:second-printed" } else { "higher:second" };
    let inputs = json!({"coset": coset_json(coset), "tau": [tau.u, tau.v], "t0": t0, "lhs": [lhs.re, lhs.im], "rhs": [rhs.re, rhs.im]});
    Ok(CheckReport::new(id, inputs, scaled(lhs, rhs), tol))
}

/// sum_n beta~(lambda_n sqrt v) = -log(eps_L) sum_n beta(lambda_n sqrt v) + c~(orbit) K_0(2 pi |Q| v), at each sampled v.
pub fn check_prop_compare(coset: &Coset, lambda0: &QuadElem, t0: &TParam, v_samples: &[f64], tol: f64) -> Result<CheckReport> {
    let lat = coset.lattice();
    let basis = LogBasis::of(lat);
    let (orbit, _) = reduce(coset, lambda0, t0)?;
    if orbit.is_zero() {
        return Err(Error::ZeroElement);
    }
    let ct = c_tilde(&orbit, &basis)?.to_f64();
    let q = orbit.q_value.to_f64().unwrap_or(f64::NAN);
    let eps = &basis.eps_l;
    let el = eps.to_f64();
    let le = el.ln();
    let spec = QuadratureSpec { abs_tol: 1e-300, rel_tol: 1e-14, max_depth: 60 };
    let mut worst: f64 = 0.0;
    for &v in v_samples {
        let sv = v.sqrt();
        let mut sum_bt = 0.0;
        let mut sum_b = 0.0;
        for dir in [1i64, -1] {
            let mut n: i64 = if dir == 1 { 0 } else { -1 };
            let mut quiet = 0;
            while quiet < 2 && n.abs() < 64 {
                let ln = &orbit.lambda0 * &eps.pow(n)?;
                let (w1, w2) = lat.embed(&ln);
                let w = (w1 * sv, w2 * sv);
                let bt = beta_tilde_kernel(w, t0.value(), el, &spec)?.value;
                let b = beta_kernel(w, t0.value())?;
                sum_bt += bt;
                sum_b += b;
                quiet = if bt.abs() + b.abs() < 1e-30 { quiet + 1 } else { 0 };
                n += dir;
            }
        }
        let rhs = -le * sum_b + ct * bessel_k0(2.0 * PI * q.abs() * v)?;
        worst = worst.max((sum_bt - rhs).abs());
    }
    let inputs = json!({"coset": coset_json(coset), "lambda0": orbit.lambda0.to_string(), "Q": q, "t0": t0.value(), "v": v_samples});
    Ok(CheckReport::new("prop-compare", inputs, worst, tol))
}

/// The bound |K_0(x; a)| < e^{-x cosh a}/(x sinh(a/2)) on a grid, reported as the excess of the largest ratio over 1.
pub fn check_asymptotics(tol: f64) -> Result<CheckReport> {
    let xs = [1.0, 2.0, 5.0, 10.0, 20.0, 35.0, 50.0];
    let as_ = [0.1, 0.3, 0.6, 1.0, 1.5, 2.0, 3.0];
    let mut worst: f64 = 0.0;
    for &x in &xs {
        for &a in &as_ {
            let bound = (-x * f64::cosh(a)).exp() / (x * (0.5 * a).sinh());
            let k = bessel_k0_incomplete(x, a)?;
            if bound > 0.0 {
                worst = worst.max(k.abs() / bound);
            }
        }
    }
    let inputs = json!({"x": xs, "a": as_, "max_ratio": worst});
    Ok(CheckReport::new("asymptotics:bound", inputs, (worst - 1.0).max(0.0), tol))
}

/// K_0(x; a)/K_0(x) decreasing in x, and zero at a = 0.
pub fn check_ratio_decay(tol: f64) -> Result<CheckReport> {
    let mut worst: f64 = 0.0;
    for &a in &[0.1, 0.5, 1.0, 2.0] {
        let mut prev = f64::INFINITY;
        for &x in &[1.0, 2.0, 5.0, 10.0, 20.0, 40.0] {
            let r = bessel_k0_incomplete(x, a)? / bessel_k0(x)?;
            worst = worst.max(r - prev);
            prev = r;
        }
    }
    worst = worst.max(bessel_k0_incomplete(3.0, 0.0)?.abs());
    Ok(CheckReport::new("asymptotics:ratio-decay", json!({"a": [0.1, 0.5, 1.0, 2.0]}), worst.max(0.0), tol))
}

/// K_0 against its defining integral, relative error on x in [0.1, 50].
pub fn check_bessel_k0(tol: f64) -> Result<CheckReport> {
    let spec = QuadratureSpec { abs_tol: 1e-300, rel_tol: 1e-14, max_depth: 60 };
    let mut worst: f64 = 0.0;
    let n = 60;
    for i in 0..=n {
        let x = 0.1 * (500f64).powf(i as f64 / n as f64);
        let tmax = (1.0 + 745.0 / x).acosh();
        let q = adaptive_simpson(|t: f64| (-x * t.cosh()).exp(), 0.0, tmax, &spec).value;
        worst = worst.max((bessel_k0(x)? - q).abs() / q);
    }
    Ok(CheckReport::new("bessel:k0", json!({"x_range": [0.1, 50.0], "points": n + 1}), worst, tol))
}

/// The kernel relation between the Gaussian integral over [t1, t2], a_lambda K_0 and beta, on seeded random inputs.
pub fn check_mock_maass(samples: usize, tol: f64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED);
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let w1: f64 = rng.random_range(0.1..3.0);
        let mut w2: f64 = rng.random_range(0.1..3.0);
        if rng.random::<bool>() {
            w2 = -w2;
        }
        let t1: f64 = rng.random_range(0.3..2.0);
        let t2 = t1 * rng.random_range(1.05..4.0);
        let lhs = adaptive_simpson(|nu: f64| gauss_nu((w1, w2), nu), t1.ln(), t2.ln(), &spec).value;
        let a = a_sign_form((w1, w2), t1, t2);
        let rhs = a * bessel_k0(2.0 * PI * (w1 * w2).abs())? + beta_kernel((w1, w2), t1)? - beta_kernel((w1, w2), t2)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(CheckReport::new("bessel:mock-maass", json!({"samples": samples, "seed": RNG_SEED}), worst, tol))
}

fn pointwise(id: &str, coset: &Coset, tau: Tau, extra: Value, lhs: Complex64, rhs: Complex64, tol: f64) -> CheckReport {
    let mut inputs = json!({"coset": coset_json(coset), "tau": [tau.u, tau.v]});
    if let (Value::Object(m), Value::Object(e)) = (&mut inputs, extra) {
        m.extend(e);
    }
    CheckReport::new(id, inputs, (lhs - rhs).norm(), tol)
}

/// Quadrature over [1, eps_L] against the unfolded orbit sum.
pub fn check_unfolding(coset: &Coset, tau: Tau, tol: f64) -> Result<CheckReport> {
    let eps_l = TParam::from_elem(&coset.lattice().eps_l().eps_l)?;
    let q = vartheta_hat_quadrature(coset, tau, 1.0, eps_l.value(), &quad_spec())?.value;
    let f = vartheta_fourier(coset, tau, &TParam::one(coset.lattice().d()), &eps_l, SERIES_TOL)?.value;
    Ok(pointwise("unfolding", coset, tau, json!({}), q, f, tol))
}

/// vartheta^ = vartheta^+ + phi^{t1} - phi^{t2}.
pub fn check_zw12(coset: &Coset, tau: Tau, t1: &TParam, t2: &TParam, tol: f64) -> Result<CheckReport> {
    let lhs = vartheta_hat_quadrature(coset, tau, t1.value(), t2.value(), &quad_spec())?.value;
    let rhs = vartheta_hat_plus(coset, tau, t1, t2, SERIES_TOL)?.value + phi_c0(coset, tau, t1.value(), SERIES_TOL)?.value
        - phi_c0(coset, tau, t2.value(), SERIES_TOL)?.value;
    Ok(pointwise("zw12", coset, tau, json!({"t1": t1.value(), "t2": t2.value()}), lhs, rhs, tol))
}

/// vartheta~ = vartheta~^+ - log(eps_L) phi^{t0}.
pub fn check_main(coset: &Coset, tau: Tau, t0: &TParam, tol: f64) -> Result<CheckReport> {
    let lhs = vartheta_tilde(coset, tau, t0.value(), &quad_spec())?.value;
    let rhs = vartheta_tilde_plus(coset, tau, t0, SERIES_TOL)?.value - phi_c0(coset, tau, t0.value(), SERIES_TOL)?.value * log_eps_l(coset);
    Ok(pointwise("main", coset, tau, json!({"t0": t0.value()}), lhs, rhs, tol))
}

/// -log(eps_L) vartheta^+ = vartheta~^{t1,+} - vartheta~^{t2,+}.
pub fn check_vt_decomp_plus(coset: &Coset, tau: Tau, t1: &TParam, t2: &TParam, tol: f64) -> Result<CheckReport> {
    let lhs = vartheta_hat_plus(coset, tau, t1, t2, SERIES_TOL)?.value * (-log_eps_l(coset));
    let rhs = vartheta_tilde_plus(coset, tau, t1, SERIES_TOL)?.value - vartheta_tilde_plus(coset, tau, t2, SERIES_TOL)?.value;
    Ok(pointwise("vt-decomp:harmonic", coset, tau, json!({"t1": t1.value(), "t2": t2.value()}), lhs, rhs, tol))
}

/// -log(eps_L) vartheta^ = vartheta~^{t1} - vartheta~^{t2}.
pub fn check_vt_decomp(coset: &Coset, tau: Tau, t1: f64, t2: f64, tol: f64) -> Result<CheckReport> {
    let spec = quad_spec();
    let lhs = vartheta_hat_quadrature(coset, tau, t1, t2, &spec)?.value * (-log_eps_l(coset));
    let rhs = vartheta_tilde(coset, tau, t1, &spec)?.value - vartheta_tilde(coset, tau, t2, &spec)?.value;
    Ok(pointwise("vt-decomp:completed", coset, tau, json!({"t1": t1, "t2": t2}), lhs, rhs, tol))
}

/// Exact telescoping -log(eps_L) sum_n a_{lambda_n}(t1, t2) = c~_{t1} - c~_{t2} for every orbit with |N Q| <= norm_bound.
/// The residual counts the orbits where it fails.
pub fn check_compare2(coset: &Coset, t1: &TParam, t2: &TParam, q_bound: &num_rational::BigRational) -> Result<CheckReport> {
    let orbits = enumerate_orbits(coset, t1, q_bound)?;
    let mut bad = 0usize;
    let mut checked = 0usize;
    for o in orbits.iter().filter(|o| !o.is_zero()) {
        checked += 1;
        if !telescoping_check(coset, &o.lambda0, t1, t2)?.holds {
            bad += 1;
        }
    }
    let inputs = json!({"coset": coset_json(coset), "t1": t1.value(), "t2": t2.value(), "q_bound": q_bound.to_string(), "orbits": checked});
    Ok(CheckReport::new("compare2:exact", inputs, bad as f64, 0.0))
}

/// On the Maass cosets: vartheta^(1, eps) = vartheta^+(1, eps) = vartheta_{L+h}/2, with vartheta_{L+h} over [1, eps_L].
pub fn check_maass_id(coset: &Coset, tau: Tau, tol: f64) -> Result<CheckReport> {
    maass_id(coset, tau, 0.5, "maass-id", tol)
}

fn maass_id(coset: &Coset, tau: Tau, factor: f64, id: &str, tol: f64) -> Result<CheckReport> {
    let d = coset.lattice().d();
    let eps = eps_of(coset)?;
    let eps_l = TParam::from_elem(&coset.lattice().eps_l().eps_l)?;
    let q = vartheta_hat_quadrature(coset, tau, 1.0, eps.value(), &quad_spec())?.value;
    let plus = vartheta_hat_plus(coset, tau, &TParam::one(d), &eps, SERIES_TOL)?.value;
    let full = vartheta_fourier(coset, tau, &TParam::one(d), &eps_l, SERIES_TOL)?.value * factor;
    let r = (q - plus).norm().max((q - full).norm());
    let mut rep = pointwise(id, coset, tau, json!({"factor": factor}), q, full, tol);
    rep.residual = r;
    rep.passed = r <= tol;
    Ok(rep)
}

/// vartheta_{L+h} = vartheta_{L+h+shift}.
pub fn check_coset_symmetry(coset: &Coset, shift: &QuadElem, tau: Tau, tol: f64) -> Result<CheckReport> {
    let other = coset.translate(shift)?;
    let eps_l = TParam::from_elem(&coset.lattice().eps_l().eps_l)?;
    let one = TParam::one(coset.lattice().d());
    let a = vartheta_fourier(coset, tau, &one, &eps_l, SERIES_TOL)?.value;
    let b = vartheta_fourier(&other, tau, &one, &eps_l, SERIES_TOL)?.value;
    Ok(pointwise("coset-symmetry", coset, tau, json!({"shift": shift.to_string()}), a, b, tol))
}

/// |theta^{(1,1)}(tau, t)|.
pub fn check_theta11_vanishing(coset: &Coset, tau: Tau, t: f64, tol: f64) -> Result<CheckReport> {
    let v = theta_11(coset, &EvalPoint::new(tau.u, tau.v, t)?, 1e-15)?.value;
    Ok(pointwise("theta11:vanishing", coset, tau, json!({"t": t}), v, Complex64::zero(), tol))
}

/// g = q^{1/48}(1 - 23 q^11 + 25 q^13 - ... + 97 q^196), known through q^199.
pub fn nontrivial_g() -> QSeries {
    let mut c = vec![0i64; 200];
    for (n, a) in [(0, 1), (11, -23), (13, 25), (46, -47), (50, 49), (105, -71), (111, 73), (188, -95), (196, 97)] {
        c[n] = a;
    }
    QSeries::from_i64(rat(1, 48), &c)
}

/// theta^{(1,1)}(tau, 1) on L + 1/2 + sqrt6/12 against c eta^3 conj(g) v^{3/2}.
pub fn check_nontrivial_theta11(coset: &Coset, tau: Tau, constant: f64, id: &str, tol: f64) -> Result<CheckReport> {
    let lhs = theta_11(coset, &EvalPoint::new(tau.u, tau.v, 1.0)?, 1e-15)?.value;
    let eta3 = eta_cubed(200).evaluate(tau.u, tau.v);
    let g = nontrivial_g().evaluate(tau.u, tau.v);
    let rhs = eta3 * g.conj() * (constant * tau.v.powf(1.5));
    Ok(pointwise(id, coset, tau, json!({"constant": constant, "ratio": [(lhs / rhs).re, (lhs / rhs).im]}), lhs, rhs, tol))
}

/// Aggregated c~_{t0} coefficient at n = N Q, scaled by `factor`, against a target value.
pub fn check_w_coefficient(coset: &Coset, preset: Preset, n: i64, target: f64, factor: f64, id: &str, tol: f64) -> Result<CheckReport> {
    let d = coset.lattice().d();
    let big_n = preset.index_scale();
    let q = rat(n, big_n);
    let bound = rat(n.abs(), big_n);
    let table = c_tilde_table(coset, &TParam::one(d), &bound)?;
    let agg = aggregate_by_index(&table);
    let value = agg.iter().find(|(i, _)| *i == q).map(|(_, v)| v.to_f64()).unwrap_or(0.0);
    let orbits = table.iter().filter(|c| c.index == q).count();
    let inputs = json!({"coset": coset_json(coset), "n": n, "sum_c_tilde": value, "orbits": orbits, "factor": factor,
        "target": target, "ratio": value / target});
    Ok(CheckReport::new(id, inputs, (factor * value - target).abs(), tol))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Decomposition,
    Laplacian,
    Compare,
    Bessel,
    Cohen,
    /// Comparisons against constants exactly as printed; expected to fail where they differ.
    Literal,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "decomposition" => Suite::Decomposition,
            "laplacian" => Suite::Laplacian,
            "compare" => Suite::Compare,
            "bessel" => Suite::Bessel,
            "cohen" => Suite::Cohen,
            "literal" => Suite::Literal,
            _ => return Err(Error::Unknown { kind: "suite", name: s.to_string() }),
        })
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub presets: Vec<Preset>,
    /// Replaces every tolerance when set.
    pub tol: Option<f64>,
    pub max_n: i64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { presets: Preset::ALL.to_vec(), tol: None, max_n: 2400 }
    }
}

type Job = Box<dyn Fn() -> Result<Vec<CheckReport>> + Send + Sync>;

struct Task {
    label: String,
    job: Job,
}

fn task<F: Fn() -> Result<Vec<CheckReport>> + Send + Sync + 'static>(label: impl Into<String>, f: F) -> Task {
    Task { label: label.into(), job: Box::new(f) }
}

fn one<F: Fn() -> Result<CheckReport> + Send + Sync + 'static>(label: impl Into<String>, f: F) -> Task {
    task(label, move || Ok(vec![f()?]))
}

fn decomposition_tasks(p: Preset) -> Vec<Task> {
    let mut out = Vec::new();
    let cosets = p.cosets();
    for (i, c) in cosets.iter().enumerate() {
        for &z in &SAMPLE_TAUS {
            let c = c.clone();
            out.push(one(format!("unfolding {} h{}", p.name(), i + 1), move || check_unfolding(&c, tau_of(z), POINTWISE_TOL)));
        }
    }
    let c0 = cosets[0].clone();
    let d = c0.lattice().d();
    for &z in &SAMPLE_TAUS {
        let c = c0.clone();
        out.push(one("zw12", move || check_zw12(&c, tau_of(z), &TParam::one(d), &TParam::real(3.0)?, POINTWISE_TOL)));
        for k in 0..2 {
            let c = c0.clone();
            out.push(one("main", move || {
                let t0 = if k == 0 { TParam::one(d) } else { eps_of(&c)? };
                check_main(&c, tau_of(z), &t0, POINTWISE_TOL)
            }));
        }
        let c = c0.clone();
        out.push(one("vt-decomp harmonic", move || check_vt_decomp_plus(&c, tau_of(z), &TParam::one(d), &eps_of(&c)?, POINTWISE_TOL)));
        let c = c0.clone();
        out.push(one("vt-decomp completed", move || {
            let e = eps_of(&c)?.value();
            check_vt_decomp(&c, tau_of(z), 1.0, e, POINTWISE_TOL)
        }));
    }
    let n = p.index_scale();
    for c in cosets.iter() {
        let c = c.clone();
        out.push(task("compare2", move || {
            let eps = c.lattice().field().totally_positive_unit();
            let one_t = TParam::one(d);
            let e1 = TParam::from_elem(&eps)?;
            let bound = rat(100, n);
            Ok(vec![
                check_compare2(&c, &one_t, &e1, &bound)?,
                check_compare2(&c, &one_t, &e1.times_unit(&eps, 1)?, &bound)?,
                check_compare2(&c, &e1, &e1.times_unit(&eps, 2)?, &bound)?,
            ])
        }));
    }
    match p {
        Preset::Cohen => {
            for c in cosets.iter() {
                for &z in &SAMPLE_TAUS[..3] {
                    let c = c.clone();
                    out.push(task("maass", move || {
                        let tau = tau_of(z);
                        let e = eps_of(&c)?.value();
                        Ok(vec![
                            check_maass_id(&c, tau, POINTWISE_TOL)?,
                            check_theta11_vanishing(&c, tau, 1.0, VANISHING_TOL)?,
                            check_theta11_vanishing(&c, tau, e, VANISHING_TOL)?,
                            check_coset_symmetry(&c, &QuadElem::from_ints(3, 1, 6), tau, POINTWISE_TOL)?,
                        ])
                    }));
                }
            }
        }
        Preset::Nontrivial => {
            for &z in &LARGE_V_TAUS {
                let c = c0.clone();
                out.push(one("nontrivial theta11", move || {
                    check_nontrivial_theta11(&c, tau_of(z), -(6f64.sqrt()) / 48.0, "theta11:eta-g", 1e-6)
                }));
            }
            let c = c0.clone();
            out.push(one("w5", move || {
                let target = ((7.0 + 2.0 * 6f64.sqrt()) / 5.0).ln();
                check_w_coefficient(&c, p, 5, target, 2.0, "w5:normalized", 1e-12)
            }));
            let c = c0.clone();
            out.push(one("w53", move || {
                let s6 = 6f64.sqrt();
                let target = 4.0 * (5.0 + 2.0 * s6).ln() + ((55.0 - 6.0 * s6) / 53.0).ln();
                check_w_coefficient(&c, p, 53, target, 2.0, "w53:normalized", 1e-12)
            }));
        }
    }
    out
}

fn laplacian_tasks(p: Preset) -> Vec<Task> {
    let mut out = Vec::new();
    let c0 = p.cosets()[0].clone();
    let (t1, t2, t0) = (1.2, 3.0, 1.3);
    for &z in &SAMPLE_TAUS[..3] {
        let tau = tau_of(z);
        let c = c0.clone();
        out.push(one("laplacian phi", move || check_laplacian("phi", &c, tau, &[t0], FD_TOL)));
        let c = c0.clone();
        out.push(one("laplacian hat", move || check_laplacian("vartheta_hat", &c, tau, &[t1, t2], FD_TOL)));
        let c = c0.clone();
        out.push(one("laplacian tilde", move || check_laplacian("vartheta_tilde", &c, tau, &[t0], FD_TOL)));
        let c = c0.clone();
        out.push(one("kernel pde", move || check_kernel_pde(&c, tau, t0, FD_TOL)));
        for k in 0..3 {
            let c = c0.clone();
            out.push(one("tdp", move || check_tdp(&c, tau, t1, t2, &WeightPolynomial::monomial(k)?, FD_TOL)));
        }
        let c = c0.clone();
        out.push(one("tdp tilde", move || {
            let el = c.lattice().eps_l().eps_l.to_f64();
            let mut r = check_tdp(&c, tau, t0, t0 * el, &WeightPolynomial::monomial(1)?, FD_TOL)?;
            r.check_id = "tdp:deg1-period".into();
            Ok(r)
        }));
        let c = c0.clone();
        out.push(one("higher first", move || check_higher_first(&c, tau, t1, t2, FD_TOL)));
        let c = c0.clone();
        out.push(one("higher second", move || check_higher_second(&c, tau, t0, false, FD_TOL)));
        if p == Preset::Cohen {
            let c = c0.clone();
            out.push(one("laplacian maass", move || {
                let e = eps_of(&c)?.value();
                let mut r = check_laplacian("vartheta_hat", &c, tau, &[1.0, e], FD_TOL)?;
                r.check_id = "laplacian:vartheta_hat-maass".into();
                Ok(r)
            }));
        }
    }
    out
}

fn compare_tasks(p: Preset) -> Vec<Task> {
    let c = p.cosets()[0].clone();
    vec![task(format!("prop compare {}", p.name()), move || {
        let d = c.lattice().d();
        let t0 = TParam::one(d);
        let orbits = enumerate_orbits(&c, &t0, &rat(200, p.index_scale()))?;
        orbits
            .iter()
            .filter(|o| !o.is_zero())
            .take(5)
            .map(|o| check_prop_compare(&c, &o.lambda0, &t0, &[0.5, 1.0, 2.0], POINTWISE_TOL))
            .collect()
    })]
}

fn bessel_tasks() -> Vec<Task> {
    vec![
        one("bessel k0", || check_bessel_k0(SPECFUN_TOL)),
        one("asymptotics", || check_asymptotics(0.0)),
        one("ratio decay", || check_ratio_decay(0.0)),
        one("mock maass", || check_mock_maass(1000, SPECFUN_TOL)),
    ]
}

fn cohen_tasks(max_n: i64) -> Vec<Task> {
    let mut out = vec![
        one("generating identity", move || Ok(cohen::generating_identity_check(max_n))),
        one("four-term coefficients", || cohen::four_term_coefficient_check(240)),
        one("a-table cosets", cohen::table_coset_check),
    ];
    out.push(one("phi0", || cohen::phi0_check(tau_of((0.1, 0.9)), POINTWISE_TOL)));
    out.push(one("phi0 laplacian", || cohen::phi0_laplacian_check(tau_of((0.2, 1.0)), FD_TOL)));
    out
}

fn literal_tasks(p: Preset) -> Vec<Task> {
    let mut out = Vec::new();
    let c0 = p.cosets()[0].clone();
    let z = tau_of(SAMPLE_TAUS[2]);
    let c = c0.clone();
    out.push(one("unfolding printed", move || {
        let eps_l = TParam::from_elem(&c.lattice().eps_l().eps_l)?;
        let q = vartheta_hat_quadrature(&c, z, 1.0, eps_l.value(), &quad_spec())?.value;
        let f = vartheta_fourier(&c, z, &TParam::one(c.lattice().d()), &eps_l, SERIES_TOL)?.value;
        Ok(pointwise("unfolding:printed", &c, z, json!({"ratio": (q / f).re, "printed_factor": 2.0}), q, f * 2.0, POINTWISE_TOL))
    }));
    let c = c0.clone();
    out.push(one("higher second printed", move || check_higher_second(&c, z, 1.3, true, FD_TOL)));
    match p {
        Preset::Cohen => {
            let c = c0.clone();
            out.push(one("maass printed", move || maass_id(&c, z, 0.25, "maass-id:printed", POINTWISE_TOL)));
        }
        Preset::Nontrivial => {
            let c = c0.clone();
            out.push(one("theta11 printed", move || {
                check_nontrivial_theta11(&c, tau_of(LARGE_V_TAUS[0]), -(6f64.sqrt()) / 24.0, "theta11:eta-g-printed", 1e-6)
            }));
            let c = c0.clone();
            out.push(one("w5 raw", move || {
                let target = ((7.0 + 2.0 * 6f64.sqrt()) / 5.0).ln();
                check_w_coefficient(&c, p, 5, target, 1.0, "w5:raw", 1e-12)
            }));
        }
    }
    out
}

fn tasks(suite: Suite, opts: &SuiteOptions) -> Vec<Task> {
    let mut out = Vec::new();
    let per_preset = |f: fn(Preset) -> Vec<Task>, out: &mut Vec<Task>| {
        for &p in &opts.presets {
            out.extend(f(p));
        }
    };
    match suite {
        Suite::All => {
            per_preset(decomposition_tasks, &mut out);
            per_preset(laplacian_tasks, &mut out);
            per_preset(compare_tasks, &mut out);
            out.extend(bessel_tasks());
            out.extend(cohen_tasks(opts.max_n));
        }
        Suite::Decomposition => per_preset(decomposition_tasks, &mut out),
        Suite::Laplacian => per_preset(laplacian_tasks, &mut out),
        Suite::Compare => per_preset(compare_tasks, &mut out),
        Suite::Bessel => out.extend(bessel_tasks()),
        Suite::Cohen => out.extend(cohen_tasks(opts.max_n)),
        Suite::Literal => per_preset(literal_tasks, &mut out),
    }
    out
}

/// Runs a suite concurrently; reports come back in a fixed order.
pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Vec<CheckReport> {
    let ts = tasks(suite, opts);
    let results: Vec<Vec<CheckReport>> = ts
        .par_iter()
        .map(|t| match (t.job)() {
            Ok(r) => r,
            Err(e) => vec![CheckReport::failed(t.label.clone(), json!({}), &e)],
        })
        .collect();
    let reports = results.into_iter().flatten();
    match opts.tol {
        Some(tol) => reports.map(|r| r.with_tolerance(tol)).collect(),
        None => reports.collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::presets::*;

    #[test]
    fn report_semantics() {
        let r = CheckReport::new("x", json!({}), 1e-9, 1e-8);
        assert!(r.passed);
        assert!(!r.clone().with_tolerance(1e-10).passed);
        assert!(!CheckReport::new("x", json!({}), f64::NAN, 1.0).passed);
        let line = r.to_json_line().unwrap();
        let back: CheckReport = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn laplacian_of_w() {
        // sqrt(v) e(nu) K_0(2 pi |n| v) is annihilated by Delta~
        let f = |z: Tau| -> Result<Complex64> {
            Ok(crate::thetaseries::points::e(2.0 * z.u) * (z.v.sqrt() * bessel_k0(4.0 * PI * z.v)?))
        };
        let tau = Tau::new(0.1, 0.7).unwrap();
        let r = tilde_laplacian(f, tau, fd_step(tau.v)).unwrap();
        assert!(r.norm() < 1e-7, "{r}");
        assert!(LaplacianSeries::from_str("psi").is_err());
        assert!(Suite::from_str("nope").is_err());
    }

    #[test]
    fn small_checks_pass() {
        let c = &nontrivial_cosets()[0];
        let tau = Tau::new(0.2, 0.9).unwrap();
        assert!(check_kernel_pde(c, tau, 1.3, FD_TOL).unwrap().passed);
        assert!(check_laplacian("phi", c, tau, &[1.3], FD_TOL).unwrap().passed);
        assert!(check_asymptotics(0.0).unwrap().passed);
        assert!(check_ratio_decay(0.0).unwrap().passed);
        let o = enumerate_orbits(c, &TParam::one(6), &rat(1, 2)).unwrap();
        let r = check_prop_compare(c, &o[0].lambda0, &TParam::one(6), &[0.5, 1.0, 2.0], POINTWISE_TOL).unwrap();
        assert!(r.passed, "{r:?}");
    }
}

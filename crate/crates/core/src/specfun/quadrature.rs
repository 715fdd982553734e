use crate::error::{Error, Result};

use super::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { abs_tol: 1e-12, rel_tol: 1e-12, max_depth: 60 }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32) -> Result<Self> {
        let s = QuadratureSpec { abs_tol, rel_tol, max_depth };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_depth < 10 {
            return Err(Error::InvalidParameter(format!(
                "quadrature needs abs_tol > 0, rel_tol > 0, max_depth >= 10 (got {}, {}, {})",
                self.abs_tol, self.rel_tol, self.max_depth
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

/// Adaptive Simpson with Richardson correction on each accepted panel.
pub fn adaptive_simpson<T: Scalar, F: FnMut(f64) -> T>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> QuadResult<T> {
    if a == b {
        return QuadResult { value: T::zero(), error: 0.0, evaluations: 0 };
    }
    // a coarse composite pass sets the relative scale and avoids accepting a lucky first panel
    const PANELS: usize = 8;
    let h = (b - a) / PANELS as f64;
    let mut xs = [0.0; 2 * PANELS + 1];
    let mut fs = Vec::with_capacity(2 * PANELS + 1);
    for (i, x) in xs.iter_mut().enumerate() {
        *x = a + (b - a) * i as f64 / (2 * PANELS) as f64;
        fs.push(f(*x));
    }
    let mut evals = fs.len();
    let mut scale = 0.0;
    let mut whole = Vec::with_capacity(PANELS);
    for k in 0..PANELS {
        let s = simpson(fs[2 * k], fs[2 * k + 1], fs[2 * k + 2], h);
        scale += s.magnitude();
        whole.push(s);
    }
    let tol = spec.abs_tol.max(spec.rel_tol * scale);
    let mut value = T::zero();
    let mut error = 0.0;
    for k in 0..PANELS {
        let (v, e) = recurse(
            &mut f,
            xs[2 * k],
            xs[2 * k + 2],
            fs[2 * k],
            fs[2 * k + 1],
            fs[2 * k + 2],
            whole[k],
            tol / PANELS as f64,
            spec.max_depth,
            &mut evals,
        );
        value = value + v;
        error += e;
    }
    QuadResult { value, error, evaluations: evals }
}

fn simpson<T: Scalar>(fa: T, fm: T, fb: T, width: f64) -> T {
    (fa + fm * 4.0 + fb) * (width / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn recurse<T: Scalar, F: FnMut(f64) -> T>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: f64,
    depth: u32,
    evals: &mut usize,
) -> (T, f64) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    *evals += 2;
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let diff = left + right - whole;
    let err = diff.magnitude() / 15.0;
    // below this the difference is rounding noise and halving further cannot help
    let noise = 16.0 * f64::EPSILON * (b - a).abs() * (fa.magnitude() + 4.0 * (flm.magnitude() + frm.magnitude()) + 2.0 * fm.magnitude() + fb.magnitude()) / 12.0;
    if depth == 0 || err <= tol.max(noise) || (m - a) <= f64::EPSILON * a.abs().max(b.abs()) {
        return (left + right + diff * (1.0 / 15.0), err);
    }
    let (lv, le) = recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evals);
    let (rv, re) = recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evals);
    (lv + rv, le + re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn polynomials_and_exp() {
        let s = QuadratureSpec::default();
        let r = adaptive_simpson(|x: f64| x * x * x, 0.0, 2.0, &s);
        assert!((r.value - 4.0).abs() < 1e-13);
        let r = adaptive_simpson(|x: f64| x.exp(), -1.0, 3.0, &s);
        assert!((r.value - (3f64.exp() - (-1f64).exp())).abs() < 1e-11);
        let r = adaptive_simpson(|x: f64| Complex64::new(0.0, x).exp(), 0.0, std::f64::consts::PI, &s);
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn reversed_and_empty() {
        let s = QuadratureSpec::default();
        assert_eq!(adaptive_simpson(|x: f64| x, 1.0, 1.0, &s).value, 0.0);
        let r = adaptive_simpson(|x: f64| x, 1.0, 0.0, &s);
        assert!((r.value + 0.5).abs() < 1e-14);
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(0.0, 1e-9, 20).is_err());
        assert!(QuadratureSpec::new(1e-9, 1e-9, 5).is_err());
        assert!(QuadratureSpec::new(1e-9, 1e-9, 10).is_ok());
    }
}

//! Five-point central differences with one Richardson extrapolation.

use super::Scalar;

/// Default step for differentiating in v.
pub fn default_step(v: f64) -> f64 {
    (1e-4 * v.abs()).max(1e-4)
}

fn d1<T: Scalar, F: Fn(f64) -> T>(f: &F, x: f64, h: f64) -> T {
    (f(x - 2.0 * h) - f(x + 2.0 * h) + (f(x + h) - f(x - h)) * 8.0) * (1.0 / (12.0 * h))
}

fn d2<T: Scalar, F: Fn(f64) -> T>(f: &F, x: f64, h: f64) -> T {
    let edge = f(x - 2.0 * h) + f(x + 2.0 * h);
    let near = f(x - h) + f(x + h);
    (near * 16.0 - edge - f(x) * 30.0) * (1.0 / (12.0 * h * h))
}

pub fn derivative<T: Scalar, F: Fn(f64) -> T>(f: &F, x: f64, h: f64) -> T {
    let coarse = d1(f, x, h);
    let fine = d1(f, x, 0.5 * h);
    fine + (fine - coarse) * (1.0 / 15.0)
}

pub fn second_derivative<T: Scalar, F: Fn(f64) -> T>(f: &F, x: f64, h: f64) -> T {
    let coarse = d2(f, x, h);
    let fine = d2(f, x, 0.5 * h);
    fine + (fine - coarse) * (1.0 / 15.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn exp_and_complex() {
        let f = |x: f64| x.exp();
        assert!((derivative(&f, 0.7, 1e-2) - 0.7f64.exp()).abs() < 1e-12);
        assert!((second_derivative(&f, 0.7, 1e-2) - 0.7f64.exp()).abs() < 1e-10);
        let g = |x: f64| Complex64::new(0.0, 3.0 * x).exp();
        let want = Complex64::new(-9.0, 0.0) * g(0.2);
        assert!((second_derivative(&g, 0.2, 1e-2) - want).norm() < 1e-8);
        assert_eq!(default_step(0.5), 1e-4);
        assert_eq!(default_step(20.0), 2e-3);
    }
}

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// q^{leading} * sum_{n < order} c_n q^n, known modulo q^{leading + order}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    pub leading_exponent: BigRational,
    pub coefficients: Vec<BigInt>,
}

impl QSeries {
    pub fn new(leading_exponent: BigRational, coefficients: Vec<BigInt>) -> Self {
        QSeries { leading_exponent, coefficients }
    }

    pub fn from_i64(leading_exponent: BigRational, coeffs: &[i64]) -> Self {
        QSeries::new(leading_exponent, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// 1 + O(q^order).
    pub fn one(order: usize) -> Self {
        let mut c = vec![BigInt::zero(); order];
        if order > 0 {
            c[0] = BigInt::from(1);
        }
        QSeries::new(BigRational::zero(), c)
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coeff(&self, n: usize) -> BigInt {
        self.coefficients.get(n).cloned().unwrap_or_default()
    }

    pub fn truncate(&mut self, order: usize) {
        self.coefficients.truncate(order);
    }

    pub fn mul(&self, other: &QSeries) -> QSeries {
        let order = self.order().min(other.order());
        let mut c = vec![BigInt::zero(); order];
        for (i, a) in self.coefficients.iter().enumerate().take(order) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coefficients.iter().enumerate().take(order - i) {
                if !b.is_zero() {
                    c[i + j] += a * b;
                }
            }
        }
        QSeries::new(&self.leading_exponent + &other.leading_exponent, c)
    }

    /// In-place multiplication by (1 - q^n).
    pub fn mul_one_minus_q_pow(&mut self, n: usize) {
        if n == 0 {
            self.coefficients.iter_mut().for_each(|c| *c = BigInt::zero());
            return;
        }
        for k in (n..self.order()).rev() {
            let prev = self.coefficients[k - n].clone();
            self.coefficients[k] -= prev;
        }
    }

    /// Sum of two series with the same leading exponent.
    pub fn add(&self, other: &QSeries) -> QSeries {
        assert_eq!(self.leading_exponent, other.leading_exponent, "adding series with different leading exponents");
        let order = self.order().min(other.order());
        let c = (0..order).map(|n| &self.coefficients[n] + &other.coefficients[n]).collect();
        QSeries::new(self.leading_exponent.clone(), c)
    }

    pub fn scale(&self, k: &BigInt) -> QSeries {
        QSeries::new(self.leading_exponent.clone(), self.coefficients.iter().map(|c| c * k).collect())
    }

    /// Value at q = e(tau), tau = u + iv.
    pub fn evaluate(&self, u: f64, v: f64) -> Complex64 {
        let e = |x: f64| Complex64::from_polar((-2.0 * PI * v * x).exp(), 2.0 * PI * u * x);
        let lead = self.leading_exponent.to_f64().unwrap_or(f64::NAN);
        let mut s = Complex64::new(0.0, 0.0);
        for (n, c) in self.coefficients.iter().enumerate().rev() {
            if !c.is_zero() {
                s += e(n as f64) * c.to_f64().unwrap_or(f64::NAN);
            }
        }
        e(lead) * s
    }

    /// Upper bound for the neglected tail |sum_{n >= order} c_n q^n| given |c_n| <= a n + b.
    pub fn tail_bound(&self, v: f64, a: f64, b: f64) -> f64 {
        let r = (-2.0 * PI * v).exp();
        let n = self.order() as f64;
        // sum_{n>=N} (a n + b) r^n
        let rn = r.powf(n);
        let lead = self.leading_exponent.to_f64().unwrap_or(0.0);
        r.powf(lead) * rn * (a * (n / (1.0 - r) + r / ((1.0 - r) * (1.0 - r))) + b / (1.0 - r))
    }
}

/// eta(tau)^3 = q^{1/8} prod (1 - q^n)^3, through q^{order - 1}.
pub fn eta_cubed(order: usize) -> QSeries {
    let mut s = QSeries::one(order);
    for n in 1..order {
        for _ in 0..3 {
            s.mul_one_minus_q_pow(n);
        }
    }
    s.leading_exponent = BigRational::new(1.into(), 8.into());
    s
}

/// Jacobi: eta^3 = q^{1/8} sum_{n >= 0} (-1)^n (2n+1) q^{n(n+1)/2}.
pub fn eta_cubed_jacobi(order: usize) -> QSeries {
    let mut c = vec![BigInt::zero(); order];
    let mut n = 0usize;
    while n * (n + 1) / 2 < order {
        let v = (2 * n + 1) as i64;
        c[n * (n + 1) / 2] = BigInt::from(if n % 2 == 0 { v } else { -v });
        n += 1;
    }
    QSeries::new(BigRational::new(1.into(), 8.into()), c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_cubed_first_terms() {
        let e = eta_cubed(10);
        let expect = [1, -3, 0, 5, 0, 0, -7, 0, 0, 0];
        assert_eq!(e.coefficients, expect.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>());
        assert!(e.coeff(2).is_zero());
    }

    #[test]
    fn product_equals_jacobi() {
        assert_eq!(eta_cubed(200), eta_cubed_jacobi(200));
    }

    #[test]
    fn evaluate_matches_product() {
        let (u, v) = (0.13, 1.1);
        let q = Complex64::from_polar((-2.0 * PI * v).exp(), 2.0 * PI * u);
        let mut p = Complex64::from_polar((-2.0 * PI * v / 8.0).exp(), 2.0 * PI * u / 8.0);
        let mut qn = q;
        for _ in 1..200 {
            p *= (Complex64::new(1.0, 0.0) - qn).powu(3);
            qn *= q;
        }
        assert!((eta_cubed_jacobi(60).evaluate(u, v) - p).norm() < 1e-14);
    }

    #[test]
    fn mul_tracks_order() {
        let a = QSeries::from_i64(BigRational::zero(), &[1, 1, 1]);
        let b = QSeries::from_i64(BigRational::zero(), &[1, -1]);
        assert_eq!(a.mul(&b), QSeries::from_i64(BigRational::zero(), &[1, 0]));
    }
}

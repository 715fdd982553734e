//! Numerical evaluation of the theta series and their harmonic and non-harmonic parts.

pub mod points;
mod series;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use series::*;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tau {
    pub u: f64,
    pub v: f64,
}

impl Tau {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !(v > 0.0) || !u.is_finite() || !v.is_finite() {
            return Err(Error::InvalidParameter(format!("tau = {u} + {v}i must lie in the upper half plane")));
        }
        Ok(Tau { u, v })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalPoint {
    pub u: f64,
    pub v: f64,
    pub t: f64,
}

impl EvalPoint {
    pub fn new(u: f64, v: f64, t: f64) -> Result<Self> {
        Tau::new(u, v)?;
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
        }
        Ok(EvalPoint { u, v, t })
    }

    pub fn tau(&self) -> Tau {
        Tau { u: self.u, v: self.v }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_bound: f64,
    pub quad_error: f64,
}

impl SeriesValue {
    /// Combined truncation and quadrature error.
    pub fn error(&self) -> f64 {
        self.tail_bound + self.quad_error
    }
}

pub const MAX_WEIGHT_DEGREE: usize = 4;

/// P(X) = sum_k coefficients[k] X^k.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightPolynomial {
    coefficients: Vec<Complex64>,
}

impl WeightPolynomial {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        let mut c = coefficients;
        while c.len() > 1 && c.last() == Some(&Complex64::new(0.0, 0.0)) {
            c.pop();
        }
        if c.is_empty() {
            c.push(Complex64::new(0.0, 0.0));
        }
        if c.len() - 1 > MAX_WEIGHT_DEGREE {
            return Err(Error::InvalidParameter(format!("weight degree {} exceeds {}", c.len() - 1, MAX_WEIGHT_DEGREE)));
        }
        Ok(WeightPolynomial { coefficients: c })
    }

    pub fn real(coefficients: &[f64]) -> Result<Self> {
        WeightPolynomial::new(coefficients.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// X^k.
    pub fn monomial(k: usize) -> Result<Self> {
        let mut c = vec![0.0; k + 1];
        c[k] = 1.0;
        WeightPolynomial::real(&c)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> WeightPolynomial {
        if self.degree() == 0 {
            return WeightPolynomial { coefficients: vec![Complex64::new(0.0, 0.0)] };
        }
        let c = self.coefficients.iter().enumerate().skip(1).map(|(k, &a)| a * k as f64).collect();
        WeightPolynomial { coefficients: c }
    }

    /// Upper bound for |P| on [a, b].
    pub fn sup_on(&self, a: f64, b: f64) -> f64 {
        let r = a.abs().max(b.abs());
        self.coefficients.iter().enumerate().map(|(k, c)| c.norm() * r.powi(k as i32)).sum()
    }
}

/// Evaluation record written by the command line tool.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub schema_version: u32,
    pub series: String,
    pub coset: String,
    pub tau: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1_t2: Option<[f64; 2]>,
    pub value: [f64; 2],
    pub tail_bound: f64,
    pub quad_error: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_polynomial() {
        let p = WeightPolynomial::real(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(p.degree(), 2);
        assert_eq!(p.eval(2.0), Complex64::new(17.0, 0.0));
        assert_eq!(p.derivative(), WeightPolynomial::real(&[2.0, 6.0]).unwrap());
        assert_eq!(WeightPolynomial::real(&[1.0, 0.0, 0.0]).unwrap().degree(), 0);
        assert!(WeightPolynomial::monomial(5).is_err());
        assert_eq!(WeightPolynomial::monomial(0).unwrap().derivative().degree(), 0);
    }

    #[test]
    fn points_validate() {
        assert!(Tau::new(0.1, 0.0).is_err());
        assert!(EvalPoint::new(0.1, 1.0, -1.0).is_err());
        assert!(EvalPoint::new(0.1, 1.0, 2.0).is_ok());
    }
}

//! Numerical special functions used by the theta series.

pub mod bessel;
pub mod fd;
pub mod kernels;
pub mod qseries;
pub mod quadrature;

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

pub use bessel::{bessel_k0, bessel_k0_incomplete, k0_incomplete_bound};
pub use kernels::{beta_kernel, beta_kernel_quadrature, beta_tilde_kernel, periodic_bernoulli_b1, periodic_bernoulli_b1_exact};
pub use qseries::{eta_cubed, eta_cubed_jacobi, QSeries};
pub use quadrature::{adaptive_simpson, QuadResult, QuadratureSpec};

/// Values that can be integrated and differenced: f64 and Complex64.
pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

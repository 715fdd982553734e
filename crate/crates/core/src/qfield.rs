//! Exact arithmetic in real quadratic fields Q(sqrt D).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// a + b sqrt(D) with rational a, b.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    a: BigRational,
    b: BigRational,
    d: i64,
}

impl QuadElem {
    pub fn new(a: BigRational, b: BigRational, d: i64) -> Self {
        QuadElem { a, b, d }
    }

    pub fn from_ints(a: i64, b: i64, d: i64) -> Self {
        QuadElem::new(rat(a, 1), rat(b, 1), d)
    }

    pub fn from_ratios(an: i64, ad: i64, bn: i64, bd: i64, d: i64) -> Self {
        QuadElem::new(rat(an, ad), rat(bn, bd), d)
    }

    pub fn rational(q: BigRational, d: i64) -> Self {
        QuadElem::new(q, BigRational::zero(), d)
    }

    pub fn zero(d: i64) -> Self {
        QuadElem::from_ints(0, 0, d)
    }

    pub fn one(d: i64) -> Self {
        QuadElem::from_ints(1, 0, d)
    }

    pub fn sqrt_d(d: i64) -> Self {
        QuadElem::from_ints(0, 1, d)
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn conj(&self) -> Self {
        QuadElem::new(self.a.clone(), -self.b.clone(), self.d)
    }

    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(BigInt::from(self.d))
    }

    pub fn trace(&self) -> BigRational {
        &self.a + &self.a
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Sign of the real embedding a + b sqrt(D) > 0.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let db2 = &self.b * &self.b * BigRational::from_integer(BigInt::from(self.d));
        match a2.cmp(&db2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            // D is not a square, so this only happens for a = b = 0
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_totally_positive(&self) -> bool {
        self.is_positive() && self.conj().is_positive()
    }

    pub fn cmp_real(&self, other: &QuadElem) -> Ordering {
        (self - other).signum()
    }

    pub fn abs(&self) -> QuadElem {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    /// Float value of the real embedding, without cancellation loss.
    pub fn to_f64(&self) -> f64 {
        let a = rat_to_f64(&self.a);
        let b = rat_to_f64(&self.b);
        let s = (self.d as f64).sqrt();
        if a == 0.0 || b == 0.0 || (a > 0.0) == (b > 0.0) {
            return a + b * s;
        }
        // a + b sqrt D = Nm / (a - b sqrt D), and the denominator has no cancellation
        rat_to_f64(&self.norm()) / (a - b * s)
    }

    pub fn conj_to_f64(&self) -> f64 {
        self.conj().to_f64()
    }

    pub fn inverse(&self) -> Result<QuadElem> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        let n = self.norm();
        Ok(QuadElem::new(&self.a / &n, -(&self.b / &n), self.d))
    }

    pub fn checked_div(&self, other: &QuadElem) -> Result<QuadElem> {
        Ok(self * &other.inverse()?)
    }

    pub fn scale(&self, q: &BigRational) -> QuadElem {
        QuadElem::new(&self.a * q, &self.b * q, self.d)
    }

    pub fn pow(&self, e: i64) -> Result<QuadElem> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = QuadElem::one(self.d);
        let mut sq = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &sq;
            }
            n >>= 1;
            if n > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// Largest integer n with n <= self.
    pub fn floor(&self) -> BigInt {
        let est = self.to_f64().floor();
        let mut n = if est.is_finite() {
            BigInt::from(est as i128)
        } else {
            // huge values: fall back to bounding a and b sqrt D separately
            let isq = BigInt::from(self.d).sqrt();
            self.a.floor().to_integer() + (&self.b * BigRational::from_integer(isq)).floor().to_integer()
        };
        loop {
            let q = QuadElem::rational(BigRational::from_integer(n.clone()), self.d);
            if self.cmp_real(&q) == Ordering::Less {
                n -= 1;
                continue;
            }
            let q1 = QuadElem::rational(BigRational::from_integer(&n + 1), self.d);
            if self.cmp_real(&q1) != Ordering::Less {
                n += 1;
                continue;
            }
            return n;
        }
    }

    /// Membership in the maximal order of Q(sqrt D).
    pub fn is_integral(&self) -> bool {
        if self.d.mod_floor(&4) == 1 {
            let two_b = &self.b + &self.b;
            two_b.is_integer() && (&self.a - &self.b).is_integer()
        } else {
            self.a.is_integer() && self.b.is_integer()
        }
    }

    /// |x / x'| as the totally positive element x^2 / |Nm x|.
    pub fn abs_ratio(&self) -> Result<QuadElem> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        let n = self.norm().abs();
        Ok((self * self).scale(&n.recip()))
    }

    fn check_field(&self, other: &QuadElem) {
        assert_eq!(self.d, other.d, "mixing elements of Q(sqrt {}) and Q(sqrt {})", self.d, other.d);
    }
}

/// Compares |x/x'| with |y/y'| exactly.
pub fn compare_abs_ratio(x: &QuadElem, y: &QuadElem) -> Result<Ordering> {
    if x.d != y.d {
        return Err(Error::FieldMismatch(x.d, y.d));
    }
    let nx = x.norm().abs();
    let ny = y.norm().abs();
    if nx.is_zero() || ny.is_zero() {
        return Err(Error::ZeroElement);
    }
    let lhs = (x * x).scale(&ny);
    let rhs = (y * y).scale(&nx);
    Ok(lhs.cmp_real(&rhs))
}

macro_rules! binop {
    ($tr:ident, $f:ident, $body:expr) => {
        impl<'a, 'b> $tr<&'b QuadElem> for &'a QuadElem {
            type Output = QuadElem;
            fn $f(self, o: &'b QuadElem) -> QuadElem {
                self.check_field(o);
                let g: fn(&QuadElem, &QuadElem) -> QuadElem = $body;
                g(self, o)
            }
        }
        impl $tr<QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $f(self, o: QuadElem) -> QuadElem {
                (&self).$f(&o)
            }
        }
        impl<'b> $tr<&'b QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $f(self, o: &'b QuadElem) -> QuadElem {
                (&self).$f(o)
            }
        }
    };
}

binop!(Add, add, |x, y| QuadElem::new(&x.a + &y.a, &x.b + &y.b, x.d));
binop!(Sub, sub, |x, y| QuadElem::new(&x.a - &y.a, &x.b - &y.b, x.d));
binop!(Mul, mul, |x, y| {
    let d = BigRational::from_integer(BigInt::from(x.d));
    QuadElem::new(&x.a * &y.a + &x.b * &y.b * d, &x.a * &y.b + &x.b * &y.a, x.d)
});

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem::new(-self.a.clone(), -self.b.clone(), self.d)
    }
}

impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        -&self
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let num = self.b.numer().abs();
        let den = self.b.denom();
        let mut s = String::new();
        if !num.is_one() {
            s.push_str(&num.to_string());
        }
        s.push_str(&format!("√{}", self.d));
        if !den.is_one() {
            s.push_str(&format!("/{}", den));
        }
        let neg = self.b.is_negative();
        if self.a.is_zero() {
            write!(f, "{}{}", if neg { "-" } else { "" }, s)
        } else {
            write!(f, "{} {} {}", self.a, if neg { "-" } else { "+" }, s)
        }
    }
}

fn is_squarefree(n: i64) -> bool {
    let mut p = 2i64;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// eps_L = (totally positive fundamental unit)^k generating Gamma_L.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitGroupGenerator {
    pub eps_l: QuadElem,
    pub power_of_fundamental: u64,
}

impl UnitGroupGenerator {
    pub fn log(&self) -> f64 {
        self.eps_l.to_f64().ln()
    }
}

#[derive(Clone, Debug)]
pub struct RealQuadField {
    d: i64,
    fundamental_unit: QuadElem,
}

const CF_STEP_LIMIT: usize = 100_000;
pub const DEFAULT_UNIT_SEARCH_BOUND: u64 = 1_000_000;

impl RealQuadField {
    pub fn new(d: i64) -> Result<Self> {
        if d <= 1 || !is_squarefree(d) {
            return Err(Error::InvalidDiscriminant(d));
        }
        let fundamental_unit = fundamental_unit_cf(d)?;
        Ok(RealQuadField { d, fundamental_unit })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// Generator of the maximal order over Z.
    pub fn omega(&self) -> QuadElem {
        omega(self.d)
    }

    pub fn fundamental_unit(&self) -> &QuadElem {
        &self.fundamental_unit
    }

    pub fn totally_positive_unit(&self) -> QuadElem {
        let u = &self.fundamental_unit;
        if u.norm().is_one() {
            u.clone()
        } else {
            u * u
        }
    }

    pub fn elem(&self, a: BigRational, b: BigRational) -> QuadElem {
        QuadElem::new(a, b, self.d)
    }

    /// Coordinates (c0, c1) of x = c0 + c1 omega.
    pub fn omega_coords(&self, x: &QuadElem) -> (BigRational, BigRational) {
        if self.d.mod_floor(&4) == 1 {
            let c1 = x.b() + x.b();
            (x.a() - x.b(), c1)
        } else {
            (x.a().clone(), x.b().clone())
        }
    }

    /// Smallest power eps^k of the totally positive unit with eps^k = 1 mod m sqrt(D) O.
    pub fn gamma_l_generator(&self, m: u64, bound: u64) -> Result<UnitGroupGenerator> {
        if m == 0 {
            return Err(Error::InvalidParameter("m must be positive".into()));
        }
        let u = self.totally_positive_unit();
        let modulus = QuadElem::from_ints(0, m as i64, self.d);
        let basis = [modulus.clone(), &modulus * &self.omega()];
        let one = QuadElem::one(self.d);
        let mut cur = self.reduce_mod(&u, &basis);
        for k in 1..=bound {
            let diff = &cur - &one;
            if diff.checked_div(&modulus)?.is_integral() {
                return Ok(UnitGroupGenerator { eps_l: u.pow(k as i64)?, power_of_fundamental: k });
            }
            cur = self.reduce_mod(&(&cur * &u), &basis);
        }
        Err(Error::NoCongruentUnit { d: self.d, m, bound })
    }

    // reduces x modulo the Z-lattice spanned by basis, keeping coordinates in [0,1)
    fn reduce_mod(&self, x: &QuadElem, basis: &[QuadElem; 2]) -> QuadElem {
        let (x0, x1) = self.omega_coords(x);
        let (a0, a1) = self.omega_coords(&basis[0]);
        let (b0, b1) = self.omega_coords(&basis[1]);
        let det = &a0 * &b1 - &a1 * &b0;
        let s = (&x0 * &b1 - &x1 * &b0) / &det;
        let t = (&a0 * &x1 - &a1 * &x0) / &det;
        x - &basis[0].scale(&s.floor()) - basis[1].scale(&t.floor())
    }
}

pub fn omega(d: i64) -> QuadElem {
    if d.mod_floor(&4) == 1 {
        QuadElem::from_ratios(1, 2, 1, 2, d)
    } else {
        QuadElem::sqrt_d(d)
    }
}

// Walk the continued fraction of omega; the first convergent p/q with
// |Nm(p - q omega')| = 1 gives the fundamental unit.
fn fundamental_unit_cf(d: i64) -> Result<QuadElem> {
    let w = omega(d);
    let wc = w.conj();
    let mut x = w.clone();
    let (mut p1, mut p2) = (BigInt::one(), BigInt::zero());
    let (mut q1, mut q2) = (BigInt::zero(), BigInt::one());
    for _ in 0..CF_STEP_LIMIT {
        let a = x.floor();
        let p = &a * &p1 + &p2;
        let q = &a * &q1 + &q2;
        let cand = QuadElem::rational(BigRational::from_integer(p.clone()), d)
            - wc.scale(&BigRational::from_integer(q.clone()));
        if cand.norm().abs().is_one() && cand.cmp_real(&QuadElem::one(d)) == Ordering::Greater {
            return Ok(cand);
        }
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
        let frac = &x - &QuadElem::rational(BigRational::from_integer(a), d);
        x = frac.inverse()?;
    }
    Err(Error::UnitSearchExhausted(CF_STEP_LIMIT))
}

//! Lattices L = M*a in a real quadratic field, their cosets and unit orbits.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qfield::{rat, QuadElem, RealQuadField, UnitGroupGenerator, DEFAULT_UNIT_SEARCH_BOUND};

#[derive(Clone, Debug)]
pub struct AnisotropicLattice {
    field: RealQuadField,
    ideal_basis: [QuadElem; 2],
    m: u64,
    a_norm: BigRational,
    eps_l: UnitGroupGenerator,
    basis: [QuadElem; 2],
    dual: [QuadElem; 2],
}

fn det2(a: &(BigRational, BigRational), b: &(BigRational, BigRational)) -> BigRational {
    &a.0 * &b.1 - &a.1 * &b.0
}

impl AnisotropicLattice {
    pub fn new(d: i64, ideal_basis: [QuadElem; 2], m: u64) -> Result<Self> {
        let field = RealQuadField::new(d)?;
        if m == 0 {
            return Err(Error::InvalidParameter("M must be positive".into()));
        }
        if ideal_basis.iter().any(|e| e.d() != d) {
            return Err(Error::InvalidIdeal("basis elements live in a different field".into()));
        }
        let c0 = field.omega_coords(&ideal_basis[0]);
        let c1 = field.omega_coords(&ideal_basis[1]);
        let det = det2(&c0, &c1);
        if det.is_zero() {
            return Err(Error::InvalidIdeal("basis is linearly dependent".into()));
        }
        // closed under multiplication by omega
        let w = field.omega();
        for e in &ideal_basis {
            let (x, y) = coords_in(&field, &ideal_basis, &(e * &w));
            if !x.is_integer() || !y.is_integer() {
                return Err(Error::InvalidIdeal(format!("{} * omega leaves the Z-span", e)));
            }
        }
        let a_norm = det.abs();
        let eps_l = field.gamma_l_generator(m, DEFAULT_UNIT_SEARCH_BOUND)?;
        let mq = BigRational::from_integer(BigInt::from(m));
        let basis = [ideal_basis[0].scale(&mq), ideal_basis[1].scale(&mq)];
        let mut lat = AnisotropicLattice {
            field,
            ideal_basis,
            m,
            a_norm,
            eps_l,
            basis: basis.clone(),
            dual: basis,
        };
        lat.dual = lat.compute_dual();
        Ok(lat)
    }

    pub fn field(&self) -> &RealQuadField {
        &self.field
    }

    pub fn d(&self) -> i64 {
        self.field.d()
    }

    pub fn ideal_basis(&self) -> &[QuadElem; 2] {
        &self.ideal_basis
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn a_norm(&self) -> &BigRational {
        &self.a_norm
    }

    pub fn eps_l(&self) -> &UnitGroupGenerator {
        &self.eps_l
    }

    pub fn basis(&self) -> &[QuadElem; 2] {
        &self.basis
    }

    fn am(&self) -> BigRational {
        &self.a_norm * BigRational::from_integer(BigInt::from(self.m))
    }

    /// Q(x) = Nm(x)/(A M).
    pub fn q(&self, x: &QuadElem) -> BigRational {
        x.norm() / self.am()
    }

    /// B(x, y) = Tr(x y')/(A M), so that B(x, x) = 2 Q(x).
    pub fn bilinear(&self, x: &QuadElem, y: &QuadElem) -> BigRational {
        (x * &y.conj()).trace() / self.am()
    }

    fn compute_dual(&self) -> [QuadElem; 2] {
        let g = |i: usize, j: usize| self.bilinear(&self.basis[i], &self.basis[j]);
        let (g00, g01, g10, g11) = (g(0, 0), g(0, 1), g(1, 0), g(1, 1));
        let det = &g00 * &g11 - &g01 * &g10;
        let inv = [[&g11 / &det, -(&g01 / &det)], [-(&g10 / &det), &g00 / &det]];
        [0, 1].map(|i| self.basis[0].scale(&inv[i][0]) + self.basis[1].scale(&inv[i][1]))
    }

    /// Z-basis of L*, dual to the lattice basis under B.
    pub fn dual_lattice(&self) -> &[QuadElem; 2] {
        &self.dual
    }

    pub fn contains(&self, x: &QuadElem) -> bool {
        let (a, b) = coords_in(&self.field, &self.basis, x);
        a.is_integer() && b.is_integer()
    }

    pub fn in_dual(&self, x: &QuadElem) -> bool {
        self.basis.iter().all(|b| self.bilinear(x, b).is_integer())
    }

    /// Coordinates of x in the lattice basis.
    pub fn coords(&self, x: &QuadElem) -> (BigRational, BigRational) {
        coords_in(&self.field, &self.basis, x)
    }

    pub fn scale_f64(&self) -> f64 {
        self.am().to_f64().unwrap_or(f64::NAN).sqrt()
    }

    /// (lambda, lambda') / sqrt(A M).
    pub fn embed(&self, x: &QuadElem) -> (f64, f64) {
        let s = self.scale_f64();
        (x.to_f64() / s, x.conj_to_f64() / s)
    }
}

fn coords_in(field: &RealQuadField, basis: &[QuadElem; 2], x: &QuadElem) -> (BigRational, BigRational) {
    let a = field.omega_coords(&basis[0]);
    let b = field.omega_coords(&basis[1]);
    let c = field.omega_coords(x);
    let det = det2(&a, &b);
    (det2(&c, &b) / &det, det2(&a, &c) / &det)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectedVector {
    pub t: f64,
    pub plus: f64,
    pub minus: f64,
}

/// lambda_t^{+-} = (+-lambda_1/t + lambda_2 t)/2.
pub fn project(pair: (f64, f64), t: f64) -> Result<ProjectedVector> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    Ok(ProjectedVector { t, plus: 0.5 * (pair.0 / t + pair.1 * t), minus: 0.5 * (-pair.0 / t + pair.1 * t) })
}

/// A point t > 0 of the Grassmannian, with t^2 kept exactly when it lies in F.
#[derive(Clone, Debug, PartialEq)]
pub struct TParam {
    value: f64,
    square: Option<QuadElem>,
}

impl TParam {
    pub fn real(t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
        }
        Ok(TParam { value: t, square: None })
    }

    /// t = sqrt(square) for a totally positive square.
    pub fn from_square(square: QuadElem) -> Result<Self> {
        if !square.is_totally_positive() {
            return Err(Error::InvalidParameter(format!("t^2 = {} must be totally positive", square)));
        }
        Ok(TParam { value: square.to_f64().sqrt(), square: Some(square) })
    }

    /// t = x for a totally positive x.
    pub fn from_elem(x: &QuadElem) -> Result<Self> {
        if !x.is_totally_positive() {
            return Err(Error::InvalidParameter(format!("t = {} must be totally positive", x)));
        }
        Ok(TParam { value: x.to_f64(), square: Some(x * x) })
    }

    pub fn one(d: i64) -> Self {
        TParam { value: 1.0, square: Some(QuadElem::one(d)) }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn square(&self) -> Option<&QuadElem> {
        self.square.as_ref()
    }

    pub fn exact_square(&self) -> Result<&QuadElem> {
        self.square.as_ref().ok_or_else(|| Error::InvalidParameter(format!("t = {} needs t^2 in the field", self.value)))
    }

    /// t * eps^k for a totally positive unit eps.
    pub fn times_unit(&self, eps: &QuadElem, k: i64) -> Result<TParam> {
        let f = eps.to_f64().powi(k as i32);
        let square = match &self.square {
            Some(s) => Some(s * &eps.pow(2 * k)?),
            None => None,
        };
        Ok(TParam { value: self.value * f, square })
    }
}

#[derive(Clone, Debug)]
pub struct Coset {
    lattice: Arc<AnisotropicLattice>,
    h: QuadElem,
}

impl Coset {
    pub fn new(lattice: Arc<AnisotropicLattice>, h: QuadElem) -> Result<Self> {
        if h.d() != lattice.d() || !lattice.in_dual(&h) {
            return Err(Error::NotInDual(h.to_string()));
        }
        Ok(Coset { lattice, h })
    }

    pub fn lattice(&self) -> &AnisotropicLattice {
        &self.lattice
    }

    pub fn lattice_arc(&self) -> &Arc<AnisotropicLattice> {
        &self.lattice
    }

    pub fn h(&self) -> &QuadElem {
        &self.h
    }

    pub fn contains(&self, x: &QuadElem) -> bool {
        x.d() == self.h.d() && self.lattice.contains(&(x - &self.h))
    }

    pub fn same_as(&self, other: &Coset) -> bool {
        self.lattice.d() == other.lattice.d() && self.lattice.basis == other.lattice.basis && self.contains(&other.h)
    }

    pub fn is_zero_coset(&self) -> bool {
        self.lattice.contains(&self.h)
    }

    /// The coset h + shift, for shift in L*.
    pub fn translate(&self, shift: &QuadElem) -> Result<Coset> {
        Coset::new(self.lattice.clone(), &self.h + shift)
    }
}

/// Canonical representative of a Gamma_L-orbit, or the zero orbit.
#[derive(Clone, Debug)]
pub struct OrbitRep {
    pub lambda0: QuadElem,
    pub q_value: BigRational,
    /// |lambda0/lambda0'|; None for the zero orbit.
    pub ratio: Option<QuadElem>,
    pub t0_square: QuadElem,
}

impl OrbitRep {
    pub fn zero(d: i64, t0_square: QuadElem) -> Self {
        OrbitRep { lambda0: QuadElem::zero(d), q_value: BigRational::zero(), ratio: None, t0_square }
    }

    pub fn is_zero(&self) -> bool {
        self.ratio.is_none()
    }
}

fn ratio_of(x: &QuadElem) -> Result<QuadElem> {
    x.abs_ratio()
}

/// Whether t0^2 <= ratio < t0^2 eps_L^2.
pub fn in_window(ratio: &QuadElem, t0_square: &QuadElem, eps_l: &QuadElem) -> bool {
    let upper = t0_square * &(eps_l * eps_l);
    ratio.cmp_real(t0_square) != Ordering::Less && ratio.cmp_real(&upper) == Ordering::Less
}

/// lambda0 = lambda eps_L^{-n} in the canonical window for t0.
pub fn reduce(coset: &Coset, lambda: &QuadElem, t0: &TParam) -> Result<(OrbitRep, i64)> {
    if lambda.is_zero() {
        return Err(Error::ZeroElement);
    }
    if !coset.contains(lambda) {
        return Err(Error::NotInCoset(lambda.to_string()));
    }
    let t0sq = t0.exact_square()?;
    let lat = coset.lattice();
    let eps = &lat.eps_l().eps_l;
    let rho = ratio_of(lambda)?;
    let log_eps = eps.to_f64().ln();
    let est = (lambda.to_f64().abs().ln() - lambda.conj_to_f64().abs().ln() - t0sq.to_f64().ln()) / (2.0 * log_eps);
    let mut n = est.floor() as i64;
    let eps2 = eps * eps;
    let mut r = &rho * &eps2.pow(-n)?;
    let upper = t0sq * &eps2;
    loop {
        if r.cmp_real(t0sq) == Ordering::Less {
            n -= 1;
            r = &r * &eps2;
        } else if r.cmp_real(&upper) != Ordering::Less {
            n += 1;
            r = r.checked_div(&eps2)?;
        } else {
            break;
        }
    }
    let lambda0 = lambda * &eps.pow(-n)?;
    let q_value = lat.q(&lambda0);
    Ok((OrbitRep { lambda0, q_value, ratio: Some(r), t0_square: t0sq.clone() }, n))
}

pub fn sort_orbits(orbits: &mut [OrbitRep]) {
    orbits.sort_by(|a, b| {
        a.q_value
            .abs()
            .cmp(&b.q_value.abs())
            .then(a.q_value.cmp(&b.q_value))
            .then_with(|| match (&a.ratio, &b.ratio) {
                (Some(x), Some(y)) => x.cmp_real(y),
                (None, None) => Ordering::Equal,
                (None, _) => Ordering::Less,
                (_, None) => Ordering::Greater,
            })
            .then_with(|| a.lambda0.cmp_real(&b.lambda0))
    });
}

/// Coefficient ranges (m, n) with h + m b0 + n b1 inside |x| <= xmax, |x'| <= ymax.
pub(crate) fn box_points(coset: &Coset, xmax: f64, ymax: f64) -> Vec<(i64, i64)> {
    let lat = coset.lattice();
    let (b0, b1) = (&lat.basis()[0], &lat.basis()[1]);
    let (p, pc) = (b0.to_f64(), b0.conj_to_f64());
    let (q, qc) = (b1.to_f64(), b1.conj_to_f64());
    let (h, hc) = (coset.h().to_f64(), coset.h().conj_to_f64());
    let det = p * qc - q * pc;
    // m = (qc (x - h) - q (y - hc)) / det
    let mc = (-qc * h + q * hc) / det;
    let mr = (qc.abs() * xmax + q.abs() * ymax) / det.abs();
    let m_lo = (mc - mr).floor() as i64 - 1;
    let m_hi = (mc + mr).ceil() as i64 + 1;
    let mut out = Vec::new();
    for m in m_lo..=m_hi {
        let x0 = h + m as f64 * p;
        let y0 = hc + m as f64 * pc;
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (c, v, bound) in [(q, x0, xmax), (qc, y0, ymax)] {
            if c == 0.0 {
                if v.abs() > bound * (1.0 + 1e-9) + 1e-9 {
                    lo = f64::INFINITY;
                }
                continue;
            }
            let a = (-bound - v) / c;
            let b = (bound - v) / c;
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        }
        if lo > hi {
            continue;
        }
        for n in (lo.floor() as i64 - 1)..=(hi.ceil() as i64 + 1) {
            out.push((m, n));
        }
    }
    out
}

pub(crate) fn point(coset: &Coset, m: i64, n: i64) -> QuadElem {
    let b = coset.lattice().basis();
    coset.h() + &b[0].scale(&rat(m, 1)) + b[1].scale(&rat(n, 1))
}

/// One canonical representative per Gamma_L-orbit with 0 < |Q| <= norm_bound,
/// plus the zero orbit when h is in L.
pub fn enumerate_orbits(coset: &Coset, t0: &TParam, norm_bound: &BigRational) -> Result<Vec<OrbitRep>> {
    if !norm_bound.is_positive() {
        return Err(Error::InvalidParameter("norm bound must be positive".into()));
    }
    let t0sq = t0.exact_square()?;
    let lat = coset.lattice();
    let eps = &lat.eps_l().eps_l;
    let bam = (norm_bound * lat.am()).to_f64().unwrap_or(f64::INFINITY).sqrt();
    let t0f = t0sq.to_f64().sqrt();
    let slack = 1.0 + 1e-9;
    let xmax = bam * t0f * eps.to_f64() * slack;
    let ymax = bam / t0f * slack;
    let mut out = Vec::new();
    if coset.is_zero_coset() {
        out.push(OrbitRep::zero(lat.d(), t0sq.clone()));
    }
    for (m, n) in box_points(coset, xmax, ymax) {
        let x = point(coset, m, n);
        if x.is_zero() {
            continue;
        }
        let q = lat.q(&x);
        if q.abs() > *norm_bound {
            continue;
        }
        let r = ratio_of(&x)?;
        if in_window(&r, t0sq, eps) {
            out.push(OrbitRep { lambda0: x, q_value: q, ratio: Some(r), t0_square: t0sq.clone() });
        }
    }
    sort_orbits(&mut out);
    Ok(out)
}

/// Serialized lattice and coset; integers are kept verbatim for exact round trips.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDescriptor {
    pub d: i64,
    pub ideal_basis: [[i64; 4]; 2],
    pub m: u64,
    pub coset: [i64; 4],
}

fn elem_of(c: &[i64; 4], d: i64) -> Result<QuadElem> {
    if c[1] == 0 || c[3] == 0 {
        return Err(Error::Descriptor("zero denominator".into()));
    }
    Ok(QuadElem::from_ratios(c[0], c[1], c[2], c[3], d))
}

impl LatticeDescriptor {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Descriptor(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn build(&self) -> Result<Coset> {
        let basis = [elem_of(&self.ideal_basis[0], self.d)?, elem_of(&self.ideal_basis[1], self.d)?];
        let lat = AnisotropicLattice::new(self.d, basis, self.m)?;
        Coset::new(Arc::new(lat), elem_of(&self.coset, self.d)?)
    }
}

pub mod presets {
    use super::*;

    /// L = 2(3Z + sqrt6 Z) = 6Z + 2 sqrt6 Z.
    pub fn cohen_lattice() -> Arc<AnisotropicLattice> {
        let basis = [QuadElem::from_ints(3, 0, 6), QuadElem::from_ints(0, 1, 6)];
        Arc::new(AnisotropicLattice::new(6, basis, 2).expect("cohen lattice"))
    }

    /// h1..h4 = 1/2, 7/2, 1/2 + sqrt6, 7/2 + sqrt6.
    pub fn cohen_cosets() -> Vec<Coset> {
        let lat = cohen_lattice();
        [(1, 0), (7, 0), (1, 2), (7, 2)]
            .iter()
            .map(|&(a, b)| Coset::new(lat.clone(), QuadElem::from_ratios(a, 2, b, 2, 6)).expect("cohen coset"))
            .collect()
    }

    /// L = 2 O_F for F = Q(sqrt 6).
    pub fn nontrivial_lattice() -> Arc<AnisotropicLattice> {
        let basis = [QuadElem::from_ints(1, 0, 6), QuadElem::from_ints(0, 1, 6)];
        Arc::new(AnisotropicLattice::new(6, basis, 2).expect("nontrivial lattice"))
    }

    /// h = 1/2 + sqrt6/12 and h' = 1/2 - sqrt6/12.
    pub fn nontrivial_cosets() -> Vec<Coset> {
        let lat = nontrivial_lattice();
        [1, -1]
            .iter()
            .map(|&s| Coset::new(lat.clone(), QuadElem::from_ratios(1, 2, s, 12, 6)).expect("nontrivial coset"))
            .collect()
    }

    pub fn cohen_descriptor(i: usize) -> LatticeDescriptor {
        let c = [[1, 2, 0, 1], [7, 2, 0, 1], [1, 2, 1, 1], [7, 2, 1, 1]][i];
        LatticeDescriptor { d: 6, ideal_basis: [[3, 1, 0, 1], [0, 1, 1, 1]], m: 2, coset: c }
    }

    pub fn nontrivial_descriptor(i: usize) -> LatticeDescriptor {
        let c = [[1, 2, 1, 12], [1, 2, -1, 12]][i];
        LatticeDescriptor { d: 6, ideal_basis: [[1, 1, 0, 1], [0, 1, 1, 1]], m: 2, coset: c }
    }

    #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
    pub enum Preset {
        Cohen,
        Nontrivial,
    }

    impl Preset {
        pub const ALL: [Preset; 2] = [Preset::Cohen, Preset::Nontrivial];

        pub fn name(self) -> &'static str {
            match self {
                Preset::Cohen => "cohen",
                Preset::Nontrivial => "nontrivial",
            }
        }

        pub fn cosets(self) -> Vec<Coset> {
            match self {
                Preset::Cohen => cohen_cosets(),
                Preset::Nontrivial => nontrivial_cosets(),
            }
        }

        pub fn coset_count(self) -> usize {
            match self {
                Preset::Cohen => 4,
                Preset::Nontrivial => 2,
            }
        }

        pub fn descriptor(self, i: usize) -> LatticeDescriptor {
            match self {
                Preset::Cohen => cohen_descriptor(i),
                Preset::Nontrivial => nontrivial_descriptor(i),
            }
        }

        /// N with n = N Q the integral Fourier index used in the tables.
        pub fn index_scale(self) -> i64 {
            match self {
                Preset::Cohen => 24,
                Preset::Nontrivial => 48,
            }
        }

        /// The factor c with beta = c lambda generating the ideal listed in the tables.
        pub fn generator_scale(self) -> QuadElem {
            match self {
                Preset::Cohen => QuadElem::from_ints(2, 0, 6),
                Preset::Nontrivial => QuadElem::from_ints(0, 2, 6),
            }
        }
    }

    impl std::str::FromStr for Preset {
        type Err = Error;

        fn from_str(s: &str) -> Result<Self> {
            match s {
                "cohen" => Ok(Preset::Cohen),
                "nontrivial" => Ok(Preset::Nontrivial),
                _ => Err(Error::Unknown { kind: "preset", name: s.to_string() }),
            }
        }
    }
}

//! Fourier coefficients a_lambda(t1, t2) and c~_{t0} of the harmonic parts.

use std::cmp::Ordering;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{enumerate_orbits, in_window, reduce, AnisotropicLattice, Coset, OrbitRep, TParam};
use crate::qfield::{rat, QuadElem};
use crate::specfun::kernels::{a_sign_form, periodic_bernoulli_b1};

/// The units behind log eps_L: eps_L = eps_tp^k with eps_tp the totally positive fundamental unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogBasis {
    pub eps_l: QuadElem,
    pub eps_tp: QuadElem,
    pub k: u64,
}

impl LogBasis {
    pub fn of(lat: &AnisotropicLattice) -> Self {
        LogBasis {
            eps_l: lat.eps_l().eps_l.clone(),
            eps_tp: lat.field().totally_positive_unit(),
            k: lat.eps_l().power_of_fundamental,
        }
    }

    pub fn log_eps_l(&self) -> f64 {
        self.eps_l.to_f64().ln()
    }
}

/// r log eps_L + (1/2) log mu, normalized to 1 <= mu < eps_tp.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactCoefficient {
    r: BigRational,
    mu: QuadElem,
    basis: LogBasis,
}

impl ExactCoefficient {
    pub fn new(r: BigRational, mu: QuadElem, basis: &LogBasis) -> Result<Self> {
        if !mu.is_totally_positive() {
            return Err(Error::InvalidParameter(format!("mu = {} must be totally positive", mu)));
        }
        let one = QuadElem::one(mu.d());
        let e = &basis.eps_tp;
        // (1/2) log eps_tp = log eps_L / (2k)
        let step = rat(1, 2 * basis.k as i64);
        let est = (mu.to_f64().ln() / e.to_f64().ln()).floor() as i64;
        let mut j = est;
        let mut m = &mu * &e.pow(-j)?;
        loop {
            if m.cmp_real(&one) == Ordering::Less {
                m = &m * e;
                j -= 1;
            } else if m.cmp_real(e) != Ordering::Less {
                m = m.checked_div(e)?;
                j += 1;
            } else {
                break;
            }
        }
        Ok(ExactCoefficient { r: r + step * BigRational::from_integer(BigInt::from(j)), mu: m, basis: basis.clone() })
    }

    pub fn zero(basis: &LogBasis) -> Self {
        ExactCoefficient { r: BigRational::zero(), mu: QuadElem::one(basis.eps_l.d()), basis: basis.clone() }
    }

    pub fn r(&self) -> &BigRational {
        &self.r
    }

    pub fn mu(&self) -> &QuadElem {
        &self.mu
    }

    pub fn basis(&self) -> &LogBasis {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.mu == QuadElem::one(self.mu.d())
    }

    pub fn to_f64(&self) -> f64 {
        self.r.to_f64().unwrap_or(f64::NAN) * self.basis.log_eps_l() + 0.5 * self.mu.to_f64().ln()
    }

    pub fn scale_int(&self, n: i64) -> Result<Self> {
        ExactCoefficient::new(&self.r * rat(n, 1), self.mu.pow(n)?, &self.basis)
    }
}

impl Add for &ExactCoefficient {
    type Output = ExactCoefficient;
    fn add(self, o: &ExactCoefficient) -> ExactCoefficient {
        ExactCoefficient::new(&self.r + &o.r, &self.mu * &o.mu, &self.basis).expect("product of totally positive elements")
    }
}

impl Neg for &ExactCoefficient {
    type Output = ExactCoefficient;
    fn neg(self) -> ExactCoefficient {
        let inv = self.mu.inverse().expect("mu is nonzero");
        ExactCoefficient::new(-self.r.clone(), inv, &self.basis).expect("inverse of a totally positive element")
    }
}

impl Sub for &ExactCoefficient {
    type Output = ExactCoefficient;
    fn sub(self, o: &ExactCoefficient) -> ExactCoefficient {
        self + &(-o)
    }
}

/// Exact value of a harmonic coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoefficientValue {
    /// a_lambda in {0, 1/2, 1}
    Rational(BigRational),
    Linear(ExactCoefficient),
    /// log eps_L times the inner coefficient (zero orbit of c~)
    LogEpsTimes(ExactCoefficient),
}

impl CoefficientValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            CoefficientValue::Rational(q) => q.to_f64().unwrap_or(f64::NAN),
            CoefficientValue::Linear(c) => c.to_f64(),
            CoefficientValue::LogEpsTimes(c) => c.basis.log_eps_l() * c.to_f64(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            CoefficientValue::Rational(q) => q.is_zero(),
            CoefficientValue::Linear(c) | CoefficientValue::LogEpsTimes(c) => c.is_zero(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HarmonicCoefficient {
    pub index: BigRational,
    pub value: CoefficientValue,
    pub orbit: OrbitRep,
}

fn check_order(t1: f64, t2: f64) -> Result<()> {
    if !(t1 > 0.0 && t2 > t1) {
        return Err(Error::InvalidParameter(format!("need 0 < t1 < t2, got {t1}, {t2}")));
    }
    Ok(())
}

/// a_lambda from the window form, lambda = (lambda_1, lambda_2); log(t2/t1) at lambda = 0.
pub fn a_coefficient_f64(pair: (f64, f64), t1: f64, t2: f64) -> Result<f64> {
    check_order(t1, t2)?;
    if pair.0 == 0.0 && pair.1 == 0.0 {
        return Ok((t2 / t1).ln());
    }
    let r = (pair.0 / pair.1).abs();
    let (lo, hi) = (t1 * t1, t2 * t2);
    Ok(if r == lo || r == hi {
        0.5
    } else if lo < r && r < hi {
        1.0
    } else {
        0.0
    })
}

/// Exact a_lambda(t1, t2) for lambda != 0, from |lambda/lambda'| against t1^2 and t2^2.
pub fn a_coefficient_exact(lambda: &QuadElem, t1: &TParam, t2: &TParam) -> Result<BigRational> {
    let (s1, s2) = (t1.exact_square()?, t2.exact_square()?);
    if s1.cmp_real(s2) != Ordering::Less {
        return Err(Error::InvalidParameter("need t1 < t2".into()));
    }
    let rho = lambda.abs_ratio()?;
    let c1 = rho.cmp_real(s1);
    let c2 = rho.cmp_real(s2);
    Ok(match (c1, c2) {
        (Ordering::Equal, _) | (_, Ordering::Equal) => rat(1, 2),
        (Ordering::Greater, Ordering::Less) => rat(1, 1),
        _ => rat(0, 1),
    })
}

/// a_0(t1, t2) = log(t2/t1) = (1/2) log(t2^2/t1^2).
pub fn a_zero_orbit(t1: &TParam, t2: &TParam, basis: &LogBasis) -> Result<ExactCoefficient> {
    let mu = t2.exact_square()?.checked_div(t1.exact_square()?)?;
    ExactCoefficient::new(BigRational::zero(), mu, basis)
}

/// Whether the sign form and the window form of a_lambda agree.
pub fn a_equivalence_check(pair: (f64, f64), t1: f64, t2: f64) -> Result<bool> {
    if pair.0 * pair.1 == 0.0 {
        return Err(Error::InvalidParameter("a_equivalence_check needs Q(lambda) != 0".into()));
    }
    Ok(a_sign_form(pair, t1, t2) == a_coefficient_f64(pair, t1, t2)?)
}

/// c~_{t0} for a canonical orbit representative.
pub fn c_tilde(orbit: &OrbitRep, basis: &LogBasis) -> Result<CoefficientValue> {
    let t0sq = &orbit.t0_square;
    match &orbit.ratio {
        None => Ok(CoefficientValue::LogEpsTimes(ExactCoefficient::new(rat(1, 2), t0sq.clone(), basis)?)),
        Some(rho) => {
            if !in_window(rho, t0sq, &basis.eps_l) {
                return Err(Error::NonCanonical(t0sq.to_string()));
            }
            // B_1 argument lies in [0, 1); it vanishes exactly on the left edge
            let c = if rho == t0sq || rho.cmp_real(t0sq) == Ordering::Equal {
                ExactCoefficient::new(rat(1, 2), t0sq.clone(), basis)?
            } else {
                ExactCoefficient::new(BigRational::zero(), rho.clone(), basis)?
            };
            Ok(CoefficientValue::Linear(c))
        }
    }
}

/// Float c~_{t0} straight from the B_1 formula; any orbit element may be used.
pub fn c_tilde_f64(pair: (f64, f64), t0: f64, log_eps_l: f64) -> f64 {
    let base = 0.5 * (t0 * t0).ln() + 0.5 * log_eps_l;
    if pair.0 == 0.0 && pair.1 == 0.0 {
        return log_eps_l * base;
    }
    let x = ((pair.0 / pair.1).abs().ln() - 2.0 * t0.ln()) / (2.0 * log_eps_l);
    base + log_eps_l * periodic_bernoulli_b1(x)
}

#[derive(Clone, Debug)]
pub struct TelescopingReport {
    pub sum_a: BigRational,
    pub terms: usize,
    pub lhs: ExactCoefficient,
    pub rhs: ExactCoefficient,
    pub holds: bool,
}

/// -log(eps_L) sum_n a_{lambda eps_L^n}(t1, t2) = c~_{t1} - c~_{t2}, exactly.
pub fn telescoping_check(coset: &Coset, lambda: &QuadElem, t1: &TParam, t2: &TParam) -> Result<TelescopingReport> {
    if lambda.is_zero() {
        return Err(Error::ZeroElement);
    }
    let lat = coset.lattice();
    let basis = LogBasis::of(lat);
    let eps = &basis.eps_l;
    let s2 = t2.exact_square()?;
    let (o1, _) = reduce(coset, lambda, t1)?;
    let (o2, _) = reduce(coset, lambda, t2)?;
    // walk the orbit upward from the t1 window until |x/x'| passes t2^2
    let mut x = o1.lambda0.clone();
    let mut sum = BigRational::zero();
    let mut terms = 0;
    loop {
        let rho = x.abs_ratio()?;
        if rho.cmp_real(s2) == Ordering::Greater {
            break;
        }
        let a = a_coefficient_exact(&x, t1, t2)?;
        if !a.is_zero() {
            terms += 1;
        }
        sum += a;
        x = &x * eps;
    }
    let lhs = ExactCoefficient::new(-sum.clone(), QuadElem::one(lat.d()), &basis)?;
    let linear = |v: CoefficientValue| match v {
        CoefficientValue::Linear(c) => Ok(c),
        _ => Err(Error::InvalidParameter("expected a nonzero orbit".into())),
    };
    let rhs = &linear(c_tilde(&o1, &basis)?)? - &linear(c_tilde(&o2, &basis)?)?;
    Ok(TelescopingReport { holds: lhs == rhs, sum_a: sum, terms, lhs, rhs })
}

/// c~_{t0} for every orbit with |Q| <= norm_bound, zero orbit first when present.
pub fn c_tilde_table(coset: &Coset, t0: &TParam, norm_bound: &BigRational) -> Result<Vec<HarmonicCoefficient>> {
    let basis = LogBasis::of(coset.lattice());
    enumerate_orbits(coset, t0, norm_bound)?
        .into_iter()
        .map(|o| Ok(HarmonicCoefficient { index: o.q_value.clone(), value: c_tilde(&o, &basis)?, orbit: o }))
        .collect()
}

/// a_lambda(t1, t2) summed over each orbit, for orbits with |Q| <= norm_bound.
/// Requires t2/t1 to stay within one window so each orbit has finitely many terms.
pub fn a_table(coset: &Coset, t1: &TParam, t2: &TParam, norm_bound: &BigRational) -> Result<Vec<HarmonicCoefficient>> {
    let lat = coset.lattice();
    let basis = LogBasis::of(lat);
    let mut out = Vec::new();
    for o in enumerate_orbits(coset, t1, norm_bound)? {
        let value = if o.is_zero() {
            CoefficientValue::Linear(a_zero_orbit(t1, t2, &basis)?)
        } else {
            CoefficientValue::Rational(orbit_a_sum(&o.lambda0, t1, t2, &basis.eps_l)?)
        };
        out.push(HarmonicCoefficient { index: o.q_value.clone(), value, orbit: o });
    }
    Ok(out)
}

fn orbit_a_sum(lambda0: &QuadElem, t1: &TParam, t2: &TParam, eps: &QuadElem) -> Result<BigRational> {
    let s2 = t2.exact_square()?;
    let mut x = lambda0.clone();
    let mut sum = BigRational::zero();
    while x.abs_ratio()?.cmp_real(s2) != Ordering::Greater {
        sum += a_coefficient_exact(&x, t1, t2)?;
        x = &x * eps;
    }
    Ok(sum)
}

/// Sums coefficients of orbits sharing a Fourier index. Zero-orbit entries are kept apart.
pub fn aggregate_by_index(coeffs: &[HarmonicCoefficient]) -> Vec<(BigRational, CoefficientValue)> {
    let mut out: Vec<(BigRational, CoefficientValue)> = Vec::new();
    for c in coeffs {
        if let Some(last) = out.iter_mut().find(|e| e.0 == c.index && !matches!(e.1, CoefficientValue::LogEpsTimes(_))) {
            let merged = match (&last.1, &c.value) {
                (CoefficientValue::Rational(a), CoefficientValue::Rational(b)) => Some(CoefficientValue::Rational(a + b)),
                (CoefficientValue::Linear(a), CoefficientValue::Linear(b)) => Some(CoefficientValue::Linear(a + b)),
                _ => None,
            };
            if let Some(m) = merged {
                last.1 = m;
                continue;
            }
        }
        out.push((c.index.clone(), c.value.clone()));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub index_num: String,
    pub index_den: String,
    pub r_num: String,
    pub r_den: String,
    pub mu: [String; 4],
    pub float_value: f64,
    /// None for r log eps_L + (1/2) log mu; "rational" when the value is r itself;
    /// "log_eps_times" when the whole expression is multiplied by log eps_L.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
}

impl CoefficientRecord {
    pub fn new(index: &BigRational, value: &CoefficientValue) -> Self {
        let (r, mu, kind) = match value {
            CoefficientValue::Rational(q) => (q.clone(), QuadElem::from_ints(1, 0, 1), Some("rational")),
            CoefficientValue::Linear(c) => (c.r.clone(), c.mu.clone(), None),
            CoefficientValue::LogEpsTimes(c) => (c.r.clone(), c.mu.clone(), Some("log_eps_times")),
        };
        let mu_s = [mu.a().numer(), mu.a().denom(), mu.b().numer(), mu.b().denom()].map(|x| x.to_string());
        CoefficientRecord {
            index_num: index.numer().to_string(),
            index_den: index.denom().to_string(),
            r_num: r.numer().to_string(),
            r_den: r.denom().to_string(),
            mu: mu_s,
            float_value: value.to_f64(),
            kind: kind.map(String::from),
        }
    }
}

pub fn coefficient_table_json(coeffs: &[(BigRational, CoefficientValue)]) -> Result<String> {
    let recs: Vec<CoefficientRecord> = coeffs.iter().map(|(i, v)| CoefficientRecord::new(i, v)).collect();
    Ok(serde_json::to_string_pretty(&recs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::presets::*;
    use proptest::prelude::*;

    fn eps() -> QuadElem {
        QuadElem::from_ints(5, 2, 6)
    }

    fn t_eps(k: i64) -> TParam {
        TParam::from_elem(&eps().pow(k).unwrap()).unwrap()
    }

    #[test]
    fn a_examples() {
        let one = TParam::one(6);
        let e = t_eps(1);
        // beta = 2 lambda = 1 in coset 1/2: boundary of the window
        let l = QuadElem::from_ratios(1, 2, 0, 1, 6);
        assert_eq!(a_coefficient_exact(&l, &one, &e).unwrap(), rat(1, 2));
        // beta = 1 + 2 sqrt6 in coset 1/2 + sqrt6
        let l = QuadElem::from_ratios(1, 2, 1, 1, 6);
        assert!(cohen_cosets()[2].contains(&l));
        assert_eq!(a_coefficient_exact(&l, &one, &e).unwrap(), rat(1, 1));
        assert_eq!(a_coefficient_f64((0.0, 0.0), 1.0, 3.0).unwrap(), 3f64.ln());
        assert!(a_coefficient_f64((1.0, 1.0), 2.0, 1.0).is_err());
        assert_eq!(a_coefficient_f64((1.0, 1.0), 1.0, 2.0).unwrap(), 0.5);
        assert!(a_equivalence_check((1.0, 1.0), 1.0, 2.0).unwrap());
    }

    #[test]
    fn normal_form_unique() {
        let b = LogBasis::of(&cohen_lattice());
        let c = ExactCoefficient::new(rat(0, 1), eps().pow(5).unwrap(), &b).unwrap();
        // (1/2) log eps^5 = (5/4) log eps_L
        assert_eq!(c.r(), &rat(5, 4));
        assert_eq!(c.mu(), &QuadElem::one(6));
        let x = QuadElem::from_ratios(7, 5, 2, 5, 6);
        let c1 = ExactCoefficient::new(rat(1, 1), x.clone(), &b).unwrap();
        let c2 = ExactCoefficient::new(rat(0, 1), &x * &b.eps_l.pow(2).unwrap(), &b).unwrap();
        assert_eq!(c1, c2);
        assert!((c1.to_f64() - (b.log_eps_l() + 0.5 * x.to_f64().ln())).abs() < 1e-14);
        assert!(ExactCoefficient::new(rat(0, 1), QuadElem::from_ints(1, 1, 6), &b).is_err());
    }

    #[test]
    fn c_tilde_examples() {
        let lat = nontrivial_lattice();
        let b = LogBasis::of(&lat);
        let one = TParam::one(6);
        let z = crate::lattice::OrbitRep::zero(6, QuadElem::one(6));
        let v = c_tilde(&z, &b).unwrap();
        assert!((v.to_f64() - 0.5 * b.log_eps_l().powi(2)).abs() < 1e-13);
        // the orbit with |lambda/lambda'| = (7 + 2 sqrt6)/5
        let c = &nontrivial_cosets()[0];
        let lambda = QuadElem::from_ratios(1, 2, 1, 12, 6);
        let want = ExactCoefficient::new(rat(0, 1), QuadElem::from_ratios(7, 5, 2, 5, 6), &b).unwrap();
        let found = enumerate_orbits(c, &one, &rat(1, 1))
            .unwrap()
            .into_iter()
            .map(|o| c_tilde(&o, &b).unwrap())
            .any(|v| v == CoefficientValue::Linear(want.clone()));
        assert!(found, "{}", lambda);
        // left edge of the window
        let l = QuadElem::from_ratios(1, 2, 0, 1, 6);
        let (o, _) = reduce(&cohen_cosets()[0], &l, &one).unwrap();
        let cb = LogBasis::of(&cohen_lattice());
        let v = c_tilde(&o, &cb).unwrap();
        assert!((v.to_f64() - 0.5 * cb.log_eps_l()).abs() < 1e-14);
    }

    #[test]
    fn c_tilde_rejects_noncanonical() {
        let b = LogBasis::of(&cohen_lattice());
        let one = TParam::one(6);
        let (mut o, _) = reduce(&cohen_cosets()[2], &QuadElem::from_ratios(1, 2, 1, 1, 6), &one).unwrap();
        o.lambda0 = &o.lambda0 * &b.eps_l;
        o.ratio = Some(o.lambda0.abs_ratio().unwrap());
        assert!(matches!(c_tilde(&o, &b), Err(Error::NonCanonical(_))));
    }

    #[test]
    fn telescoping_all_orbits() {
        let windows = [(0i64, 1i64), (0, 2), (1, 3)];
        let mut cosets = cohen_cosets();
        cosets.extend(nontrivial_cosets());
        for c in &cosets {
            for o in enumerate_orbits(c, &TParam::one(6), &rat(100, 24)).unwrap() {
                for &(i, j) in &windows {
                    let r = telescoping_check(c, &o.lambda0, &t_eps(i), &t_eps(j)).unwrap();
                    assert!(r.holds, "{} on ({i},{j}): {:?}", o.lambda0, r);
                }
            }
        }
    }

    #[test]
    fn full_window_sums_to_one() {
        let c = &cohen_cosets()[1];
        let el = t_eps(2);
        for o in enumerate_orbits(c, &TParam::one(6), &rat(10, 1)).unwrap() {
            let r = telescoping_check(c, &o.lambda0, &TParam::one(6), &el).unwrap();
            assert_eq!(r.sum_a, rat(1, 1));
        }
    }

    #[test]
    fn json_table() {
        let c = &cohen_cosets()[0];
        let t = c_tilde_table(c, &TParam::one(6), &rat(2, 1)).unwrap();
        let agg = aggregate_by_index(&t);
        let s = coefficient_table_json(&agg).unwrap();
        let back: Vec<CoefficientRecord> = serde_json::from_str(&s).unwrap();
        assert_eq!(back.len(), agg.len());
        assert_eq!(back[0].index_num, "1");
        assert_eq!(back[0].index_den, "24");
    }

    proptest! {
        #[test]
        fn a_forms_agree(l1 in -5.0f64..5.0, l2 in -5.0f64..5.0, t1 in 0.2f64..3.0, r in 1.01f64..5.0) {
            prop_assume!(l1.abs() > 1e-3 && l2.abs() > 1e-3);
            prop_assert!(a_equivalence_check((l1, l2), t1, t1 * r).unwrap());
        }

        #[test]
        fn c_tilde_orbit_well_defined(m in -30i64..30, n in -30i64..30, k in -2i64..3) {
            let c = &nontrivial_cosets()[0];
            let lat = c.lattice();
            let b = LogBasis::of(lat);
            let x = crate::lattice::point(c, m, n);
            let one = TParam::one(6);
            let (o1, _) = reduce(c, &x, &one).unwrap();
            let (o2, _) = reduce(c, &(&x * &b.eps_l.pow(k).unwrap()), &one).unwrap();
            let v1 = c_tilde(&o1, &b).unwrap();
            prop_assert_eq!(&v1, &c_tilde(&o2, &b).unwrap());
            let (p1, p2) = lat.embed(&x);
            let f = c_tilde_f64((p1, p2), 1.0, b.log_eps_l());
            prop_assert!((f - v1.to_f64()).abs() < 1e-12 * f.abs().max(1.0));
        }

        #[test]
        fn telescoping_random(m in -20i64..20, n in -20i64..20, i in -2i64..2, w in 1i64..4) {
            let c = &cohen_cosets()[3];
            let x = crate::lattice::point(c, m, n);
            let r = telescoping_check(c, &x, &t_eps(i), &t_eps(i + w)).unwrap();
            prop_assert!(r.holds);
            prop_assert!(r.terms as i64 <= (w + 1) / 2 + 1);
        }
    }
}

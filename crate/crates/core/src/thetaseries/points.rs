//! Lattice point sets with rigorous truncation bounds, and compensated sums.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::lattice::{box_points, Coset};

pub const TERM_BUDGET: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticePoint {
    pub m: i64,
    pub n: i64,
    pub l1: f64,
    pub l2: f64,
    pub q: f64,
}

impl LatticePoint {
    pub fn is_zero(&self) -> bool {
        self.l1 == 0.0 && self.l2 == 0.0
    }

    /// lambda_1^2/t^2 + lambda_2^2 t^2 = 2((lambda_t^+)^2 + (lambda_t^-)^2).
    pub fn qt(&self, t: f64) -> f64 {
        let a = self.l1 / t;
        let b = self.l2 * t;
        a * a + b * b
    }

    /// lambda_t^+ lambda_t^-.
    pub fn plus_minus(&self, t: f64) -> f64 {
        let a = self.l1 / t;
        let b = self.l2 * t;
        0.25 * (b * b - a * a)
    }

    /// min of qt over t in [t1, t2].
    pub fn min_qt(&self, t1: f64, t2: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let t_sq = if self.l2 == 0.0 {
            t2 * t2
        } else {
            (self.l1 / self.l2).abs().clamp(t1 * t1, t2 * t2)
        };
        self.qt(t_sq.sqrt())
    }

    /// |lambda/lambda'|.
    pub fn ratio(&self) -> f64 {
        (self.l1 / self.l2).abs()
    }
}

/// Embedded coset geometry: basis vectors, covolume and the quadratic form in (m, n).
#[derive(Clone, Debug)]
pub struct Geometry {
    e0: (f64, f64),
    e1: (f64, f64),
    h: (f64, f64),
    covolume: f64,
    // Q(h + m b0 + n b1) = qh + m bh0 + n bh1 + m^2 q0 + m n b01 + n^2 q1
    qform: [f64; 6],
    q_min: f64,
}

fn f(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl Geometry {
    pub fn new(coset: &Coset) -> Self {
        let lat = coset.lattice();
        let b = lat.basis();
        let e0 = lat.embed(&b[0]);
        let e1 = lat.embed(&b[1]);
        let h = lat.embed(coset.h());
        let covolume = (e0.0 * e1.1 - e0.1 * e1.0).abs();
        let qh = lat.q(coset.h());
        let qform = [
            f(&qh),
            f(&lat.bilinear(coset.h(), &b[0])),
            f(&lat.bilinear(coset.h(), &b[1])),
            f(&lat.q(&b[0])),
            f(&lat.bilinear(&b[0], &b[1])),
            f(&lat.q(&b[1])),
        ];
        // Q = Q(h) mod 1 on the coset, and Q is a nonzero integer on L \ {0}
        let frac = &qh - qh.floor();
        let q_min = if coset.is_zero_coset() {
            1.0
        } else {
            let other = BigRational::from_integer(1.into()) - &frac;
            f(if frac < other { &frac } else { &other }).abs()
        };
        Geometry { e0, e1, h, covolume, qform, q_min }
    }

    pub fn covolume(&self) -> f64 {
        self.covolume
    }

    /// Lower bound for |Q| over the nonzero coset elements.
    pub fn q_min(&self) -> f64 {
        self.q_min
    }

    pub fn point(&self, m: i64, n: i64) -> LatticePoint {
        let (mf, nf) = (m as f64, n as f64);
        let l1 = self.h.0 + mf * self.e0.0 + nf * self.e1.0;
        let l2 = self.h.1 + mf * self.e0.1 + nf * self.e1.1;
        let k = &self.qform;
        let q = k[0] + mf * k[1] + nf * k[2] + mf * mf * k[3] + mf * nf * k[4] + nf * nf * k[5];
        LatticePoint { m, n, l1, l2, q }
    }

    /// max of qt over the vertices of the centered fundamental cell.
    fn cell_radius_sq(&self, t: f64) -> f64 {
        let mut r: f64 = 0.0;
        for s0 in [-0.5, 0.5] {
            for s1 in [-0.5, 0.5] {
                let a = (s0 * self.e0.0 + s1 * self.e1.0) / t;
                let b = (s0 * self.e0.1 + s1 * self.e1.1) * t;
                r = r.max(a * a + b * b);
            }
        }
        r
    }

    /// Half-widths of the centered cell along the two embedded axes.
    fn cell_half_widths(&self) -> (f64, f64) {
        (0.5 * (self.e0.0.abs() + self.e1.0.abs()), 0.5 * (self.e0.1.abs() + self.e1.1.abs()))
    }

    /// Bound for sum of exp(-c min_{t in [t1,t2]} qt) over points whose minimum exceeds r.
    pub fn gaussian_tail(&self, t1: f64, t2: f64, c: f64, r: f64) -> f64 {
        let kappa = t2 / t1;
        let delta_sq = self.cell_radius_sq((t1 * t2).sqrt());
        2.0 * PI / self.covolume * (kappa * (r + 1.0 / c) + delta_sq) * (-c * r).exp()
    }

    /// Bound for sum over orbit representatives with |Q| > b of exp(-c |Q|), when the
    /// representatives satisfy |lambda_1|^2 <= x0^2 |Q| and |lambda_2|^2 <= y0^2 |Q|.
    pub fn orbit_exp_tail(&self, x0: f64, y0: f64, c: f64, b: f64) -> f64 {
        let (w1, w2) = self.cell_half_widths();
        let v = self.covolume;
        let alpha = 4.0 * x0 * y0 / v;
        let beta = 4.0 * (x0 * w2 + y0 * w1) / v;
        let gamma = 4.0 * w1 * w2 / v;
        let sb = b.sqrt();
        (-c * b).exp() * (alpha * (b + 1.0 / c) + beta * (sb + 1.0 / (2.0 * c * sb)) + gamma)
    }
}

/// Points of the coset with min_{t in [t1,t2]} qt <= R, with R chosen so that the
/// excluded points have sum exp(-c min qt) <= target.
pub struct GaussCut {
    pub points: Vec<LatticePoint>,
    pub radius: f64,
    pub tail: f64,
}

pub fn gaussian_points(coset: &Coset, geom: &Geometry, t1: f64, t2: f64, c: f64, target: f64) -> Result<GaussCut> {
    if !(t1 > 0.0 && t2 >= t1 && c > 0.0 && target > 0.0) {
        return Err(Error::InvalidParameter(format!("bad truncation request t1={t1} t2={t2} c={c} target={target}")));
    }
    let mut r = 1.0 / c;
    let mut tail = geom.gaussian_tail(t1, t2, c, r);
    while tail > target {
        r += 1.0 / c;
        tail = geom.gaussian_tail(t1, t2, c, r);
    }
    let kappa = t2 / t1;
    let ts = (t1 * t2).sqrt();
    let s = coset.lattice().scale_f64();
    let reach = (kappa * r).sqrt() * (1.0 + 1e-9);
    let est = PI * kappa * r / geom.covolume;
    if est > TERM_BUDGET as f64 {
        return Err(Error::TermBudgetExceeded(TERM_BUDGET));
    }
    let boxed = box_points(coset, s * ts * reach, s * reach / ts);
    if boxed.len() > TERM_BUDGET {
        return Err(Error::TermBudgetExceeded(TERM_BUDGET));
    }
    let mut points: Vec<LatticePoint> = boxed
        .into_iter()
        .map(|(m, n)| geom.point(m, n))
        .filter(|p| p.min_qt(t1, t2) <= r)
        .collect();
    points.sort_by(|a, b| a.qt(ts).total_cmp(&b.qt(ts)).then(a.m.cmp(&b.m)).then(a.n.cmp(&b.n)));
    Ok(GaussCut { points, radius: r, tail })
}

/// Points with lo <= |lambda/lambda'| <= hi and 0 < |Q| <= qmax (plus 0 when h is in L).
pub fn window_points(coset: &Coset, geom: &Geometry, lo: f64, hi: f64, qmax: f64) -> Result<Vec<LatticePoint>> {
    let s = coset.lattice().scale_f64();
    let slack = 1.0 + 1e-9;
    let x = s * (qmax * hi).sqrt() * slack;
    let y = s * (qmax / lo).sqrt() * slack;
    let boxed = box_points(coset, x, y);
    if boxed.len() > TERM_BUDGET {
        return Err(Error::TermBudgetExceeded(TERM_BUDGET));
    }
    let tol = 1e-12;
    let mut points: Vec<LatticePoint> = boxed
        .into_iter()
        .map(|(m, n)| geom.point(m, n))
        .filter(|p| {
            if p.is_zero() {
                return true;
            }
            let r = p.ratio();
            p.q.abs() <= qmax * slack && r >= lo * (1.0 - tol) && r <= hi * (1.0 + tol)
        })
        .collect();
    points.sort_by(|a, b| a.q.abs().total_cmp(&b.q.abs()).then(a.m.cmp(&b.m)).then(a.n.cmp(&b.n)));
    Ok(points)
}

/// Smallest B (on a 1/c grid) with coef_max * sqrt(1/(4 B v)) * exp-tail(B) <= target.
pub fn orbit_cutoff(geom: &Geometry, x0: f64, y0: f64, v: f64, coef_max: f64, target: f64) -> (f64, f64) {
    let c = 2.0 * PI * v;
    let mut b = geom.q_min().max(1.0 / c);
    loop {
        let tail = coef_max * (1.0 / (4.0 * b * v)).sqrt() * geom.orbit_exp_tail(x0, y0, c, b);
        if tail <= target || b > 1e9 {
            return (b, tail);
        }
        b += 1.0 / c;
    }
}

/// Kahan-compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: Complex64,
    comp: Complex64,
}

impl KahanSum {
    pub fn add(&mut self, x: Complex64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> Complex64 {
        self.sum
    }
}

/// e(x) = exp(2 pi i x).
pub fn e(x: f64) -> Complex64 {
    // reduce mod 1 first so large Q u keeps its fractional accuracy
    let r = x - x.round();
    Complex64::from_polar(1.0, 2.0 * PI * r)
}

pub fn abs_q(q: &BigRational) -> f64 {
    f(&q.abs())
}

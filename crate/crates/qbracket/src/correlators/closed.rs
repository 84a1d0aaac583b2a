//! Theta-function side: the determinant formula `U`, its numerator `T`
//! (expanded over compositions), and the generalized composition sum `R`.
//!
//! The formulas are generic over [`Scalar`], with theta values drawn from a
//! [`ThetaSource`]: formal series in `q`, or exact numbers at a fixed `q0`.

use super::{CorrError, EvalPoint, Scalar};
use crate::rational::{binomial_q, factorial_q, int, one, pow, rat, sign_pow, Rational};
use crate::series::QSeries;
use crate::setcomb::{for_each_composition, permutations, rooted_set_partitions};
use crate::special::{theta_at, theta_numeric, NumericQ, SeriesCheck, ThetaPoint};
use std::cell::RefCell;
use std::collections::HashMap;

/// Values of `Theta^{(k)}` at evaluation points.
pub trait ThetaSource {
    type V: Scalar;

    fn theta(&self, k: u32, p: &ThetaPoint) -> Self::V;

    /// `r(x; k) = Theta^{(k)}(x) / Theta(x)`.
    fn ratio(&self, k: u32, p: &ThetaPoint) -> Result<Self::V, CorrError> {
        if p.is_theta_zero() {
            return Err(CorrError::DivisorHit { subset: vec![] });
        }
        self.theta(k, p).div(&self.theta(0, p))
    }
}

/// Theta derivatives as q-series through a fixed relative order, memoized.
pub struct SeriesTheta {
    pub order: usize,
    cache: RefCell<HashMap<(u32, ThetaPoint), QSeries>>,
}

impl SeriesTheta {
    pub fn new(order: usize) -> Self {
        SeriesTheta { order, cache: RefCell::new(HashMap::new()) }
    }
}

impl ThetaSource for SeriesTheta {
    type V = QSeries;

    fn theta(&self, k: u32, p: &ThetaPoint) -> QSeries {
        let key = (k, p.clone());
        if let Some(v) = self.cache.borrow().get(&key) {
            return v.clone();
        }
        let v = theta_at(k, p, self.order);
        self.cache.borrow_mut().insert(key, v.clone());
        v
    }
}

/// Theta derivatives at a numeric `q0`, from the sum form cut at `terms`.
pub struct NumericTheta {
    pub q: NumericQ,
    pub terms: usize,
    cache: RefCell<HashMap<(u32, ThetaPoint), Rational>>,
}

impl NumericTheta {
    pub fn new(q: NumericQ, terms: usize) -> Self {
        NumericTheta { q, terms, cache: RefCell::new(HashMap::new()) }
    }

    /// The plain rational point `x = q0^m s^2`, written with `m = 0`.
    pub fn flatten(&self, p: &ThetaPoint) -> ThetaPoint {
        ThetaPoint::new(&p.s * pow(&self.q.r, p.m))
    }
}

impl ThetaSource for NumericTheta {
    type V = Rational;

    fn theta(&self, k: u32, p: &ThetaPoint) -> Rational {
        let key = (k, self.flatten(p));
        if let Some(v) = self.cache.borrow().get(&key) {
            return v.clone();
        }
        let v = theta_numeric(k, &key.1, &self.q, self.terms);
        self.cache.borrow_mut().insert(key, v.clone());
        v
    }
}

fn accumulate<V: Scalar>(acc: &mut Option<V>, x: V) {
    *acc = Some(match acc.take() {
        Some(a) => a.add(&x),
        None => x,
    });
}

fn permutation_sign(p: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `det(Theta^{(j-i+1)}(P_{n-j}) / (j-i+1)!)` by the Leibniz expansion, where
/// `partial[k]` is the product of the first `k` arguments.
fn theta_determinant<S: ThetaSource>(src: &S, partial: &[ThetaPoint]) -> Option<S::V> {
    let n = partial.len() - 1;
    let entry = |i: usize, j: usize| -> Option<S::V> {
        let d = j as i64 - i as i64 + 1;
        if d < 0 {
            return None;
        }
        let v = src.theta(d as u32, &partial[n - j]);
        Some(v.scale(&factorial_q(d as u64).recip()))
    };
    let mut det = None;
    for tau in permutations(n) {
        let mut term: Option<S::V> = None;
        let mut zero = false;
        for (i, &j) in tau.iter().enumerate() {
            match entry(i + 1, j + 1) {
                None => {
                    zero = true;
                    break;
                }
                Some(v) => {
                    term = Some(match term {
                        None => v,
                        Some(t) => t.mul(&v),
                    })
                }
            }
        }
        if !zero {
            let t = term.expect("n >= 1").scale(&int(permutation_sign(&tau)));
            accumulate(&mut det, t);
        }
    }
    det
}

fn partial_products(pt: &EvalPoint, sigma: &[usize]) -> Vec<ThetaPoint> {
    let mut out = vec![ThetaPoint::unit()];
    for &i in sigma {
        let next = out.last().unwrap().times(&pt.pts[i]);
        out.push(next);
    }
    out
}

/// `U(t) = sum_sigma det(..) / [Theta(t_s1) Theta(t_s1 t_s2) .. Theta(t_s1 .. t_sn)]`.
pub fn u_closed<S: ThetaSource>(src: &S, pt: &EvalPoint) -> Result<S::V, CorrError> {
    pt.check_subsets(true)?;
    let mut total = None;
    for sigma in permutations(pt.n()) {
        let partial = partial_products(pt, &sigma);
        let Some(det) = theta_determinant(src, &partial) else { continue };
        let mut den = src.theta(0, &partial[1]);
        for p in &partial[2..] {
            den = den.mul(&src.theta(0, p));
        }
        accumulate(&mut total, det.div(&den)?);
    }
    Ok(total.expect("the identity permutation contributes"))
}

/// `sum_gamma (-1)^{n+len} first(#gamma_1) prod_{k >= 2} r(base * P_k; #gamma_k)`, with
/// `P_k` the product over `gamma_1 u .. u gamma_{k-1}`.
pub fn composition_sum<S: ThetaSource>(
    src: &S,
    pt: &EvalPoint,
    base: &ThetaPoint,
    first: impl Fn(u32) -> Result<S::V, CorrError>,
) -> Result<S::V, CorrError> {
    let n = pt.n();
    let mut total = None;
    let mut err = None;
    for_each_composition(n, |blocks| {
        if err.is_some() {
            return;
        }
        let sign = sign_pow((n + blocks.len()) as i64);
        let mut term = match first(blocks[0].len() as u32) {
            Ok(v) => v.scale(&sign),
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        let mut union: Vec<usize> = blocks[0].clone();
        for b in &blocks[1..] {
            let p = base.times(&pt.product(&union));
            match src.ratio(b.len() as u32, &p) {
                Ok(r) => term = term.mul(&r),
                Err(_) => {
                    err = Some(CorrError::DivisorHit { subset: union.clone() });
                    return;
                }
            }
            union.extend_from_slice(b);
        }
        accumulate(&mut total, term);
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(total.expect("n >= 1"))
}

/// `T(t) = sum_gamma (-1)^{n+len} Theta^{(#gamma_1)}(1) prod_{k>=2} r(P_k; #gamma_k)`.
pub fn t_closed<S: ThetaSource>(src: &S, pt: &EvalPoint) -> Result<S::V, CorrError> {
    let unit = ThetaPoint::unit();
    composition_sum(src, pt, &unit, |m| Ok(src.theta(m, &unit)))
}

/// `R(t | t0)`: every factor is `r(t0 * P_k; #gamma_k)`, the first with `P_1 = 1`.
pub fn r_closed<S: ThetaSource>(src: &S, pt: &EvalPoint, t0: &ThetaPoint) -> Result<S::V, CorrError> {
    composition_sum(src, pt, t0, |m| src.ratio(m, t0))
}

pub fn u_closed_series(pt: &EvalPoint, n: usize) -> Result<QSeries, CorrError> {
    u_closed(&SeriesTheta::new(n), pt)
}

pub fn t_closed_series(pt: &EvalPoint, n: usize) -> Result<QSeries, CorrError> {
    t_closed(&SeriesTheta::new(n), pt)
}

/// `U * Theta(t_1 .. t_n)` against `T`.
pub fn verify_u_t_relation(pt: &EvalPoint, n: usize) -> Result<SeriesCheck, CorrError> {
    let src = SeriesTheta::new(n);
    let u = u_closed(&src, pt)?;
    let t = t_closed(&src, pt)?;
    Ok(SeriesCheck::of(&(&u * &src.theta(0, &pt.total())), &t))
}

/// The main identity: brute-force `F` equals the closed form `U`.
pub fn verify_npoint(pt: &EvalPoint, n: usize) -> Result<SeriesCheck, CorrError> {
    let f = super::f_brute_series(pt, n)?;
    let u = u_closed_series(pt, n)?;
    Ok(SeriesCheck::of(&f, &u))
}

/// The one-point function: brute-force `F(t)` times `Theta(t)` against 1.
pub fn verify_one_point(s: &Rational, n: usize) -> Result<SeriesCheck, CorrError> {
    let pt = EvalPoint::from_roots(std::slice::from_ref(s))?;
    let f = super::f_brute_series(&pt, n)?;
    let theta = SeriesTheta::new(n).theta(0, &pt.pts[0]);
    Ok(SeriesCheck::of(&(&f * &theta), &QSeries::one(n)))
}

/// `sum_{pi rooted} sign(pi) X^pi` for a functional `X` of an [`EvalPoint`].
pub fn rooted_sum<V: Scalar>(
    pt: &EvalPoint,
    mut x: impl FnMut(&EvalPoint) -> Result<V, CorrError>,
) -> Result<V, CorrError> {
    let mut total = None;
    for pi in rooted_set_partitions(pt.n()) {
        let v = x(&pt.contract(&pi))?.scale(&int(pi.sign()));
        accumulate(&mut total, v);
    }
    Ok(total.expect("the atomic partition is rooted"))
}

/// `T(q t_1, t_2, ..) = sum_{pi rooted} (-1)^{n + len} T^pi(t)` as series.
pub fn verify_diffeq_t(pt: &EvalPoint, n: usize) -> Result<SeriesCheck, CorrError> {
    let src = SeriesTheta::new(n);
    let lhs = t_closed(&src, &pt.shift(1, 1))?;
    let rhs = rooted_sum(pt, |p| t_closed(&src, p))?;
    Ok(SeriesCheck::of(&lhs, &rhs))
}

/// `U(q t_1, t_2, ..) = -q^{1/2} t_1..t_n sum_{pi rooted} (-1)^{n + len} U^pi(t)` as series.
pub fn verify_diffeq_u(pt: &EvalPoint, n: usize) -> Result<SeriesCheck, CorrError> {
    let src = SeriesTheta::new(n);
    let lhs = u_closed(&src, &pt.shift(1, 1))?;
    let sum = rooted_sum(pt, |p| u_closed(&src, p))?;
    let rhs = sum.scale(&-pt.total().t()).shift(&rat(1, 2));
    Ok(SeriesCheck::of(&lhs, &rhs))
}

/// `r(q x; m) = sum_i (-1)^i C(m, i) r(x; m - i)` for `r = Theta^{(m)}/Theta`, `m <= m_max`.
pub fn verify_ratio_recurrence(x: &ThetaPoint, m_max: u32, n: usize) -> Result<SeriesCheck, CorrError> {
    let src = SeriesTheta::new(n);
    let qx = x.times(&ThetaPoint::shifted(one(), 1));
    let mut checks = Vec::new();
    for m in 0..=m_max {
        let lhs = src.ratio(m, &qx)?;
        let mut rhs = QSeries::zero(n);
        for i in 0..=m {
            let r = src.ratio(m - i, x)?;
            rhs = &rhs + &r.scale(&(sign_pow(i as i64) * binomial_q(m as u64, i as u64)));
        }
        checks.push(SeriesCheck::of(&lhs, &rhs));
    }
    Ok(SeriesCheck::all(checks))
}

/// `R(q t_1, .. | t0) = sum_{pi rooted} (-1)^pi R^pi(t | t0)` with `r = Theta^{(m)}/Theta`.
pub fn verify_r_diffeq(pt: &EvalPoint, t0: &ThetaPoint, n: usize) -> Result<SeriesCheck, CorrError> {
    let src = SeriesTheta::new(n);
    let lhs = r_closed(&src, &pt.shift(1, 1), t0)?;
    let rhs = rooted_sum(pt, |p| r_closed(&src, p, t0))?;
    Ok(SeriesCheck::of(&lhs, &rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::theta_deriv_series;

    fn pt(s: &[i64]) -> EvalPoint {
        EvalPoint::from_roots(&s.iter().map(|&x| int(x)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn small_cases_match_displays() {
        let n = 10;
        let src = SeriesTheta::new(n);
        let p1 = pt(&[2]);
        let inv = theta_deriv_series(0, &int(2), n).inv().unwrap();
        assert_eq!(u_closed(&src, &p1).unwrap(), inv);
        assert!(t_closed(&src, &p1).unwrap().is_one());

        let p2 = pt(&[2, 3]);
        let (a, b) = (ThetaPoint::new(int(2)), ThetaPoint::new(int(3)));
        let r = |x: &ThetaPoint| src.ratio(1, x).unwrap();
        let expect = (&r(&a) + &r(&b)).try_div(&src.theta(0, &a.times(&b))).unwrap();
        assert_eq!(u_closed(&src, &p2).unwrap(), expect);
    }

    #[test]
    fn three_point_expanded_form() {
        let n = 8;
        let src = SeriesTheta::new(n);
        let p = pt(&[2, 3, 5]);
        let ts: Vec<ThetaPoint> = p.pts.clone();
        let r = |k: u32, x: &ThetaPoint| src.ratio(k, x).unwrap();
        let mut inner = src.theta(3, &ThetaPoint::unit());
        for i in 0..3 {
            inner = &inner - &r(2, &ts[i]);
            for j in 0..3 {
                if i != j {
                    inner = &inner + &(&r(1, &ts[i]) * &r(1, &ts[i].times(&ts[j])));
                }
            }
        }
        let expect = inner.try_div(&src.theta(0, &p.total())).unwrap();
        assert_eq!(u_closed(&src, &p).unwrap(), expect);
    }

    #[test]
    fn u_times_theta_is_t() {
        assert!(verify_u_t_relation(&pt(&[2, 3]), 10).unwrap().passed());
        assert!(verify_u_t_relation(&pt(&[2, 3, 5]), 8).unwrap().passed());
    }

    #[test]
    fn npoint_small() {
        assert!(verify_npoint(&pt(&[2]), 12).unwrap().passed());
        assert!(verify_npoint(&pt(&[2, 3]), 8).unwrap().passed());
    }

    #[test]
    fn difference_equations_small() {
        assert!(verify_diffeq_t(&pt(&[2, 3]), 8).unwrap().passed());
        assert!(verify_diffeq_u(&pt(&[2, 3]), 8).unwrap().passed());
        assert!(verify_diffeq_u(&pt(&[2]), 8).unwrap().passed());
        assert!(verify_ratio_recurrence(&ThetaPoint::new(int(2)), 4, 12).unwrap().passed());
        let t0 = ThetaPoint::new(int(5));
        assert!(verify_r_diffeq(&pt(&[2, 3]), &t0, 8).unwrap().passed());
    }

    #[test]
    fn degenerate_points_are_named() {
        let p = EvalPoint::from_roots(&[int(2), rat(1, 2), int(3)]).unwrap();
        match u_closed_series(&p, 4) {
            Err(CorrError::DivisorHit { subset }) => assert_eq!(subset, vec![1, 2]),
            other => panic!("{other:?}"),
        }
    }
}

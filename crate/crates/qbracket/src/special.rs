//! Named series: eta, the odd theta function and its `x d/dx` derivatives,
//! Eisenstein series and their level-two relatives, plus the regularized
//! values `xi(s) = (2^s - 1) zeta(s)` and Bernoulli machinery.
//!
//! Theta is only ever evaluated at points `x = q^m s^2` with `s` rational, so
//! `x^{1/2} = q^{m/2} |s|` stays exact and every result is a plain [`QSeries`].

use crate::partitions::partitions_of;
use crate::rational::{binomial_q, factorial_q, int, one, pow, rat, sign_pow, zero, Rational};
use crate::series::{euler, q_pochhammer, Mismatch, QSeries};
use num_traits::Signed;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecialError {
    #[error("Eisenstein series need an even weight >= 2, got {0}")]
    OddWeight(u32),
    #[error("xi is only provided at integers s <= 0, got {0}")]
    XiArgument(i64),
}

/// Bernoulli numbers `B_0..B_m` with `B_1 = -1/2`.
pub fn bernoulli_numbers(m: usize) -> Vec<Rational> {
    let mut b = vec![one()];
    for n in 1..=m {
        let s = (0..n).fold(zero(), |acc, k| acc + binomial_q(n as u64 + 1, k as u64) * &b[k]);
        b.push(-s / int(n as i64 + 1));
    }
    b
}

pub fn bernoulli(m: usize) -> Rational {
    bernoulli_numbers(m)[m].clone()
}

/// `B_m(x) = sum_k C(m,k) B_k x^{m-k}`.
pub fn bernoulli_poly(m: usize, x: &Rational) -> Rational {
    let b = bernoulli_numbers(m);
    (0..=m).fold(zero(), |acc, k| acc + binomial_q(m as u64, k as u64) * &b[k] * pow(x, (m - k) as i64))
}

/// `zeta(1 - m)` for `m >= 1`.
pub fn zeta_one_minus(m: usize) -> Rational {
    if m == 1 {
        rat(-1, 2)
    } else {
        -bernoulli(m) / int(m as i64)
    }
}

/// Both evaluation routes for `xi(s)`, `s <= 0`: via `(2^s - 1) zeta(s)` and via `-B_m(1/2)/m`.
pub fn xi_routes(s: i64) -> Result<(Rational, Rational), SpecialError> {
    if s > 0 {
        return Err(SpecialError::XiArgument(s));
    }
    let m = (1 - s) as usize;
    let via_zeta = (pow(&int(2), s) - one()) * zeta_one_minus(m);
    let via_poly = -bernoulli_poly(m, &rat(1, 2)) / int(m as i64);
    Ok((via_zeta, via_poly))
}

pub fn xi_value(s: i64) -> Result<Rational, SpecialError> {
    let (a, b) = xi_routes(s)?;
    assert_eq!(a, b, "the two xi routes disagree at s = {s}");
    Ok(a)
}

/// `sigma_p(n)` for `n = 0..=len` (entry 0 unused).
fn divisor_sums(p: u32, len: usize) -> Vec<Rational> {
    let mut out = vec![zero(); len + 1];
    for d in 1..=len {
        let dp = pow(&int(d as i64), p as i64);
        for m in (d..=len).step_by(d) {
            out[m] += &dp;
        }
    }
    out
}

/// `G_k = -B_k/(2k) + sum_{n>=1} sigma_{k-1}(n) q^n`.
pub fn eisenstein(k: u32, n: usize) -> Result<QSeries, SpecialError> {
    if k < 2 || k % 2 == 1 {
        return Err(SpecialError::OddWeight(k));
    }
    let mut c = divisor_sums(k - 1, n);
    c[0] = -bernoulli(k as usize) / int(2 * k as i64);
    Ok(QSeries::new(zero(), c))
}

pub(crate) fn g(k: u32, n: usize) -> QSeries {
    eisenstein(k, n).expect("even weight")
}

/// `eta = q^{1/24} (q;q)_inf`.
pub fn eta_series(n: usize) -> QSeries {
    euler(n).shift(&rat(1, 24))
}

fn euler_inverse_cube(n: usize) -> QSeries {
    static CACHE: OnceLock<Mutex<HashMap<usize, QSeries>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().unwrap().get(&n) {
        return s.clone();
    }
    let e = euler(n);
    let s = (&(&e * &e) * &e).inv().expect("Euler product is a unit");
    cache.lock().unwrap().insert(n, s.clone());
    s
}

/// An evaluation point `x = q^m s^2` of theta; `x^{1/2} = q^{m/2} |s|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThetaPoint {
    pub s: Rational,
    pub m: i64,
}

impl ThetaPoint {
    pub fn new(s: Rational) -> Self {
        ThetaPoint { s: s.abs(), m: 0 }
    }

    pub fn unit() -> Self {
        ThetaPoint { s: one(), m: 0 }
    }

    pub fn shifted(s: Rational, m: i64) -> Self {
        ThetaPoint { s: s.abs(), m }
    }

    pub fn times(&self, other: &ThetaPoint) -> ThetaPoint {
        ThetaPoint { s: &self.s * &other.s, m: self.m + other.m }
    }

    pub fn inverse(&self) -> ThetaPoint {
        ThetaPoint { s: self.s.recip(), m: -self.m }
    }

    /// `t = s^2`, ignoring the power of `q`.
    pub fn t(&self) -> Rational {
        &self.s * &self.s
    }

    /// Whether `x` is a power of `q`, where theta vanishes.
    pub fn is_theta_zero(&self) -> bool {
        self.s == one()
    }
}

/// `sum_n (-1)^n (n+1/2)^k x^{n+1/2} q^{n(n+1)/2}` at `x = q^m s^2`, through relative order `n_ord`.
fn theta_numerator(k: u32, p: &ThetaPoint, n_ord: usize) -> QSeries {
    let mut c = vec![zero(); n_ord + 1];
    let half = rat(1, 2);
    // With j = n + m the exponent is j(j+1)/2 - m^2/2.
    let mut j: i64 = 0;
    loop {
        let idx = (j * (j + 1) / 2) as usize;
        if idx > n_ord {
            break;
        }
        for jj in [j, -j - 1] {
            let n = jj - p.m;
            let term = sign_pow(n) * pow(&(int(n) + &half), k as i64) * pow(&p.s, 2 * n + 1);
            c[idx] += term;
        }
        j += 1;
    }
    QSeries::new(-rat(p.m * p.m, 2), c)
}

/// `Theta^{(k)}(x; q)` at `x = q^m s^2` from the sum form.
pub fn theta_at(k: u32, p: &ThetaPoint, n: usize) -> QSeries {
    &euler_inverse_cube(n) * &theta_numerator(k, p, n)
}

/// `Theta^{(k)}(s^2; q)`.
pub fn theta_deriv_series(k: u32, s: &Rational, n: usize) -> QSeries {
    theta_at(k, &ThetaPoint::new(s.clone()), n)
}

/// `(q)_inf^{-2} (s - 1/s) (q s^2)_inf (q/s^2)_inf`.
pub fn theta_product_form(s: &Rational, n: usize) -> QSeries {
    let s = &s.abs();
    let t = s * s;
    let e = euler(n);
    let pre = s - s.recip();
    let a = q_pochhammer(&t, 1, None, n);
    let b = q_pochhammer(&t.recip(), 1, None, n);
    let e2inv = (&e * &e).inv().expect("unit");
    (&(&a * &b) * &e2inv).scale(&pre)
}

/// `Theta^{(2m+1)}(1)` from the Eisenstein side:
/// `(2m+1)! sum_{k1+2k2+..=m} (-2)^{sum k}/prod k_i! prod (G_{2i}/(2i)!)^{k_i}`.
pub fn theta_one_derivs_eisenstein(m: usize, n: usize) -> QSeries {
    let mut total = QSeries::zero(n);
    for lam in partitions_of(m as u32) {
        let mut mult = vec![0u32; m + 1];
        for &p in lam.parts() {
            mult[p as usize] += 1;
        }
        let len: i64 = mult.iter().map(|&k| k as i64).sum();
        let mut coef = pow(&int(-2), len);
        let mut term = QSeries::one(n);
        for (i, &k) in mult.iter().enumerate().skip(1) {
            if k == 0 {
                continue;
            }
            coef /= factorial_q(k as u64);
            let gi = g(2 * i as u32, n).scale(&factorial_q(2 * i as u64).recip());
            term = &term * &gi.pow(k);
        }
        total = &total + &term.scale(&coef);
    }
    total.scale(&factorial_q(2 * m as u64 + 1))
}

/// Which level-two series to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level2 {
    F1,
    F2,
    Theta00,
}

/// `F_k^{(1)}`, `F_k^{(2)}` or `theta_00` as series in `u = q^{1/2}`, through `u^n`.
pub fn level2_series(which: Level2, k: u32, n: usize) -> Result<QSeries, SpecialError> {
    match which {
        Level2::Theta00 => {
            let mut c = vec![zero(); n + 1];
            let mut j = 0usize;
            while j * j <= n {
                c[j * j] += if j == 0 { one() } else { int(2) };
                j += 1;
            }
            Ok(QSeries::new(zero(), c).substitute_sqrt_q())
        }
        Level2::F1 | Level2::F2 => {
            let half = eisenstein(k, n)?.substitute_sqrt_q();
            let whole = eisenstein(k, n / 2)?.to_half_step();
            let factor = if which == Level2::F1 { one() } else { pow(&int(2), k as i64 - 1) };
            Ok((&half - &whole.scale(&factor)).truncate(n))
        }
    }
}

/// Outcome of a series identity: the order compared and the first mismatch, if any.
#[derive(Debug, Clone)]
pub struct SeriesCheck {
    pub order: usize,
    pub outcome: Result<(), Mismatch>,
}

impl SeriesCheck {
    pub fn of(lhs: &QSeries, rhs: &QSeries) -> Self {
        SeriesCheck { order: lhs.trunc_order().min(rhs.trunc_order()), outcome: lhs.compare(rhs) }
    }

    pub fn passed(&self) -> bool {
        self.outcome.is_ok()
    }

    /// Combines several checks; the first failure wins.
    pub fn all(checks: impl IntoIterator<Item = SeriesCheck>) -> Self {
        let mut order = usize::MAX;
        let mut outcome = Ok(());
        for c in checks {
            order = order.min(c.order);
            if outcome.is_ok() {
                outcome = c.outcome;
            }
        }
        SeriesCheck { order: if order == usize::MAX { 0 } else { order }, outcome }
    }
}

/// `Theta(q^m x) = (-1)^m q^{-m^2/2} x^{-m} Theta(x)` at `x = s^2`.
pub fn verify_theta_diffeq(m: i64, s: &Rational, n: usize) -> SeriesCheck {
    let lhs = theta_at(0, &ThetaPoint::shifted(s.clone(), m), n);
    let rhs = theta_deriv_series(0, s, n).scale(&(sign_pow(m) * pow(&(s * s), -m))).shift(&-rat(m * m, 2));
    SeriesCheck::of(&lhs, &rhs)
}

/// Oddness `Theta(1/x) = -Theta(x)`.
pub fn verify_theta_odd(s: &Rational, n: usize) -> SeriesCheck {
    let lhs = theta_deriv_series(0, &s.recip(), n);
    let rhs = -theta_deriv_series(0, s, n);
    SeriesCheck::of(&lhs, &rhs)
}

/// Sum form against product form of theta at `x = s^2`.
pub fn verify_theta_forms(s: &Rational, n: usize) -> SeriesCheck {
    SeriesCheck::of(&theta_deriv_series(0, s, n), &theta_product_form(s, n))
}

/// Odd derivatives at `x = 1` against their Eisenstein expressions, for `m = 0..=m_max`.
pub fn verify_theta_odd_derivatives(m_max: usize, n: usize) -> SeriesCheck {
    SeriesCheck::all((0..=m_max).map(|m| {
        SeriesCheck::of(&theta_at(2 * m as u32 + 1, &ThetaPoint::unit(), n), &theta_one_derivs_eisenstein(m, n))
    }))
}

/// `-sum_{n>=1} xi(-n) u^n/n!` against `1/(t^{1/2} - t^{-1/2}) - 1/u` at `t = e^u`,
/// as power series in `u` through `u^order`.
pub fn verify_xi_generating(order: usize) -> SeriesCheck {
    // t^{1/2} - t^{-1/2} = u * S(u), S(u) = sum_k (u/2)^{2k} / (2k+1)!
    let len = order + 2;
    let mut s = vec![zero(); len + 1];
    for k in 0..=len / 2 {
        s[2 * k] = pow(&rat(1, 2), 2 * k as i64) / factorial_q(2 * k as u64 + 1);
    }
    let sinv = QSeries::new(zero(), s).inv().expect("S(0) = 1");
    let rhs = (&sinv - &QSeries::one(len)).shift(&int(-1)).truncate(order);
    let mut lhs = vec![zero(); order + 1];
    for (nn, c) in lhs.iter_mut().enumerate().skip(1) {
        *c = -xi_value(-(nn as i64)).unwrap() / factorial_q(nn as u64);
    }
    SeriesCheck::of(&QSeries::new(zero(), lhs), &rhs)
}

/// `sum_{i>=1} t^{1/2-i}` in closed form at `t = s^2`, against `1/(s - 1/s)`.
pub fn geometric_half_sum(s: &Rational) -> (Rational, Rational) {
    let t = s * s;
    let closed = s.recip() / (one() - t.recip());
    (closed, (s - s.recip()).recip())
}

/// Both sides of `sum_{i=1}^{n-1} (-1)^i C(n,i) xi(i-n) = (-1)^{n+1}/(n+1) + (-1)^n/2^n`.
pub fn xi_binomial_sides(n: u64) -> (Rational, Rational) {
    let lhs = (1..n)
        .fold(zero(), |acc, i| acc + sign_pow(i as i64) * binomial_q(n, i) * xi_value(i as i64 - n as i64).unwrap());
    let rhs = sign_pow(n as i64 + 1) / int(n as i64 + 1) + sign_pow(n as i64) / pow(&int(2), n as i64);
    (lhs, rhs)
}

pub fn verify_xi_binomial_sum(n: u64) -> bool {
    let (a, b) = xi_binomial_sides(n);
    a == b
}

/// Numeric `q = r^2` with exact rational `r`, used where `q` multiplies an argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericQ {
    pub r: Rational,
}

impl NumericQ {
    pub fn from_root(r: Rational) -> Self {
        NumericQ { r: r.abs() }
    }

    pub fn q(&self) -> Rational {
        &self.r * &self.r
    }
}

/// `Theta^{(k)}(x; q0)` at `x = q0^m s^2` from the sum form, with `|n + 1/2|` and the
/// Euler product cut at `terms`. Exact up to that truncation.
pub fn theta_numeric(k: u32, p: &ThetaPoint, q: &NumericQ, terms: usize) -> Rational {
    let q0 = q.q();
    let euler_val = (1..=terms as i64).fold(one(), |acc, j| acc * (one() - pow(&q0, j)));
    theta_numeric_sum(k, p, q, terms) / pow(&euler_val, 3)
}

/// `Theta^{(k)}(x; q0) / Theta(x; q0)`; the Euler factor cancels exactly.
pub fn theta_ratio_numeric(k: u32, p: &ThetaPoint, q: &NumericQ, terms: usize) -> Rational {
    let num = theta_numeric_sum(k, p, q, terms);
    let den = theta_numeric_sum(0, p, q, terms);
    num / den
}

fn theta_numeric_sum(k: u32, p: &ThetaPoint, q: &NumericQ, terms: usize) -> Rational {
    let half = rat(1, 2);
    let mut sum = zero();
    for n in -(terms as i64) - 1..=terms as i64 {
        let e = n * (n + 1) + p.m * (2 * n + 1);
        sum += sign_pow(n) * pow(&(int(n) + &half), k as i64) * pow(&q.r, e) * pow(&p.s, 2 * n + 1);
    }
    sum
}

/// Whether `Theta^{(k)}(1)` vanishes identically (all even `k`).
pub fn theta_one_vanishes(k: u32) -> bool {
    k.is_multiple_of(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(8);
        assert_eq!(b[1], rat(-1, 2));
        assert_eq!(b[2], rat(1, 6));
        assert_eq!(b[4], rat(-1, 30));
        assert_eq!(b[6], rat(1, 42));
        assert_eq!(b[8], rat(-1, 30));
        assert_eq!(bernoulli_poly(0, &rat(3, 7)), one());
        assert_eq!(bernoulli_poly(1, &rat(3, 7)), rat(3, 7) - rat(1, 2));
    }

    #[test]
    fn bernoulli_difference() {
        for x in [rat(1, 3), rat(-5, 2), rat(7, 11)] {
            for m in 1..=8usize {
                let d = bernoulli_poly(m, &(&x + one())) - bernoulli_poly(m, &x);
                assert_eq!(d, int(m as i64) * pow(&x, m as i64 - 1));
            }
        }
    }

    #[test]
    fn xi_values() {
        assert_eq!(xi_value(-1).unwrap(), rat(1, 24));
        assert_eq!(xi_value(-3).unwrap(), rat(-7, 960));
        for s in [0, -2, -4, -6] {
            assert!(xi_value(s).unwrap().is_zero());
        }
        for s in -12..=0 {
            let (a, b) = xi_routes(s).unwrap();
            assert_eq!(a, b);
        }
        assert_eq!(xi_value(1), Err(SpecialError::XiArgument(1)));
    }

    #[test]
    fn eisenstein_examples() {
        let g2 = eisenstein(2, 4).unwrap();
        assert_eq!(g2, QSeries::new(zero(), vec![rat(-1, 24), int(1), int(3), int(4), int(7)]));
        let g4 = eisenstein(4, 3).unwrap();
        assert_eq!(g4.coeffs()[0], rat(1, 240));
        assert_eq!(g4.coeffs()[1], int(1));
        assert_eq!(eisenstein(3, 3), Err(SpecialError::OddWeight(3)));
    }

    #[test]
    fn eta_examples() {
        let e = eta_series(10);
        assert_eq!(e.offset(), &rat(1, 24));
        assert_eq!(e.coeffs()[0], one());
        let inv = e.inv().unwrap();
        assert_eq!(inv.offset(), &rat(-1, 24));
        assert_eq!(inv.coeffs()[5], int(7));
        assert!((&e * &inv).is_one());
    }

    #[test]
    fn theta_examples() {
        let t = theta_deriv_series(0, &int(2), 6);
        assert_eq!(t.coeffs()[0], rat(3, 2));
        let d1 = theta_deriv_series(1, &one(), 20);
        assert_eq!(d1.coeffs()[0], one());
        assert!(theta_deriv_series(2, &one(), 20).is_zero());
        assert!(theta_deriv_series(4, &one(), 20).is_zero());
        let inv = theta_deriv_series(0, &int(2), 6).inv().unwrap();
        assert_eq!(inv.coeffs()[0], rat(2, 3));
    }

    #[test]
    fn theta_sum_and_product_forms_agree() {
        for s in [int(2), int(3), rat(1, 2), rat(5, 3), rat(-7, 4)] {
            assert!(verify_theta_forms(&s, 25).passed(), "s={s}");
        }
    }

    #[test]
    fn theta_difference_equation() {
        for m in -2..=3 {
            for s in [int(2), rat(3, 5)] {
                assert!(verify_theta_diffeq(m, &s, 20).passed(), "m={m} s={s}");
            }
        }
        assert!(verify_theta_odd(&int(2), 20).passed());
    }

    #[test]
    fn theta_odd_derivatives_small() {
        assert!(verify_theta_odd_derivatives(3, 20).passed());
        let g2 = eisenstein(2, 20).unwrap();
        let g4 = eisenstein(4, 20).unwrap();
        let g6 = eisenstein(6, 20).unwrap();
        assert_eq!(theta_one_derivs_eisenstein(1, 20), g2.scale(&int(-6)));
        let five = &g4.scale(&int(-10)) + &(&g2 * &g2).scale(&int(60));
        assert_eq!(theta_one_derivs_eisenstein(2, 20), five);
        let seven = &(&g6.scale(&int(-14)) + &(&g4 * &g2).scale(&int(420))) - &g2.pow(3).scale(&int(840));
        assert_eq!(theta_one_derivs_eisenstein(3, 20), seven);
    }

    #[test]
    fn level2_examples() {
        for k in [2u32, 4, 6] {
            let f1 = level2_series(Level2::F1, k, 12).unwrap();
            assert!(f1.coeffs()[0].is_zero());
            let f2 = level2_series(Level2::F2, k, 12).unwrap();
            let expect = (one() - pow(&int(2), k as i64 - 1)) * zeta_one_minus(k as usize) / int(2);
            assert_eq!(f2.coeffs()[0], expect);
        }
        let th = level2_series(Level2::Theta00, 0, 9).unwrap();
        let expect: Vec<i64> = vec![1, 2, 0, 0, 2, 0, 0, 0, 0, 2];
        assert_eq!(th, QSeries::from_ints(zero(), &expect).substitute_sqrt_q());
        assert_eq!(th.coeff_at(&rat(9, 2)), Some(int(2)));
    }

    #[test]
    fn xi_generating_identity() {
        let c = verify_xi_generating(8);
        assert!(c.passed(), "{:?}", c.outcome);
        let (a, b) = geometric_half_sum(&int(3));
        assert_eq!(a, b);
    }

    #[test]
    fn xi_binomial_sum_range() {
        let (l, r) = xi_binomial_sides(2);
        assert_eq!(l, rat(-1, 12));
        assert_eq!(r, rat(-1, 12));
        for n in 2..=12 {
            assert!(verify_xi_binomial_sum(n), "n={n}");
        }
    }

    #[test]
    fn numeric_theta_matches_series() {
        let q = NumericQ::from_root(rat(1, 4));
        let p = ThetaPoint::new(int(2));
        let series = theta_deriv_series(1, &int(2), 30);
        let q0 = q.q();
        let approx = series.eval_with(&one(), &q0);
        let direct = theta_numeric(1, &p, &q, 30);
        let diff = (approx - direct).abs();
        assert!(diff < rat(1, 1_000_000_000), "diff {diff}");
    }
}

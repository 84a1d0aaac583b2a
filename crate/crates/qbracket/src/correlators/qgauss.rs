//! The q-Gauss summation and the finite telescoping sum built on it, both checked
//! as identities of formal q-series.

use super::CorrError;
use crate::rational::{fmt, int, one, pow, Rational};
use crate::series::{q_pochhammer, QSeries};
use crate::special::SeriesCheck;
use num_traits::Zero;

/// The monomial `c q^e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMonomial {
    pub c: Rational,
    pub e: i64,
}

impl QMonomial {
    pub fn new(c: Rational, e: i64) -> Self {
        QMonomial { c, e }
    }

    pub fn q_power(e: i64) -> Self {
        QMonomial { c: one(), e }
    }

    fn div(&self, other: &QMonomial) -> QMonomial {
        QMonomial { c: &self.c / &other.c, e: self.e - other.e }
    }

    pub fn describe(&self) -> String {
        format!("{}*q^{}", fmt(&self.c), self.e)
    }
}

fn poch(a: &QMonomial, n: Option<u64>, order: usize) -> QSeries {
    q_pochhammer(&a.c, a.e, n, order)
}

/// `sum_n (a)_n (b)_n / ((c)_n (q)_n) (c/ab)^n` against `(c/a)_inf (c/b)_inf / ((c)_inf (c/ab)_inf)`.
pub fn verify_qgauss(a: &QMonomial, b: &QMonomial, c: &QMonomial, n: usize) -> Result<SeriesCheck, CorrError> {
    let z = c.div(a).div(b);
    let (ca, cb) = (c.div(a), c.div(b));
    if z.e < 1 {
        return Err(CorrError::FormalDivergence(format!("c/ab = {} needs a positive q-power", z.describe())));
    }
    if c.e < 1 || ca.e < 0 || cb.e < 0 || (ca.e == 0 && ca.c.is_zero()) || (cb.e == 0 && cb.c.is_zero()) {
        return Err(CorrError::FormalDivergence("infinite products need nonnegative q-powers".into()));
    }
    // Negative powers inside (a)_n, (b)_n lower the offset by at most this much.
    let slack = [a.e, b.e].iter().map(|&e| if e < 0 { (e * e) as usize } else { 0 }).sum::<usize>();
    let order = n + slack;
    let qpoch = |k: u64| q_pochhammer(&one(), 1, Some(k), order);
    let mut lhs = QSeries::zero(n);
    for k in 0..=(n + slack) as u64 {
        let num = &poch(a, Some(k), order) * &poch(b, Some(k), order);
        let den = &poch(c, Some(k), order) * &qpoch(k);
        let zk = QSeries::monomial(pow(&z.c, k as i64), int(z.e * k as i64), order);
        let term = &num.try_div(&den)? * &zk;
        lhs = &lhs + &term;
    }
    let top = &poch(&ca, None, order) * &poch(&cb, None, order);
    let bottom = &poch(c, None, order) * &poch(&z, None, order);
    let rhs = top.try_div(&bottom)?;
    Ok(SeriesCheck::of(&lhs, &rhs))
}

/// Both sides of the finite sum
/// `sum_{a<i<b} (qv)^{1/2-i} / ((q^a u)_{i-a} (q^i uv)_{b-i})
///  = (1/(1-qv)) [ (qv)^{3/2-b}/(q^a u)_{b-a-1} - (qv)^{1/2-a}/(q^{a+1}uv)_{b-a-1} ]`
/// with `v = w^2`, as half-integer-offset series through relative order `n`.
pub fn telescoping_sum_sides(
    a: i64,
    b: i64,
    u: &Rational,
    w: &Rational,
    n: usize,
) -> Result<(QSeries, QSeries), CorrError> {
    assert!(a < b, "needs a < b");
    let v = w * w;
    let uv = u * &v;
    let order = n + (a.unsigned_abs() as usize) * (a.unsigned_abs() as usize + 1) + b.unsigned_abs() as usize;
    // (qv)^{e} with e in 1/2 + Z: coefficient w^{2e}, exponent e.
    let qv_pow = |twice_e: i64| -> QSeries {
        QSeries::monomial(pow(w, twice_e), Rational::new(twice_e.into(), 2.into()), order)
    };
    let mut lhs = QSeries::monomial(Rational::zero(), Rational::new(1.into(), 2.into()), order);
    for i in a + 1..b {
        let den = &q_pochhammer(u, a, Some((i - a) as u64), order) * &q_pochhammer(&uv, i, Some((b - i) as u64), order);
        lhs = &lhs + &qv_pow(1 - 2 * i).try_div(&den)?;
    }
    let one_minus_qv = &QSeries::one(order) - &QSeries::monomial(v.clone(), int(1), order);
    let len = (b - a - 1) as u64;
    let first = qv_pow(3 - 2 * b).try_div(&q_pochhammer(u, a, Some(len), order))?;
    let second = qv_pow(1 - 2 * a).try_div(&q_pochhammer(&uv, a + 1, Some(len), order))?;
    let rhs = (&first - &second).try_div(&one_minus_qv)?;
    Ok((lhs.truncate(n), rhs.truncate(n)))
}

pub fn verify_telescoping_sum(a: i64, b: i64, u: &Rational, w: &Rational, n: usize) -> Result<SeriesCheck, CorrError> {
    let (l, r) = telescoping_sum_sides(a, b, u, w, n)?;
    Ok(SeriesCheck::of(&l, &r))
}

/// The `a = 1, u = 1` form: `sum_{1<=i<b} (qv)^{1/2-i}/((q)_{i-1}(q^i v)_{b-i}) = (qv)^{3/2-b}/((1-qv)(q)_{b-2})`.
pub fn verify_telescoping_sum_unit(b: i64, w: &Rational, n: usize) -> Result<SeriesCheck, CorrError> {
    assert!(b >= 2);
    let v = w * w;
    let order = n + 2 * b as usize;
    let qv_pow = |twice_e: i64| -> QSeries {
        QSeries::monomial(pow(w, twice_e), Rational::new(twice_e.into(), 2.into()), order)
    };
    let mut lhs = QSeries::monomial(Rational::zero(), Rational::new(1.into(), 2.into()), order);
    for i in 1..b {
        let den =
            &q_pochhammer(&one(), 1, Some((i - 1) as u64), order) * &q_pochhammer(&v, i, Some((b - i) as u64), order);
        lhs = &lhs + &qv_pow(1 - 2 * i).try_div(&den)?;
    }
    let one_minus_qv = &QSeries::one(order) - &QSeries::monomial(v.clone(), int(1), order);
    let den = &one_minus_qv * &q_pochhammer(&one(), 1, Some((b - 2) as u64), order);
    let rhs = qv_pow(3 - 2 * b).try_div(&den)?;
    Ok(SeriesCheck::of(&lhs.truncate(n), &rhs.truncate(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn qp(e: i64) -> QMonomial {
        QMonomial::q_power(e)
    }

    #[test]
    fn qgauss_examples() {
        assert!(verify_qgauss(&qp(1), &qp(1), &qp(3), 20).unwrap().passed());
        assert!(verify_qgauss(&qp(2), &qp(1), &qp(4), 20).unwrap().passed());
        let half = QMonomial::new(rat(1, 2), 1);
        assert!(verify_qgauss(&half, &qp(1), &QMonomial::new(int(3), 3), 15).unwrap().passed());
        // a = c: both sides vanish through the factor (1; q)_inf.
        let b = QMonomial::new(int(2), -1);
        assert!(verify_qgauss(&qp(2), &b, &qp(2), 12).unwrap().passed());
        assert!(verify_qgauss(&qp(1), &qp(1), &qp(2), 10).is_err());
    }

    #[test]
    fn telescoping_sum_examples() {
        assert!(verify_telescoping_sum(0, 3, &int(4), &int(3), 15).unwrap().passed());
        let (l, r) = telescoping_sum_sides(2, 3, &int(4), &int(3), 10).unwrap();
        assert!(l.is_zero() && r.is_zero());
        assert!(verify_telescoping_sum(-1, 3, &rat(2, 3), &rat(5, 2), 12).unwrap().passed());
        for b in 2..=5 {
            assert!(verify_telescoping_sum_unit(b, &int(3), 12).unwrap().passed(), "b={b}");
        }
    }
}

//! Truncated q-series with exact rational coefficients.
//!
//! A [`QSeries`] stands for `q^offset * sum_{k=0}^{N} c_k q^{k*step} + O(q^{offset+(N+1)*step})`
//! where `step` is `1` or `1/2`. Arithmetic is pessimistic: a result never claims
//! coefficients beyond what all of its inputs determine.

use crate::rational::{self, int, one, rat, zero, Rational};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exponent spacing of the stored coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseStep {
    Whole,
    Half,
}

impl BaseStep {
    pub fn value(self) -> Rational {
        match self {
            BaseStep::Whole => one(),
            BaseStep::Half => rat(1, 2),
        }
    }

    fn per_unit(self) -> i64 {
        match self {
            BaseStep::Whole => 1,
            BaseStep::Half => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("offsets {0} and {1} differ by a non-multiple of the base step")]
    NonIntegerOffsetGap(String, String),
    #[error("cannot combine series with different base steps")]
    MixedStep,
    #[error("leading coefficient is zero at exponent {0}")]
    ZeroLeadingCoefficient(String),
}

/// A first disagreement between two series on their common range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub index: i64,
    pub exponent: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone)]
pub struct QSeries {
    offset: Rational,
    step: BaseStep,
    coeffs: Vec<Rational>,
}

impl QSeries {
    /// Builds a whole-step series from coefficients `c_0..c_N`. Panics on an empty vector.
    pub fn new(offset: Rational, coeffs: Vec<Rational>) -> Self {
        Self::with_step(offset, BaseStep::Whole, coeffs)
    }

    pub fn with_step(offset: Rational, step: BaseStep, coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        QSeries { offset, step, coeffs }
    }

    pub fn from_ints(offset: Rational, coeffs: &[i64]) -> Self {
        Self::new(offset, coeffs.iter().map(|&c| int(c)).collect())
    }

    /// The constant `c`, known through order `n`.
    pub fn constant(c: Rational, n: usize) -> Self {
        let mut coeffs = vec![zero(); n + 1];
        coeffs[0] = c;
        Self::new(zero(), coeffs)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(one(), n)
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(zero(), n)
    }

    /// `c * q^e` known through relative order `n`.
    pub fn monomial(c: Rational, e: Rational, n: usize) -> Self {
        let mut s = Self::constant(c, n);
        s.offset = e;
        s
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn step(&self) -> BaseStep {
        self.step
    }

    pub fn trunc_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// First exponent whose coefficient is unknown.
    pub fn precision(&self) -> Rational {
        &self.offset + self.step.value() * int(self.coeffs.len() as i64)
    }

    /// Coefficient of `q^e`; `None` when `e` lies beyond the truncation or off the lattice.
    pub fn coeff_at(&self, e: &Rational) -> Option<Rational> {
        let k = (e - &self.offset) / self.step.value();
        if !k.is_integer() {
            return if e < &self.precision() { Some(zero()) } else { None };
        }
        let k = rational::to_i64(&k)?;
        if k < 0 {
            Some(zero())
        } else if (k as usize) < self.coeffs.len() {
            Some(self.coeffs[k as usize].clone())
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Signed number of steps from `a` to `b`, if both lie on a common lattice.
    fn steps(&self, a: &Rational, b: &Rational) -> Result<i64, SeriesError> {
        let g = (b - a) * int(self.step.per_unit());
        if !g.is_integer() {
            return Err(SeriesError::NonIntegerOffsetGap(rational::fmt(a), rational::fmt(b)));
        }
        Ok(rational::to_i64(&g).expect("offset gap fits in i64"))
    }

    /// Steps from `a` up to `b`; `b >= a` is the caller's responsibility.
    fn gap(&self, a: &Rational, b: &Rational) -> Result<usize, SeriesError> {
        Ok(self.steps(a, b)?.max(0) as usize)
    }

    /// Re-expresses the series on a lower offset (padding with zeros).
    fn realign(&self, new_offset: &Rational, len: usize) -> Result<Vec<Rational>, SeriesError> {
        let shift = self.gap(new_offset, &self.offset)?;
        let mut out = vec![zero(); len];
        for (k, c) in self.coeffs.iter().enumerate() {
            if k + shift < len {
                out[k + shift] = c.clone();
            }
        }
        Ok(out)
    }

    /// Length of the common known range starting at `offset`.
    fn common_len(&self, other: &Self, offset: &Rational) -> Result<usize, SeriesError> {
        let p = self.precision().min(other.precision());
        self.gap(offset, &p)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, SeriesError> {
        if self.step != other.step {
            return Err(SeriesError::MixedStep);
        }
        let offset = self.offset.clone().min(other.offset.clone());
        self.steps(&self.offset, &other.offset)?;
        let len = self.common_len(other, &offset)?;
        let a = self.realign(&offset, len)?;
        let b = other.realign(&offset, len)?;
        let coeffs = a.into_iter().zip(b).map(|(x, y)| x + y).collect();
        Ok(QSeries { offset, step: self.step, coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.try_add(&other.neg_ref())
    }

    fn neg_ref(&self) -> Self {
        QSeries { offset: self.offset.clone(), step: self.step, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    /// Cauchy product truncated at the smaller relative order.
    pub fn try_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        if self.step != other.step {
            return Err(SeriesError::MixedStep);
        }
        let n = self.trunc_order().min(other.trunc_order());
        let mut coeffs = vec![zero(); n + 1];
        for (i, a) in self.coeffs.iter().take(n + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n + 1 - i).enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        Ok(QSeries { offset: &self.offset + &other.offset, step: self.step, coeffs })
    }

    /// Multiplicative inverse; requires a nonzero coefficient at the offset.
    pub fn inv(&self) -> Result<Self, SeriesError> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(SeriesError::ZeroLeadingCoefficient(rational::fmt(&self.offset)));
        }
        let n = self.trunc_order();
        let c0inv = c0.recip();
        let mut out = vec![zero(); n + 1];
        out[0] = c0inv.clone();
        for k in 1..=n {
            let mut acc = zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc += &self.coeffs[j] * &out[k - j];
                }
            }
            out[k] = -acc * &c0inv;
        }
        Ok(QSeries { offset: -&self.offset, step: self.step, coeffs: out })
    }

    /// Drops leading zero coefficients into the offset, shortening the known range.
    pub fn normalized(&self) -> Self {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(0) | None => self.clone(),
            Some(k) => QSeries {
                offset: &self.offset + self.step.value() * int(k as i64),
                step: self.step,
                coeffs: self.coeffs[k..].to_vec(),
            },
        }
    }

    /// `self / other`, normalizing the divisor first.
    pub fn try_div(&self, other: &Self) -> Result<Self, SeriesError> {
        self.try_mul(&other.normalized().inv()?)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QSeries { offset: self.offset.clone(), step: self.step, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Multiplies by `q^e`.
    pub fn shift(&self, e: &Rational) -> Self {
        QSeries { offset: &self.offset + e, step: self.step, coeffs: self.coeffs.clone() }
    }

    /// Keeps at most `n + 1` coefficients.
    pub fn truncate(&self, n: usize) -> Self {
        let mut s = self.clone();
        s.coeffs.truncate(n + 1);
        s
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = QSeries::one(self.trunc_order()).with_step_of(self);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    fn with_step_of(mut self, other: &Self) -> Self {
        if other.step == BaseStep::Half && self.step == BaseStep::Whole {
            self = self.to_half_step();
        }
        self
    }

    /// Rewrites a whole-step series on the half-step lattice (same value, same precision).
    pub fn to_half_step(&self) -> Self {
        match self.step {
            BaseStep::Half => self.clone(),
            BaseStep::Whole => {
                let mut coeffs = vec![zero(); 2 * self.coeffs.len()];
                for (k, c) in self.coeffs.iter().enumerate() {
                    coeffs[2 * k] = c.clone();
                }
                QSeries { offset: self.offset.clone(), step: BaseStep::Half, coeffs }
            }
        }
    }

    /// Substitutes `q -> q^{1/2}` in a whole-step series.
    pub fn substitute_sqrt_q(&self) -> Self {
        assert_eq!(self.step, BaseStep::Whole, "substitution expects a whole-step series");
        QSeries { offset: &self.offset / int(2), step: BaseStep::Half, coeffs: self.coeffs.clone() }
    }

    /// Compares on the common known range; returns the first disagreement.
    pub fn compare(&self, other: &Self) -> Result<(), Mismatch> {
        let err = |index: i64, exponent: &Rational, lhs: &Rational, rhs: &Rational| Mismatch {
            index,
            exponent: rational::fmt(exponent),
            lhs: rational::fmt(lhs),
            rhs: rational::fmt(rhs),
        };
        let (a, b) = if self.step == other.step {
            (self.clone(), other.clone())
        } else {
            (self.to_half_step(), other.to_half_step())
        };
        let offset = a.offset.clone().min(b.offset.clone());
        let lattice = a.steps(&a.offset, &b.offset);
        if lattice.is_err() {
            // Off-lattice supports can only agree if both are zero on the overlap.
            let nz = |s: &QSeries| s.coeffs.iter().position(|c| !c.is_zero());
            return match (nz(&a), nz(&b)) {
                (None, None) => Ok(()),
                (Some(k), _) => {
                    let e = &a.offset + a.step.value() * int(k as i64);
                    Err(err(k as i64, &e, &a.coeffs[k], &zero()))
                }
                (None, Some(k)) => {
                    let e = &b.offset + b.step.value() * int(k as i64);
                    Err(err(k as i64, &e, &zero(), &b.coeffs[k]))
                }
            };
        }
        let len = a.common_len(&b, &offset).unwrap_or(0);
        let x = a.realign(&offset, len).expect("aligned");
        let y = b.realign(&offset, len).expect("aligned");
        for k in 0..len {
            if x[k] != y[k] {
                let e = &offset + a.step.value() * int(k as i64);
                return Err(err(k as i64, &e, &x[k], &y[k]));
            }
        }
        Ok(())
    }

    /// Equality on the common known range (the comparison used by every identity check).
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.compare(other).is_ok()
    }

    /// `D = q d/dq`, including the offset contribution.
    pub fn q_derive(&self) -> Self {
        let step = self.step.value();
        let coeffs = self.coeffs.iter().enumerate().map(|(k, c)| c * (&self.offset + &step * int(k as i64))).collect();
        QSeries { offset: self.offset.clone(), step: self.step, coeffs }
    }

    /// Evaluates the known part at a numeric `q`, given `q^offset` and `q^step` explicitly.
    pub fn eval_with(&self, q_offset: &Rational, q_step: &Rational) -> Rational {
        let mut acc = zero();
        let mut p = one();
        for c in &self.coeffs {
            if !c.is_zero() {
                acc += c * &p;
            }
            p *= q_step;
        }
        acc * q_offset
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        m.insert("offset".into(), rational::fmt(&self.offset).into());
        m.insert("coeffs".into(), self.coeffs.iter().map(rational::fmt).collect::<Vec<_>>().into());
        if self.step == BaseStep::Half {
            m.insert("base_step".into(), "1/2".into());
        }
        serde_json::Value::Object(m)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, String> {
        let raw: RawSeries = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
        let offset = rational::parse(&raw.offset).map_err(|e| e.to_string())?;
        let coeffs =
            raw.coeffs.iter().map(|c| rational::parse(c).map_err(|e| e.to_string())).collect::<Result<Vec<_>, _>>()?;
        if coeffs.is_empty() {
            return Err("empty coefficient list".into());
        }
        let step = match raw.base_step.as_deref() {
            None | Some("1") => BaseStep::Whole,
            Some("1/2") => BaseStep::Half,
            Some(other) => return Err(format!("unsupported base_step {other}")),
        };
        Ok(QSeries { offset, step, coeffs })
    }
}

#[derive(Serialize, Deserialize)]
struct RawSeries {
    offset: String,
    coeffs: Vec<String>,
    #[serde(default)]
    base_step: Option<String>,
}

impl Serialize for QSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        QSeries::from_json(&v).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q^({}) * [", self.offset)?;
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "] step {}", self.step.value())
    }
}

/// Equality on the common known range after aligning offsets.
impl PartialEq for QSeries {
    fn eq(&self, other: &Self) -> bool {
        self.agrees_with(other)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&QSeries> for &QSeries {
            type Output = QSeries;
            fn $m(self, rhs: &QSeries) -> QSeries {
                self.$f(rhs).unwrap_or_else(|e| panic!("series arithmetic: {e}"))
            }
        }
        impl $tr<QSeries> for QSeries {
            type Output = QSeries;
            fn $m(self, rhs: QSeries) -> QSeries {
                (&self).$m(&rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        self.neg_ref()
    }
}

impl Neg for QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        self.neg_ref()
    }
}

pub fn series_add(a: &QSeries, b: &QSeries) -> Result<QSeries, SeriesError> {
    a.try_add(b)
}

pub fn series_mul(a: &QSeries, b: &QSeries) -> Result<QSeries, SeriesError> {
    a.try_mul(b)
}

pub fn series_inv(a: &QSeries) -> Result<QSeries, SeriesError> {
    a.inv()
}

pub fn q_derive(a: &QSeries) -> QSeries {
    a.q_derive()
}

/// `(c q^j; q)_n = prod_{k=0}^{n-1} (1 - c q^{j+k})`, with `n = None` meaning the
/// infinite product truncated at relative order `order`. Factors whose exponent
/// exceeds the known range are dropped.
pub fn q_pochhammer(c: &Rational, j: i64, n: Option<u64>, order: usize) -> QSeries {
    if let Some(n) = n {
        if n == 0 {
            return QSeries::one(order);
        }
    } else {
        assert!(j > 0 || (j == 0 && !c.is_zero()), "infinite product needs j > 0 or j = 0");
    }
    // Negative exponents move the offset; collect them up front.
    let last = match n {
        Some(n) => j + n as i64 - 1,
        None => j + order as i64,
    };
    let low: i64 = (j..=last).filter(|&e| e < 0).sum();
    let mut coeffs = vec![zero(); order + 1];
    coeffs[0] = one();
    // Running product of normalized factors: (1 - c q^e) for e >= 0, (-c + q^{-e}) for e < 0.
    for e in j..=last {
        if e >= 0 && e as usize > order && n.is_none() {
            break;
        }
        if e > 0 {
            let e = e as usize;
            for k in (e..=order).rev() {
                let t = &coeffs[k - e] * c;
                coeffs[k] -= t;
            }
        } else if e == 0 {
            let f = one() - c;
            for x in coeffs.iter_mut() {
                *x *= &f;
            }
        } else {
            let d = (-e) as usize;
            let mc = -c;
            for k in (0..=order).rev() {
                let mut v = &coeffs[k] * &mc;
                if k >= d {
                    v += &coeffs[k - d];
                }
                coeffs[k] = v;
            }
        }
    }
    QSeries::new(int(low), coeffs)
}

/// `(q;q)_inf` through order `n`.
pub fn euler(n: usize) -> QSeries {
    q_pochhammer(&one(), 1, None, n)
}

/// The polynomial `sum c_k q^k` known through order `n`.
pub fn polynomial(coeffs: &[Rational], n: usize) -> QSeries {
    let mut v = vec![zero(); n + 1];
    for (k, c) in coeffs.iter().enumerate().take(n + 1) {
        v[k] = c.clone();
    }
    QSeries::new(zero(), v)
}

impl QSeries {
    /// Sum of a list of same-lattice series; `None` for an empty list.
    pub fn sum<'a>(items: impl IntoIterator<Item = &'a QSeries>) -> Option<QSeries> {
        let mut it = items.into_iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, s| &acc + s))
    }

    pub fn is_one(&self) -> bool {
        self.offset.is_zero() && self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(offset: Rational, c: &[i64]) -> QSeries {
        QSeries::from_ints(offset, c)
    }

    #[test]
    fn add_examples() {
        let a = s(zero(), &[1, 1, 0]);
        let b = s(zero(), &[2, 0, 3]);
        assert_eq!(&a + &b, s(zero(), &[3, 1, 3]));
        let e = rat(1, 24);
        let z = &s(e.clone(), &[1]) + &s(e.clone(), &[-1]);
        assert!(z.is_zero());
        assert_eq!(z.offset(), &e);
        let h = rat(1, 2);
        let sum = &s(h.clone(), &[1, 0]) + &s(h.clone() + int(1), &[1]);
        assert_eq!(sum, s(h, &[1, 1]));
    }

    #[test]
    fn add_rejects_off_lattice() {
        let a = s(zero(), &[1]);
        let b = s(rat(1, 2), &[1]);
        assert!(matches!(a.try_add(&b), Err(SeriesError::NonIntegerOffsetGap(..))));
        let c = s(zero(), &[1]).to_half_step();
        assert_eq!(a.try_add(&c), Err(SeriesError::MixedStep));
    }

    #[test]
    fn mul_examples() {
        let a = s(zero(), &[1, -1, 0, 0]);
        let b = s(zero(), &[1, 1, 1, 1]);
        assert_eq!(&a * &b, s(zero(), &[1, 0, 0, 0]));
        let e = rat(1, 24);
        let p = &s(e.clone(), &[1, 0]) * &s(-e, &[1, 0]);
        assert_eq!(p, QSeries::one(1));
        let x = s(zero(), &[1, 1, 0]);
        assert_eq!(&x * &x, s(zero(), &[1, 2, 1]));
    }

    #[test]
    fn mul_truncates_to_min_order() {
        let a = s(zero(), &[1, 1, 1, 1, 1]);
        let b = s(zero(), &[1, 1]);
        assert_eq!((&a * &b).trunc_order(), 1);
    }

    #[test]
    fn inverse_examples() {
        let a = s(zero(), &[1, -1, 0, 0, 0]);
        assert_eq!(a.inv().unwrap(), s(zero(), &[1, 1, 1, 1, 1]));
        let b = QSeries::new(zero(), vec![rat(3, 2), int(1), int(0)]);
        assert_eq!(b.inv().unwrap().coeffs()[0], rat(2, 3));
        let c = s(int(1), &[1, 5]);
        assert_eq!(c.inv().unwrap().offset(), &int(-1));
        let z = s(zero(), &[0, 1]);
        assert!(matches!(z.inv(), Err(SeriesError::ZeroLeadingCoefficient(_))));
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(euler(5), s(zero(), &[1, -1, -1, 0, 0, 1]));
        assert_eq!(q_pochhammer(&rat(7, 3), 3, Some(0), 4), QSeries::one(4));
        // (4q; q)_2 = (1 - 4q)(1 - 4q^2)
        assert_eq!(q_pochhammer(&int(4), 1, Some(2), 4), s(zero(), &[1, -4, -4, 16, 0]));
        // (c q^{-1}; q)_2 = (1 - c/q)(1 - c) = q^{-1} (1-c)(-c + q)
        let p = q_pochhammer(&int(3), -1, Some(2), 3);
        assert_eq!(p, s(int(-1), &[6, -2, 0, 0]));
        // (c; q)_1 = 1 - c
        assert_eq!(q_pochhammer(&int(5), 0, Some(1), 2), s(zero(), &[-4, 0, 0]));
    }

    #[test]
    fn derivation_examples() {
        let a = s(int(3), &[1, 0]);
        assert_eq!(a.q_derive(), s(int(3), &[3, 0]));
        let e = QSeries::monomial(one(), rat(1, 24), 2);
        assert_eq!(e.q_derive().coeffs()[0], rat(1, 24));
    }

    #[test]
    fn comparison_reports_first_mismatch() {
        let a = s(zero(), &[1, 2, 3]);
        let b = s(zero(), &[1, 2, 4, 5]);
        let m = a.compare(&b).unwrap_err();
        assert_eq!(m.index, 2);
        assert_eq!((m.lhs.as_str(), m.rhs.as_str()), ("3", "4"));
        assert!(a.agrees_with(&s(zero(), &[1, 2])));
        assert!(s(int(2), &[0, 0]).agrees_with(&s(zero(), &[0, 0, 0])));
    }

    #[test]
    fn half_step_roundtrip() {
        let a = s(zero(), &[1, 2]);
        let h = a.to_half_step();
        assert_eq!(h.coeffs().len(), 4);
        assert!(h.agrees_with(&a));
        let r = a.substitute_sqrt_q();
        assert_eq!(r.coeff_at(&rat(1, 2)), Some(int(2)));
    }

    #[test]
    fn json_roundtrip() {
        let a = QSeries::new(rat(-1, 24), vec![rat(-1, 24), int(1), rat(3, 7)]);
        let v = a.to_json();
        assert_eq!(v["offset"], "-1/24");
        assert!(v.get("base_step").is_none());
        assert_eq!(QSeries::from_json(&v).unwrap(), a);
        let h = a.substitute_sqrt_q();
        assert_eq!(h.to_json()["base_step"], "1/2");
        assert_eq!(QSeries::from_json(&h.to_json()).unwrap(), h);
    }
}

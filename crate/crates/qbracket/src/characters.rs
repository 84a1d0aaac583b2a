//! The infinite-wedge characters `Omega(q_0, q_1, ..)` and `V(q_1, q_2, ..)` as sparse
//! multivariate series, with their elliptic transformation law and theta-like expansion.
//!
//! Variables beyond `q_K` are set to 1 (`tau_j = 0` for `j > K`). Truncation is by the
//! exponent of `q_1`, measured from a fixed base so that the anomaly offset does not
//! enter the grade. The anomaly factor `q_1^{-xi(-1)} q_3^{-xi(-3)} ..` is applied once.

use crate::partitions::partitions_of;
use crate::rational::{binomial_q, fmt, int, one, parse, pow, rat, sign_pow, zero, Rational};
use crate::series::euler;
use crate::special::xi_value;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Exponent vector `(e_0, .., e_K)` of `q_0^{e_0} .. q_K^{e_K}`.
pub type Exps = Vec<Rational>;

/// A finite sum of monomials in `q_0..q_K`, complete for `q_1`-exponents up to `base + grade`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiSeries {
    pub k: usize,
    pub grade: Rational,
    /// The `q_1`-exponent at which the grade starts.
    pub base: Rational,
    pub terms: BTreeMap<Exps, Rational>,
}

impl MultiSeries {
    pub fn one(k: usize, grade: Rational) -> Self {
        Self::monomial(k, grade, vec![zero(); k + 1], one())
    }

    /// The single term `c q^e`, whose `q_1`-exponent becomes the base.
    pub fn monomial(k: usize, grade: Rational, e: Exps, c: Rational) -> Self {
        assert_eq!(e.len(), k + 1, "exponent vector has K + 1 entries");
        let base = e[1].clone();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        MultiSeries { k, grade, base, terms }
    }

    pub fn zero_like(&self) -> Self {
        MultiSeries { k: self.k, grade: self.grade.clone(), base: self.base.clone(), terms: BTreeMap::new() }
    }

    /// The `q_1`-exponent above the base.
    pub fn rel_grade(&self, e: &[Rational]) -> Rational {
        &e[1] - &self.base
    }

    pub fn coeff(&self, e: &[Rational]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(zero)
    }

    fn insert(&mut self, e: Exps, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(zero);
        *entry += c;
        if entry.is_zero() {
            // Re-borrowing is cheaper than carrying the key around.
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &MultiSeries) -> MultiSeries {
        assert_eq!(self.k, other.k);
        assert_eq!(self.base, other.base, "sums need a common base");
        let mut out = self.zero_like();
        out.grade = self.grade.clone().min(other.grade.clone());
        for (e, c) in self.terms.iter().chain(&other.terms) {
            if out.rel_grade(e) <= out.grade {
                out.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// Product with over-grade terms dropped.
    pub fn mul(&self, other: &MultiSeries) -> MultiSeries {
        assert_eq!(self.k, other.k);
        let grade = self.grade.clone().min(other.grade.clone());
        let base = &self.base + &other.base;
        let mut out = MultiSeries { k: self.k, grade, base, terms: BTreeMap::new() };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exps = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                if out.rel_grade(&e) <= out.grade {
                    out.insert(e, ca * cb);
                }
            }
        }
        out
    }

    /// Multiplies by `1 + q^e`.
    fn mul_one_plus(&self, e: &[Rational]) -> MultiSeries {
        let mut out = self.clone();
        for (ea, ca) in &self.terms {
            let sum: Exps = ea.iter().zip(e).map(|(x, y)| x + y).collect();
            if out.rel_grade(&sum) <= out.grade {
                out.insert(sum, ca.clone());
            }
        }
        out
    }

    /// Terms with `q_0`-exponent `c`, with the `q_0` entry kept.
    pub fn q0_part(&self, c: i64) -> MultiSeries {
        let mut out = self.zero_like();
        for (e, v) in &self.terms {
            if e[0] == int(c) {
                out.terms.insert(e.clone(), v.clone());
            }
        }
        out
    }

    /// Sets `q_j = 1` for `j > keep`, summing the coefficients that merge.
    pub fn specialize(&self, keep: usize) -> MultiSeries {
        assert!(keep >= 1 && keep <= self.k);
        let mut out =
            MultiSeries { k: keep, grade: self.grade.clone(), base: self.base.clone(), terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            out.insert(e[..=keep].to_vec(), c.clone());
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let raw = RawMulti {
            k: self.k,
            grade: fmt(&self.grade),
            base: fmt(&self.base),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| RawTerm { exps: e.iter().map(fmt).collect(), coeff: fmt(c) })
                .collect(),
        };
        serde_json::to_value(raw).expect("plain data")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, String> {
        let raw: RawMulti = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
        let p = |s: &str| parse(s).map_err(|e| e.to_string());
        let mut terms = BTreeMap::new();
        for t in &raw.terms {
            if t.exps.len() != raw.k + 1 {
                return Err(format!("term has {} exponents, expected {}", t.exps.len(), raw.k + 1));
            }
            let e = t.exps.iter().map(|s| p(s)).collect::<Result<Exps, _>>()?;
            terms.insert(e, p(&t.coeff)?);
        }
        Ok(MultiSeries { k: raw.k, grade: p(&raw.grade)?, base: p(&raw.base)?, terms })
    }
}

#[derive(Serialize, Deserialize)]
struct RawTerm {
    exps: Vec<String>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct RawMulti {
    #[serde(rename = "K")]
    k: usize,
    grade: String,
    base: String,
    terms: Vec<RawTerm>,
}

/// Exponents of `q_1^{-xi(-1)} q_3^{-xi(-3)} ..` for odd indices up to `k`.
pub fn anomaly_exps(k: usize) -> Exps {
    (0..=k).map(|j| if j % 2 == 1 { -xi_value(-(j as i64)).expect("negative argument") } else { zero() }).collect()
}

/// `Omega` through `q_1`-grade `n`: the anomaly factor times
/// `prod_{r >= 0} (1 + q_0 prod_j q_j^{(r+1/2)^j}) (1 + q_0^{-1} prod_j q_j^{(-1)^{j+1} (r+1/2)^j})`.
pub fn omega_series(k: usize, n: usize) -> MultiSeries {
    assert!(k >= 1);
    let grade = int(n as i64);
    let mut out = MultiSeries::one(k, grade.clone());
    let mut r = 0;
    while int(r) + rat(1, 2) <= grade {
        let x = int(r) + rat(1, 2);
        let plus: Exps = (0..=k).map(|j| if j == 0 { one() } else { pow(&x, j as i64) }).collect();
        let minus: Exps =
            (0..=k).map(|j| if j == 0 { -one() } else { sign_pow(j as i64 + 1) * pow(&x, j as i64) }).collect();
        out = out.mul_one_plus(&plus).mul_one_plus(&minus);
        r += 1;
    }
    MultiSeries::monomial(k, grade, anomaly_exps(k), one()).mul(&out)
}

/// `V` through `q_1`-grade `n`: the anomaly factor times `sum_lambda prod_r q_r^{p_r(lambda)}`.
pub fn v_series(k: usize, n: usize) -> MultiSeries {
    assert!(k >= 1);
    let anomaly = anomaly_exps(k);
    let mut out = MultiSeries::monomial(k, int(n as i64), anomaly.clone(), one());
    out.terms.clear();
    for size in 0..=n as u32 {
        for l in partitions_of(size) {
            let e: Exps = (0..=k).map(|r| if r == 0 { zero() } else { &anomaly[r] + l.p(r as u32) }).collect();
            out.insert(e, one());
        }
    }
    out
}

/// The charge-zero part of `Omega`, which is `V`.
pub fn v_from_omega(k: usize, n: usize) -> MultiSeries {
    omega_series(k, n).q0_part(0)
}

/// Exponent substitution dual to `T^m`: `e'_i = sum_{j <= i} e_j (-m)^{i-j} C(i, j)`,
/// with `tau_{> K} = 0`. `T` itself is `m = 1`; `m = 0` is the identity.
pub fn elliptic_map(e: &[Rational], m: i64, k: usize) -> Exps {
    assert_eq!(e.len(), k + 1);
    (0..=k)
        .map(|i| {
            (0..=i).fold(zero(), |acc, j| acc + &e[j] * pow(&int(-m), (i - j) as i64) * binomial_q(i as u64, j as u64))
        })
        .collect()
}

/// First disagreement between two sides of a character identity.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpsMismatch {
    pub exps: Exps,
    pub lhs: Rational,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterCheck {
    /// Number of monomials compared.
    pub compared: usize,
    pub mismatch: Option<ExpsMismatch>,
}

impl CharacterCheck {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none() && self.compared > 0
    }
}

/// Coefficientwise comparison over the union of supports.
pub fn compare_maps(a: &BTreeMap<Exps, Rational>, b: &BTreeMap<Exps, Rational>) -> CharacterCheck {
    let mut keys: Vec<&Exps> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    for e in &keys {
        let (x, y) = (a.get(*e).cloned().unwrap_or_else(zero), b.get(*e).cloned().unwrap_or_else(zero));
        if x != y {
            return CharacterCheck {
                compared: keys.len(),
                mismatch: Some(ExpsMismatch { exps: (*e).clone(), lhs: x, rhs: y }),
            };
        }
    }
    CharacterCheck { compared: keys.len(), mismatch: None }
}

/// `q_0 q_1^{-1/2} q_2^{1/3} .. q_K^{(-1)^K/(K+1)}`.
pub fn elliptic_factor(k: usize) -> Exps {
    (0..=k).map(|j| sign_pow(j as i64) / int(j as i64 + 1)).collect()
}

/// `Omega(T q) = q_0 q_1^{-1/2} q_2^{1/3} .. Omega(q)`, compared on the monomials whose
/// preimages on both sides lie within the computed grade.
pub fn verify_elliptic_transformation(k: usize, n: usize) -> CharacterCheck {
    let omega = omega_series(k, n);
    let shift = elliptic_factor(k);
    let inside = |e: &Exps| omega.rel_grade(e) <= omega.grade;
    let mut candidates: Vec<Exps> = Vec::new();
    for e in omega.terms.keys() {
        candidates.push(elliptic_map(e, 1, k));
        candidates.push(e.iter().zip(&shift).map(|(x, s)| x + s).collect());
    }
    candidates.sort();
    candidates.dedup();
    let mut compared = 0;
    for m in candidates {
        let from_lhs = elliptic_map(&m, -1, k);
        let from_rhs: Exps = m.iter().zip(&shift).map(|(x, s)| x - s).collect();
        if !(inside(&from_lhs) && inside(&from_rhs)) {
            continue;
        }
        compared += 1;
        let (lhs, rhs) = (omega.coeff(&from_lhs), omega.coeff(&from_rhs));
        if lhs != rhs {
            return CharacterCheck { compared, mismatch: Some(ExpsMismatch { exps: m, lhs, rhs }) };
        }
    }
    CharacterCheck { compared, mismatch: None }
}

/// `Omega = sum_m V(T^{-m} q) q_0^m q_1^{m^2/2} q_2^{m^3/3} ..` through grade `n`,
/// with `|m| <= ceil(sqrt(2n)) + 1`.
pub fn verify_theta_expansion(k: usize, n: usize) -> CharacterCheck {
    let omega = omega_series(k, n);
    let v = v_series(k, n);
    let m_max = ((2 * n) as f64).sqrt().ceil() as i64 + 1;
    let mut rhs = omega.zero_like();
    for m in -m_max..=m_max {
        let theta: Exps = (0..=k).map(|j| pow(&int(m), j as i64 + 1) / int(j as i64 + 1)).collect();
        for (e, c) in &v.terms {
            let moved: Exps = elliptic_map(e, -m, k).iter().zip(&theta).map(|(x, y)| x + y).collect();
            if rhs.rel_grade(&moved) <= rhs.grade {
                rhs.insert(moved, c.clone());
            }
        }
    }
    compare_maps(&omega.terms, &rhs.terms)
}

/// `eta(q_1) = q_1^{1/24} prod (1 - q_1^m)` as a one-variable character through grade `n`.
pub fn eta_multi(n: usize) -> MultiSeries {
    let e = euler(n);
    let mut out = MultiSeries::monomial(1, int(n as i64), vec![zero(), rat(1, 24)], one());
    out.terms.clear();
    for (i, c) in e.coeffs().iter().enumerate() {
        out.insert(vec![zero(), rat(1, 24) + int(i as i64)], c.clone());
    }
    out
}

/// `eta(q_1) Omega(q_0, q_1) = sum_m q_0^m q_1^{m^2/2}` through grade `n`.
pub fn verify_triple_product(n: usize) -> CharacterCheck {
    let lhs = eta_multi(n).mul(&omega_series(1, n));
    let mut rhs = BTreeMap::new();
    let mut m = 0i64;
    while rat(m * m, 2) <= int(n as i64) {
        rhs.insert(vec![int(m), rat(m * m, 2)], one());
        if m > 0 {
            rhs.insert(vec![int(-m), rat(m * m, 2)], one());
        }
        m += 1;
    }
    compare_maps(&lhs.terms, &rhs)
}

/// `V` against the charge-zero part of `Omega`.
pub fn verify_v_from_omega(k: usize, n: usize) -> CharacterCheck {
    compare_maps(&v_series(k, n).terms, &v_from_omega(k, n).terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anomaly_offsets() {
        let a = anomaly_exps(3);
        assert_eq!(a, vec![zero(), rat(-1, 24), zero(), rat(7, 960)]);
    }

    #[test]
    fn omega_single_factor_term() {
        let o = omega_series(3, 3);
        let a = anomaly_exps(3);
        let e = vec![one(), rat(1, 2) + &a[1], rat(1, 4), rat(1, 8) + &a[3]];
        assert_eq!(o.coeff(&e), one());
        for e in o.terms.keys() {
            assert!(crate::rational::is_integer(&e[0]));
            assert!(o.rel_grade(e) <= o.grade);
        }
    }

    #[test]
    fn v_single_box_term() {
        let v = v_series(3, 2);
        let a = anomaly_exps(3);
        let e = vec![zero(), one() + &a[1], zero(), rat(1, 4) + &a[3]];
        assert_eq!(v.coeff(&e), one());
    }

    #[test]
    fn v_is_inverse_eta_in_one_variable() {
        let prod = v_series(1, 12).mul(&eta_multi(12));
        assert_eq!(prod.terms.len(), 1);
        assert_eq!(prod.coeff(&[zero(), zero()]), one());
    }

    #[test]
    fn specialization_counts_partitions() {
        let v = v_series(3, 10).specialize(1);
        let counts = crate::partitions::partition_counts(10);
        for (k, &c) in counts.iter().enumerate() {
            assert_eq!(v.coeff(&[zero(), int(k as i64) - rat(1, 24)]), int(c as i64));
        }
    }

    #[test]
    fn elliptic_map_properties() {
        let e = vec![rat(1, 3), rat(-2, 5), int(3), rat(7, 2), int(-1)];
        assert_eq!(elliptic_map(&e, 0, 4), e);
        for m in [1, 2, -3] {
            assert_eq!(elliptic_map(&elliptic_map(&e, m, 4), -m, 4), e);
        }
        assert_eq!(elliptic_map(&elliptic_map(&e, 1, 4), 1, 4), elliptic_map(&e, 2, 4));
        // T(q_1) = q_1 q_2^{-2} q_3^3 ..: the q_1 entry of the image picks up -e_0.
        let unit0 = vec![one(), zero(), zero()];
        assert_eq!(elliptic_map(&unit0, 1, 2), vec![one(), -one(), one()]);
    }

    #[test]
    fn transformation_law() {
        for (k, n) in [(1, 4), (2, 3), (3, 3)] {
            let c = verify_elliptic_transformation(k, n);
            assert!(c.passed(), "K={k} N={n}: {c:?}");
        }
    }

    #[test]
    fn theta_like_expansion() {
        for (k, n) in [(1, 6), (2, 3), (3, 3)] {
            let c = verify_theta_expansion(k, n);
            assert!(c.passed(), "K={k} N={n}: {c:?}");
        }
    }

    #[test]
    fn triple_product() {
        assert!(verify_triple_product(12).passed());
    }

    #[test]
    fn charge_zero_part_is_v() {
        for (k, n) in [(1, 6), (2, 4), (3, 4)] {
            assert!(verify_v_from_omega(k, n).passed(), "K={k} N={n}");
        }
    }

    #[test]
    fn json_round_trip() {
        let v = v_series(2, 3);
        assert_eq!(MultiSeries::from_json(&v.to_json()).unwrap(), v);
    }
}

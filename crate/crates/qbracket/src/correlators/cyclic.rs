//! The finite rational identity behind the residues: a cyclic sum of products of
//! inverse q-Pochhammer symbols, on the locus `q^m t_1 .. t_k = 1`, is a constant.

use super::CorrError;
use crate::rational::{factorial_q, fmt, int, one, pow, sign_pow, zero, Rational};
use crate::setcomb::{permutations, stabilizer_multiplicity};
use crate::special::NumericQ;
use serde::Serialize;

/// Which summand the identity sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CyclicVariant {
    /// `{i | t}_m` alone; sums to `m^{k-1}/(k-1)!`.
    Plain,
    /// `t_1^{1/2-i_1} .. t_k^{1/2-i_k} {i | t}_m`; sums to `(-1)^{m-1} q^{m^2/2} m^{k-1}/(k-1)!`.
    Numerator,
}

/// Which reorderings of `t_1..t_k` the outer sum runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reorderings {
    Cyclic,
    AllPermutations,
}

/// `(a; q)_n` for numbers.
fn poch(a: &Rational, q: &Rational, n: i64) -> Rational {
    (0..n).fold(one(), |acc, l| acc * (one() - a * pow(q, l)))
}

/// `1 / [(q)_{i_1-1} (q^{i_1} t_1)_{i_2-i_1} .. (q^{i_k} t_1..t_k)_{m-i_k}]`.
pub fn pochhammer_block(i: &[i64], t: &[Rational], q: &Rational, m: i64) -> Result<Rational, CorrError> {
    let mut den = poch(q, q, i[0] - 1);
    let mut partial = one();
    for j in 0..i.len() {
        partial *= &t[j];
        let next = i.get(j + 1).copied().unwrap_or(m);
        den *= poch(&(pow(q, i[j]) * &partial), q, next - i[j]);
    }
    if den == zero() {
        return Err(CorrError::DenominatorZero);
    }
    Ok(den.recip())
}

/// Weakly increasing tuples `1 <= i_1 <= .. <= i_k <= m`.
fn weak_tuples(k: usize, m: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(k: usize, lo: i64, m: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in lo..=m {
            cur.push(i);
            go(k, i, m, cur, out);
            cur.pop();
        }
    }
    go(k, 1, m, &mut cur, &mut out);
    out
}

/// Checks `q^m t_1 .. t_k = 1` with `t_j = s_j^2`.
pub fn check_constraint(m: i64, q: &NumericQ, s: &[Rational]) -> Result<(), CorrError> {
    let prod: Rational = s.iter().map(|x| x * x).product();
    let value = pow(&q.q(), m) * prod;
    if value != one() {
        return Err(CorrError::ConstraintViolated { value: fmt(&value) });
    }
    Ok(())
}

/// The last root fixed by the constraint: `s_k = 1 / (r^m s_1 .. s_{k-1})`, so that
/// `q^m t_1 .. t_k = 1` with `q = r^2`.
pub fn complete_point(m: i64, q: &NumericQ, free: &[Rational]) -> Vec<Rational> {
    let head: Rational = free.iter().product();
    let mut s = free.to_vec();
    s.push((pow(&q.r, m) * head).recip());
    s
}

/// The tilde sum over weakly increasing index tuples, summed over reorderings of the arguments.
pub fn cyclic_sum(
    m: i64,
    q: &NumericQ,
    s: &[Rational],
    variant: CyclicVariant,
    mode: Reorderings,
) -> Result<Rational, CorrError> {
    check_constraint(m, q, s)?;
    let k = s.len();
    let q0 = q.q();
    let orders: Vec<Vec<usize>> = match mode {
        Reorderings::Cyclic => (0..k).map(|r| (0..k).map(|j| (j + r) % k).collect()).collect(),
        Reorderings::AllPermutations => permutations(k),
    };
    let tuples = weak_tuples(k, m);
    let mut total = zero();
    for order in &orders {
        let sr: Vec<Rational> = order.iter().map(|&j| s[j].clone()).collect();
        let t: Vec<Rational> = sr.iter().map(|x| x * x).collect();
        for i in &tuples {
            let mut term = pochhammer_block(i, &t, &q0, m)? * stabilizer_multiplicity(i);
            if variant == CyclicVariant::Numerator {
                for (sj, &ij) in sr.iter().zip(i) {
                    term *= pow(sj, 1 - 2 * ij);
                }
            }
            total += term;
        }
    }
    Ok(total)
}

/// The constant the cyclic sum equals.
pub fn cyclic_expected(m: i64, k: usize, q: &NumericQ, variant: CyclicVariant) -> Rational {
    let base = pow(&int(m), k as i64 - 1) / factorial_q(k as u64 - 1);
    match variant {
        CyclicVariant::Plain => base,
        CyclicVariant::Numerator => sign_pow(m - 1) * pow(&q.r, m * m) * base,
    }
}

#[derive(Debug, Clone)]
pub struct CyclicCheck {
    pub value: Rational,
    pub expected: Rational,
}

impl CyclicCheck {
    pub fn passed(&self) -> bool {
        self.value == self.expected
    }
}

/// Evaluates the sum with the given reorderings and pairs it with the constant.
/// Only the cyclic reorderings are expected to match.
pub fn verify_cyclic_identity(
    m: i64,
    q: &NumericQ,
    s: &[Rational],
    variant: CyclicVariant,
    mode: Reorderings,
) -> Result<CyclicCheck, CorrError> {
    assert!(m >= 1 && !s.is_empty(), "needs m >= 1 and k >= 1");
    let value = cyclic_sum(m, q, s, variant, mode)?;
    Ok(CyclicCheck { value, expected: cyclic_expected(m, s.len(), q, variant) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn check(m: i64, r: Rational, free: &[Rational]) {
        let q = NumericQ::from_root(r);
        let s = complete_point(m, &q, free);
        for variant in [CyclicVariant::Plain, CyclicVariant::Numerator] {
            let c = verify_cyclic_identity(m, &q, &s, variant, Reorderings::Cyclic).unwrap();
            assert!(c.passed(), "m={m} k={} {variant:?}: {c:?}", s.len());
        }
    }

    #[test]
    fn single_argument_is_one() {
        let q = NumericQ::from_root(rat(1, 2));
        for m in 1..=4 {
            let s = complete_point(m, &q, &[]);
            let v = cyclic_sum(m, &q, &s, CyclicVariant::Plain, Reorderings::Cyclic).unwrap();
            assert_eq!(v, one());
        }
    }

    #[test]
    fn two_arguments_at_quarter() {
        let q = NumericQ::from_root(rat(1, 2));
        let s = vec![int(3), rat(2, 3)];
        let c = verify_cyclic_identity(1, &q, &s, CyclicVariant::Plain, Reorderings::Cyclic).unwrap();
        assert_eq!(c.value, one());
    }

    #[test]
    fn identity_on_a_grid() {
        for m in 1..=3 {
            check(m, rat(1, 2), &[int(3)]);
            check(m, rat(1, 4), &[int(3), rat(5, 2)]);
            check(m, rat(2, 3), &[rat(7, 5), int(2), rat(1, 3)]);
        }
        assert_eq!(cyclic_expected(2, 3, &NumericQ::from_root(rat(1, 2)), CyclicVariant::Plain), int(2));
    }

    #[test]
    fn constraint_is_enforced() {
        let q = NumericQ::from_root(rat(1, 2));
        let err = cyclic_sum(1, &q, &[int(3), int(2)], CyclicVariant::Plain, Reorderings::Cyclic);
        assert!(matches!(err, Err(CorrError::ConstraintViolated { .. })));
    }

    #[test]
    fn degenerate_denominators_are_reported() {
        // t_1 = 1/q makes (q t_1)_1 vanish.
        let q = NumericQ::from_root(rat(1, 2));
        let s = complete_point(2, &q, &[int(2)]);
        let err = cyclic_sum(2, &q, &s, CyclicVariant::Plain, Reorderings::Cyclic);
        assert!(matches!(err, Err(CorrError::DenominatorZero)));
    }
}

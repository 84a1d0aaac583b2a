//! Partition-sum side: the monomial brackets `<i|t>`, the n-point function `F`,
//! and the index sums `H` and `G`.
//!
//! Every sum over row indices `i` splits at the length of the partition: rows
//! inside contribute explicit terms, rows beyond contribute nested geometric
//! tails summed in closed form.

use super::{CorrError, EvalPoint};
use crate::partitions::{partition_sum, Partition};
use crate::rational::{one, pow, zero, Rational};
use crate::series::{euler, q_pochhammer, QSeries};
use crate::setcomb::{permutations, set_partitions};
use num_traits::Zero;

/// `<prod_k t_k^{lambda_{i_k} - i_k + 1/2}>_q` from the product formula
/// `(q)_inf prod t_k^{1/2 - i_k} / [(q)_{i_1-1} (q^{i_1} t_1)_{i_2-i_1} .. (q^{i_r} t_1..t_r)_inf]`.
pub fn bracket_monomial(idx: &[usize], pt: &EvalPoint, n: usize) -> Result<QSeries, CorrError> {
    pt.unshifted()?;
    assert_eq!(idx.len(), pt.n(), "one index per argument");
    assert!(idx.windows(2).all(|w| w[0] < w[1]) && idx.first().is_none_or(|&i| i >= 1));
    if idx.is_empty() {
        return Ok(QSeries::one(n));
    }
    let mut pre = one();
    for (k, &i) in idx.iter().enumerate() {
        pre *= pow(&pt.pts[k].s, 1 - 2 * i as i64);
    }
    let mut den = q_pochhammer(&one(), 1, Some(idx[0] as u64 - 1), n);
    let mut partial = one();
    for k in 0..idx.len() {
        partial *= pt.pts[k].t();
        let len = idx.get(k + 1).map(|&j| (j - idx[k]) as u64);
        den = &den * &q_pochhammer(&partial, idx[k] as i64, len, n);
    }
    let inv = den.inv().map_err(|_| CorrError::DenominatorZero)?;
    Ok((&euler(n) * &inv).scale(&pre))
}

/// The same bracket summed over partitions directly.
pub fn bracket_monomial_brute(idx: &[usize], pt: &EvalPoint, n: usize) -> Result<QSeries, CorrError> {
    pt.unshifted()?;
    let s = pt.roots();
    let f = |l: &Partition| {
        idx.iter().zip(&s).fold(one(), |acc, (&i, sk)| acc * pow(sk, 2 * (l.part(i) as i64 - i as i64) + 1))
    };
    Ok(crate::partitions::q_bracket(f, n))
}

/// `sum_{i >= 1} t^{lambda_i - i + 1/2}` for one partition, with the tail
/// `t^{-1/2-len}/(1 - 1/t)` in closed form.
pub fn row_sum(l: &Partition, s: &Rational) -> Rational {
    let len = l.len() as i64;
    let head =
        l.parts().iter().enumerate().fold(zero(), |acc, (i, &p)| acc + pow(s, 2 * (p as i64 - i as i64 - 1) + 1));
    let t = s * s;
    head + pow(s, -1 - 2 * len) / (one() - t.recip())
}

/// The F summand `prod_k row_sum(lambda, t_k)`.
pub fn f_weight(l: &Partition, s: &[Rational]) -> Rational {
    s.iter().fold(one(), |acc, sk| acc * row_sum(l, sk))
}

pub(crate) fn check_tails(s: &[Rational]) -> Result<(), CorrError> {
    // Tails of F need t_k != 1; tails of H need every suffix product != 1.
    for k in 0..s.len() {
        if s[k] == one() {
            return Err(CorrError::TailPole { subset: vec![k + 1] });
        }
    }
    Ok(())
}

pub(crate) fn check_suffix_tails(s: &[Rational]) -> Result<(), CorrError> {
    let n = s.len();
    let mut prod = one();
    for m in (0..n).rev() {
        prod *= &s[m];
        if prod == one() {
            return Err(CorrError::TailPole { subset: (m + 1..=n).collect() });
        }
    }
    Ok(())
}

/// `F(t_1..t_n) = (q)_inf sum_lambda q^{|lambda|} prod_k sum_i t_k^{lambda_i - i + 1/2}`.
pub fn f_brute_series(pt: &EvalPoint, n: usize) -> Result<QSeries, CorrError> {
    pt.unshifted()?;
    let s = pt.roots();
    check_tails(&s)?;
    Ok(&euler(n) * &partition_sum(|l| f_weight(l, &s), n))
}

/// `sum_{i_1 < .. < i_n} prod_k t_k^{lambda_{i_k} - i_k + 1/2}` for one partition.
///
/// Indices `<= len` are summed by dynamic programming; the remaining ones use
/// `sum_{len < i_{j+1} < .. < i_n} prod y_k^{i_k - 1/2} = prod y_k^{len - 1/2} prod_m Y_m/(1 - Y_m)`
/// with `y_k = 1/t_k` and `Y_m = y_m .. y_n`.
pub fn h_weight(l: &Partition, s: &[Rational]) -> Rational {
    let n = s.len();
    let len = l.len();
    let head = head_sums(l, s, len);
    let mut total = zero();
    for j in 0..=n {
        if head[j].is_zero() {
            continue;
        }
        total += &head[j] * tail_sum(&s[j..], len as i64);
    }
    total
}

/// `sum_{len < i_1 < .. < i_r} prod_k t_k^{1/2 - i_k}` for the trailing arguments `s`.
pub(crate) fn tail_sum(s: &[Rational], len: i64) -> Rational {
    let mut out = one();
    let mut suffix = one();
    for sk in s.iter().rev() {
        out *= pow(sk, 1 - 2 * len);
        suffix *= (sk * sk).recip();
        out *= &suffix / (one() - &suffix);
    }
    out
}

/// `H(t) = sum_{i_1 < .. < i_n} <i|t>` through order `n_ord`.
pub fn h_series(pt: &EvalPoint, n_ord: usize) -> Result<QSeries, CorrError> {
    pt.unshifted()?;
    let s = pt.roots();
    check_suffix_tails(&s)?;
    Ok(&euler(n_ord) * &partition_sum(|l| h_weight(l, &s), n_ord))
}

/// `G(t) = sum_sigma H(t_sigma)`.
pub fn g_series(pt: &EvalPoint, n_ord: usize) -> Result<QSeries, CorrError> {
    let mut total = QSeries::zero(n_ord);
    for sigma in permutations(pt.n()) {
        total = &total + &h_series(&pt.permuted(&sigma), n_ord)?;
    }
    Ok(total)
}

/// `sum_{pi in Pi_n} G^pi(t)`, the set-partition expansion of `F`.
pub fn f_from_g(pt: &EvalPoint, n_ord: usize) -> Result<QSeries, CorrError> {
    let mut total = QSeries::zero(n_ord);
    for pi in set_partitions(pt.n()) {
        total = &total + &g_series(&pt.contract(&pi), n_ord)?;
    }
    Ok(total)
}

/// `head[j] = sum_{i_1 < .. < i_j <= i_max} prod_{k <= j} t_k^{lambda_{i_k} - i_k + 1/2}`.
fn head_sums(l: &Partition, s: &[Rational], i_max: usize) -> Vec<Rational> {
    let n = s.len();
    let mut head = vec![zero(); n + 1];
    head[0] = one();
    for i in 1..=i_max {
        let lam = l.part(i) as i64;
        for j in (1..=n.min(i)).rev() {
            let w = pow(&s[j - 1], 2 * (lam - i as i64) + 1);
            let add = &head[j - 1] * w;
            head[j] += add;
        }
    }
    head
}

/// The H summand with every index restricted to `i <= i_max`.
pub fn h_weight_truncated(l: &Partition, s: &[Rational], i_max: usize) -> Rational {
    head_sums(l, s, i_max)[s.len()].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::special::theta_deriv_series;

    fn pt(s: &[i64]) -> EvalPoint {
        EvalPoint::from_roots(&s.iter().map(|&x| int(x)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn monomial_examples() {
        let p = pt(&[2]);
        let b = bracket_monomial(&[1], &p, 6).unwrap();
        assert_eq!(b.coeffs()[0], rat(1, 2));
        assert!(bracket_monomial(&[], &EvalPoint::from_points(vec![]), 6).unwrap().is_one());
    }

    #[test]
    fn monomial_product_formula_matches_partitions() {
        for s in [vec![2], vec![3]] {
            for i in 1..=4 {
                let p = pt(&s);
                assert_eq!(bracket_monomial(&[i], &p, 10).unwrap(), bracket_monomial_brute(&[i], &p, 10).unwrap());
            }
        }
        let p = pt(&[2, 3]);
        for i1 in 1..=4 {
            for i2 in i1 + 1..=4 {
                let a = bracket_monomial(&[i1, i2], &p, 10).unwrap();
                let b = bracket_monomial_brute(&[i1, i2], &p, 10).unwrap();
                assert_eq!(a, b, "({i1},{i2})");
            }
        }
    }

    #[test]
    fn one_point_function() {
        let f = f_brute_series(&pt(&[2]), 12).unwrap();
        assert_eq!(f.coeffs()[0], rat(2, 3));
        let inv = theta_deriv_series(0, &int(2), 12).inv().unwrap();
        assert_eq!(f, inv);
    }

    #[test]
    fn symmetric_in_arguments() {
        let a = f_brute_series(&pt(&[2, 3]), 8).unwrap();
        let b = f_brute_series(&pt(&[3, 2]), 8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn h_equals_g_equals_f_for_one_argument() {
        let p = pt(&[3]);
        let f = f_brute_series(&p, 10).unwrap();
        assert_eq!(h_series(&p, 10).unwrap(), f);
        assert_eq!(g_series(&p, 10).unwrap(), f);
    }

    #[test]
    fn f_as_sum_over_set_partitions() {
        let p = pt(&[2, 3]);
        assert_eq!(f_brute_series(&p, 10).unwrap(), f_from_g(&p, 10).unwrap());
        let p3 = pt(&[2, 3, 5]);
        assert_eq!(f_brute_series(&p3, 6).unwrap(), f_from_g(&p3, 6).unwrap());
    }

    #[test]
    fn closed_tails_match_truncated_sums() {
        // Far enough out, the explicit index sum approaches the closed tail.
        let s = vec![int(3), int(2)];
        let l = Partition::new(vec![3, 1]);
        let exact = h_weight(&l, &s);
        let approx = h_weight_truncated(&l, &s, 40);
        let err = num_traits::Signed::abs(&(exact - approx));
        assert!(err < rat(1, 1_000_000_000_000));
    }
}

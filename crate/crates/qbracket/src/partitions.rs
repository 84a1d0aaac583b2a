//! Integer partitions, Frobenius coordinates, the power-sum statistics `p_r`,
//! and the q-bracket `<f>_q = (q;q)_inf * sum_lambda f(lambda) q^{|lambda|}`.

use crate::rational::{int, one, pow, rat, sign_pow, zero, Rational};
use crate::series::{euler, QSeries};
use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

/// A weakly decreasing sequence of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition(Vec<u32>);

/// Diagonal hook coordinates `(m | n)`, both strictly decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frobenius {
    pub m: Vec<u32>,
    pub n: Vec<u32>,
}

impl Partition {
    /// Sorts and drops zeros, so any multiset of part sizes is accepted.
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `lambda_i` with 1-based `i`, zero past the length.
    pub fn part(&self, i: usize) -> u32 {
        if i == 0 {
            panic!("parts are 1-indexed");
        }
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    pub fn transpose(&self) -> Partition {
        let top = self.0.first().copied().unwrap_or(0);
        Partition((1..=top).map(|j| self.0.iter().filter(|&&p| p >= j).count() as u32).collect())
    }

    pub fn frobenius(&self) -> Frobenius {
        let t = self.transpose();
        let d = self.0.iter().enumerate().take_while(|(i, &p)| p as usize > *i).count();
        Frobenius {
            m: (0..d).map(|i| self.0[i] - i as u32 - 1).collect(),
            n: (0..d).map(|i| t.0[i] - i as u32 - 1).collect(),
        }
    }

    /// `p_r` from Frobenius coordinates, summed as `2^{-r} sum (2m+1)^r + (-1)^{r+1} (2n+1)^r`.
    pub fn p(&self, r: u32) -> Rational {
        let f = self.frobenius();
        let odd = |x: u32| BigInt::from(2 * x + 1).pow(r);
        let total = f.m.iter().zip(&f.n).fold(BigInt::zero(), |acc, (&m, &n)| {
            if r % 2 == 1 {
                acc + odd(m) + odd(n)
            } else {
                acc + odd(m) - odd(n)
            }
        });
        Rational::new(total, BigInt::one() << r)
    }

    /// `p_r` from the parts: `sum_i (lambda_i - i + 1/2)^r + (-1)^{r+1} (i - 1/2)^r`.
    pub fn p_from_parts(&self, r: u32) -> Rational {
        let half = rat(1, 2);
        let sgn = sign_pow(r as i64 + 1);
        self.0.iter().enumerate().fold(zero(), |acc, (i, &l)| {
            let i = i as i64 + 1;
            let a = pow(&(int(l as i64 - i) + &half), r as i64);
            let b = pow(&(int(i) - &half), r as i64);
            acc + a + &sgn * b
        })
    }
}

impl Frobenius {
    /// Rebuilds the partition from its diagonal hooks.
    pub fn to_partition(&self) -> Partition {
        let d = self.m.len();
        assert_eq!(d, self.n.len(), "arm and leg counts differ");
        if d == 0 {
            return Partition::empty();
        }
        // Rows 1..d come from the arms; rows below the diagonal from the legs' columns.
        let mut rows: Vec<u32> = (0..d).map(|i| self.m[i] + i as u32 + 1).collect();
        let cols: Vec<u32> = (0..d).map(|j| self.n[j] + j as u32 + 1).collect();
        let depth = cols[0] as usize;
        for i in d..depth {
            rows.push(cols.iter().filter(|&&c| c as usize > i).count() as u32);
        }
        Partition::new(rows)
    }
}

/// All partitions of `k` in lexicographically descending order.
pub fn partitions_of(k: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fill(k, k, &mut cur, &mut out);
    out
}

fn fill(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if rest == 0 {
        out.push(Partition(cur.clone()));
        return;
    }
    for p in (1..=rest.min(max)).rev() {
        cur.push(p);
        fill(rest - p, p, cur, out);
        cur.pop();
    }
}

/// All partitions of size at most `n`, grouped by size.
pub fn partitions_up_to(n: u32) -> Vec<Vec<Partition>> {
    (0..=n).map(partitions_of).collect()
}

pub fn transpose(l: &Partition) -> Partition {
    l.transpose()
}

pub fn frobenius(l: &Partition) -> Frobenius {
    l.frobenius()
}

pub fn p_r(l: &Partition, r: u32) -> Rational {
    l.p(r)
}

/// `sum_{|lambda| <= n} f(lambda) q^{|lambda|}` before the Euler factor.
pub fn partition_sum<F>(f: F, n: usize) -> QSeries
where
    F: Fn(&Partition) -> Rational + Sync,
{
    use rayon::prelude::*;
    let coeffs: Vec<Rational> =
        (0..=n as u32).into_par_iter().map(|k| partitions_of(k).iter().fold(zero(), |acc, l| acc + f(l))).collect();
    QSeries::new(zero(), coeffs)
}

/// `<f>_q = (q;q)_inf * sum_lambda f(lambda) q^{|lambda|}`, exact through order `n`.
pub fn q_bracket<F>(f: F, n: usize) -> QSeries
where
    F: Fn(&Partition) -> Rational + Sync,
{
    &euler(n) * &partition_sum(f, n)
}

/// The same bracket as a ratio of partition sums.
pub fn q_bracket_ratio<F>(f: F, n: usize) -> QSeries
where
    F: Fn(&Partition) -> Rational + Sync,
{
    let den = partition_sum(|_| one(), n);
    partition_sum(f, n).try_div(&den).expect("partition generating function is invertible")
}

/// Number of partitions of each `k <= n`.
pub fn partition_counts(n: u32) -> Vec<u64> {
    let mut p = vec![0u64; n as usize + 1];
    p[0] = 1;
    for part in 1..=n as usize {
        for k in part..=n as usize {
            p[k] += p[k - part];
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn pt(v: &[u32]) -> Partition {
        Partition::new(v.to_vec())
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(partitions_of(0), vec![Partition::empty()]);
        assert_eq!(partitions_of(4).len(), 5);
        assert_eq!(partitions_of(10).len(), 42);
        let four: Vec<_> = partitions_of(4).into_iter().map(|p| p.0).collect();
        assert_eq!(four, vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]);
    }

    #[test]
    fn frobenius_examples() {
        let f = pt(&[4, 4, 3, 2, 1]).frobenius();
        assert_eq!(f, Frobenius { m: vec![3, 2, 0], n: vec![4, 2, 0] });
        assert_eq!(Partition::empty().frobenius(), Frobenius { m: vec![], n: vec![] });
        assert_eq!(pt(&[1]).frobenius(), Frobenius { m: vec![0], n: vec![0] });
    }

    #[test]
    fn transpose_examples() {
        assert_eq!(pt(&[4, 4, 3, 2, 1]).transpose(), pt(&[5, 4, 3, 2]));
        assert_eq!(Partition::empty().transpose(), Partition::empty());
    }

    #[test]
    fn round_trips_exhaustive() {
        for k in 0..=12 {
            for l in partitions_of(k) {
                assert_eq!(l.transpose().transpose(), l);
                assert_eq!(l.frobenius().to_partition(), l);
            }
        }
    }

    #[test]
    fn statistics() {
        for k in 0..=10 {
            for l in partitions_of(k) {
                assert_eq!(l.p(1), int(k as i64));
                assert_eq!(l.p(0), zero());
                for r in 0..=6 {
                    assert_eq!(l.p(r), l.p_from_parts(r), "{l:?} r={r}");
                }
            }
        }
        assert_eq!(pt(&[1]).p(3), rat(1, 4));
    }

    #[test]
    fn counts_match_euler_inverse() {
        let inv = euler(30).inv().unwrap();
        let counts = partition_counts(30);
        for k in 0..=30u32 {
            assert_eq!(inv.coeffs()[k as usize], int(counts[k as usize] as i64));
            assert_eq!(partitions_of(k).len() as u64, counts[k as usize]);
        }
    }

    #[test]
    fn bracket_examples() {
        assert!(q_bracket(|_| one(), 12).is_one());
        assert!(q_bracket(|l| l.p(2), 12).is_zero());
        // <p_1 - 1/24> against divisor sums
        let g = q_bracket(|l| l.p(1) - rat(1, 24), 12);
        let mut expect = vec![rat(-1, 24)];
        for n in 1..=12i64 {
            expect.push(int((1..=n).filter(|d| n % d == 0).sum()));
        }
        assert_eq!(g, QSeries::new(zero(), expect));
    }

    #[test]
    fn bracket_forms_agree() {
        let f = |l: &Partition| l.p(3) * l.p(1);
        assert_eq!(q_bracket(f, 14), q_bracket_ratio(f, 14));
    }
}

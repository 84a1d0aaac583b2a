//! Set partitions and compositions of `{1,..,n}`, their signs, and a few
//! enumerative helpers used by the correlator formulas.
//!
//! Blocks are sorted lists of elements; set partitions list their blocks by
//! smallest element. Enumeration order is fixed (restricted growth strings,
//! then block orderings in lexicographic permutation order).

use crate::partitions::partitions_of;
use crate::rational::{factorial, factorial_q, one, pow, zero, Rational};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct SetPartition {
    pub blocks: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Composition {
    pub blocks: Vec<Vec<usize>>,
}

fn ground(blocks: &[Vec<usize>]) -> usize {
    blocks.iter().map(Vec::len).sum()
}

fn sign_of(n: usize, len: usize) -> i64 {
    if (n + len).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl SetPartition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// `(-1)^{n + len}`.
    pub fn sign(&self) -> i64 {
        sign_of(ground(&self.blocks), self.len())
    }

    /// At most one block has more than one element, and that block contains 1.
    pub fn is_rooted(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1 || b.contains(&1))
    }

    /// `{1}` is one of the blocks.
    pub fn isolates_one(&self) -> bool {
        self.blocks.iter().any(|b| b.as_slice() == [1])
    }

    pub fn is_atomic(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    /// Multiplies the entries of `values` (indexed by element - 1) over each block.
    pub fn contract<T: Clone>(&self, values: &[T], mul: impl Fn(&T, &T) -> T) -> Vec<T> {
        self.blocks
            .iter()
            .map(|b| {
                let mut it = b.iter().map(|&i| values[i - 1].clone());
                let first = it.next().expect("blocks are nonempty");
                it.fold(first, |acc, v| mul(&acc, &v))
            })
            .collect()
    }
}

impl Composition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn sign(&self) -> i64 {
        sign_of(ground(&self.blocks), self.len())
    }

    /// Partial unions `gamma_1 u .. u gamma_{k-1}` for `k = 1..=len`; the first is empty.
    pub fn partial_unions(&self) -> Vec<Vec<usize>> {
        let mut acc = Vec::new();
        let mut out = Vec::with_capacity(self.len());
        for b in &self.blocks {
            out.push(acc.clone());
            acc.extend_from_slice(b);
            acc.sort_unstable();
        }
        out
    }

    /// As [`partial_unions`](Self::partial_unions) with the marker element `0` in every union.
    pub fn marked_partial_unions(&self) -> Vec<Vec<usize>> {
        self.partial_unions()
            .into_iter()
            .map(|mut u| {
                u.insert(0, 0);
                u
            })
            .collect()
    }
}

/// Visits every set partition of `{1..n}` as a list of blocks.
pub fn for_each_set_partition(n: usize, mut f: impl FnMut(&[Vec<usize>])) {
    if n == 0 {
        f(&[]);
        return;
    }
    let mut rgs = vec![0usize; n];
    loop {
        let k = rgs.iter().max().copied().unwrap_or(0) + 1;
        let mut blocks = vec![Vec::new(); k];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i + 1);
        }
        f(&blocks);
        // Next restricted growth string: rgs[i] <= 1 + max(rgs[..i]).
        let mut i = n - 1;
        loop {
            if i == 0 {
                return;
            }
            let m = rgs[..i].iter().max().copied().unwrap_or(0);
            if rgs[i] <= m {
                rgs[i] += 1;
                for x in rgs.iter_mut().skip(i + 1) {
                    *x = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

pub fn set_partitions(n: usize) -> Vec<SetPartition> {
    let mut out = Vec::new();
    for_each_set_partition(n, |b| out.push(SetPartition { blocks: b.to_vec() }));
    out
}

/// Set partitions with at most one non-singleton block, which contains 1.
pub fn rooted_set_partitions(n: usize) -> Vec<SetPartition> {
    set_partitions(n).into_iter().filter(SetPartition::is_rooted).collect()
}

/// Set partitions having `{1}` as a block.
pub fn isolating_set_partitions(n: usize) -> Vec<SetPartition> {
    set_partitions(n).into_iter().filter(SetPartition::isolates_one).collect()
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    while next_permutation(&mut p) {
        out.push(p.clone());
    }
    out
}

/// Visits every composition (ordered set partition) of `{1..n}`.
pub fn for_each_composition(n: usize, mut f: impl FnMut(&[Vec<usize>])) {
    for_each_set_partition(n, |blocks| {
        let mut order: Vec<usize> = (0..blocks.len()).collect();
        let mut buf: Vec<Vec<usize>> = Vec::with_capacity(blocks.len());
        loop {
            buf.clear();
            buf.extend(order.iter().map(|&i| blocks[i].clone()));
            f(&buf);
            if !next_permutation(&mut order) {
                break;
            }
        }
    });
}

pub fn compositions(n: usize) -> Vec<Composition> {
    let mut out = Vec::new();
    for_each_composition(n, |b| out.push(Composition { blocks: b.to_vec() }));
    out
}

/// Bell and Fubini numbers by their binomial recurrences.
pub fn bell_numbers(n: usize) -> Vec<u64> {
    let mut b = vec![1u64];
    for m in 0..n {
        let next = (0..=m).map(|k| binom_u64(m, k) * b[k]).sum();
        b.push(next);
    }
    b
}

pub fn fubini_numbers(n: usize) -> Vec<u64> {
    let mut a = vec![1u64];
    for m in 1..=n {
        let next = (1..=m).map(|k| binom_u64(m, k) * a[m - k]).sum();
        a.push(next);
    }
    a
}

fn binom_u64(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// The three signed sums over set partitions and compositions of `{1..n}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountIdentities {
    pub n: usize,
    /// `sum_pi (-1)^pi len(pi)!`
    pub sum1: i128,
    /// `sum_gamma (-1)^gamma`
    pub sum2: i128,
    /// `sum_pi (-1)^{len(pi)} (len(pi) - 1)!`
    pub sum3: i128,
    pub set_partitions: u64,
    pub compositions: u64,
}

impl CountIdentities {
    /// The third sum vanishes only from `n = 2` on; at `n = 1` it is `-1`.
    pub fn holds(&self) -> bool {
        self.sum1 == 1 && self.sum2 == 1 && (self.n < 2 || self.sum3 == 0)
    }
}

pub fn verify_count_identities(n: usize) -> CountIdentities {
    let fact = |k: usize| (1..=k as i128).product::<i128>();
    let (mut s1, mut s3, mut np) = (0i128, 0i128, 0u64);
    for_each_set_partition(n, |b| {
        let l = b.len();
        let sgn = sign_of(n, l) as i128;
        s1 += sgn * fact(l);
        s3 += if l % 2 == 0 { 1 } else { -1 } * fact(l.saturating_sub(1));
        np += 1;
    });
    let (mut s2, mut nc) = (0i128, 0u64);
    for_each_composition(n, |b| {
        s2 += sign_of(n, b.len()) as i128;
        nc += 1;
    });
    CountIdentities { n, sum1: s1, sum2: s2, sum3: s3, set_partitions: np, compositions: nc }
}

/// `1 / #Stab(i_1..i_n)` for a weakly increasing tuple: the tilde-sum weight.
pub fn stabilizer_multiplicity(indices: &[i64]) -> Rational {
    debug_assert!(indices.windows(2).all(|w| w[0] <= w[1]), "tuple must be weakly increasing");
    let mut weight = one();
    let mut run = 1u64;
    for w in indices.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            weight /= factorial_q(run);
            run = 1;
        }
    }
    if !indices.is_empty() {
        weight /= factorial_q(run);
    }
    weight
}

/// `e^{-f} (d/dx)^s e^{f}` in terms of `f', .., f^{(s)}` (given as `f_derivs[0..s]`).
pub fn exp_derivative_expansion(f_derivs: &[Rational], s: usize) -> Rational {
    assert!(f_derivs.len() >= s, "need f' through f^({s})");
    let mut total = zero();
    for lam in partitions_of(s as u32) {
        let mut mult = vec![0u32; s + 1];
        for &p in lam.parts() {
            mult[p as usize] += 1;
        }
        let mut term = one();
        for (i, &k) in mult.iter().enumerate().skip(1) {
            if k > 0 {
                let base = &f_derivs[i - 1] / Rational::from_integer(factorial(i as u64));
                term *= pow(&base, k as i64) / factorial_q(k as u64);
            }
        }
        total += term;
    }
    total * factorial_q(s as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn bell_counts() {
        assert_eq!(set_partitions(3).len(), 5);
        assert_eq!(set_partitions(4).len(), 15);
        let bell = bell_numbers(9);
        for n in 1..=9 {
            let mut c = 0u64;
            for_each_set_partition(n, |_| c += 1);
            assert_eq!(c, bell[n]);
        }
    }

    #[test]
    fn fubini_counts() {
        assert_eq!(compositions(1).len(), 1);
        assert_eq!(compositions(2).len(), 3);
        assert_eq!(compositions(3).len(), 13);
        let fub = fubini_numbers(7);
        for n in 1..=7 {
            assert_eq!(compositions(n).len() as u64, fub[n]);
        }
    }

    #[test]
    fn rooted_and_isolating_meet_in_atom() {
        let rooted = rooted_set_partitions(3);
        let isolating = isolating_set_partitions(3);
        let both: Vec<_> = rooted.iter().filter(|p| isolating.contains(p)).collect();
        assert_eq!(both.len(), 1);
        assert!(both[0].is_atomic());
        assert_eq!(rooted.len(), 4);
    }

    #[test]
    fn signs() {
        let atom = SetPartition { blocks: vec![vec![1], vec![2], vec![3]] };
        assert_eq!(atom.sign(), 1);
        assert_eq!(SetPartition { blocks: vec![vec![1, 2, 3]] }.sign(), 1);
        assert_eq!(SetPartition { blocks: vec![vec![1, 2], vec![3]] }.sign(), -1);
    }

    #[test]
    fn merging_two_blocks_flips_sign() {
        for n in 2..=6 {
            for p in set_partitions(n) {
                for i in 0..p.len() {
                    for j in i + 1..p.len() {
                        let mut blocks = p.blocks.clone();
                        let b = blocks.remove(j);
                        blocks[i].extend(b);
                        let merged = SetPartition { blocks };
                        assert_eq!(merged.sign(), -p.sign());
                    }
                }
            }
        }
    }

    #[test]
    fn count_identity_values() {
        let c = verify_count_identities(3);
        assert_eq!((c.sum1, c.sum2, c.sum3), (1, 1, 0));
        let one = verify_count_identities(1);
        assert_eq!((one.sum1, one.sum2, one.sum3), (1, 1, -1));
        assert!(one.holds());
        for n in 2..=7 {
            assert!(verify_count_identities(n).holds(), "n={n}");
        }
    }

    #[test]
    fn stabilizer_weights() {
        assert_eq!(stabilizer_multiplicity(&[1, 2, 3]), one());
        assert_eq!(stabilizer_multiplicity(&[2, 2, 5]), rat(1, 2));
        assert_eq!(stabilizer_multiplicity(&[3, 3, 3]), rat(1, 6));
    }

    #[test]
    fn exp_derivative_small_orders() {
        let f = [rat(2, 3), rat(-5, 7), rat(11, 2)];
        assert_eq!(exp_derivative_expansion(&f, 1), f[0].clone());
        assert_eq!(exp_derivative_expansion(&f, 2), &f[0] * &f[0] + &f[1]);
        assert_eq!(exp_derivative_expansion(&f, 3), &f[0] * &f[0] * &f[0] + int(3) * &f[0] * &f[1] + &f[2]);
    }

    #[test]
    fn composition_partial_unions() {
        let g = Composition { blocks: vec![vec![2], vec![1, 3]] };
        assert_eq!(g.partial_unions(), vec![vec![], vec![2]]);
        assert_eq!(g.marked_partial_unions(), vec![vec![0], vec![0, 2]]);
        assert_eq!(g.sign(), -1);
    }
}

//! Numeric-q evaluation of the partition sums, used where an argument carries a
//! factor of `q` and the formal-q route no longer applies.
//!
//! Values are exact rationals at a rational `q0 = r^2`; each comes with an
//! empirical truncation estimate `|v_N - v_{N-5}|` from two partition cutoffs.

use super::brute::tail_sum;
use super::{CorrError, EvalPoint, NumericCheck};
use crate::partitions::{partition_counts, partitions_of, Partition};
use crate::rational::{abs, int, one, pow, rat, zero, Rational};
use crate::setcomb::{permutations, rooted_set_partitions};
use crate::special::{NumericQ, ThetaPoint};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Gap between the two partition cutoffs behind every error estimate.
pub const CUTOFF_GAP: usize = 5;

/// Factor between the discrepancy and the combined estimate that still passes.
pub const ESTIMATE_FACTOR: i64 = 3;

/// A numeric value with an absolute truncation estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Approx {
    pub value: Rational,
    pub error: Rational,
}

impl Approx {
    pub fn exact(value: Rational) -> Self {
        Approx { value, error: zero() }
    }

    pub fn add(&self, other: &Approx) -> Approx {
        Approx { value: &self.value + &other.value, error: &self.error + &other.error }
    }

    pub fn sub(&self, other: &Approx) -> Approx {
        Approx { value: &self.value - &other.value, error: &self.error + &other.error }
    }

    pub fn scale(&self, c: &Rational) -> Approx {
        Approx { value: &self.value * c, error: &self.error * abs(c) }
    }

    fn sum(items: impl IntoIterator<Item = Approx>) -> Approx {
        items.into_iter().fold(Approx::exact(zero()), |acc, x| acc.add(&x))
    }

    /// Compares against `other` with the default factor.
    pub fn check(&self, other: &Approx) -> NumericCheck {
        NumericCheck::new(self.value.clone(), other.value.clone(), &self.error + &other.error, int(ESTIMATE_FACTOR))
    }
}

/// Fractional bits of the fixed-point partition weights.
const FRAC_BITS: u32 = 384;

/// Absolute bound added to every estimate for fixed-point rounding of the weights.
fn rounding_bound() -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << (FRAC_BITS / 2))
}

fn to_fixed(x: &Rational) -> BigInt {
    (x.numer() << FRAC_BITS) / x.denom()
}

fn fixed_mul(a: &BigInt, b: &BigInt) -> BigInt {
    (a * b) >> FRAC_BITS
}

/// Powers `s^e`, `|e| <= 2N + 3`, of one argument in fixed point.
struct FixedPowers {
    offset: i64,
    table: Vec<BigInt>,
}

impl FixedPowers {
    fn new(s: &Rational, n_parts: usize) -> Self {
        let offset = 2 * n_parts as i64 + 3;
        let table = (-offset..=offset).map(|e| to_fixed(&pow(s, e))).collect();
        FixedPowers { offset, table }
    }

    fn get(&self, e: i64) -> &BigInt {
        &self.table[(e + self.offset) as usize]
    }
}

/// `sum_{|lambda| = k} w(lambda)` for `k <= N` with fixed-point weights, as rationals.
fn fixed_partition_sums<W>(w: W, n_parts: usize) -> Vec<Rational>
where
    W: Fn(&Partition) -> BigInt + Sync,
{
    use rayon::prelude::*;
    let denom = BigInt::one() << FRAC_BITS;
    (0..=n_parts as u32)
        .into_par_iter()
        .map(|k| {
            let total = partitions_of(k).iter().fold(BigInt::zero(), |acc, l| acc + w(l));
            Rational::new(total, denom.clone())
        })
        .collect()
}

/// `sum_{|lambda| <= N} a_{|lambda|} q0^{|lambda|} / sum_{|lambda| <= N} q0^{|lambda|}` from the
/// per-size sums `a_k`; in the limit this is `(q0)_inf sum_lambda f(lambda) q0^{|lambda|}`.
pub fn partition_average(sums: &[Rational], q: &NumericQ) -> Approx {
    let n_parts = sums.len() - 1;
    assert!(n_parts >= CUTOFF_GAP, "need at least {CUTOFF_GAP} partition sizes");
    let counts = partition_counts(n_parts as u32);
    let q0 = q.q();
    let (mut num, mut den) = (zero(), zero());
    let mut qk = one();
    let mut earlier = zero();
    for k in 0..=n_parts {
        num += &sums[k] * &qk;
        den += int(counts[k] as i64) * &qk;
        if k == n_parts - CUTOFF_GAP {
            earlier = &num / &den;
        }
        qk *= &q0;
    }
    let value = num / den;
    let error = abs(&(&value - earlier)) + rounding_bound();
    Approx { value, error }
}

/// Fixed-point version of the F summand `prod_k row_sum(lambda, t_k)`.
fn f_sums(s: &[Rational], n_parts: usize) -> Vec<Rational> {
    let powers: Vec<FixedPowers> = s.iter().map(|x| FixedPowers::new(x, n_parts)).collect();
    let tails: Vec<Vec<BigInt>> = s
        .iter()
        .map(|x| {
            let damp = one() - (x * x).recip();
            (0..=n_parts as i64).map(|len| to_fixed(&(pow(x, -1 - 2 * len) / &damp))).collect()
        })
        .collect();
    fixed_partition_sums(
        |l| {
            let len = l.len();
            let mut out = BigInt::one() << FRAC_BITS;
            for (p, tail) in powers.iter().zip(&tails) {
                let mut row = tail[len].clone();
                for (i, &part) in l.parts().iter().enumerate() {
                    row += p.get(2 * (part as i64 - i as i64 - 1) + 1);
                }
                out = fixed_mul(&out, &row);
            }
            out
        },
        n_parts,
    )
}

/// Fixed-point version of the H summand: head sums over rows inside the partition,
/// closed nested tails beyond it.
fn h_sums(s: &[Rational], n_parts: usize) -> Vec<Rational> {
    let n = s.len();
    let powers: Vec<FixedPowers> = s.iter().map(|x| FixedPowers::new(x, n_parts)).collect();
    let tails: Vec<Vec<BigInt>> =
        (0..=n).map(|j| (0..=n_parts as i64).map(|len| to_fixed(&tail_sum(&s[j..], len))).collect()).collect();
    fixed_partition_sums(
        |l| {
            let len = l.len();
            let mut head = vec![BigInt::zero(); n + 1];
            head[0] = BigInt::one() << FRAC_BITS;
            for (i0, &part) in l.parts().iter().enumerate() {
                let i = i0 as i64 + 1;
                for j in (1..=n.min(i as usize)).rev() {
                    let w = powers[j - 1].get(2 * (part as i64 - i) + 1);
                    let add = fixed_mul(&head[j - 1], w);
                    head[j] += add;
                }
            }
            head.iter().zip(&tails).fold(BigInt::zero(), |acc, (h, t)| acc + fixed_mul(h, &t[len]))
        },
        n_parts,
    )
}

/// Square roots of the plain rational arguments `q0^m s^2`.
pub fn flat_roots(pt: &EvalPoint, q: &NumericQ) -> Vec<Rational> {
    pt.pts.iter().map(|p| &p.s * pow(&q.r, p.m)).collect()
}

/// Rejects arguments whose partition sums do not converge at `q0`: the products of
/// the arguments above 1, and of the inverses of those below 1, must stay under `1/q0`.
fn check_convergence(s: &[Rational], q: &NumericQ) -> Result<(), CorrError> {
    let (mut up, mut down) = (one(), one());
    for sk in s {
        let t = sk * sk;
        if t > one() {
            up *= t;
        } else {
            down *= t.recip();
        }
    }
    let q0 = q.q();
    if &up * &q0 >= one() || &down * &q0 >= one() {
        return Err(CorrError::InvalidPoint("partition sum diverges at this q".into()));
    }
    Ok(())
}

/// `F` at a numeric `q0` by the partition sum with closed row tails.
pub fn f_numeric(pt: &EvalPoint, q: &NumericQ, n_parts: usize) -> Result<Approx, CorrError> {
    if pt.n() == 0 {
        return Ok(Approx::exact(one()));
    }
    let s = flat_roots(pt, q);
    super::brute::check_tails(&s)?;
    let flat = EvalPoint::from_roots(&s)?;
    flat.check_subsets(true)?;
    check_convergence(&s, q)?;
    Ok(partition_average(&f_sums(&s, n_parts), q))
}

/// `H` at a numeric `q0`.
pub fn h_numeric(pt: &EvalPoint, q: &NumericQ, n_parts: usize) -> Result<Approx, CorrError> {
    let s = flat_roots(pt, q);
    super::brute::check_suffix_tails(&s)?;
    check_convergence(&s, q)?;
    Ok(partition_average(&h_sums(&s, n_parts), q))
}

/// `G = sum_sigma H(t_sigma)` at a numeric `q0`.
pub fn g_numeric(pt: &EvalPoint, q: &NumericQ, n_parts: usize) -> Result<Approx, CorrError> {
    let mut parts = Vec::new();
    for sigma in permutations(pt.n()) {
        parts.push(h_numeric(&pt.permuted(&sigma), q, n_parts)?);
    }
    Ok(Approx::sum(parts))
}

/// `-q0^{1/2} t_1 .. t_n` for the plain arguments of `pt`.
fn shift_prefactor(pt: &EvalPoint, q: &NumericQ) -> Rational {
    let s: Rational = flat_roots(pt, q).iter().product();
    -(&q.r * &s * &s)
}

fn times_q(p: &ThetaPoint) -> ThetaPoint {
    p.times(&ThetaPoint::shifted(one(), 1))
}

/// `F(q t_1, t_2, ..) = -q^{1/2} t_1 .. t_n sum_{pi rooted} (-1)^pi F^pi(t)` at `q0`.
pub fn verify_diffeq_f(pt: &EvalPoint, q: &NumericQ, n_parts: usize) -> Result<NumericCheck, CorrError> {
    pt.unshifted()?;
    let lhs = f_numeric(&pt.shift(1, 1), q, n_parts)?;
    let mut terms = Vec::new();
    for pi in rooted_set_partitions(pt.n()) {
        terms.push(f_numeric(&pt.contract(&pi), q, n_parts)?.scale(&int(pi.sign())));
    }
    let rhs = Approx::sum(terms).scale(&shift_prefactor(pt, q));
    Ok(lhs.check(&rhs))
}

/// The three-term recurrence for `H` when argument `k` (1-based) is multiplied by `q`.
pub fn verify_diffeq_h(pt: &EvalPoint, k: usize, q: &NumericQ, n_parts: usize) -> Result<NumericCheck, CorrError> {
    pt.unshifted()?;
    let n = pt.n();
    assert!((1..=n).contains(&k), "k must be in 1..=n");
    let lhs = h_numeric(&pt.shift(k, 1), q, n_parts)?;
    let mut rhs = h_numeric(pt, q, n_parts)?.scale(&shift_prefactor(pt, q));
    let qt = q.q() * pt.pts[k - 1].t();
    if qt == one() {
        return Err(CorrError::DenominatorZero);
    }
    if k < n {
        let mut pts = pt.pts.clone();
        let merged = times_q(&pts[k - 1]).times(&pts[k]);
        pts.splice(k - 1..=k, [merged]);
        let c = &qt / (one() - &qt);
        rhs = rhs.add(&h_numeric(&EvalPoint::from_points(pts), q, n_parts)?.scale(&c));
    }
    if k > 1 {
        let mut pts = pt.pts.clone();
        let merged = times_q(&pts[k - 2]).times(&pts[k - 1]);
        pts.splice(k - 2..=k - 1, [merged]);
        let c = (one() - &qt).recip();
        rhs = rhs.sub(&h_numeric(&EvalPoint::from_points(pts), q, n_parts)?.scale(&c));
    }
    Ok(lhs.check(&rhs))
}

/// Both forms of the `G` recurrence in the first argument:
/// `-q^{1/2} t_1..t_n G(t) - sum_{k >= 2} G(q t_1 t_k, .., t_k omitted, ..)` and
/// `-q^{1/2} t_1..t_n sum_{pi rooted} (-1)^pi (n - len(pi))! G^pi(t)`, each against `G(q t_1, ..)`.
pub fn verify_g_recurrence(
    pt: &EvalPoint,
    q: &NumericQ,
    n_parts: usize,
) -> Result<(NumericCheck, NumericCheck), CorrError> {
    pt.unshifted()?;
    let n = pt.n();
    let pre = shift_prefactor(pt, q);
    let lhs = g_numeric(&pt.shift(1, 1), q, n_parts)?;

    let mut first = g_numeric(pt, q, n_parts)?.scale(&pre);
    for k in 2..=n {
        let mut pts = pt.pts.clone();
        let tk = pts.remove(k - 1);
        pts[0] = times_q(&pts[0]).times(&tk);
        first = first.sub(&g_numeric(&EvalPoint::from_points(pts), q, n_parts)?);
    }

    let mut terms = Vec::new();
    for pi in rooted_set_partitions(n) {
        let weight = int(pi.sign()) * crate::rational::factorial_q((n - pi.len()) as u64);
        terms.push(g_numeric(&pt.contract(&pi), q, n_parts)?.scale(&weight));
    }
    let second = Approx::sum(terms).scale(&pre);
    Ok((lhs.check(&first), lhs.check(&second)))
}

/// `F` at arguments carrying powers of `q`, continued from the convergent region by
/// the first-argument difference equation. Arguments with `m = 0` are summed directly.
pub fn f_continued(pt: &EvalPoint, q: &NumericQ, n_parts: usize) -> Result<Approx, CorrError> {
    let Some(j) = pt.pts.iter().position(|p| p.m != 0) else {
        return f_numeric(pt, q, n_parts);
    };
    let n = pt.n();
    let mut order: Vec<usize> = vec![j];
    order.extend((0..n).filter(|&i| i != j));
    let pt = pt.permuted(&order);
    let m = pt.pts[0].m;
    if m > 0 {
        // F(t) = -q^{1/2} t'_1..t'_n sum_pi (-1)^pi F^pi(t') with t' = t, first argument over q.
        let base = pt.shift(1, -1);
        let mut terms = Vec::new();
        for pi in rooted_set_partitions(n) {
            terms.push(f_continued(&base.contract(&pi), q, n_parts)?.scale(&int(pi.sign())));
        }
        Ok(Approx::sum(terms).scale(&shift_prefactor(&base, q)))
    } else {
        // F(t) = F(q t_1, ..) / (-q^{1/2} t_1..t_n) - sum_{pi non-atomic} (-1)^pi F^pi(t).
        let up = f_continued(&pt.shift(1, 1), q, n_parts)?;
        let mut out = up.scale(&shift_prefactor(&pt, q).recip());
        for pi in rooted_set_partitions(n) {
            if pi.is_atomic() {
                continue;
            }
            out = out.sub(&f_continued(&pt.contract(&pi), q, n_parts)?.scale(&int(pi.sign())));
        }
        Ok(out)
    }
}

/// Residue estimate near a divisor `q^m t_1 .. t_k = 1` and its predicted value.
#[derive(Debug, Clone)]
pub struct ResidueCheck {
    pub m: i64,
    pub k: usize,
    /// `(q^m t_1..t_k - 1) F` at offsets `delta` and `delta/10`.
    pub samples: [Rational; 2],
    /// Linear extrapolation to `delta = 0`.
    pub extrapolated: Rational,
    pub expected: Rational,
    /// Relative difference `|extrapolated - expected| / max(1, |expected|)`.
    pub discrepancy: Rational,
    pub tolerance: Rational,
}

impl ResidueCheck {
    pub fn passed(&self) -> bool {
        self.discrepancy <= self.tolerance
    }
}

/// Relative tolerance for the residue extrapolation. Two-point extrapolation leaves
/// an error of order `delta^2 / 10`, about `1e-3` at `delta = 1/10`.
pub fn residue_tolerance() -> Rational {
    rat(1, 100)
}

/// The point with arguments `s` except that `s_k` is replaced so that
/// `q^m t_1..t_k = (1 + delta)^2`; argument `k` then carries `q^{-m}`.
pub fn near_divisor(s: &[Rational], m: i64, k: usize, delta: &Rational) -> Result<EvalPoint, CorrError> {
    let mut pt = EvalPoint::from_roots(s)?;
    let head: Rational = s[..k - 1].iter().product();
    pt.pts[k - 1] = ThetaPoint::shifted((one() + delta) / head, -m);
    Ok(pt)
}

/// `(-1)^m q^{m^2/2} m^{k-1} F(t_{k+1}..) / (t_{k+1}..t_n)^m`, with `F() = 1`.
pub fn residue_expected(s: &[Rational], m: i64, k: usize, q: &NumericQ, n_parts: usize) -> Result<Approx, CorrError> {
    let rest = EvalPoint::from_roots(&s[k..])?;
    let f_rest = f_numeric(&rest, q, n_parts)?;
    let rest_t: Rational = s[k..].iter().map(|x| x * x).product();
    let mk = if k == 1 { one() } else { pow(&int(m), k as i64 - 1) };
    let c = crate::rational::sign_pow(m) * pow(&q.r, m * m) * mk / pow(&rest_t, m);
    Ok(f_rest.scale(&c))
}

/// Numeric residue of `F` on the divisor `q^m t_1..t_k = 1` for `m >= 0`, sampled at
/// offsets `delta` and `delta/10` and extrapolated linearly.
pub fn verify_residue(
    s: &[Rational],
    m: i64,
    k: usize,
    delta: &Rational,
    q: &NumericQ,
    n_parts: usize,
) -> Result<ResidueCheck, CorrError> {
    assert!(m >= 0 && (1..=s.len()).contains(&k));
    let sample = |d: &Rational| -> Result<Rational, CorrError> {
        let pt = near_divisor(s, m, k, d)?;
        let f = f_continued(&pt, q, n_parts)?;
        let gap = (one() + d) * (one() + d) - one();
        Ok(gap * f.value)
    };
    let coarse = sample(delta)?;
    let fine = sample(&(delta / int(10)))?;
    let extrapolated = (int(10) * &fine - &coarse) / int(9);
    let expected = residue_expected(s, m, k, q, n_parts)?.value;
    let discrepancy = abs(&(&extrapolated - &expected)) / abs(&expected).max(one());
    Ok(ResidueCheck {
        m,
        k,
        samples: [coarse, fine],
        extrapolated,
        expected,
        discrepancy,
        tolerance: residue_tolerance(),
    })
}

/// The points used by the numeric checks: `q0 = 1/9` and `t = (25/16, 36/25, 49/36)`.
/// Every argument exceeds 1 and their product stays below `1/q0`, so the partition
/// sums converge after any one argument is multiplied by `q0`.
pub fn default_numeric_point(n: usize) -> (EvalPoint, NumericQ) {
    let s = [rat(5, 4), rat(6, 5), rat(7, 6)];
    let pt = EvalPoint::from_roots(&s[..n]).expect("nonzero roots");
    (pt, NumericQ::from_root(rat(1, 3)))
}

impl Approx {
    pub fn is_zero(&self) -> bool {
        self.value.is_zero() && self.error.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::theta_numeric;

    #[test]
    fn one_point_matches_inverse_theta() {
        let (pt, q) = default_numeric_point(1);
        let f = f_numeric(&pt, &q, 25).unwrap();
        let th = theta_numeric(0, &pt.pts[0], &q, 40);
        let diff = abs(&(&f.value - th.recip()));
        assert!(diff < rat(1, 1_000_000_000));
        assert!(f.error < rat(1, 1_000_000));
    }

    #[test]
    fn zero_q_gives_constant_term() {
        let q = NumericQ::from_root(zero());
        let pt = EvalPoint::from_roots(&[int(2)]).unwrap();
        let f = f_numeric(&pt, &q, 5).unwrap();
        assert!(abs(&(f.value - rat(2, 3))) <= f.error);
    }

    #[test]
    fn error_estimate_shrinks() {
        let (pt, q) = default_numeric_point(2);
        let a = f_numeric(&pt, &q, 15).unwrap().error;
        let b = f_numeric(&pt, &q, 25).unwrap().error;
        assert!(b < a);
    }

    #[test]
    fn difference_equation_for_f() {
        for n in 1..=3 {
            let (pt, q) = default_numeric_point(n);
            let c = verify_diffeq_f(&pt, &q, 30).unwrap();
            assert!(c.passed(), "n={n}: {c:?}");
        }
    }

    #[test]
    fn difference_equation_for_h() {
        let (pt, q) = default_numeric_point(1);
        assert!(verify_diffeq_h(&pt, 1, &q, 25).unwrap().passed());
        for n in 2..=3 {
            let (pt, q) = default_numeric_point(n);
            for k in 1..=n {
                let c = verify_diffeq_h(&pt, k, &q, 30).unwrap();
                assert!(c.passed(), "n={n} k={k}: {c:?}");
            }
            let (a, b) = verify_g_recurrence(&pt, &q, 30).unwrap();
            assert!(a.passed() && b.passed(), "{a:?} {b:?}");
        }
    }

    #[test]
    fn continuation_agrees_with_direct_sum() {
        // Both q0 t and t lie in the convergent region, so the two routes must agree.
        let (pt, q) = default_numeric_point(2);
        let shifted = pt.shift(1, 1);
        let direct = f_numeric(&shifted, &q, 25).unwrap();
        let continued = f_continued(&shifted, &q, 25).unwrap();
        assert!(direct.check(&continued).passed());
    }

    #[test]
    fn residues_small() {
        let q = NumericQ::from_root(rat(1, 3));
        let s = [rat(5, 3), rat(6, 5)];
        for (m, k) in [(1, 1), (0, 1), (1, 2)] {
            let c = verify_residue(&s[..k.max(1)], m, k, &rat(1, 10), &q, 25).unwrap();
            assert!(c.passed(), "m={m} k={k}: {c:?}");
        }
        let c = verify_residue(&s, 1, 1, &rat(1, 10), &q, 25).unwrap();
        assert!(c.passed(), "{c:?}");
    }

    #[test]
    fn divergent_points_are_rejected() {
        let q = NumericQ::from_root(rat(1, 3));
        let pt = EvalPoint::from_roots(&[int(4)]).unwrap();
        assert!(matches!(f_numeric(&pt, &q, 10), Err(CorrError::InvalidPoint(_))));
    }
}

//! The skew character `Psi(q_1, q_3, q_5, ..)`, the logarithmic-derivative series
//! `h_{r,s}` and their Eisenstein forms `g_{r,s}`, the generating series `G_n(z)`, the
//! oddification `eps`, and the n-point function of `Psi` in closed and direct form.
//!
//! Derivatives are `D_{2k-1} = q_{2k-1} d/dq_{2k-1}`. The n-point function is handled
//! with `eta^{-1}` stripped: `eta * F_n`, whose coefficients are integer-step series
//! starting at `q^0`.

use crate::quasimodular::{fit_series, Fit, FitError};
use crate::rational::{factorial_q, fmt, int, one, pow, zero, Rational};
use crate::series::{Mismatch, QSeries};
use crate::setcomb::set_partitions;
use crate::special::{eisenstein, eta_series, theta_at, zeta_one_minus, SeriesCheck, ThetaPoint};
use serde_json::{json, Value};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SkewError {
    #[error("exponent of q_{index} overflows at grade {grade}")]
    GradeOverflow { index: usize, grade: usize },
    #[error("z-degree {degree} needs q_{degree}, but only {available} odd variables are tracked")]
    InsufficientVariables { degree: u32, available: usize },
}

/// `Psi` through `q_1`-grade `grade`, in the variables `q_1, q_3, .., q_{2J-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiSeries {
    pub j: usize,
    pub grade: usize,
    /// `zeta(1-2i)/2` for `i = 1..J`: the fixed exponent offsets of the anomaly factor.
    pub anomaly: Vec<Rational>,
    /// Integer exponents of `q_1, q_3, ..` above the anomaly.
    pub terms: BTreeMap<Vec<i64>, Rational>,
}

impl PsiSeries {
    /// `D_{2k_1-1} .. D_{2k_n-1} Psi` at `q_3 = q_5 = .. = 1`, as a series in `q_1`
    /// starting at `q_1^{-1/24}`.
    pub fn derivative_at_origin(&self, ks: &[usize]) -> Result<QSeries, SkewError> {
        if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > self.j) {
            return Err(SkewError::InsufficientVariables { degree: 2 * k as u32 - 1, available: self.j });
        }
        let mut c = vec![zero(); self.grade + 1];
        for (e, v) in &self.terms {
            let weight = ks.iter().fold(one(), |acc, &k| acc * (int(e[k - 1]) + &self.anomaly[k - 1]));
            c[e[0] as usize] += weight * v;
        }
        Ok(QSeries::new(self.anomaly[0].clone(), c))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "J": self.j,
            "grade": self.grade,
            "anomaly": self.anomaly.iter().map(fmt).collect::<Vec<_>>(),
            "terms": self.terms.iter().map(|(e, c)| json!({"exps": e, "coeff": fmt(c)})).collect::<Vec<_>>(),
        })
    }
}

/// `q_1^{zeta(-1)/2} q_3^{zeta(-3)/2} .. prod_{n >= 1} (1 - q_1^n q_3^{n^3} ..)^{-1}`.
pub fn psi_series(j: usize, grade: usize) -> Result<PsiSeries, SkewError> {
    assert!(j >= 1);
    let anomaly = (1..=j).map(|i| zeta_one_minus(2 * i) / int(2)).collect();
    let mut terms: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
    terms.insert(vec![0; j], one());
    for n in 1..=grade {
        let step: Vec<i64> = (0..j)
            .map(|i| {
                (n as i64).checked_pow(2 * i as u32 + 1).ok_or(SkewError::GradeOverflow { index: 2 * i + 1, grade })
            })
            .collect::<Result<_, _>>()?;
        let mut next = terms.clone();
        for (e, c) in &terms {
            let mut cur = e.clone();
            while cur[0] + n as i64 <= grade as i64 {
                for (i, s) in step.iter().enumerate() {
                    cur[i] = cur[i].checked_add(*s).ok_or(SkewError::GradeOverflow { index: 2 * i + 1, grade })?;
                }
                *next.entry(cur.clone()).or_insert_with(zero) += c;
            }
        }
        terms = next;
    }
    Ok(PsiSeries { j, grade, anomaly, terms })
}

/// `h_{r,s}` at `q_3 = q_5 = .. = 1` as a direct double sum:
/// `sum_{m,n >= 1} m^{s-2r+1} (nm)^{r-1} q^{nm}`, plus `zeta(1-s)/2` when `r = 1`.
pub fn h_series(r: u32, s_even: u32, n: usize) -> QSeries {
    assert!(r >= 1 && s_even.is_multiple_of(2) && s_even >= 2 * r, "needs r >= 1 and s = 2 sum(j) >= 2r");
    let mut c = vec![zero(); n + 1];
    if r == 1 {
        c[0] = zeta_one_minus(s_even as usize) / int(2);
    }
    let e = (s_even - 2 * r + 1) as i64;
    for m in 1..=n {
        for mult in 1..=n / m {
            let nm = m * mult;
            c[nm] += pow(&int(m as i64), e) * pow(&int(nm as i64), r as i64 - 1);
        }
    }
    QSeries::new(zero(), c)
}

/// `g_{r,s} = D^{r-1} G_{s-2r+2}`.
pub fn g_series(r: u32, s_even: u32, n: usize) -> QSeries {
    assert!(r >= 1 && s_even.is_multiple_of(2) && s_even >= 2 * r);
    let mut g = eisenstein(s_even - 2 * r + 2, n).expect("even weight");
    for _ in 1..r {
        g = g.q_derive();
    }
    g
}

/// `h_{r,s} = g_{r,s}` for `r <= r_max`, `sum(j) <= sj_max`.
pub fn verify_h_equals_g(r_max: u32, sj_max: u32, n: usize) -> SeriesCheck {
    let mut checks = Vec::new();
    for r in 1..=r_max {
        for sj in r..=sj_max {
            checks.push(SeriesCheck::of(&h_series(r, 2 * sj, n), &g_series(r, 2 * sj, n)));
        }
    }
    SeriesCheck::all(checks)
}

/// Polynomial in `z_1..z_n` with series coefficients, each variable cut at `max_degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZPolynomial {
    pub n: usize,
    pub max_degree: u32,
    pub terms: BTreeMap<Vec<u32>, QSeries>,
}

impl ZPolynomial {
    pub fn new(n: usize, max_degree: u32) -> Self {
        ZPolynomial { n, max_degree, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, max_degree: u32, c: QSeries) -> Self {
        let mut p = Self::new(n, max_degree);
        p.add_term(vec![0; n], c);
        p
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: QSeries) {
        assert_eq!(e.len(), self.n);
        if e.iter().any(|&d| d > self.max_degree) {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => *old = &*old + &c,
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn coeff(&self, e: &[u32]) -> Option<&QSeries> {
        self.terms.get(e)
    }

    pub fn add(&self, other: &ZPolynomial) -> ZPolynomial {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &ZPolynomial) -> ZPolynomial {
        assert_eq!(self.n, other.n);
        let mut out = ZPolynomial::new(self.n, self.max_degree.min(other.max_degree));
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.iter().zip(eb).map(|(a, b)| a + b).collect(), ca * cb);
            }
        }
        out
    }

    /// Whether every stored term is odd in every variable.
    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|d| d % 2 == 1))
    }

    /// First coefficient where the two polynomials differ; absent terms count as zero.
    pub fn compare(&self, other: &ZPolynomial) -> Result<usize, (Vec<u32>, Mismatch)> {
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        for e in &keys {
            let (a, b) = match (self.terms.get(*e), other.terms.get(*e)) {
                (Some(a), Some(b)) => (a.clone(), b.clone()),
                (Some(a), None) => (a.clone(), QSeries::zero(a.trunc_order())),
                (None, Some(b)) => (QSeries::zero(b.trunc_order()), b.clone()),
                (None, None) => unreachable!(),
            };
            a.compare(&b).map_err(|m| ((*e).clone(), m))?;
        }
        Ok(keys.len())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "max_degree": self.max_degree,
            "terms": self.terms.iter().map(|(e, c)| json!({"z_exps": e, "coeff": c.to_json()})).collect::<Vec<_>>(),
        })
    }
}

/// Keeps exactly the terms odd in each variable separately.
pub fn epsilon_oddify(p: &ZPolynomial) -> ZPolynomial {
    epsilon_oddify_in(p, &(0..p.n).collect::<Vec<_>>())
}

/// Oddification in the variables `vars` only.
pub fn epsilon_oddify_in(p: &ZPolynomial, vars: &[usize]) -> ZPolynomial {
    let mut out = ZPolynomial::new(p.n, p.max_degree);
    for (e, c) in &p.terms {
        if vars.iter().all(|&i| e[i] % 2 == 1) {
            out.add_term(e.clone(), c.clone());
        }
    }
    out
}

/// `G_n(z) = sum_{r >= 1} D^{n-1} G_{2r} z^{2r+n-2}/(2r+n-2)!` through `z^{max_degree}`,
/// as a one-variable polynomial.
pub fn gcal_series(n: u32, max_degree: u32, order: usize) -> ZPolynomial {
    assert!(n >= 1);
    let mut out = ZPolynomial::new(1, max_degree);
    let mut r = 1;
    while 2 * r + n - 2 <= max_degree {
        let d = 2 * r + n - 2;
        let mut g = eisenstein(2 * r, order).expect("even weight");
        for _ in 1..n {
            g = g.q_derive();
        }
        out.add_term(vec![d], g.scale(&factorial_q(d as u64).recip()));
        r += 1;
    }
    out
}

/// Exponent vectors over `vars` summing to `d`, each entry at most `cap`.
fn spread(d: u32, vars: usize, cap: u32) -> Vec<Vec<u32>> {
    if vars == 1 {
        return if d <= cap { vec![vec![d]] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=d.min(cap) {
        for mut rest in spread(d - first, vars - 1, cap) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `f(z_{i_1} + .. + z_{i_m})` for a one-variable `f`, placed among `n` variables and
/// cut at degree `cap` in each.
pub fn substitute_sum(f: &ZPolynomial, n: usize, indices: &[usize], cap: u32) -> ZPolynomial {
    assert_eq!(f.n, 1);
    let mut out = ZPolynomial::new(n, cap);
    for (e, c) in &f.terms {
        let d = e[0];
        for part in spread(d, indices.len(), cap) {
            let multinomial = part.iter().fold(factorial_q(d as u64), |acc, &p| acc / factorial_q(p as u64));
            let mut full = vec![0; n];
            for (&i, &p) in indices.iter().zip(&part) {
                full[i] = p;
            }
            out.add_term(full, c.scale(&multinomial));
        }
    }
    out
}

/// `eta F_n = sum_{mu in Pi_n} prod_k eps G_{#mu_k}(sum_{i in mu_k} z_i)`.
pub fn npoint_skew_closed(n: usize, max_degree: u32, order: usize) -> ZPolynomial {
    assert!(n >= 1);
    let mut total = ZPolynomial::new(n, max_degree);
    for mu in set_partitions(n) {
        let mut term = ZPolynomial::constant(n, max_degree, QSeries::one(order));
        for block in &mu.blocks {
            let idx: Vec<usize> = block.iter().map(|&b| b - 1).collect();
            let g = gcal_series(block.len() as u32, block.len() as u32 * max_degree, order);
            term = term.mul(&epsilon_oddify_in(&substitute_sum(&g, n, &idx, max_degree), &idx));
        }
        total = total.add(&term);
    }
    total
}

/// `eta D_{2k_1-1} .. D_{2k_n-1} Psi` at `q_3 = .. = 1`, taken from `psi`.
pub fn normalized_derivative(psi: &PsiSeries, ks: &[usize]) -> Result<QSeries, SkewError> {
    Ok(&psi.derivative_at_origin(ks)? * &eta_series(psi.grade))
}

/// All index tuples `k in [1, k_max]^n`.
fn index_tuples(n: usize, k_max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=k_max).map(move |k| {
                    let mut t = t.clone();
                    t.push(k);
                    t
                })
            })
            .collect();
    }
    out
}

/// `eta F_n` assembled from exponent multiplication on `Psi`.
pub fn npoint_skew_brute(n: usize, max_degree: u32, order: usize, j: usize) -> Result<ZPolynomial, SkewError> {
    let k_max = (max_degree as usize).div_ceil(2);
    if k_max > j {
        return Err(SkewError::InsufficientVariables { degree: 2 * k_max as u32 - 1, available: j });
    }
    let psi = psi_series(j, order)?;
    let mut out = ZPolynomial::new(n, max_degree);
    for ks in index_tuples(n, k_max) {
        let e: Vec<u32> = ks.iter().map(|&k| 2 * k as u32 - 1).collect();
        let norm = e.iter().fold(one(), |acc, &d| acc / factorial_q(d as u64));
        out.add_term(e, normalized_derivative(&psi, &ks)?.scale(&norm));
    }
    Ok(out)
}

/// `eta D_{2k_1-1} .. D_{2k_n-1} Psi = sum_{mu in Pi(k)} prod h_{#mu_p, 2|mu_p|}` at `q_3 = .. = 1`.
pub fn verify_log_derivative_expansion(psi: &PsiSeries, ks: &[usize]) -> Result<SeriesCheck, SkewError> {
    let lhs = normalized_derivative(psi, ks)?;
    let order = psi.grade;
    let mut rhs = QSeries::zero(order);
    for mu in set_partitions(ks.len()) {
        let term = mu.blocks.iter().fold(QSeries::one(order), |acc, b| {
            let s: usize = b.iter().map(|&i| ks[i - 1]).sum();
            &acc * &h_series(b.len() as u32, 2 * s as u32, order)
        });
        rhs = &rhs + &term;
    }
    Ok(SeriesCheck::of(&lhs, &rhs))
}

/// Closed form against the direct route, with the expansion over set partitions of the
/// index tuple checked on every coefficient along the way.
#[derive(Debug, Clone)]
pub struct SkewCheck {
    pub compared: usize,
    pub mismatch: Option<(Vec<u32>, Mismatch)>,
    pub expansion: SeriesCheck,
}

impl SkewCheck {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none() && self.expansion.passed() && self.compared > 0
    }
}

pub fn verify_skew_npoint(n: usize, max_degree: u32, order: usize) -> Result<SkewCheck, SkewError> {
    let j = (max_degree as usize).div_ceil(2).max(1);
    let closed = npoint_skew_closed(n, max_degree, order);
    let brute = npoint_skew_brute(n, max_degree, order, j)?;
    let psi = psi_series(j, order)?;
    let expansion =
        index_tuples(n, j).iter().map(|ks| verify_log_derivative_expansion(&psi, ks)).collect::<Result<Vec<_>, _>>()?;
    let (compared, mismatch) = match closed.compare(&brute) {
        Ok(c) => (c, None),
        Err(m) => (0, Some(m)),
    };
    Ok(SkewCheck { compared, mismatch, expansion: SeriesCheck::all(expansion) })
}

/// The coefficients of `-d/dw log Theta(e^w) + 1/w` against those of `2 G_1(w)`, through
/// `w^{max_degree}`; the left side comes from the theta derivatives at 1.
pub fn verify_gcal_log_theta(max_degree: u32, order: usize) -> SeriesCheck {
    let d = max_degree as usize;
    // Theta(e^w) = w A(w) with A(0) = Theta'(1) = 1.
    let a: Vec<QSeries> = (0..=d + 1)
        .map(|k| theta_at(k as u32 + 1, &ThetaPoint::unit(), order).scale(&factorial_q(k as u64 + 1).recip()))
        .collect();
    let mut l: Vec<QSeries> = Vec::with_capacity(d + 1);
    for k in 0..=d {
        let mut v = a[k + 1].scale(&int(k as i64 + 1));
        for i in 1..=k {
            v = &v - &(&a[i] * &l[k - i]);
        }
        l.push(v);
    }
    let g1 = gcal_series(1, max_degree, order);
    let checks = (0..=d).map(|k| {
        let rhs = g1.coeff(&[k as u32]).map_or_else(|| QSeries::zero(order), |c| c.scale(&int(2)));
        SeriesCheck::of(&(-&l[k]), &rhs)
    });
    SeriesCheck::all(checks)
}

/// `Psi` at `q_3 = q_5 = .. = 1` against `eta^{-1}`.
pub fn verify_psi_restriction(j: usize, order: usize) -> Result<SeriesCheck, SkewError> {
    let psi = psi_series(j, order)?;
    let lhs = normalized_derivative(&psi, &[])?;
    Ok(SeriesCheck::of(&lhs, &QSeries::one(order)))
}

/// Fits `eta D^A Psi |_{q_3 = .. = 1}` for a multi-index of odd variables, given as the list
/// `ks` of indices `k` (one per derivative `D_{2k-1}`), in weight `2 sum k`.
pub fn psi_taylor_fit(ks: &[usize], order: usize, margin: usize) -> Result<Result<Fit, FitError>, SkewError> {
    let j = ks.iter().copied().max().unwrap_or(1);
    let psi = psi_series(j, order)?;
    let f = normalized_derivative(&psi, ks)?;
    let w = 2 * ks.iter().sum::<usize>() as u32;
    Ok(fit_series(&f, w, order, margin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn psi_anomaly_and_first_terms() {
        let psi = psi_series(2, 3).unwrap();
        assert_eq!(psi.anomaly, vec![rat(-1, 24), rat(1, 240)]);
        assert_eq!(psi.terms[&vec![1, 1]], one());
        assert_eq!(psi.terms[&vec![2, 8]], one());
        assert_eq!(psi.terms[&vec![2, 2]], one());
        assert_eq!(psi.terms.len(), 1 + 1 + 2 + 3);
    }

    #[test]
    fn psi_restricts_to_inverse_eta() {
        for j in 1..=3 {
            assert!(verify_psi_restriction(j, 20).unwrap().passed());
        }
    }

    #[test]
    fn h_matches_g() {
        assert!(verify_h_equals_g(3, 4, 30).passed());
        assert_eq!(h_series(1, 2, 3).coeffs()[0], rat(-1, 24));
        assert_eq!(h_series(2, 4, 4), QSeries::from_ints(zero(), &[0, 1, 6, 12, 28]));
    }

    #[test]
    fn oddification() {
        let mut p = ZPolynomial::new(2, 4);
        for e in [[2, 0], [1, 1], [0, 2]] {
            let c = if e == [1, 1] { one() } else { rat(1, 2) };
            p.add_term(e.to_vec(), QSeries::constant(c, 0));
        }
        let odd = epsilon_oddify(&p);
        assert_eq!(odd.terms.len(), 1);
        assert_eq!(odd.coeff(&[1, 1]).unwrap().coeffs()[0], one());
        assert!(epsilon_oddify(&odd) == odd);
    }

    #[test]
    fn oddified_power_of_a_sum() {
        // eps((z_1 + .. + z_n)^r / r!) = sum_{l_1+..+l_n=(r+n)/2} prod z^{2l-1}/(2l-1)!.
        for (n, r) in [(2, 4), (3, 5), (2, 6)] {
            let mut f = ZPolynomial::new(1, 9);
            f.add_term(vec![r], QSeries::constant(factorial_q(r as u64).recip(), 0));
            let idx: Vec<usize> = (0..n).collect();
            let lhs = epsilon_oddify(&substitute_sum(&f, n, &idx, 9));
            let mut rhs = ZPolynomial::new(n, 9);
            for e in spread(r, n, 9).into_iter().filter(|e| e.iter().all(|d| d % 2 == 1)) {
                let c = e.iter().fold(one(), |acc, &d| acc / factorial_q(d as u64));
                rhs.add_term(e, QSeries::constant(c, 0));
            }
            assert!(lhs.compare(&rhs).is_ok(), "n={n} r={r}");
        }
    }

    #[test]
    fn gcal_coefficients() {
        let g2 = gcal_series(2, 6, 5);
        let keys: Vec<u32> = g2.terms.keys().map(|e| e[0]).collect();
        assert_eq!(keys, vec![2, 4, 6]);
        assert_eq!(g2.coeff(&[2]).unwrap(), &eisenstein(2, 5).unwrap().q_derive().scale(&rat(1, 2)));
        assert!(verify_gcal_log_theta(7, 12).passed());
    }

    #[test]
    fn npoint_closed_against_direct() {
        for n in 1..=2 {
            let c = verify_skew_npoint(n, 5, 15).unwrap();
            assert!(c.passed(), "n={n}: {c:?}");
        }
        let c = verify_skew_npoint(3, 3, 10).unwrap();
        assert!(c.passed(), "{c:?}");
    }

    #[test]
    fn one_point_is_eisenstein() {
        let brute = npoint_skew_brute(1, 3, 10, 2).unwrap();
        assert_eq!(brute.coeff(&[1]).unwrap(), &eisenstein(2, 10).unwrap());
        assert_eq!(brute.coeff(&[3]).unwrap(), &eisenstein(4, 10).unwrap().scale(&rat(1, 6)));
    }

    #[test]
    fn too_few_variables() {
        assert!(matches!(npoint_skew_brute(1, 5, 5, 2), Err(SkewError::InsufficientVariables { .. })));
    }

    #[test]
    fn taylor_coefficients_are_quasimodular() {
        for ks in [vec![2], vec![3], vec![2, 2]] {
            let fit = psi_taylor_fit(&ks, 30, 10).unwrap();
            assert!(fit.is_ok(), "{ks:?}: {fit:?}");
        }
    }
}

//! The ring of quasimodular forms for `SL_2(Z)`, `C[G2, G4, G6]`, handled as exact
//! linear algebra on q-expansions: bases, membership fits with confirming
//! coefficients, closure under `D = q d/dq`, and the bracket weight checks.

use crate::partitions::q_bracket;
use crate::rational::{fmt, int, one, parse, zero, Rational};
use crate::series::QSeries;
use crate::special::{g, xi_value};
use num_traits::Zero;
use serde_json::{json, Value};
use std::collections::BTreeMap;

pub const DEFAULT_MARGIN: usize = 10;

/// The monomial `G2^a G4^b G6^c`, of weight `2a + 4b + 6c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl Monomial {
    pub fn weight(&self) -> u32 {
        2 * self.a + 4 * self.b + 6 * self.c
    }

    pub fn expand(&self, n: usize) -> QSeries {
        let mut s = QSeries::one(n);
        for (k, e) in [(2, self.a), (4, self.b), (6, self.c)] {
            if e > 0 {
                s = &s * &g(k, n).pow(e);
            }
        }
        s
    }

    fn times(&self, o: &Monomial) -> Monomial {
        Monomial { a: self.a + o.a, b: self.b + o.b, c: self.c + o.c }
    }
}

/// Monomials of weight `w`, ordered by descending power of `G2`, then of `G4`.
pub fn monomials(w: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    if w % 2 == 1 {
        return out;
    }
    for c in 0..=w / 6 {
        for b in 0..=(w - 6 * c) / 4 {
            let rest = w - 6 * c - 4 * b;
            out.push(Monomial { a: rest / 2, b, c });
        }
    }
    out.sort_by(|x, y| y.a.cmp(&x.a).then(y.b.cmp(&x.b)));
    out
}

pub fn qm_basis(w: u32, n: usize) -> Vec<(Monomial, QSeries)> {
    monomials(w).into_iter().map(|m| (m, m.expand(n))).collect()
}

/// An exact element of the quasimodular ring of a single weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMElement {
    pub weight: u32,
    pub terms: BTreeMap<Monomial, Rational>,
}

impl QMElement {
    pub fn zero(weight: u32) -> Self {
        QMElement { weight, terms: BTreeMap::new() }
    }

    pub fn monomial(m: Monomial) -> Self {
        QMElement { weight: m.weight(), terms: BTreeMap::from([(m, one())]) }
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(zero)
    }

    pub fn expand(&self, n: usize) -> QSeries {
        self.terms.iter().fold(QSeries::zero(n), |acc, (m, c)| &acc + &m.expand(n).scale(c))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let terms = self.terms.iter().map(|(m, x)| (*m, x * c)).filter(|(_, x)| !x.is_zero()).collect();
        QMElement { weight: self.weight, terms }
    }

    pub fn mul(&self, other: &QMElement) -> Self {
        let mut terms: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                *terms.entry(m1.times(m2)).or_insert_with(zero) += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        QMElement { weight: self.weight + other.weight, terms }
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> =
            self.terms.iter().map(|(m, c)| json!({"a": m.a, "b": m.b, "c": m.c, "coeff": fmt(c)})).collect();
        json!({"weight": self.weight, "terms": terms})
    }

    pub fn from_json(v: &Value) -> Result<Self, String> {
        let weight = v["weight"].as_u64().ok_or("missing weight")? as u32;
        let mut terms = BTreeMap::new();
        for t in v["terms"].as_array().ok_or("missing terms")? {
            let get = |k: &str| t[k].as_u64().map(|x| x as u32).ok_or(format!("missing {k}"));
            let m = Monomial { a: get("a")?, b: get("b")?, c: get("c")? };
            if m.weight() != weight {
                return Err(format!("monomial {m:?} has the wrong weight"));
            }
            let c = parse(t["coeff"].as_str().ok_or("missing coeff")?).map_err(|e| e.to_string())?;
            terms.insert(m, c);
        }
        Ok(QMElement { weight, terms })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FitError {
    #[error("not in the span: coefficient {index} disagrees ({lhs} vs {rhs})")]
    NotInSpan { index: usize, lhs: String, rhs: String },
    #[error("order {order} is too small for dimension {dim} with margin {margin}")]
    InsufficientOrder { order: usize, dim: usize, margin: usize },
    #[error("fitting needs an integer-step series with zero offset")]
    BadLattice,
}

/// A successful fit together with the number of coefficients it was confirmed on.
#[derive(Debug, Clone)]
pub struct Fit {
    pub element: QMElement,
    pub rows_used: usize,
    pub confirmed: usize,
}

/// Row reduction of `rows` (each of length `dim + 1`, last entry the right-hand side).
/// Returns the unique solution when the coefficient part has rank `dim`.
pub fn solve_exact(rows: &[Vec<Rational>], dim: usize) -> Option<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivot_row = 0;
    for col in 0..dim {
        let p = (pivot_row..m.len()).find(|&r| !m[r][col].is_zero())?;
        m.swap(pivot_row, p);
        let inv = m[pivot_row][col].recip();
        for x in m[pivot_row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..m.len() {
            if r != pivot_row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=dim {
                    let d = &f * &m[pivot_row][c];
                    m[r][c] -= d;
                }
            }
        }
        pivot_row += 1;
    }
    Some((0..dim).map(|i| m[i][dim].clone()).collect())
}

/// Rank of a rational matrix.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if !m[i][col].is_zero() {
                let f = &m[i][col] / &m[r][col];
                for c in col..cols {
                    let d = &f * &m[r][c];
                    m[i][c] -= d;
                }
            }
        }
        r += 1;
    }
    r
}

/// Fits `f` in the weight-`w` basis using coefficients `0..=n`: solves on the shortest
/// prefix that determines the combination, then confirms every remaining coefficient.
pub fn fit_series(f: &QSeries, w: u32, n: usize, margin: usize) -> Result<Fit, FitError> {
    if !f.offset().is_zero() || f.step() != crate::series::BaseStep::Whole {
        return Err(FitError::BadLattice);
    }
    let n = n.min(f.trunc_order());
    let basis = qm_basis(w, n);
    let dim = basis.len();
    if n + 1 < dim + margin {
        return Err(FitError::InsufficientOrder { order: n, dim, margin });
    }
    let row = |i: usize| -> Vec<Rational> {
        let mut r: Vec<Rational> = basis.iter().map(|(_, s)| s.coeffs()[i].clone()).collect();
        r.push(f.coeffs()[i].clone());
        r
    };
    let mut rows: Vec<Vec<Rational>> = (0..dim).map(row).collect();
    let mut solution = None;
    while rows.len() + margin <= n + 1 {
        if let Some(sol) = solve_exact(&rows, dim) {
            solution = Some(sol);
            break;
        }
        rows.push(row(rows.len()));
    }
    let Some(sol) = solution else {
        return Err(FitError::InsufficientOrder { order: n, dim, margin });
    };
    let rows_used = rows.len();
    let mut terms = BTreeMap::new();
    for ((m, _), c) in basis.iter().zip(&sol) {
        if !c.is_zero() {
            terms.insert(*m, c.clone());
        }
    }
    let element = QMElement { weight: w, terms };
    for i in 0..=n {
        let v = basis.iter().zip(&sol).fold(zero(), |acc, ((_, s), c)| acc + c * &s.coeffs()[i]);
        if v != f.coeffs()[i] {
            return Err(FitError::NotInSpan { index: i, lhs: fmt(&f.coeffs()[i]), rhs: fmt(&v) });
        }
    }
    Ok(Fit { element, rows_used, confirmed: n + 1 - rows_used })
}

/// `D` of every basis monomial of weight `<= w_max`, fitted in weight `w + 2`.
pub fn derivation_closure(w_max: u32, n: usize) -> Vec<(Monomial, Result<Fit, FitError>)> {
    (0..=w_max)
        .step_by(2)
        .flat_map(monomials)
        .map(|m| (m, fit_series(&m.expand(n).q_derive(), m.weight() + 2, n, DEFAULT_MARGIN)))
        .collect()
}

/// The Leibniz consistency `D(G2^2) = 2 G2 D(G2)` at the level of fitted elements.
pub fn leibniz_closure_consistent(n: usize) -> bool {
    let g2 = Monomial { a: 1, b: 0, c: 0 };
    let g2sq = Monomial { a: 2, b: 0, c: 0 };
    let (Ok(d1), Ok(d2)) = (
        fit_series(&g2.expand(n).q_derive(), 4, n, DEFAULT_MARGIN),
        fit_series(&g2sq.expand(n).q_derive(), 6, n, DEFAULT_MARGIN),
    ) else {
        return false;
    };
    QMElement::monomial(g2).mul(&d1.element).scale(&int(2)) == d2.element
}

/// Verdict of a bracket weight check.
#[derive(Debug, Clone)]
pub enum BracketVerdict {
    /// Odd weight: the bracket vanishes through the order.
    Vanishes,
    Fitted(Fit),
    Failed(FitError),
    NonzeroOddWeight {
        index: usize,
        value: String,
    },
}

#[derive(Debug, Clone)]
pub struct BracketCheck {
    pub ks: Vec<u32>,
    pub weight: u32,
    pub order: usize,
    pub bracket: QSeries,
    pub verdict: BracketVerdict,
}

impl BracketCheck {
    pub fn passed(&self) -> bool {
        matches!(self.verdict, BracketVerdict::Vanishes | BracketVerdict::Fitted(_))
    }
}

/// `<prod_k (p_k - xi(-k))>_q` through order `n`.
pub fn shifted_power_bracket(ks: &[u32], n: usize) -> QSeries {
    let shifts: Vec<Rational> = ks.iter().map(|&k| xi_value(-(k as i64)).unwrap()).collect();
    q_bracket(|l| ks.iter().zip(&shifts).fold(one(), |acc, (&k, x)| acc * (l.p(k) - x)), n)
}

/// Checks that the bracket of `prod (p_k - xi(-k))` is quasimodular of weight `sum (k+1)`.
pub fn bracket_qm_check(ks: &[u32], n: usize, margin: usize) -> BracketCheck {
    let weight: u32 = ks.iter().map(|k| k + 1).sum();
    let bracket = shifted_power_bracket(ks, n);
    let verdict = if weight % 2 == 1 {
        match bracket.coeffs().iter().position(|c| !c.is_zero()) {
            None => BracketVerdict::Vanishes,
            Some(i) => BracketVerdict::NonzeroOddWeight { index: i, value: fmt(&bracket.coeffs()[i]) },
        }
    } else {
        match fit_series(&bracket, weight, n, margin) {
            Ok(f) => BracketVerdict::Fitted(f),
            Err(e) => BracketVerdict::Failed(e),
        }
    };
    BracketCheck { ks: ks.to_vec(), weight, order: n, bracket, verdict }
}

/// Multisets of positive integers with `sum (k + 1) <= w_max`, each sorted ascending.
pub fn multisets_up_to_weight(w_max: u32) -> Vec<Vec<u32>> {
    fn go(min: u32, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for k in min..left {
            cur.push(k);
            go(k, left - (k + 1), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, w_max, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::special::eisenstein;

    #[test]
    fn basis_sizes() {
        assert_eq!(monomials(2).len(), 1);
        assert_eq!(monomials(4).len(), 2);
        assert_eq!(monomials(8).len(), 4);
        assert_eq!(monomials(12).len(), 7);
        assert!(monomials(5).is_empty());
        for m in monomials(8) {
            assert_eq!(m.weight(), 8);
        }
    }

    #[test]
    fn bases_are_independent() {
        for w in (0..=12).step_by(2) {
            let basis = qm_basis(w, 20);
            let dim = basis.len();
            let rows: Vec<Vec<Rational>> =
                (0..=20).map(|i| basis.iter().map(|(_, s)| s.coeffs()[i].clone()).collect()).collect();
            assert_eq!(rank(&rows), dim, "w={w}");
        }
    }

    #[test]
    fn simple_fits() {
        let g2 = eisenstein(2, 20).unwrap();
        let f = fit_series(&g2, 2, 20, DEFAULT_MARGIN).unwrap();
        assert_eq!(f.element, QMElement::monomial(Monomial { a: 1, b: 0, c: 0 }));
        let mut c = vec![rat(1, 240)];
        for n in 1..=20i64 {
            c.push(int((1..=n).filter(|d| n % d == 0).map(|d| d * d * d).sum()));
        }
        let f = fit_series(&QSeries::new(zero(), c), 4, 20, DEFAULT_MARGIN).unwrap();
        assert_eq!(f.element, QMElement::monomial(Monomial { a: 0, b: 1, c: 0 }));
    }

    #[test]
    fn derivative_of_g2() {
        // Solve the 2x2 system from q^0 and q^1 by hand: alpha/576 + beta/240 = 0, -alpha/12 + beta = 1.
        let dg2 = eisenstein(2, 30).unwrap().q_derive();
        let f = fit_series(&dg2, 4, 30, DEFAULT_MARGIN).unwrap();
        assert_eq!(f.element.coeff(&Monomial { a: 2, b: 0, c: 0 }), int(-2));
        assert_eq!(f.element.coeff(&Monomial { a: 0, b: 1, c: 0 }), rat(5, 6));
        assert!(f.confirmed >= DEFAULT_MARGIN);
        assert_eq!(f.element.expand(30), dg2);
    }

    #[test]
    fn closure_and_leibniz() {
        for (m, r) in derivation_closure(8, 30) {
            assert!(r.is_ok(), "{m:?}: {r:?}");
        }
        assert!(leibniz_closure_consistent(30));
    }

    #[test]
    fn not_in_span_and_order() {
        let g2 = eisenstein(2, 20).unwrap();
        match fit_series(&g2, 4, 20, DEFAULT_MARGIN) {
            Err(FitError::NotInSpan { .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(fit_series(&g2, 12, 10, DEFAULT_MARGIN), Err(FitError::InsufficientOrder { .. })));
        assert_eq!(fit_series(&g2.shift(&rat(1, 24)), 2, 20, 5).unwrap_err(), FitError::BadLattice);
    }

    #[test]
    fn json_round_trip() {
        let dg2 = eisenstein(2, 30).unwrap().q_derive();
        let e = fit_series(&dg2, 4, 30, DEFAULT_MARGIN).unwrap().element;
        assert_eq!(QMElement::from_json(&e.to_json()).unwrap(), e);
    }

    #[test]
    fn small_brackets() {
        let one_k = bracket_qm_check(&[1], 16, DEFAULT_MARGIN);
        match &one_k.verdict {
            BracketVerdict::Fitted(f) => {
                assert_eq!(f.element, QMElement::monomial(Monomial { a: 1, b: 0, c: 0 }))
            }
            v => panic!("{v:?}"),
        }
        assert!(matches!(bracket_qm_check(&[2], 16, DEFAULT_MARGIN).verdict, BracketVerdict::Vanishes));
        assert!(bracket_qm_check(&[1, 1], 18, DEFAULT_MARGIN).passed());
        assert!(bracket_qm_check(&[3], 18, DEFAULT_MARGIN).passed());
    }

    #[test]
    fn multiset_enumeration() {
        let sets = multisets_up_to_weight(4);
        assert_eq!(sets, vec![vec![1], vec![1, 1], vec![2], vec![3]]);
    }
}

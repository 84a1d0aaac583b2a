//! Vanishing on the locus `t_1 .. t_n = 1`: the theta numerator `T` vanishes
//! identically there, and the composition sum `Phi` built from any odd function
//! with a simple zero at 1 tends to 0 as `t_1 -> 1`.

use super::{composition_sum, t_closed, CorrError, EvalPoint, SeriesTheta, ThetaSource};
use crate::rational::{abs, fmt, int, one, pow, rat, sign_pow, Rational};
use crate::series::QSeries;
use crate::special::{theta_numeric, NumericQ, SeriesCheck, ThetaPoint};
use num_traits::Zero;

/// `T` on `t_1 .. t_n = 1` against the zero series.
pub fn verify_t_vanish(pt: &EvalPoint, n: usize) -> Result<SeriesCheck, CorrError> {
    assert!(pt.n() >= 2, "needs at least two arguments");
    let total = pt.total();
    if !(total.m == 0 && total.s == one()) {
        return Err(CorrError::ConstraintViolated { value: fmt(&total.t()) });
    }
    pt.check_subsets(false)?;
    let t = t_closed(&SeriesTheta::new(n), pt)?;
    Ok(SeriesCheck::of(&t, &QSeries::zero(n)))
}

/// An odd function `f(1/x) = -f(x)`, given through `(x d/dx)^k f` at `x = s^2`.
pub trait OddFunction {
    fn deriv(&self, k: u32, s: &Rational) -> Rational;

    fn name(&self) -> String;
}

/// `x^{1/2} - x^{-1/2}`.
#[derive(Debug, Clone, Copy)]
pub struct SqrtDifference;

impl OddFunction for SqrtDifference {
    fn deriv(&self, k: u32, s: &Rational) -> Rational {
        let k = k as i64;
        pow(&rat(1, 2), k) * s - pow(&rat(-1, 2), k) / s
    }

    fn name(&self) -> String {
        "sqrt-difference".into()
    }
}

/// `Theta(x; q0)` from the sum form cut at `terms`, still exactly odd.
#[derive(Debug, Clone)]
pub struct NumericThetaFunction {
    pub q: NumericQ,
    pub terms: usize,
}

impl OddFunction for NumericThetaFunction {
    fn deriv(&self, k: u32, s: &Rational) -> Rational {
        theta_numeric(k, &ThetaPoint::new(s.clone()), &self.q, self.terms)
    }

    fn name(&self) -> String {
        format!("theta(q={}, terms={})", fmt(&self.q.q()), self.terms)
    }
}

struct OddSource<'a, F: OddFunction + ?Sized>(&'a F);

impl<F: OddFunction + ?Sized> ThetaSource for OddSource<'_, F> {
    type V = Rational;

    fn theta(&self, k: u32, p: &ThetaPoint) -> Rational {
        assert_eq!(p.m, 0, "odd functions take plain arguments");
        self.0.deriv(k, &p.s)
    }
}

/// `f(1) = 0` and `f'(1) != 0`.
pub fn check_simple_zero<F: OddFunction + ?Sized>(f: &F) -> Result<(), CorrError> {
    if !f.deriv(0, &one()).is_zero() || f.deriv(1, &one()).is_zero() {
        return Err(CorrError::SimpleZeroViolated);
    }
    Ok(())
}

/// `Phi(t) = sum_gamma (-1)^{len} f^{(#gamma_1)}(1) prod_{i >= 2} f^{(#gamma_i)}(P_i) / f(P_i)`,
/// with `P_i` the product over `gamma_1 u .. u gamma_{i-1}`.
pub fn phi_odd<F: OddFunction + ?Sized>(f: &F, pt: &EvalPoint) -> Result<Rational, CorrError> {
    check_simple_zero(f)?;
    pt.unshifted()?;
    let src = OddSource(f);
    let unit = ThetaPoint::unit();
    let v = composition_sum(&src, pt, &unit, |m| Ok(src.theta(m, &unit)))?;
    Ok(v * sign_pow(pt.n() as i64))
}

/// The point `t_1 = (1 + eps)^2`, `t_j = s_j^2` for the middle arguments, and `t_n`
/// fixed by `t_1 .. t_n = 1`.
pub fn phi_point(eps: &Rational, middle: &[Rational]) -> Result<EvalPoint, CorrError> {
    let s1 = one() + eps;
    let head: Rational = middle.iter().product::<Rational>() * &s1;
    let mut s = vec![s1];
    s.extend_from_slice(middle);
    s.push(head.recip());
    EvalPoint::from_roots(&s)
}

/// Linear-decay certificate for `Phi -> 0`: `|Phi(eps/10)| <= |Phi(eps)| / 5`.
#[derive(Debug, Clone)]
pub struct DecayCheck {
    pub function: String,
    pub n: usize,
    pub eps: Rational,
    pub coarse: Rational,
    pub fine: Rational,
}

impl DecayCheck {
    pub fn ratio(&self) -> Option<Rational> {
        (!self.coarse.is_zero()).then(|| abs(&self.fine) / abs(&self.coarse))
    }

    pub fn passed(&self) -> bool {
        abs(&self.fine) * int(5) <= abs(&self.coarse)
    }
}

/// `Phi` for `n` arguments at `eps` and `eps/10`, middle roots `2, 3, ..`.
pub fn verify_phi_vanish<F: OddFunction + ?Sized>(f: &F, n: usize, eps: &Rational) -> Result<DecayCheck, CorrError> {
    assert!(n >= 2, "needs at least two arguments");
    let middle: Vec<Rational> = (2..n as i64).map(int).collect();
    let coarse = phi_odd(f, &phi_point(eps, &middle)?)?;
    let fine = phi_odd(f, &phi_point(&(eps / int(10)), &middle)?)?;
    Ok(DecayCheck { function: f.name(), n, eps: eps.clone(), coarse, fine })
}

/// A function with `f(1) != 0`, for exercising the simple-zero guard.
#[derive(Debug, Clone, Copy)]
pub struct ShiftedSqrtDifference;

impl OddFunction for ShiftedSqrtDifference {
    fn deriv(&self, k: u32, s: &Rational) -> Rational {
        let base = SqrtDifference.deriv(k, s);
        if k == 0 {
            base + one()
        } else {
            base
        }
    }

    fn name(&self) -> String {
        "shifted".into()
    }
}

impl Default for NumericThetaFunction {
    fn default() -> Self {
        NumericThetaFunction { q: NumericQ::from_root(rat(1, 4)), terms: 25 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(s: &[Rational]) -> EvalPoint {
        EvalPoint::from_roots(s).unwrap()
    }

    #[test]
    fn t_vanishes_on_the_product_locus() {
        assert!(verify_t_vanish(&pt(&[int(2), rat(1, 2)]), 12).unwrap().passed());
        assert!(verify_t_vanish(&pt(&[int(2), int(3), rat(1, 6)]), 12).unwrap().passed());
        assert!(verify_t_vanish(&pt(&[rat(1, 6), int(2), int(3)]), 10).unwrap().passed());
    }

    #[test]
    fn t_vanish_guards() {
        let off = pt(&[int(2), int(3)]);
        assert!(matches!(verify_t_vanish(&off, 4), Err(CorrError::ConstraintViolated { .. })));
        let degenerate = pt(&[int(2), rat(1, 2), int(3), rat(1, 3)]);
        assert!(matches!(verify_t_vanish(&degenerate, 4), Err(CorrError::DivisorHit { .. })));
    }

    #[test]
    fn phi_decays_for_sqrt_difference() {
        for n in 2..=4 {
            let c = verify_phi_vanish(&SqrtDifference, n, &rat(1, 10)).unwrap();
            assert!(c.passed(), "n={n}: {c:?}");
        }
    }

    #[test]
    fn phi_decays_for_theta() {
        let c = verify_phi_vanish(&NumericThetaFunction::default(), 2, &rat(1, 10)).unwrap();
        assert!(c.passed(), "{c:?}");
    }

    #[test]
    fn simple_zero_is_required() {
        let p = phi_point(&rat(1, 10), &[]).unwrap();
        assert_eq!(phi_odd(&ShiftedSqrtDifference, &p), Err(CorrError::SimpleZeroViolated));
    }
}

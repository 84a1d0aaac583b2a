//! n-point correlation functions of the partition statistics `t^{lambda_i - i + 1/2}`:
//! the brute-force partition sums, the index-sum building blocks `H` and `G`,
//! the theta-function closed forms `U` and `T`, and the identities tying them
//! together (difference equations, residues, vanishing statements).
//!
//! Arguments are rational points `t_k = s_k^2`, optionally times a power of `q`.
//! The formal-q side uses [`QSeries`]; the numeric side evaluates at a rational
//! `q0 = r^2` so that `q0^{1/2}` stays exact.

pub mod brute;
pub mod closed;
pub mod cyclic;
pub mod numeric;
pub mod qgauss;
pub mod vanish;

use crate::rational::{fmt, one, Rational};
use crate::series::{QSeries, SeriesError};
use crate::setcomb::SetPartition;
use crate::special::ThetaPoint;
use num_traits::Zero;

pub use brute::*;
pub use closed::*;
pub use cyclic::*;
pub use numeric::*;
pub use qgauss::*;
pub use vanish::*;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorrError {
    #[error("theta vanishes at the product over {subset:?}")]
    DivisorHit { subset: Vec<usize> },
    #[error("geometric tail diverges: the product over {subset:?} equals 1")]
    TailPole { subset: Vec<usize> },
    #[error("constraint q^m t_1..t_k = 1 fails: value {value}")]
    ConstraintViolated { value: String },
    #[error("a Pochhammer denominator vanishes")]
    DenominatorZero,
    #[error("the odd function needs f(1) = 0 and f'(1) != 0")]
    SimpleZeroViolated,
    #[error("formal series diverges: {0}")]
    FormalDivergence(String),
    #[error("argument {0} carries a power of q; use the numeric route")]
    ShiftedArgument(usize),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Arguments `x_k = q^{m_k} s_k^2` of an n-point function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalPoint {
    pub pts: Vec<ThetaPoint>,
}

impl EvalPoint {
    /// From square roots `s_k`; signs are dropped (positive branch).
    pub fn from_roots(s: &[Rational]) -> Result<Self, CorrError> {
        if s.iter().any(Zero::is_zero) {
            return Err(CorrError::InvalidPoint("s_k must be nonzero".into()));
        }
        Ok(EvalPoint { pts: s.iter().map(|x| ThetaPoint::new(x.clone())).collect() })
    }

    pub fn from_points(pts: Vec<ThetaPoint>) -> Self {
        EvalPoint { pts }
    }

    pub fn n(&self) -> usize {
        self.pts.len()
    }

    pub fn roots(&self) -> Vec<Rational> {
        self.pts.iter().map(|p| p.s.clone()).collect()
    }

    /// Product of the arguments over 1-based `subset`.
    pub fn product(&self, subset: &[usize]) -> ThetaPoint {
        subset.iter().fold(ThetaPoint::unit(), |acc, &i| acc.times(&self.pts[i - 1]))
    }

    pub fn total(&self) -> ThetaPoint {
        self.pts.iter().fold(ThetaPoint::unit(), |acc, p| acc.times(p))
    }

    /// `(prod_{pi_1} x, .., prod_{pi_l} x)`.
    pub fn contract(&self, pi: &SetPartition) -> EvalPoint {
        EvalPoint { pts: pi.contract(&self.pts, |a, b| a.times(b)) }
    }

    pub fn permuted(&self, sigma: &[usize]) -> EvalPoint {
        EvalPoint { pts: sigma.iter().map(|&i| self.pts[i].clone()).collect() }
    }

    /// Replaces argument `k` (1-based) by `q^m` times itself.
    pub fn shift(&self, k: usize, m: i64) -> EvalPoint {
        let mut pts = self.pts.clone();
        pts[k - 1] = pts[k - 1].times(&ThetaPoint::shifted(one(), m));
        EvalPoint { pts }
    }

    pub fn unshifted(&self) -> Result<(), CorrError> {
        match self.pts.iter().position(|p| p.m != 0) {
            Some(i) => Err(CorrError::ShiftedArgument(i + 1)),
            None => Ok(()),
        }
    }

    /// Rejects points where some nonempty subset (proper, or all when `include_full`)
    /// multiplies to exactly 1, naming the first such subset.
    pub fn check_subsets(&self, include_full: bool) -> Result<(), CorrError> {
        let n = self.n();
        for mask in 1u32..(1 << n) {
            let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
            if subset.len() == n && !include_full {
                continue;
            }
            if self.product(&subset).is_theta_zero() {
                return Err(CorrError::DivisorHit { subset });
            }
        }
        Ok(())
    }

    pub fn describe(&self) -> Vec<String> {
        self.pts
            .iter()
            .map(|p| {
                let t = fmt(&p.t());
                if p.m == 0 {
                    t
                } else {
                    format!("q^{}*{}", p.m, t)
                }
            })
            .collect()
    }
}

/// The arithmetic shared by formal series and numeric values, so the closed forms
/// are written once.
pub trait Scalar: Clone {
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Result<Self, CorrError>;
    fn scale(&self, c: &Rational) -> Self;
}

impl Scalar for QSeries {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Result<Self, CorrError> {
        Ok(self.try_div(other)?)
    }
    fn scale(&self, c: &Rational) -> Self {
        QSeries::scale(self, c)
    }
}

impl Scalar for Rational {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Result<Self, CorrError> {
        if other.is_zero() {
            Err(CorrError::DenominatorZero)
        } else {
            Ok(self / other)
        }
    }
    fn scale(&self, c: &Rational) -> Self {
        self * c
    }
}

/// Outcome of a numeric comparison whose error is estimated from two cutoffs.
#[derive(Debug, Clone)]
pub struct NumericCheck {
    pub lhs: Rational,
    pub rhs: Rational,
    /// `|lhs - rhs| / max(1, |lhs|)`.
    pub discrepancy: Rational,
    /// Combined truncation estimate, on the same relative scale.
    pub estimate: Rational,
    pub factor: Rational,
}

impl NumericCheck {
    pub fn new(lhs: Rational, rhs: Rational, abs_estimate: Rational, factor: Rational) -> Self {
        use num_traits::Signed;
        let scale = lhs.abs().max(one());
        let discrepancy = (&lhs - &rhs).abs() / &scale;
        let estimate = abs_estimate / &scale;
        NumericCheck { lhs, rhs, discrepancy, estimate, factor }
    }

    pub fn passed(&self) -> bool {
        self.discrepancy <= &self.factor * &self.estimate
    }
}

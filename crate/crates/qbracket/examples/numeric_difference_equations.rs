//! Numeric checks at `q0 = 1/9`: the difference equation of `F` with its truncation
//! estimate, and a residue of `F` on the divisor `q t_1 = 1`.

use qbracket::correlators::{default_numeric_point, verify_diffeq_f, verify_residue};
use qbracket::rational::{rat, to_f64};
use qbracket::special::NumericQ;

fn main() {
    for n in 1..=3 {
        let (pt, q) = default_numeric_point(n);
        let c = verify_diffeq_f(&pt, &q, 30).unwrap();
        println!(
            "n = {n}: lhs {:.12} rhs {:.12} discrepancy {:.2e} estimate {:.2e} pass {}",
            to_f64(&c.lhs),
            to_f64(&c.rhs),
            to_f64(&c.discrepancy),
            to_f64(&c.estimate),
            c.passed()
        );
    }

    let q = NumericQ::from_root(rat(1, 3));
    let r = verify_residue(&[rat(5, 3), rat(6, 5)], 1, 1, &rat(1, 10), &q, 30).unwrap();
    println!(
        "residue m=1 k=1: extrapolated {:.8} expected {:.8} pass {}",
        to_f64(&r.extrapolated),
        to_f64(&r.expected),
        r.passed()
    );
}

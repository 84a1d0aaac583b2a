//! The n-point function `F(t_1, .., t_n)` summed over partitions against the
//! theta-determinant closed form `U`, and its difference equation.

use qbracket::correlators::{f_brute_series, u_closed_series, verify_diffeq_u, verify_one_point, EvalPoint};
use qbracket::rational::int;

fn main() {
    let order = 10;
    println!("F(4) Theta(4) = 1: {}", verify_one_point(&int(2), order).unwrap().passed());

    for roots in [vec![2, 3], vec![2, 3, 5]] {
        let s: Vec<_> = roots.iter().map(|&x| int(x)).collect();
        let pt = EvalPoint::from_roots(&s).unwrap();
        let f = f_brute_series(&pt, order).unwrap();
        let u = u_closed_series(&pt, order).unwrap();
        println!("t = {:?}", pt.describe());
        println!("  F = {}", f.to_json());
        println!("  F = U: {}", f == u);
        println!("  difference equation: {}", verify_diffeq_u(&pt, order).unwrap().passed());
    }

    // A degenerate point names the subset whose product is 1.
    let bad = EvalPoint::from_roots(&[int(2), qbracket::rational::rat(1, 2)]).unwrap();
    println!("degenerate point: {}", u_closed_series(&bad, order).unwrap_err());
}

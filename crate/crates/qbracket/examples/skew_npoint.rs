//! The skew character `Psi`: its logarithmic derivatives as Eisenstein derivatives, and
//! the n-point function from set partitions against direct differentiation.

use qbracket::skew::{npoint_skew_closed, psi_series, verify_h_equals_g, verify_skew_npoint};

fn main() {
    let psi = psi_series(2, 6).unwrap();
    println!("Psi(q1, q3) through grade 6: {} monomials", psi.terms.len());
    println!("h = g for r <= 3, sum j <= 4: {}", verify_h_equals_g(3, 4, 30).passed());

    let f2 = npoint_skew_closed(2, 3, 6);
    for (e, c) in &f2.terms {
        println!("  z^{e:?}: {}", c.to_json());
    }
    for n in 1..=2 {
        let c = verify_skew_npoint(n, 5, 15).unwrap();
        println!("n = {n}: closed = direct on {} coefficients: {}", c.compared, c.passed());
    }
}

//! The characters `Omega` and `V`: a few terms, the elliptic transformation law, the
//! theta-like expansion, and the Jacobi triple product in one variable.

use qbracket::characters::{
    omega_series, v_series, verify_elliptic_transformation, verify_theta_expansion, verify_triple_product,
};
use qbracket::rational::fmt;

fn main() {
    let omega = omega_series(2, 2);
    println!("Omega(q0, q1, q2) through grade 2: {} terms", omega.terms.len());
    for (e, c) in omega.terms.iter().take(6) {
        let e: Vec<String> = e.iter().map(fmt).collect();
        println!("  {} q^({})", fmt(c), e.join(", "));
    }
    println!("V(q1, q2, q3) through grade 4: {} terms", v_series(3, 4).terms.len());

    for k in 2..=3 {
        let a = verify_elliptic_transformation(k, 3);
        let b = verify_theta_expansion(k, 3);
        println!(
            "K={k}: transformation law {} ({} monomials), expansion {} ({} monomials)",
            a.passed(),
            a.compared,
            b.passed(),
            b.compared
        );
    }
    println!("triple product through grade 12: {}", verify_triple_product(12).passed());
}

//! Partitions, Frobenius coordinates, the shifted power sums `p_r`, and the
//! q-bracket: `<p_1 - 1/24>_q = G_2`, and weight-4 brackets fitted in `C[G2, G4, G6]`.

use qbracket::partitions::{partitions_of, Partition};
use qbracket::quasimodular::{bracket_qm_check, BracketVerdict, DEFAULT_MARGIN};
use qbracket::rational::fmt;
use qbracket::special::eisenstein;

fn main() {
    let l = Partition::new(vec![4, 2, 1]);
    let f = l.frobenius();
    println!("lambda = {:?}, Frobenius (m|n) = ({:?}|{:?})", l.parts(), f.m, f.n);
    for r in 1..=3 {
        println!("  p_{r}(lambda) = {}", fmt(&l.p(r)));
    }
    println!("partitions of 6: {}", partitions_of(6).len());

    let order = 20;
    let c = bracket_qm_check(&[1], order, DEFAULT_MARGIN);
    println!("<p_1 - 1/24>_q = G_2: {}", c.bracket == eisenstein(2, order).unwrap());

    for ks in [vec![1, 1], vec![3], vec![1, 2]] {
        let c = bracket_qm_check(&ks, order, DEFAULT_MARGIN);
        match &c.verdict {
            BracketVerdict::Fitted(fit) => println!("ks = {ks:?}: weight {} fit {}", c.weight, fit.element.to_json()),
            BracketVerdict::Vanishes => println!("ks = {ks:?}: odd weight {}, bracket vanishes", c.weight),
            other => println!("ks = {ks:?}: {other:?}"),
        }
    }
}

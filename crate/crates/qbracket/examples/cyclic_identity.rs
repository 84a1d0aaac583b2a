//! The finite cyclic sum of inverse q-Pochhammer products, exact on `q^m t_1..t_k = 1`,
//! and what happens when all reorderings are summed instead of the cyclic ones.

use qbracket::correlators::{complete_point, cyclic_sum, verify_cyclic_identity, CyclicVariant, Reorderings};
use qbracket::rational::{fmt, rat};
use qbracket::special::NumericQ;

fn main() {
    let q = NumericQ::from_root(rat(1, 2));
    let free = [rat(3, 1), rat(5, 2), rat(7, 5)];
    for m in 1..=3 {
        for k in 1..=4 {
            let s = complete_point(m, &q, &free[..k - 1]);
            let c = verify_cyclic_identity(m, &q, &s, CyclicVariant::Plain, Reorderings::Cyclic).unwrap();
            println!("m={m} k={k}: sum = {} (expected {})", fmt(&c.value), fmt(&c.expected));
        }
    }
    let s = complete_point(2, &q, &free[..2]);
    let all = cyclic_sum(2, &q, &s, CyclicVariant::Plain, Reorderings::AllPermutations).unwrap();
    println!("all permutations at m=2 k=3: {}", fmt(&all));
}

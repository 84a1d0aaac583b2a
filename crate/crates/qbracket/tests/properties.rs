use proptest::prelude::*;
use qbracket::characters::elliptic_map;
use qbracket::partitions::Partition;
use qbracket::rational::{int, rat, Rational};
use qbracket::series::QSeries;
use qbracket::skew::{epsilon_oddify, ZPolynomial};

fn series(n: usize) -> impl Strategy<Value = QSeries> {
    (prop::collection::vec((-20i64..=20, 1i64..=6), n + 1), 0i64..3)
        .prop_map(|(c, off)| QSeries::new(int(off), c.into_iter().map(|(a, b)| rat(a, b)).collect()))
}

fn zpoly(n: usize, max_degree: u32) -> impl Strategy<Value = ZPolynomial> {
    prop::collection::vec((prop::collection::vec(0..=max_degree, n), -9i64..=9), 0..8).prop_map(move |terms| {
        let mut p = ZPolynomial::new(n, max_degree);
        for (e, c) in terms {
            p.add_term(e, QSeries::constant(int(c), 4));
        }
        p
    })
}

/// Averages `sign * f(sign z)` over all sign vectors, coefficient by coefficient.
fn sign_flip_average(p: &ZPolynomial) -> ZPolynomial {
    let n = p.n;
    let mut out = ZPolynomial::new(n, p.max_degree);
    for (e, c) in &p.terms {
        let mut total = 0i64;
        for mask in 0u32..(1 << n) {
            let mut sign = 1i64;
            for (i, &d) in e.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    // z_i -> -z_i contributes (-1)^d, times the sign itself.
                    sign *= if d % 2 == 0 { -1 } else { 1 };
                }
            }
            total += sign;
        }
        if total != 0 {
            out.add_term(e.clone(), c.scale(&rat(total, 1 << n)));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_ring_axioms(a in series(8), b in series(8), c in series(8)) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
    }

    #[test]
    fn q_derivative_is_a_derivation(a in series(8), b in series(8)) {
        let lhs = (&a * &b).q_derive();
        let rhs = &(&a.q_derive() * &b) + &(&a * &b.q_derive());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_is_two_sided(mut a in series(8)) {
        a = &a + &QSeries::constant(int(1), 8);
        if let Ok(inv) = a.inv() {
            prop_assert!((&a * &inv).is_one());
        }
    }

    #[test]
    fn frobenius_round_trip(mut parts in prop::collection::vec(1u32..12, 0..10)) {
        parts.sort_unstable_by(|x, y| y.cmp(x));
        let l = Partition::new(parts);
        prop_assert_eq!(l.frobenius().to_partition(), l.clone());
        prop_assert_eq!(l.transpose().transpose(), l);
    }

    #[test]
    fn oddification_is_idempotent(p in zpoly(3, 5)) {
        let once = epsilon_oddify(&p);
        prop_assert!(once.is_odd());
        prop_assert_eq!(epsilon_oddify(&once), once);
    }

    #[test]
    fn oddification_is_the_sign_flip_average(p in zpoly(2, 6)) {
        prop_assert_eq!(epsilon_oddify(&p), sign_flip_average(&p));
    }

    #[test]
    fn elliptic_shifts_compose(e in prop::collection::vec((-12i64..=12, 1i64..=4), 4), m1 in -3i64..=3, m2 in -3i64..=3) {
        let e: Vec<Rational> = e.into_iter().map(|(a, b)| rat(a, b)).collect();
        let k = e.len() - 1;
        prop_assert_eq!(elliptic_map(&elliptic_map(&e, m1, k), m2, k), elliptic_map(&e, m1 + m2, k));
        prop_assert_eq!(elliptic_map(&elliptic_map(&e, m1, k), -m1, k), e);
    }
}

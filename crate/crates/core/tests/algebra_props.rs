use dasep_core::algebra::{content_gcd, gcd, rat, BivarPoly, Rational};
use proptest::prelude::*;

fn poly(max_degree: u32) -> impl Strategy<Value = BivarPoly> {
    prop::collection::vec((-9i64..=9, 0..=max_degree, 0..=max_degree), 0..6).prop_map(
        move |terms| {
            BivarPoly::from_terms(
                terms
                    .into_iter()
                    .filter(|&(_, a, b)| a + b <= max_degree)
                    .map(|(c, a, b)| (rat(c, 1), a, b)),
            )
        },
    )
}

fn nonzero_poly(max_degree: u32) -> impl Strategy<Value = BivarPoly> {
    poly(max_degree).prop_filter("nonzero", |p| !p.is_zero())
}

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=12).prop_map(|(a, b)| rat(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms(a in poly(4), b in poly(4), c in poly(4)) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, BivarPoly::zero());
        prop_assert_eq!(&a * &BivarPoly::one(), a.clone());
    }
}

proptest! {
    #[test]
    fn eval_is_a_ring_homomorphism(a in poly(4), b in poly(4), u in rational(), t in rational()) {
        prop_assert_eq!((&a * &b).eval(&u, &t), a.eval(&u, &t) * b.eval(&u, &t));
        prop_assert_eq!((&a + &b).eval(&u, &t), a.eval(&u, &t) + b.eval(&u, &t));
    }

    #[test]
    fn exact_division_inverts_multiplication(a in poly(4), b in nonzero_poly(4)) {
        prop_assert_eq!((&a * &b).exact_div(&b).unwrap(), a);
    }

    #[test]
    fn display_parse_round_trip(a in poly(4)) {
        prop_assert_eq!(a.to_string().parse::<BivarPoly>().unwrap(), a);
    }

    #[test]
    fn content_gcd_divides_and_leaves_coprime_cofactors(
        common in nonzero_poly(2),
        v in prop::collection::vec(nonzero_poly(3), 1..4),
    ) {
        let inputs: Vec<BivarPoly> = v.iter().map(|p| p * &common).collect();
        let g = content_gcd(&inputs);
        prop_assert!(!g.is_zero());
        let cofactors: Vec<BivarPoly> = inputs
            .iter()
            .map(|p| p.exact_div(&g).expect("gcd divides each input"))
            .collect();
        prop_assert!(content_gcd(&cofactors).is_one());
        // The planted factor divides the gcd.
        prop_assert!(g.exact_div(&gcd(&common, &common)).is_ok());
    }
}

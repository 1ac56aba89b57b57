//! Randomized algebraic invariants of the exact layer.

use proptest::prelude::*;

use tropical_bundle::exact::{rat, ExpVec, LaurentPolynomial, MonomialMap, Rat};

fn arb_poly(nvars: usize) -> impl Strategy<Value = LaurentPolynomial> {
    let term = (
        proptest::collection::vec(-5i64..=5, nvars),
        -9i64..=9,
        1i64..=4,
    );
    proptest::collection::vec(term, 0..=6).prop_map(move |terms| {
        let mut p = LaurentPolynomial::zero(nvars);
        for (exp, num, den) in terms {
            let t = LaurentPolynomial::monomial(nvars, ExpVec(exp), rat(num, den));
            p = p.checked_add(&t).unwrap();
        }
        p
    })
}

/// Unimodular substitution maps: products of elementary shear and swap
/// matrices, so the inverse always exists over the integers.
fn arb_unimodular(nvars: usize) -> impl Strategy<Value = MonomialMap> {
    proptest::collection::vec((0usize..3, -2i64..=2), 0..=4).prop_map(move |ops| {
        let mut m = MonomialMap::identity(nvars);
        for (kind, k) in ops {
            let block = match kind {
                0 => [[1, k], [0, 1]],
                1 => [[1, 0], [k, 1]],
                _ => [[0, 1], [1, 0]],
            };
            m = m.compose(&MonomialMap::from_torus_block(block, nvars));
        }
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn addition_commutes(p in arb_poly(2), q in arb_poly(2)) {
        prop_assert_eq!(&p + &q, &q + &p);
    }

    #[test]
    fn multiplication_commutes(p in arb_poly(2), q in arb_poly(2)) {
        prop_assert_eq!(&p * &q, &q * &p);
    }

    #[test]
    fn multiplication_associates(p in arb_poly(2), q in arb_poly(2), r in arb_poly(2)) {
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
    }

    #[test]
    fn multiplication_distributes(p in arb_poly(2), q in arb_poly(2), r in arb_poly(2)) {
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
    }

    #[test]
    fn substitution_is_a_ring_homomorphism(
        p in arb_poly(2),
        q in arb_poly(2),
        m in arb_unimodular(2),
    ) {
        let lhs = m.substitute(&(&p * &q)).unwrap();
        let rhs = &m.substitute(&p).unwrap() * &m.substitute(&q).unwrap();
        prop_assert_eq!(lhs, rhs);
        let lhs_add = m.substitute(&(&p + &q)).unwrap();
        let rhs_add = &m.substitute(&p).unwrap() + &m.substitute(&q).unwrap();
        prop_assert_eq!(lhs_add, rhs_add);
    }

    #[test]
    fn unimodular_substitution_round_trips(p in arb_poly(2), m in arb_unimodular(2)) {
        let inv = m.inverse().unwrap();
        prop_assert_eq!(inv.substitute(&m.substitute(&p).unwrap()).unwrap(), p);
    }

    #[test]
    fn unit_inverse_multiplies_to_one(
        exp in proptest::collection::vec(-5i64..=5, 2),
        num in 1i64..=9,
        den in 1i64..=4,
        sign in proptest::bool::ANY,
    ) {
        let c = if sign { rat(num, den) } else { -rat(num, den) };
        let u = LaurentPolynomial::monomial(2, ExpVec(exp), c);
        let inv = u.unit_inverse().unwrap();
        prop_assert!((&u * &inv).is_one());
    }
}

#[test]
fn parametric_and_instantiated_arithmetic_agree() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    for _ in 0..200 {
        // random parametric polynomials in 7 variables (2 torus + 5 constants)
        let draw_poly = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut p = LaurentPolynomial::zero(7);
            for _ in 0..rng.gen_range(0..5) {
                let exp: Vec<i64> = (0..7).map(|_| rng.gen_range(-3i64..=3)).collect();
                let c = rat(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=4));
                p = p
                    .checked_add(&LaurentPolynomial::monomial(7, ExpVec(exp), c))
                    .unwrap();
            }
            p
        };
        let p = draw_poly(&mut rng);
        let q = draw_poly(&mut rng);
        let values: Vec<Rat> = (0..5)
            .map(|_| loop {
                let n = rng.gen_range(-5i64..=5);
                if n != 0 {
                    break rat(n, rng.gen_range(1i64..=3));
                }
            })
            .collect();
        let eval = |x: &LaurentPolynomial| x.eval_tail_vars(2, &values).unwrap();
        assert_eq!(eval(&(&p * &q)), &eval(&p) * &eval(&q));
        assert_eq!(eval(&(&p + &q)), &eval(&p) + &eval(&q));
    }
}

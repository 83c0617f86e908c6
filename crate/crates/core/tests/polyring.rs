mod common;

use std::collections::HashMap;

use common::*;
use loopsynth::poly::{parse_polynomial, Monomial, PolyMatrix, Polynomial, Rational, VarId};
use loopsynth::recurrence::int_partitions;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn vars() -> Vec<VarId> {
    ["x", "y", "z"].into_iter().map(VarId::program).collect()
}

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=9).prop_map(|(n, d)| Rational::new(n, d))
}

fn polynomial() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((rational(), 0u32..=3, 0u32..=3, 0u32..=2), 0..6).prop_map(|terms| {
        let v = vars();
        terms.into_iter().fold(Polynomial::zero(), |acc, (c, ex, ey, ez)| {
            let m = Monomial::from_pairs([(v[0].clone(), ex), (v[1].clone(), ey), (v[2].clone(), ez)]);
            &acc + &Polynomial::term(c, m)
        })
    })
}

fn resolve(name: &str) -> VarId {
    VarId::program(name)
}

proptest! {
    #[test]
    fn ring_laws(p in polynomial(), q in polynomial(), r in polynomial()) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert_eq!(&p - &p, Polynomial::zero());
        prop_assert_eq!(&p * &Polynomial::one(), p.clone());
        prop_assert!((&p * &Polynomial::zero()).is_zero());
    }

    #[test]
    fn no_zero_coefficients_stored(p in polynomial(), q in polynomial()) {
        for (m, c) in (&p * &q).terms().chain((&p - &q).terms()) {
            prop_assert!(!c.is_zero(), "zero coefficient on {m:?}");
        }
    }

    #[test]
    fn substitution_is_a_homomorphism(p in polynomial(), q in polynomial(), s in polynomial()) {
        let x = VarId::program("x");
        let bind: HashMap<VarId, Polynomial> = [(x, s)].into_iter().collect();
        prop_assert_eq!((&p * &q).substitute(&bind), &p.substitute(&bind) * &q.substitute(&bind));
        prop_assert_eq!((&p + &q).substitute(&bind), &p.substitute(&bind) + &q.substitute(&bind));
    }

    #[test]
    fn collect_by_round_trip(p in polynomial(), mask in 0u8..8) {
        let v = vars();
        let by: Vec<VarId> = (0..3).filter(|i| mask & (1 << i) != 0).map(|i| v[i].clone()).collect();
        let parts = p.collect_by(&by);
        prop_assert_eq!(Polynomial::from_collected(&parts), p);
        for c in parts.values() {
            prop_assert!(by.iter().all(|b| !c.contains_var(b)));
        }
    }

    #[test]
    fn print_then_parse(p in polynomial()) {
        let back = parse_polynomial(&p.to_string(), resolve).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn rational_text_round_trip(r in rational()) {
        let back: Rational = r.to_string().parse().unwrap();
        prop_assert_eq!(back.denom().sign(), num_sign_plus());
        prop_assert_eq!(back, r);
    }

    #[test]
    fn sign_normalized_has_positive_leading_coefficient(p in polynomial()) {
        let n = p.sign_normalized();
        if let Some((_, c)) = n.leading_term() {
            prop_assert!(!c.is_negative());
        }
        prop_assert!(n == p || n == -&p);
    }
}

fn num_sign_plus() -> num_bigint::Sign {
    num_bigint::Sign::Plus
}

#[test]
fn double_root_square() {
    let p = parse_polynomial("(w - w1)*(w - w1)", resolve).unwrap();
    assert_eq!(p, parse_polynomial("w^2 - 2*w1*w + w1^2", resolve).unwrap());
}

#[test]
fn cancellation() {
    let p = parse_polynomial("(x - 2y) + 2y", resolve).unwrap();
    assert_eq!(p, Polynomial::var(VarId::program("x")));
}

#[test]
fn char_poly_matches_cofactor_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let z = VarId::program("z");
    for i in 0..200 {
        let m = random_rational_matrix(&mut rng, 1 + i % 5);
        assert_eq!(m.char_poly(&z).unwrap(), cofactor_char_poly(&m, &z));
    }
    let sym = PolyMatrix::from_fn(3, 3, |i, j| Polynomial::var(VarId::program(format!("b{i}{j}"))));
    assert_eq!(sym.char_poly(&z).unwrap(), cofactor_char_poly(&sym, &z));
}

#[test]
fn fibonacci_char_poly() {
    let m = PolyMatrix::from_rational_rows(&[vec![r(1), r(1)], vec![r(1), r(0)]]).unwrap();
    let z = VarId::program("z");
    assert_eq!(m.char_poly(&z).unwrap(), parse_polynomial("z^2 - z - 1", resolve).unwrap());
}

#[test]
fn partitions_match_brute_force() {
    for s in 1..=12u32 {
        let mut ours: Vec<Vec<u32>> = int_partitions(s as usize).unwrap().map(|p| p.parts().to_vec()).collect();
        let mut brute = brute_force_partitions(s);
        ours.sort();
        brute.sort();
        assert_eq!(ours, brute, "s = {s}");
        assert_eq!(ours.len(), partition_count(s));
    }
}

#[test]
fn rationals_stay_reduced() {
    let x = Rational::new(6, -4);
    assert_eq!(x.to_string(), "-3/2");
    assert_eq!((&x + &Rational::new(3, 2)), Rational::zero());
    assert!(Rational::new(4, 2).is_integer());
}

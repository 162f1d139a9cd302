use std::time::Duration;

use kraus_core::curve::{TwoTorsion, WeierstrassModel};
use kraus_core::frey::{check_solution, frey_curve, property_check};
use kraus_core::localred::conductor;
use kraus_core::nf::{factor_rational_prime_u64, make_field_i64, rationals, FieldExt};
use kraus_core::Error;
use proptest::prelude::*;

fn budget() -> Duration {
    Duration::from_secs(10)
}

/// In Q(2^{1/p}) the triple (1, 1, −θ) solves x^p + y^p + z^p = 0.
#[test]
fn radical_witnesses() {
    for p in [3u64, 5, 7] {
        let mut poly = vec![0i64; p as usize + 1];
        poly[0] = -2;
        poly[p as usize] = 1;
        let k = make_field_i64(&poly).unwrap();
        let theta = k.generator();
        let w = check_solution(&k.one(), &k.one(), &-&theta, p).unwrap();
        assert!(!w.trivial);
        let e = frey_curve(&w).unwrap();
        assert_eq!(e.two_torsion_structure(1_000_000).unwrap().structure, TwoTorsion::Full);
        let p2 = &factor_rational_prime_u64(&k, 2).unwrap()[0];
        assert_eq!(p2.e() as u64, p, "2 is totally ramified");
        let r = property_check(&e, p2, budget()).unwrap();
        // Y² = X(X − 1)(X + 1) has j = 1728: potentially good everywhere
        assert!(r.full_two_torsion && r.potentially_good_away);
        assert!(!r.potentially_multiplicative_at_p);
        assert_eq!(e.j_invariant(), k.from_int(1728));
    }
}

#[test]
fn rejected_witnesses() {
    let q = rationals();
    let (one, two) = (q.one(), q.from_int(2));
    assert_eq!(check_solution(&one, &one, &two, 3).unwrap_err(), Error::NotASolution);
    assert_eq!(check_solution(&one, &-&one, &q.zero(), 9).unwrap_err(), Error::BadExponent(9));
    assert_eq!(check_solution(&one, &-&one, &q.zero(), 2).unwrap_err(), Error::BadExponent(2));
    let w = check_solution(&one, &-&one, &q.zero(), 11).unwrap();
    assert_eq!(frey_curve(&w).unwrap_err(), Error::TrivialWitness);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    // Y² = X(X − a)(X + b) with a + b + c = 0: bad primes divide 2abc.
    #[test]
    fn legendre_shape(a in 1i64..60, b in 1i64..60) {
        prop_assume!(a != b);
        let q = rationals();
        let e = WeierstrassModel::split_form(&q.zero(), &q.from_int(a), &q.from_int(-b)).unwrap();
        let abc = 2 * a * b * (a + b);
        for d in conductor(&e, budget()).unwrap() {
            prop_assert_eq!(abc % d.prime.residue_char() as i64, 0);
        }
        let p2 = &factor_rational_prime_u64(&q, 2).unwrap()[0];
        prop_assert!(property_check(&e, p2, budget()).unwrap().full_two_torsion);
    }
}

use kraus_core::audit::builtin_field;
use kraus_core::nf::{
    factor_rational_prime_u64, make_field_i64, roots_in_field, sqrt_in_field, Field, FieldElement,
    FieldExt, Valuation,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn sqrt2() -> Field {
    builtin_field("Qsqrt2").unwrap()
}

fn cube_root_2() -> Field {
    make_field_i64(&[-2, 0, 0, 1]).unwrap()
}

fn zeta16_plus() -> Field {
    builtin_field("Zeta16plus").unwrap()
}

fn elem(k: &Field, c: &[i64], den: i64) -> FieldElement {
    k.from_coords_i64(c).div_int(&BigInt::from(den))
}

fn coords(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-50i64..=50, n)
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_laws_in_zeta16_plus(a in coords(4), b in coords(4), c in coords(4), d in 1i64..20) {
        let k = zeta16_plus();
        let (x, y, z) = (elem(&k, &a, d), k.from_coords_i64(&b), k.from_coords_i64(&c));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        if !x.is_zero() {
            prop_assert!((&x * &x.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn norm_multiplicative_trace_additive(a in coords(3), b in coords(3)) {
        let k = cube_root_2();
        let (x, y) = (k.from_coords_i64(&a), k.from_coords_i64(&b));
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        prop_assert_eq!((&x + &y).trace(), x.trace() + y.trace());
    }

    #[test]
    fn sqrt2_norm_matches_closed_form(a in -1000i64..1000, b in -1000i64..1000) {
        let k = sqrt2();
        let x = k.from_coords_i64(&[a, b]);
        prop_assert_eq!(x.norm(), q(a * a - 2 * b * b));
        prop_assert_eq!(x.trace(), q(2 * a));
    }

    #[test]
    fn cube_root_norm_matches_closed_form(a in -60i64..60, b in -60i64..60, c in -60i64..60) {
        // N(a + bθ + cθ²) = a³ + 2b³ + 4c³ − 6abc
        let k = cube_root_2();
        let x = k.from_coords_i64(&[a, b, c]);
        prop_assert_eq!(x.norm(), q(a.pow(3) + 2 * b.pow(3) + 4 * c.pow(3) - 6 * a * b * c));
    }

    #[test]
    fn valuation_agrees_with_repeated_division(a in coords(4), b in coords(4), p in prop::sample::select(vec![2u64, 3, 7, 17])) {
        let k = zeta16_plus();
        let x = k.from_coords_i64(&a);
        let y = k.from_coords_i64(&b);
        for pr in factor_rational_prime_u64(&k, p).unwrap() {
            prop_assert_eq!(pr.valuation(&x), pr.valuation_by_division(&x));
            if !x.is_zero() && !y.is_zero() {
                let vxy = pr.valuation(&(&x * &y)).unwrap();
                prop_assert_eq!(vxy, pr.valuation(&x).unwrap() + pr.valuation(&y).unwrap());
            }
        }
    }

    #[test]
    fn square_roots_of_squares_are_found(a in coords(2), d in 1i64..30) {
        let k = sqrt2();
        let y = elem(&k, &a, d);
        let x = y.square();
        match sqrt_in_field(&x, 1_000_000).unwrap().root() {
            Some(r) => prop_assert_eq!(r.square(), x),
            None => prop_assert!(false, "no root of {}", x),
        }
    }

    #[test]
    fn cubic_roots_found(r1 in -20i64..20, r2 in coords(3), r3 in coords(3)) {
        let k = cube_root_2();
        let rs = [k.from_int(r1), k.from_coords_i64(&r2), k.from_coords_i64(&r3)];
        prop_assume!(rs[0] != rs[1] && rs[1] != rs[2] && rs[0] != rs[2]);
        let one = k.one();
        // expand (X − r1)(X − r2)(X − r3)
        let mut coeffs = vec![one.clone()];
        for r in &rs {
            let mut next = vec![k.zero(); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] = &next[i + 1] + c;
                next[i] = &next[i] - &(c * r);
            }
            coeffs = next;
        }
        let found = roots_in_field(&coeffs, 1_000_000).unwrap();
        prop_assert!(found.complete);
        for r in &rs {
            prop_assert!(found.roots.contains(r));
        }
        prop_assert_eq!(found.roots.len(), 3);
    }
}

#[test]
fn prime_decomposition_degrees_sum_to_n() {
    for k in [sqrt2(), cube_root_2(), zeta16_plus(), make_field_i64(&[1, 1, 1]).unwrap()] {
        for p in [2u64, 3, 5, 7, 11, 13, 17, 31, 97] {
            let ps = factor_rational_prime_u64(&k, p).unwrap();
            let total: u32 = ps.iter().map(|pr| pr.e() * pr.f()).sum();
            assert_eq!(total as usize, k.degree(), "p = {p} in {}", k.poly_string());
            for pr in &ps {
                assert_eq!(pr.valuation(&k.from_int(p as i64)), Valuation::Finite(pr.e() as i64));
                assert_eq!(pr.valuation(pr.uniformizer()), Valuation::Finite(1));
            }
        }
    }
}

#[test]
fn known_splitting() {
    // 7 splits in Q(√2), 3 is inert, 2 ramifies
    let k = sqrt2();
    let ef = |p| -> Vec<(u32, u32)> {
        factor_rational_prime_u64(&k, p).unwrap().iter().map(|x| (x.e(), x.f())).collect()
    };
    assert_eq!(ef(7), vec![(1, 1), (1, 1)]);
    assert_eq!(ef(3), vec![(1, 2)]);
    assert_eq!(ef(2), vec![(2, 1)]);
    // 17 splits completely in Q(ζ16)⁺, 3 is inert
    let z = zeta16_plus();
    assert_eq!(factor_rational_prime_u64(&z, 17).unwrap().len(), 4);
    assert_eq!(factor_rational_prime_u64(&z, 3).unwrap()[0].f(), 4);
}

#[test]
fn rootless_cubic() {
    let k = cube_root_2();
    let f = [k.from_int(-3), k.zero(), k.zero(), k.one()];
    let found = roots_in_field(&f, 1_000_000).unwrap();
    assert!(found.roots.is_empty(), "{:?}", found.roots);
}

#[test]
fn non_squares_are_rejected() {
    let k = sqrt2();
    for c in [[6, 0], [3, 0], [1, 1], [-1, 0]] {
        assert!(sqrt_in_field(&k.from_coords_i64(&c), 1_000_000).unwrap().root().is_none());
    }
    let r = sqrt_in_field(&k.from_coords_i64(&[3, 2]), 1_000).unwrap();
    let r = r.root().unwrap();
    assert!(*r == k.from_coords_i64(&[1, 1]) || *r == k.from_coords_i64(&[-1, -1]));
}

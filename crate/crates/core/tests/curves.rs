use kraus_core::audit::builtin_field;
use kraus_core::curve::{TwoTorsion, WeierstrassModel};
use kraus_core::nf::{factor_rational_prime_u64, rationals, Field, FieldElement, FieldExt};
use kraus_core::Error;
use proptest::prelude::*;

fn k2() -> Field {
    builtin_field("Qsqrt2").unwrap()
}

fn el(k: &Field, c: &[i64]) -> FieldElement {
    k.from_coords_i64(c)
}

fn pair(h: i64) -> impl Strategy<Value = [i64; 2]> {
    prop::array::uniform2(-h..=h)
}

fn ainvs() -> impl Strategy<Value = [[i64; 2]; 5]> {
    prop::array::uniform5(pair(20))
}

fn model(k: &Field, a: &[[i64; 2]; 5]) -> Option<WeierstrassModel> {
    WeierstrassModel::new(a.map(|c| el(k, &c))).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn c4_c6_discriminant_identity(a in ainvs()) {
        let k = k2();
        let Some(e) = model(&k, &a) else { return Ok(()) };
        let inv = e.invariants();
        prop_assert_eq!(&inv.c4.pow(3) - &inv.c6.square(), &k.from_int(1728) * &inv.discriminant);
        prop_assert_eq!(&inv.j * &inv.discriminant, inv.c4.pow(3));
    }

    #[test]
    fn coordinate_change_scales_discriminant(a in ainvs(), u in pair(5), rst in prop::array::uniform3(pair(9))) {
        let k = k2();
        let Some(e) = model(&k, &a) else { return Ok(()) };
        let u = el(&k, &u);
        prop_assume!(!u.is_zero());
        let [r, s, t] = rst.map(|c| el(&k, &c));
        let m = e.transform(&u, &r, &s, &t).unwrap();
        prop_assert_eq!(m.j_invariant(), e.j_invariant());
        prop_assert_eq!(&m.discriminant() * &u.pow(12), e.discriminant());
        prop_assert_eq!(&m.invariants().c4 * &u.pow(4), e.invariants().c4);
    }

    #[test]
    fn twists_keep_j(a in ainvs(), d in pair(30)) {
        let k = k2();
        let Some(e) = model(&k, &a) else { return Ok(()) };
        let d = el(&k, &d);
        prop_assume!(!d.is_zero());
        let t = e.quadratic_twist(&d).unwrap();
        prop_assert_eq!(t.j_invariant(), e.j_invariant());
        // twisting by d³ multiplies Δ by d⁶
        prop_assert_eq!(t.discriminant(), &e.discriminant() * &d.pow(6));
    }

    #[test]
    fn split_forms_have_full_two_torsion(r in prop::array::uniform3(pair(15))) {
        let k = k2();
        let [e1, e2, e3] = r.map(|c| el(&k, &c));
        let Ok(e) = WeierstrassModel::split_form(&e1, &e2, &e3) else { return Ok(()) };
        let tt = e.two_torsion_structure(1_000_000).unwrap();
        prop_assert_eq!(tt.structure, TwoTorsion::Full);
        for x in [e1, e2, e3] {
            prop_assert!(tt.roots.contains(&x));
        }
    }

    #[test]
    fn point_counts_match_naive_enumeration(a in prop::array::uniform5(-9i64..=9), p in prop::sample::select(vec![5u64, 7, 11, 13, 29, 31])) {
        let q = rationals();
        let Ok(e) = WeierstrassModel::from_i64(&q, a) else { return Ok(()) };
        let prime = &factor_rational_prime_u64(&q, p).unwrap()[0];
        match e.count_points_at(prime) {
            Ok(pc) => {
                let pi = p as i64;
                let m = |x: i64| x.rem_euclid(pi);
                let c = a;
                let mut n = 1;
                for x in 0..pi {
                    for y in 0..pi {
                        let lhs = m(y * y + c[0] * x * y + c[2] * y);
                        let rhs = m(x * x * x + c[1] * x * x + c[3] * x + c[4]);
                        n += (lhs == rhs) as i64;
                    }
                }
                prop_assert_eq!(pc.points as i64, n);
                prop_assert!(pc.a * pc.a <= 4 * pi);
            }
            Err(Error::BadReduction) => prop_assert!(prime.divides(&e.discriminant())),
            Err(other) => prop_assert!(false, "{}", other),
        }
    }
}

#[test]
fn singular_models_are_rejected() {
    let q = rationals();
    assert_eq!(WeierstrassModel::from_i64(&q, [0, 0, 0, 0, 0]).unwrap_err(), Error::Singular);
    assert_eq!(WeierstrassModel::from_i64(&q, [0, -2, 0, 1, 0]).unwrap_err(), Error::Singular);
    let e = WeierstrassModel::from_i64(&q, [0, 0, 0, 1, 0]).unwrap();
    assert_eq!(e.quadratic_twist(&q.zero()).unwrap_err(), Error::ZeroTwist);
}

#[test]
fn known_invariants() {
    // 11a1: Δ = −161051, j = −122023936/161051
    let q = rationals();
    let e = WeierstrassModel::from_i64(&q, [0, -1, 1, -10, -20]).unwrap();
    assert_eq!(e.discriminant(), q.from_int(-161051));
    assert_eq!(
        e.j_invariant(),
        &q.from_int(-122023936) * &q.from_int(161051).inv().unwrap()
    );
    let tt = e.two_torsion_structure(1_000_000).unwrap();
    assert_eq!(tt.structure, TwoTorsion::Trivial);
    assert!(tt.conclusive);
    // y² = x³ − x over Q(√2): Δ = 64
    let k = k2();
    let e = WeierstrassModel::from_i64(&k, [0, 0, 0, -1, 0]).unwrap();
    assert_eq!(e.discriminant(), k.from_int(64));
}

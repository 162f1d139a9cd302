use std::time::Duration;

use kraus_core::audit::builtin_field;
use kraus_core::kraus::{certify_conductor_p, normalize, sort_triple, twisted_model, Parity, Step, Verdict};
use kraus_core::localred::{split_by_node_tangents, tate_reduce, SplitState};
use kraus_core::nf::{factor_rational_prime_u64, rationals, Field, FieldElement, FieldExt, PrimeIdeal};
use kraus_core::Error;
use proptest::prelude::*;

fn budget() -> Duration {
    Duration::from_secs(10)
}

fn above_2(k: &Field) -> PrimeIdeal {
    factor_rational_prime_u64(k, 2).unwrap()[0].clone()
}

fn passed(steps: &[kraus_core::kraus::StepRecord]) -> Vec<(Step, bool)> {
    steps.iter().map(|s| (s.step, s.passed)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn scaling_the_triple_changes_nothing(a in -300i64..300, b in -300i64..300, mu in -40i64..40) {
        prop_assume!(a != 0 && b != 0 && a + b != 0 && mu != 0);
        let q = rationals();
        let p = above_2(&q);
        let m = q.from_int(mu);
        let (x, y, z) = (q.from_int(a), q.from_int(b), q.from_int(-a - b));
        let base = normalize(&x, &y, &z, &p, budget());
        let scaled = normalize(&(&x * &m), &(&y * &m), &(&z * &m), &p, budget());
        match (base, scaled) {
            (Ok(c1), Ok(c2)) => {
                prop_assert_eq!(&c1.lam, &c2.lam);
                prop_assert_eq!(&c1.verdict, &c2.verdict);
                prop_assert_eq!(passed(&c1.steps), passed(&c2.steps));
            }
            (Err(e1), Err(e2)) => prop_assert_eq!(e1, e2),
            (r1, r2) => prop_assert!(false, "{:?} vs {:?}", r1.is_ok(), r2.is_ok()),
        }
    }

    #[test]
    fn no_full_certificate_over_q(a in -2000i64..2000, b in -2000i64..2000) {
        prop_assume!(a != 0 && b != 0 && a + b != 0);
        let q = rationals();
        let p = above_2(&q);
        let c = normalize(&q.from_int(a), &q.from_int(b), &q.from_int(-a - b), &p, budget()).unwrap();
        prop_assert!(c.verdict != Verdict::Full, "full verdict for ({}, {})", a, b);
    }

    #[test]
    fn sorted_valuations_are_ordered(a in prop::array::uniform2(-64i64..64), b in prop::array::uniform2(-64i64..64)) {
        let k = builtin_field("Qsqrt2").unwrap();
        let p = above_2(&k);
        let (x, y) = (k.from_coords_i64(&a), k.from_coords_i64(&b));
        let z = -&(&x + &y);
        prop_assume!(!x.is_zero() && !y.is_zero() && !z.is_zero());
        let s = sort_triple(&x, &y, &z, &p).unwrap();
        let [va, vb, vc] = s.valuations.map(|v| v.unwrap());
        prop_assert!(vb >= vc && vc >= va);
        // a transposition of the input flips the parity, a rotation keeps it
        let rot = sort_triple(&y, &z, &x, &p).unwrap();
        prop_assert_eq!(rot.valuations, s.valuations);
        let distinct = va != vb && vb != vc && va != vc;
        if distinct {
            let swapped = sort_triple(&y, &x, &z, &p).unwrap();
            prop_assert_eq!(rot.parity, s.parity);
            prop_assert_ne!(swapped.parity, s.parity);
        }
    }

    #[test]
    fn j_negative_iff_t_exceeds_four_e(t in 1u32..24, u in prop::array::uniform2(-9i64..9)) {
        let k = builtin_field("Qsqrt2").unwrap();
        let p = above_2(&k);
        // λ = π^t · (odd unit-ish factor)
        let unit = &k.from_coords_i64(&u).scale_int(&2.into()) + &k.one();
        let lam = &p.uniformizer().pow(t) * &unit;
        prop_assume!(p.valuation(&lam).unwrap() == t as i64);
        let c = certify_conductor_p(&lam, &p, budget()).unwrap();
        let j_neg = c.steps.iter().find(|s| s.step == Step::JNegative).unwrap().passed;
        prop_assert_eq!(j_neg, c.t > 4 * c.e2);
        prop_assert_eq!(c.v_j < 0, c.t > 4 * c.e2);
        // the −c4/c6 test and the node tangents agree
        let red = tate_reduce(&c.model, &p).unwrap().data;
        if red.kodaira.is_multiplicative() {
            let tangents = split_by_node_tangents(&c.model, &p).unwrap();
            prop_assert_eq!(tangents == SplitState::Split, c.split_at_p);
        }
    }
}

#[test]
fn one_one_minus_two_fails_with_named_step() {
    let q = rationals();
    let p = above_2(&q);
    let c = normalize(&q.from_int(1), &q.from_int(1), &q.from_int(-2), &p, budget()).unwrap();
    match &c.verdict {
        Verdict::Failed { step, .. } => assert_eq!(*step, Step::PotentiallyMultiplicativeAtP),
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(c.permutation_parity, Some(Parity::Odd));
    assert_eq!(c.steps.len(), 7);
}

#[test]
fn sixteen_root_two_is_local_only() {
    let k = builtin_field("Qsqrt2").unwrap();
    let p = above_2(&k);
    let lam = k.from_coords_i64(&[0, 16]);
    let c = certify_conductor_p(&lam, &p, budget()).unwrap();
    assert!(matches!(c.verdict, Verdict::LocalOnly { .. }));
    let json = serde_json::to_value(&c).unwrap();
    for key in ["prime", "lam", "model", "t", "e2", "v_j", "hensel_squares", "split_at_p", "offp_reduction", "steps", "verdict"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert_eq!(json["verdict"]["verdict"], "local-only");
    assert_eq!(json["t"], 9);
}

#[test]
fn degenerate_inputs() {
    let q = rationals();
    let p = above_2(&q);
    let one = q.one();
    assert_eq!(twisted_model(&q.zero()).unwrap_err(), Error::SingularParameter);
    assert_eq!(twisted_model(&one).unwrap_err(), Error::SingularParameter);
    assert!(twisted_model(&q.from_int(-1)).is_ok());
    assert_eq!(
        normalize(&one, &one, &one, &p, budget()).unwrap_err(),
        Error::NotZeroSum
    );
    let k = builtin_field("Qsqrt2").unwrap();
    let x: FieldElement = k.one();
    assert_eq!(
        sort_triple(&one, &x, &one, &p).unwrap_err(),
        Error::FieldMismatch
    );
}

//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use kraus_core::audit::{build_real_cyclotomic, builtin_field, check_theorem1_hypotheses, registry_lookup_field, CheckStatus};
use kraus_core::curve::WeierstrassModel;
use kraus_core::kraus::{certify_conductor_p, Verdict};
use kraus_core::localred::{tate_reduce, Kodaira, SplitState};
use kraus_core::nf::{
    factor_rational_prime_u64, is_local_square, rationals, Field, FieldElement,
    FieldExt, PrimeIdeal, ResidueElement,
};
use kraus_core::quadform::{narrow_class_number_with_order, EnumerationOrder};
use kraus_core::scout::{
    hasse_contradiction_level, search_conductor_target, trace_congruence_scan, ConductorGoal,
    SearchBox, SearchOptions, TorsionFilter,
};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEARCH_JOBS: usize = 4;
/// Runtime ceilings, in seconds.
const LIMIT_CONDUCTOR_2_OVER_Q: u64 = 300;
const LIMIT_SQRT2_BOX: u64 = 600;
const LIMIT_TOWER: u64 = 60;
const IDENTITY_MODELS_PER_FIELD: usize = 10_000;
const TWISTS_PER_FIELD: usize = 100;
const CHANGES_PER_CURVE: usize = 50;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn opts() -> SearchOptions {
    SearchOptions {
        jobs: SEARCH_JOBS,
        ..SearchOptions::default()
    }
}

fn prime(k: &Field, p: u64, i: usize) -> PrimeIdeal {
    factor_rational_prime_u64(k, p).unwrap()[i].clone()
}

fn fields() -> Vec<(&'static str, Field)> {
    vec![
        ("Q", rationals()),
        ("Qsqrt2", builtin_field("Qsqrt2").unwrap()),
        ("Zeta16plus", builtin_field("Zeta16plus").unwrap()),
    ]
}

fn random_element(k: &Field, rng: &mut ChaCha8Rng, h: i64) -> FieldElement {
    let c: Vec<i64> = (0..k.degree()).map(|_| rng.gen_range(-h..=h)).collect();
    k.from_coords_i64(&c)
}

fn criterion_1() -> Outcome {
    let k = rationals();
    let bx = SearchBox::new(k.clone(), 200, TorsionFilter::Any);
    let goal = ConductorGoal::prime(prime(&k, 2, 0));
    let start = Instant::now();
    let r = search_conductor_target(&bx, &goal, opts()).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    ensure(r.hits.is_empty() && r.unresolved.is_empty(), || {
        format!("{} hits, {} unresolved", r.hits.len(), r.unresolved.len())
    })?;
    ensure(secs <= LIMIT_CONDUCTOR_2_OVER_Q as f64, || format!("took {secs:.1}s"))?;
    Ok(format!(
        "0 hits, 0 unresolved; {} models classified in {secs:.2}s (limit {LIMIT_CONDUCTOR_2_OVER_Q}s, {SEARCH_JOBS} workers)",
        r.totals.classified
    ))
}

fn criterion_2() -> Outcome {
    let k = builtin_field("Qsqrt2").unwrap();
    let bx = SearchBox::new(k.clone(), 30, TorsionFilter::Full);
    let goal = ConductorGoal::prime(prime(&k, 2, 0));
    let start = Instant::now();
    let r = search_conductor_target(&bx, &goal, opts()).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    ensure(r.hits.is_empty() && r.unresolved.is_empty(), || {
        format!("{} hits, {} unresolved", r.hits.len(), r.unresolved.len())
    })?;
    ensure(secs <= LIMIT_SQRT2_BOX as f64, || format!("took {secs:.1}s"))?;
    Ok(format!(
        "0 hits among {} full-2-torsion models of {} enumerated, {secs:.2}s (limit {LIMIT_SQRT2_BOX}s)",
        r.totals.filtered, r.totals.enumerated
    ))
}

fn criterion_3() -> Outcome {
    let k = rationals();
    let bx = SearchBox::new(k.clone(), 3, TorsionFilter::Full);
    let goal = ConductorGoal::rational(&k, 24).map_err(|e| e.to_string())?;
    let r = search_conductor_target(&bx, &goal, opts()).map_err(|e| e.to_string())?;
    let hit = r
        .hits
        .iter()
        .find(|h| h.point.a == vec![2] && h.point.b == vec![-3])
        .ok_or_else(|| format!("(2, -3) not among {} hits", r.hits.len()))?;
    let f = |p: u64| hit.conductor.iter().find(|c| c.p == p).map(|c| c.f_exponent);
    ensure(f(2) == Some(3) && f(3) == Some(1) && hit.verified, || {
        format!("exponents {:?}, verified {}", hit.conductor, hit.verified)
    })?;
    Ok(format!("(A, B) = (2, -3) found with f2 = 3, f3 = 1; {} hit(s) in the H = 3 box", r.hits.len()))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    let mut twists = 0;
    for (name, k) in fields() {
        let mut done = 0;
        while done < IDENTITY_MODELS_PER_FIELD {
            let a: [FieldElement; 5] = std::array::from_fn(|_| random_element(&k, &mut rng, 9));
            let Ok(e) = WeierstrassModel::new(a) else { continue };
            let inv = e.invariants();
            let lhs = &inv.c4.pow(3) - &inv.c6.square();
            let rhs = &k.from_int(1728) * &inv.discriminant;
            ensure(lhs == rhs, || format!("c4^3 - c6^2 != 1728 disc over {name} for {e:?}"))?;
            done += 1;
        }
        checked += done;
        let mut done = 0;
        while done < TWISTS_PER_FIELD {
            let a: [FieldElement; 5] = std::array::from_fn(|_| random_element(&k, &mut rng, 9));
            let Ok(e) = WeierstrassModel::new(a) else { continue };
            let d = random_element(&k, &mut rng, 20);
            if d.is_zero() {
                continue;
            }
            let t = e.quadratic_twist(&d).map_err(|x| x.to_string())?;
            ensure(t.j_invariant() == e.j_invariant(), || format!("j changed under twist by {d} over {name}"))?;
            done += 1;
        }
        twists += done;
    }
    Ok(format!("{checked} models satisfy c4^3 - c6^2 = 1728 disc; j fixed under {twists} twists"))
}

/// Canonical π-adic digit strings of the squares of all residues mod P^n.
fn square_classes(p: &PrimeIdeal, n: usize) -> HashSet<Vec<ResidueElement>> {
    let kf = p.residue_field();
    let digits: Vec<ResidueElement> = kf.elements().collect();
    let mut reps = vec![p.field().zero()];
    let mut pi_pow = p.field().one();
    for _ in 0..n {
        let mut next = Vec::with_capacity(reps.len() * digits.len());
        for r in &reps {
            for d in &digits {
                next.push(r + &(&p.lift(d) * &pi_pow));
            }
        }
        reps = next;
        pi_pow = &pi_pow * p.uniformizer();
    }
    reps.iter().map(|w| p.digits(&w.square(), n).unwrap()).collect()
}

/// Brute force: x of even valuation 2m is a square iff x/π^{2m} is a square
/// modulo P^n (n = 2e + 1 above 2, n = 1 otherwise).
fn brute_force_square(x: &FieldElement, p: &PrimeIdeal, classes: &HashSet<Vec<ResidueElement>>, n: usize) -> bool {
    let v = p.valuation(x).unwrap();
    if v % 2 != 0 {
        return false;
    }
    let u = x * &p.uniformizer_pow(-v);
    classes.contains(&p.digits(&u, n).unwrap())
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut total = 0;
    let mut squares = 0;
    for (name, k) in fields() {
        let mut primes = vec![prime(&k, 2, 0)];
        primes.push(prime(&k, 3, 0));
        primes.push(prime(&k, 7, 0));
        for p in primes {
            let n = if p.residue_char() == 2 { 2 * p.e() as usize + 1 } else { 1 };
            let classes = square_classes(&p, n);
            let mut samples: Vec<FieldElement> = (0..300).map(|_| random_element(&k, &mut rng, 40)).collect();
            // squares times small elements exercise the deep Hensel cases
            for _ in 0..100 {
                let w = random_element(&k, &mut rng, 12);
                let s = random_element(&k, &mut rng, 3);
                samples.push(&w.square() * &(&s.square() * &k.from_int(1 + 8 * rng.gen_range(0..4))));
            }
            for x in samples.into_iter().filter(|x| !x.is_zero()) {
                let fast = is_local_square(&x, &p).map_err(|e| e.to_string())?.is_square;
                let slow = brute_force_square(&x, &p, &classes, n);
                ensure(fast == slow, || format!("{name} at {p}: {x} fast={fast} brute={slow}"))?;
                total += 1;
                squares += fast as usize;
            }
        }
    }
    Ok(format!("{total}/{total} agree ({squares} squares) at 2, 3, 7 over Q, Q(sqrt2), Q(zeta16)+"))
}

fn criterion_6() -> Outcome {
    let k = builtin_field("Qsqrt2").unwrap();
    let p = prime(&k, 2, 0);
    let lam = k.from_coords_i64(&[0, 16]);
    let c = certify_conductor_p(&lam, &p, Duration::from_secs(10)).map_err(|e| e.to_string())?;
    ensure(c.t == 9 && 4 * c.e2 == 8 && c.t > 4 * c.e2, || format!("t = {}, e2 = {}", c.t, c.e2))?;
    ensure(c.hensel_squares.len() == 4 && c.hensel_squares.iter().all(|h| h.square), || {
        format!("Hensel factors {:?}", c.hensel_squares.iter().map(|h| h.square).collect::<Vec<_>>())
    })?;
    ensure(c.split_at_p, || "not split at P".into())?;
    let norm = (&lam - &k.one()).norm();
    ensure(norm == num_rational::BigRational::from_integer(BigInt::from(-511)), || format!("N(lam - 1) = {norm}"))?;
    let mut bad: Vec<u64> = c.offp_reduction.iter().filter(|o| !o.good).map(|o| o.prime.residue_char()).collect();
    bad.sort();
    ensure(bad == vec![7, 73], || format!("off-P failures above {bad:?}"))?;
    ensure(matches!(c.verdict, Verdict::LocalOnly { .. }), || format!("verdict {:?}", c.verdict))?;
    Ok("t = 9 > 8, four Hensel squares, split at P, bad only above 7 and 73, verdict local-only".into())
}

/// #E(F_q) for prime q by counting affine solutions directly.
fn naive_count(a: [i64; 5], q: i64) -> i64 {
    let m = |x: i64| x.rem_euclid(q);
    let mut n = 1;
    for x in 0..q {
        let rhs = m(m(m(x * x) * x) + m(a[1] * m(x * x)) + m(a[3] * x) + a[4]);
        for y in 0..q {
            if m(m(y * y) + m(a[0] * m(x * y)) + m(a[2] * y)) == rhs {
                n += 1;
            }
        }
    }
    n
}

fn criterion_7() -> Outcome {
    let a = [0, -1, 1, -10, -20];
    let e = WeierstrassModel::from_i64(&rationals(), a).unwrap();
    let scan = trace_congruence_scan(&e, 5, 500).map_err(|x| x.to_string())?;
    for c in &scan.per_prime {
        let q = c.norm as i64;
        let naive = q + 1 - naive_count(a, q);
        ensure(naive == c.a, || format!("a_{q}: scan {} vs naive {naive}", c.a))?;
        ensure((1 + q - naive) % 5 == 0, || format!("a_{q} = {naive} not 1 + q mod 5"))?;
    }
    ensure(scan.per_prime.iter().all(|c| c.norm != 11), || "bad prime 11 included".into())?;
    let mut levels = 0;
    for l in [2u64, 3, 5] {
        for nq in 2..=10_000u64 {
            let n = hasse_contradiction_level(nq, l);
            let mut bound = (4.0 * nq as f64).sqrt() as i64;
            while bound * bound > 4 * nq as i64 {
                bound -= 1;
            }
            while (bound + 1) * (bound + 1) <= 4 * nq as i64 {
                bound += 1;
            }
            let hits = |m: i64| (-bound..=bound).any(|t| (1 + nq as i64 - t).rem_euclid(m) == 0);
            let m = (l as i64).pow(n);
            ensure(!hits(m) && (n == 1 || hits(m / l as i64)), || {
                format!("level {n} wrong for Nq = {nq}, l = {l}")
            })?;
            levels += 1;
        }
    }
    Ok(format!(
        "a_q = 1 + q mod 5 at {} good q <= 500 (naive counts agree); {levels} Hasse levels verified",
        scan.per_prime.len()
    ))
}

fn eisenstein_shift_at_2(poly: &[BigInt]) -> Option<i64> {
    [0i64, 1, -1, 2, -2, 3, -3, 4, -4].into_iter().find(|&s| {
        let f = kraus_core::nf::field::shift_poly(poly, s);
        let n = f.len() - 1;
        let two = BigInt::from(2);
        let four = BigInt::from(4);
        f[..n].iter().all(|c| (c % &two) == BigInt::from(0)) && (&f[0] % &four) != BigInt::from(0)
    })
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    for r in 2..=7u32 {
        let k = build_real_cyclotomic(r).map_err(|e| e.to_string())?;
        let shift = eisenstein_shift_at_2(k.defining_poly())
            .ok_or_else(|| format!("r = {r}: no Eisenstein shift at 2"))?;
        ensure(k.count_real_embeddings() == k.degree(), || format!("r = {r}: not totally real"))?;
        let ps = factor_rational_prime_u64(&k, 2).map_err(|e| e.to_string())?;
        ensure(ps.len() == 1 && ps[0].e() == 1 << (r - 2), || format!("r = {r}: primes above 2 {ps:?}"))?;
        lines.push(format!("r={r}: deg {} shift {shift}", k.degree()));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs <= LIMIT_TOWER as f64, || format!("took {secs:.1}s"))?;
    Ok(format!("{} ({secs:.2}s, limit {LIMIT_TOWER}s)", lines.join(", ")))
}

fn criterion_9() -> Outcome {
    for (d, h) in [(5, 1), (8, 1), (12, 2), (13, 1), (40, 2)] {
        let d = BigInt::from(d);
        let by_b = narrow_class_number_with_order(&d, EnumerationOrder::ByB).map_err(|e| e.to_string())?;
        let by_a = narrow_class_number_with_order(&d, EnumerationOrder::ByA).map_err(|e| e.to_string())?;
        ensure(by_a == h && by_b == h, || format!("D = {d}: {by_b} / {by_a}, expected {h}"))?;
    }
    let audit = |name: &str| {
        let k = builtin_field(name).unwrap();
        let cd = registry_lookup_field(&k).ok();
        check_theorem1_hypotheses(&k, 2, None, cd.as_ref()).unwrap()
    };
    let s2 = audit("Qsqrt2");
    let s3 = audit("Qsqrt3");
    ensure(s2.overall() == CheckStatus::Pass, || format!("Q(sqrt2): {s2:?}"))?;
    ensure(s3.item("(iii)").map(|i| i.status) == Some(CheckStatus::Fail), || format!("Q(sqrt3): {s3:?}"))?;
    ensure(s3.items.iter().filter(|i| i.status == CheckStatus::Fail).count() == 1, || format!("Q(sqrt3): {s3:?}"))?;
    Ok("h+ = 1, 1, 2, 1, 2 for D = 5, 8, 12, 13, 40 in both orders; Q(sqrt2) passes, Q(sqrt3) fails (iii)".into())
}

const TATE_CORPUS: &[([i64; 5], u64)] = &[
    ([0, -1, 1, -10, -20], 11),
    ([0, -1, 1, 0, 0], 11),
    ([1, 0, 1, 4, -6], 2),
    ([1, 1, 1, -10, -10], 3),
    ([1, 1, 1, -10, -10], 5),
    ([0, 1, 0, 4, 4], 2),
    ([0, 1, 0, 4, 4], 5),
    ([0, -1, 0, -4, 4], 2),
    ([0, -1, 0, -4, 4], 3),
    ([0, 0, 1, 0, -7], 3),
    ([1, 0, 1, 1, 2], 2),
    ([1, 0, 1, 1, 2], 3),
    ([0, 0, 0, 4, 0], 2),
    ([0, 0, 0, 0, 1], 2),
    ([0, 0, 0, 0, 1], 3),
    ([0, 0, 1, -1, 0], 2),
    ([0, 1, 0, 3, -1], 11),
    ([1, 0, 1, -1, -2], 5),
    ([1, -1, 0, 12, 8], 3),
    ([0, -1, 1, -10, -20], 5),
];

fn criterion_10() -> Outcome {
    let q = rationals();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut good, mut split, mut nonsplit, mut additive) = (0, 0, 0, 0);
    for (a, p) in TATE_CORPUS {
        let e = WeierstrassModel::from_i64(&q, *a).unwrap();
        let pr = prime(&q, *p, 0);
        let base = tate_reduce(&e, &pr).map_err(|x| x.to_string())?.data;
        match (base.kodaira, base.multiplicative_split) {
            (Kodaira::I0, _) => good += 1,
            (Kodaira::In(_), SplitState::Split) => split += 1,
            (Kodaira::In(_), _) => nonsplit += 1,
            _ => additive += 1,
        }
        for _ in 0..CHANGES_PER_CURVE {
            let u = q.from_int(if rng.gen_bool(0.5) { 1 } else { -1 });
            let [r, s, t] = [0; 3].map(|_| q.from_int(rng.gen_range(-30..=30)));
            let e2 = e.transform(&u, &r, &s, &t).map_err(|x| x.to_string())?;
            let d = tate_reduce(&e2, &pr).map_err(|x| x.to_string())?.data;
            ensure(d == base, || format!("{a:?} at {p}: {base:?} became {d:?}"))?;
        }
    }
    ensure(good > 0 && split > 0 && nonsplit > 0 && additive > 0, || "corpus lacks a reduction type".into())?;
    Ok(format!(
        "{} curves x {CHANGES_PER_CURVE} changes unchanged ({good} good, {split} split, {nonsplit} nonsplit, {additive} additive)",
        TATE_CORPUS.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("conductor-2 vacancy over Q, H = 200", criterion_1),
        ("full-2-torsion box over Q(sqrt2), H = 30", criterion_2),
        ("positive control, conductor 24", criterion_3),
        ("invariant identities and twist invariance", criterion_4),
        ("local squares against brute force", criterion_5),
        ("twist certificate for lam = 16*sqrt2", criterion_6),
        ("trace congruence and Hasse levels", criterion_7),
        ("real cyclotomic tower at 2", criterion_8),
        ("narrow class numbers by form cycles", criterion_9),
        ("Tate invariance under coordinate changes", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match res {
            Ok(detail) => println!("criterion {:>2} PASS [{ms} ms] {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{ms} ms] {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

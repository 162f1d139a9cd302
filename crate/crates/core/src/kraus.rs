//! Normalizing a zero-sum triple into the model Y² = X(X + 1)(X + λ) and
//! certifying, step by step, that it has conductor P.

use std::fmt;
use std::time::Duration;

use serde::Serialize;

use crate::curve::WeierstrassModel;
use crate::error::{Error, Result};
use crate::localred::{
    candidate_rational_primes, potential_type_via_j, tate_reduce, Kodaira, PotentialType,
};
use crate::nf::{
    factor_rational_prime, is_local_square, FieldElement, FieldExt, PrimeIdeal, Valuation,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SortedTriple {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
    /// Input positions (0, 1, 2) that landed in the a, b, c slots.
    pub source_positions: [usize; 3],
    /// v_P of a, b, c after sorting.
    pub valuations: [Valuation; 3],
    /// Odd means the model differs from the input one by a twist by −1.
    pub parity: Parity,
}

fn check_triple(a: &FieldElement, b: &FieldElement, c: &FieldElement) -> Result<()> {
    if !a.same_field(b) || !a.same_field(c) {
        return Err(Error::FieldMismatch);
    }
    if !(&(a + b) + c).is_zero() {
        return Err(Error::NotZeroSum);
    }
    if a.is_zero() || b.is_zero() || c.is_zero() {
        return Err(Error::TrivialTriple);
    }
    Ok(())
}

/// Permute so that v(b) >= v(c) >= v(a). Ties keep input order.
pub fn sort_triple(
    a: &FieldElement,
    b: &FieldElement,
    c: &FieldElement,
    p: &PrimeIdeal,
) -> Result<SortedTriple> {
    check_triple(a, b, c)?;
    let xs = [a, b, c];
    let vs = xs.map(|x| p.valuation(x));
    let mut idx = [0usize, 1, 2];
    idx.sort_by_key(|&i| vs[i]);
    // smallest valuation goes to a, middle to c, largest to b
    let pos = [idx[0], idx[2], idx[1]];
    let inversions = (0..3)
        .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
        .filter(|&(i, j)| pos[i] > pos[j])
        .count();
    Ok(SortedTriple {
        a: xs[pos[0]].clone(),
        b: xs[pos[1]].clone(),
        c: xs[pos[2]].clone(),
        source_positions: pos,
        valuations: pos.map(|i| vs[i]),
        parity: if inversions % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        },
    })
}

/// Y² = X(X + 1)(X + λ).
pub fn twisted_model(lam: &FieldElement) -> Result<WeierstrassModel> {
    let k = lam.field();
    let one = k.one();
    if lam.is_zero() || *lam == one {
        return Err(Error::SingularParameter);
    }
    WeierstrassModel::two_torsion_form(lam + &one, lam.clone())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HenselFactor {
    pub name: &'static str,
    pub value: FieldElement,
    pub square: bool,
    /// Approximate square root, when one was found.
    pub witness: Option<FieldElement>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OffPrimeEntry {
    pub prime: PrimeIdeal,
    pub kodaira: Kodaira,
    pub f_exponent: u32,
    pub good: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Step {
    PotentiallyMultiplicativeAtP,
    PotentiallyGoodAwayFromP,
    LambdaInP,
    JNegative,
    HenselSquares,
    SplitAtP,
    GoodAwayFromP,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Step::PotentiallyMultiplicativeAtP => "potentially multiplicative at P",
            Step::PotentiallyGoodAwayFromP => "potentially good away from P",
            Step::LambdaInP => "v(lam) > 0",
            Step::JNegative => "v(j) < 0, i.e. t > 4*ord(2)",
            Step::HenselSquares => "four Hensel factors are P-adic squares",
            Step::SplitAtP => "-c4/c6 is a P-adic square (split multiplicative at P)",
            Step::GoodAwayFromP => "good reduction away from P",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: Step,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Full,
    LocalOnly { reason: String },
    Failed { step: Step, reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwistCertificate {
    pub prime: PrimeIdeal,
    pub sorted_triple: Option<SortedTriple>,
    pub permutation_parity: Option<Parity>,
    pub lam: FieldElement,
    pub model: WeierstrassModel,
    /// v_P(λ).
    pub t: i64,
    /// v_P(2).
    pub e2: i64,
    pub v_j: Valuation,
    pub hensel_squares: Vec<HenselFactor>,
    pub split_at_p: bool,
    pub offp_reduction: Vec<OffPrimeEntry>,
    /// Steps in proof order, including hypothesis checks on the source curve.
    pub steps: Vec<StepRecord>,
    pub verdict: Verdict,
}

fn hensel_factors(lam: &FieldElement) -> [(&'static str, FieldElement); 4] {
    let k = lam.field();
    let one = k.one();
    let two = k.from_int(2);
    let half = two.inv().expect("2 is invertible");
    [
        ("lam^2 - lam + 1", &(&lam.square() - lam) + &one),
        ("1 - lam/2", &one - &(lam * &half)),
        ("1 - 2*lam", &one - &(lam * &two)),
        ("1 + lam", &one + lam),
    ]
}

/// Primes other than P where the model has bad reduction or a non-integral
/// coefficient, classified by Tate's algorithm.
fn off_p_classification(
    e: &WeierstrassModel,
    p: &PrimeIdeal,
    budget: Duration,
) -> Result<Vec<OffPrimeEntry>> {
    let mut out = Vec::new();
    for q in candidate_rational_primes(e, budget)? {
        for prime in factor_rational_prime(e.field(), &q)? {
            if &prime == p {
                continue;
            }
            let red = tate_reduce(e, &prime)?.data;
            if red.f_exponent > 0 || red.vdelta_min > 0 {
                out.push(OffPrimeEntry {
                    good: red.f_exponent == 0,
                    prime,
                    kodaira: red.kodaira,
                    f_exponent: red.f_exponent,
                });
            }
        }
    }
    out.sort_by_key(|x| x.prime.sort_key());
    Ok(out)
}

fn first_failure(steps: &[StepRecord]) -> Option<&StepRecord> {
    steps.iter().find(|s| !s.passed)
}

/// Run the conductor-P checks on Y² = X(X + 1)(X + λ) in proof order.
pub fn certify_conductor_p(
    lam: &FieldElement,
    p: &PrimeIdeal,
    budget: Duration,
) -> Result<TwistCertificate> {
    let model = twisted_model(lam)?;
    let k = lam.field();
    let t = p.valuation(lam).unwrap();
    let e2 = p.valuation(&k.from_int(2)).unwrap();
    let v_j = p.valuation(&model.j_invariant());
    let mut steps = Vec::new();

    steps.push(StepRecord {
        step: Step::LambdaInP,
        passed: t > 0,
        detail: format!("t = v(lam) = {t}"),
    });
    steps.push(StepRecord {
        step: Step::JNegative,
        passed: t > 4 * e2 && v_j < 0,
        detail: format!("t = {t}, 4*ord(2) = {}, v(j) = {v_j}", 4 * e2),
    });

    let hensel_squares: Vec<HenselFactor> = hensel_factors(lam)
        .into_iter()
        .map(|(name, value)| {
            // a vanishing factor gives no unit to lift, so the step fails
            if value.is_zero() {
                return Ok(HenselFactor {
                    name,
                    value,
                    square: false,
                    witness: None,
                });
            }
            let ls = is_local_square(&value, p)?;
            Ok(HenselFactor {
                name,
                square: ls.is_square,
                witness: ls.witness,
                value,
            })
        })
        .collect::<Result<_>>()?;
    let non_squares: Vec<_> = hensel_squares
        .iter()
        .filter(|h| !h.square)
        .map(|h| h.name)
        .collect();
    steps.push(StepRecord {
        step: Step::HenselSquares,
        passed: non_squares.is_empty(),
        detail: if non_squares.is_empty() {
            "all squares".into()
        } else {
            format!("not squares: {}", non_squares.join(", "))
        },
    });

    let inv = model.invariants();
    let split_at_p = if inv.c6.is_zero() {
        false
    } else {
        let ratio = -&inv.c4.checked_div(&inv.c6)?;
        let red = tate_reduce(&model, p)?.data;
        red.kodaira.is_multiplicative() && is_local_square(&ratio, p)?.is_square
    };
    steps.push(StepRecord {
        step: Step::SplitAtP,
        passed: split_at_p,
        detail: if split_at_p {
            "split multiplicative".into()
        } else {
            "not split multiplicative".into()
        },
    });

    let offp_reduction = off_p_classification(&model, p, budget)?;
    let bad: Vec<String> = offp_reduction
        .iter()
        .filter(|x| !x.good)
        .map(|x| format!("{} ({}, f={})", x.prime, x.kodaira, x.f_exponent))
        .collect();
    steps.push(StepRecord {
        step: Step::GoodAwayFromP,
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            "good at every other prime".into()
        } else {
            format!("bad at {}", bad.join("; "))
        },
    });

    let p_side_ok = steps[..4].iter().all(|s| s.passed);
    let verdict = match first_failure(&steps) {
        None => Verdict::Full,
        Some(s) if p_side_ok => Verdict::LocalOnly {
            reason: s.detail.clone(),
        },
        Some(s) => Verdict::Failed {
            step: s.step,
            reason: s.detail.clone(),
        },
    };

    Ok(TwistCertificate {
        prime: p.clone(),
        sorted_triple: None,
        permutation_parity: None,
        lam: lam.clone(),
        model,
        t,
        e2,
        v_j,
        hensel_squares,
        split_at_p,
        offp_reduction,
        steps,
        verdict,
    })
}

/// Y² = X(X − a)(X + b).
pub fn source_model(a: &FieldElement, b: &FieldElement) -> Result<WeierstrassModel> {
    let k = a.field();
    WeierstrassModel::split_form(&k.zero(), a, &-b)
}

/// Sort, set λ = −b/a, check the hypotheses on the source curve and
/// certify the twisted model.
pub fn normalize(
    a: &FieldElement,
    b: &FieldElement,
    c: &FieldElement,
    p: &PrimeIdeal,
    budget: Duration,
) -> Result<TwistCertificate> {
    let sorted = sort_triple(a, b, c, p)?;
    let source = source_model(&sorted.a, &sorted.b)?;

    let (kind, vj) = potential_type_via_j(&source, p);
    let mult_at_p = StepRecord {
        step: Step::PotentiallyMultiplicativeAtP,
        passed: kind == PotentialType::PotentiallyMultiplicative,
        detail: format!("v(j) = {vj} at {p}"),
    };
    let mut not_good = Vec::new();
    for q in candidate_rational_primes(&source, budget)? {
        for prime in factor_rational_prime(source.field(), &q)? {
            if &prime == p {
                continue;
            }
            let (kind, vj) = potential_type_via_j(&source, &prime);
            if kind == PotentialType::PotentiallyMultiplicative {
                not_good.push(format!("{prime} (v(j) = {vj})"));
            }
        }
    }
    let good_away = StepRecord {
        step: Step::PotentiallyGoodAwayFromP,
        passed: not_good.is_empty(),
        detail: if not_good.is_empty() {
            "v(j) >= 0 at every other prime".into()
        } else {
            format!("v(j) < 0 at {}", not_good.join("; "))
        },
    };

    let lam = -&sorted.b.checked_div(&sorted.a)?;
    let mut cert = certify_conductor_p(&lam, p, budget)?;
    let mut steps = vec![mult_at_p, good_away];
    steps.append(&mut cert.steps);
    if let Some(s) = steps[..2].iter().find(|s| !s.passed) {
        cert.verdict = Verdict::Failed {
            step: s.step,
            reason: s.detail.clone(),
        };
    }
    cert.steps = steps;
    cert.permutation_parity = Some(sorted.parity);
    cert.sorted_triple = Some(sorted);
    Ok(cert)
}

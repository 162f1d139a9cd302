//! Hypothesis checks for the fields of interest: ramification at 2 and ℓ,
//! cyclotomic containment, total reality and a tagged class-number registry.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::nf::{
    factor_rational_prime_u64, make_field, make_field_i64, rationals, Field, FieldElement,
    FieldExt,
};
use crate::quadform;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassSource {
    ComputedQuadform,
    AssertedLiterature,
    PaperFact,
}

impl ClassSource {
    pub fn tag(self) -> &'static str {
        match self {
            ClassSource::ComputedQuadform => "computed-quadform",
            ClassSource::AssertedLiterature => "asserted-literature",
            ClassSource::PaperFact => "paper-fact",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityTag {
    Odd,
}

/// Which class number a parity tag speaks about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassInvariant {
    H,
    HPlus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDataRecord {
    pub h: Option<u64>,
    pub h_plus: Option<u64>,
    pub parity_only: Option<ParityTag>,
    pub parity_of: Option<ClassInvariant>,
    /// The field is totally complex, so h⁺ = h.
    #[serde(default)]
    pub narrow_equals_class: bool,
    pub source: ClassSource,
    #[serde(default)]
    pub note: String,
}

impl ClassDataRecord {
    pub fn computed(h_plus: u64) -> Self {
        ClassDataRecord {
            h: None,
            h_plus: Some(h_plus),
            parity_only: None,
            parity_of: None,
            narrow_equals_class: false,
            source: ClassSource::ComputedQuadform,
            note: "narrow class number from cycles of reduced forms".into(),
        }
    }

    /// h | h⁺ with h⁺/h a power of 2, when both are known.
    pub fn is_consistent(&self) -> bool {
        match (self.h, self.h_plus) {
            (Some(h), Some(hp)) => h > 0 && hp % h == 0 && (hp / h).is_power_of_two(),
            (Some(0), _) | (_, Some(0)) => false,
            _ => true,
        }
    }

    /// Whether h⁺ is known to be odd: Some(true/false) or None if unknown.
    pub fn narrow_is_odd(&self) -> Option<bool> {
        if let Some(hp) = self.h_plus {
            return Some(hp % 2 == 1);
        }
        let about_narrow = self.parity_of == Some(ClassInvariant::HPlus)
            || (self.parity_of == Some(ClassInvariant::H) && self.narrow_equals_class);
        if self.parity_only == Some(ParityTag::Odd) && about_narrow {
            return Some(true);
        }
        if self.narrow_equals_class {
            if let Some(h) = self.h {
                return Some(h % 2 == 1);
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub name: String,
    pub defining_poly: Vec<i64>,
    #[serde(flatten)]
    pub record: ClassDataRecord,
}

const REGISTRY_JSON: &str = include_str!("../data/registry.json");

pub fn parse_registry(text: &str) -> Result<Vec<RegistryEntry>> {
    let entries: Vec<RegistryEntry> = serde_json::from_str(text)?;
    if let Some(bad) = entries.iter().find(|e| !e.record.is_consistent()) {
        return Err(Error::Invalid(format!("inconsistent class data for {}", bad.name)));
    }
    Ok(entries)
}

pub fn registry() -> &'static [RegistryEntry] {
    static REG: OnceLock<Vec<RegistryEntry>> = OnceLock::new();
    REG.get_or_init(|| parse_registry(REGISTRY_JSON).expect("bundled registry is valid"))
}

fn squarefree_kernel(n: &BigInt) -> Option<BigInt> {
    let f = arith::factor_integer(n, arith::DEFAULT_FACTOR_BUDGET).ok()?;
    Some(
        f.into_iter()
            .filter(|(_, e)| e % 2 == 1)
            .fold(BigInt::one(), |acc, (p, _)| acc * p),
    )
}

fn quadratic_record(disc: &BigInt) -> Result<ClassDataRecord> {
    let m = squarefree_kernel(disc).ok_or_else(|| Error::Invalid("cannot factor discriminant".into()))?;
    let d = if m.mod_floor(&BigInt::from(4)) == BigInt::one() {
        m
    } else {
        m * 4
    };
    Ok(ClassDataRecord::computed(quadform::narrow_class_number_real_quadratic(&d)?))
}

/// Class data by registry name; real quadratic fields "Qsqrt<m>" are
/// computed on demand.
pub fn registry_lookup(name: &str) -> Result<ClassDataRecord> {
    if let Some(e) = registry().iter().find(|e| e.name == name) {
        return Ok(e.record.clone());
    }
    if let Some(m) = name.strip_prefix("Qsqrt").and_then(|m| m.parse::<i64>().ok()) {
        if m > 1 {
            return quadratic_record(&BigInt::from(m));
        }
    }
    Err(Error::UnknownField(name.to_string()))
}

/// Class data for a field given by its defining polynomial.
pub fn registry_lookup_field(k: &Field) -> Result<ClassDataRecord> {
    let poly = k.defining_poly();
    if let Some(e) = registry()
        .iter()
        .find(|e| e.defining_poly.iter().map(|&c| BigInt::from(c)).eq(poly.iter().cloned()))
    {
        return Ok(e.record.clone());
    }
    if k.degree() == 2 {
        let disc = &poly[1] * &poly[1] - BigInt::from(4) * &poly[0];
        if disc > BigInt::zero() {
            return quadratic_record(&disc);
        }
    }
    Err(Error::UnknownField(k.poly_string()))
}

/// f_2 = x, f_{r+1}(x) = f_r(x² − 2); constant term first.
pub fn real_cyclotomic_poly(r: u32) -> Result<Vec<BigInt>> {
    if r < 2 {
        return Err(Error::BadIndex(r));
    }
    let mut f = vec![BigInt::zero(), BigInt::one()];
    for _ in 2..r {
        // Horner evaluation at x² − 2
        let sub = [BigInt::from(-2), BigInt::zero(), BigInt::one()];
        let mut acc: Vec<BigInt> = vec![BigInt::zero()];
        for c in f.iter().rev() {
            let mut next = vec![BigInt::zero(); acc.len() + 2];
            for (i, a) in acc.iter().enumerate() {
                for (j, s) in sub.iter().enumerate() {
                    next[i + j] += a * s;
                }
            }
            next[0] += c;
            acc = next;
        }
        while acc.len() > 1 && acc.last().is_some_and(Zero::is_zero) {
            acc.pop();
        }
        f = acc;
    }
    Ok(f)
}

/// The maximal real subfield of Q(ζ_{2^r}).
pub fn build_real_cyclotomic(r: u32) -> Result<Field> {
    make_field(&real_cyclotomic_poly(r)?)
}

/// Q(ζ_{2^r}), defined by x^{2^{r−1}} + 1.
pub fn build_cyclotomic(r: u32) -> Result<Field> {
    if r < 2 {
        return Err(Error::BadIndex(r));
    }
    let n = 1usize << (r - 1);
    let mut poly = vec![BigInt::zero(); n + 1];
    poly[0] = BigInt::one();
    poly[n] = BigInt::one();
    make_field(&poly)
}

pub const BUILTIN_FIELDS: &[&str] = &["Q", "Qsqrt2", "Zeta16plus", "Zeta32plus", "Zeta16", "Zeta32"];

/// A builtin field by name; "Qsqrt<m>" gives x² − m.
pub fn builtin_field(name: &str) -> Result<Field> {
    match name {
        "Q" => Ok(rationals()),
        "Zeta16plus" => build_real_cyclotomic(4),
        "Zeta32plus" => build_real_cyclotomic(5),
        "Zeta16" => build_cyclotomic(4),
        "Zeta32" => build_cyclotomic(5),
        _ => match name.strip_prefix("Qsqrt").and_then(|m| m.parse::<i64>().ok()) {
            Some(m) => make_field_i64(&[-m, 0, 1]),
            None => Err(Error::UnknownField(name.to_string())),
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisItem {
    pub label: String,
    pub status: CheckStatus,
    pub detail: String,
    /// "computed" or a class-data source tag.
    pub source: String,
    /// Reported but not part of the overall verdict.
    pub informational: bool,
}

impl HypothesisItem {
    fn new(label: &str, status: CheckStatus, detail: String, source: &str) -> Self {
        HypothesisItem {
            label: label.into(),
            status,
            detail,
            source: source.into(),
            informational: false,
        }
    }

    fn informational(mut self) -> Self {
        self.informational = true;
        self
    }
}

fn pass_fail(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    pub theorem: String,
    pub items: Vec<HypothesisItem>,
}

impl HypothesisReport {
    /// Over the non-informational items: Fail if any fails, else Unknown if
    /// any is unknown, else Pass.
    pub fn overall(&self) -> CheckStatus {
        let mut required = self.items.iter().filter(|i| !i.informational);
        if required.clone().any(|i| i.status == CheckStatus::Fail) {
            CheckStatus::Fail
        } else if required.any(|i| i.status == CheckStatus::Unknown) {
            CheckStatus::Unknown
        } else {
            CheckStatus::Pass
        }
    }

    pub fn item(&self, prefix: &str) -> Option<&HypothesisItem> {
        self.items.iter().find(|i| i.label.starts_with(prefix))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldProfile {
    pub defining_poly: String,
    pub degree: usize,
    pub real_embeddings: usize,
    pub l: u64,
    /// (e, f) for each prime above ℓ.
    pub primes_above_l: Vec<(u32, u32)>,
    pub class_data: Option<ClassDataRecord>,
    pub cyclotomic_witness: Option<FieldElement>,
}

pub fn field_profile(k: &Field, l: u64, witness: Option<&FieldElement>) -> Result<FieldProfile> {
    let primes = factor_rational_prime_u64(k, l)?;
    Ok(FieldProfile {
        defining_poly: k.poly_string(),
        degree: k.degree(),
        real_embeddings: k.count_real_embeddings(),
        l,
        primes_above_l: primes.iter().map(|p| (p.e(), p.f())).collect(),
        class_data: registry_lookup_field(k).ok(),
        cyclotomic_witness: witness.cloned(),
    })
}

/// Φ_ℓ(w) = 1 + w + … + w^{ℓ−1}.
fn cyclotomic_value(w: &FieldElement, l: u64) -> FieldElement {
    let mut acc = w.field().zero();
    let mut pw = w.field().one();
    for _ in 0..l {
        acc = &acc + &pw;
        pw = &pw * w;
    }
    acc
}

pub fn check_theorem1_hypotheses(
    k: &Field,
    l: u64,
    witness: Option<&FieldElement>,
    cd: Option<&ClassDataRecord>,
) -> Result<HypothesisReport> {
    if !arith::is_prime_u64(l) {
        return Err(Error::NotPrime(BigInt::from(l)));
    }
    let mut items = Vec::new();
    // (i) containment of Q(ζ_ℓ)
    if l == 2 {
        items.push(HypothesisItem::new(
            "(i) Q(zeta_l) in K",
            CheckStatus::Pass,
            "automatic for l = 2".into(),
            "computed",
        ));
    } else {
        let w = witness.ok_or(Error::MissingWitness)?;
        if !w.field().eq(k) {
            return Err(Error::FieldMismatch);
        }
        let ok = cyclotomic_value(w, l).is_zero();
        items.push(HypothesisItem::new(
            "(i) Q(zeta_l) in K",
            pass_fail(ok),
            format!("Phi_{l}({w}) {} 0", if ok { "=" } else { "!=" }),
            "computed",
        ));
    }
    // (ii) unique prime above ℓ
    let primes = factor_rational_prime_u64(k, l)?;
    let ef: Vec<String> = primes.iter().map(|p| format!("(e={}, f={})", p.e(), p.f())).collect();
    items.push(HypothesisItem::new(
        "(ii) unique prime above l",
        pass_fail(primes.len() == 1),
        format!("{} prime(s) above {l}: {}", primes.len(), ef.join(", ")),
        "computed",
    ));
    // (iii) gcd(h⁺, ℓ(ℓ−1)) = 1
    let m = l * (l - 1);
    let item = match cd {
        Some(rec) => match rec.h_plus {
            Some(hp) => HypothesisItem::new(
                "(iii) gcd(h+, l(l-1)) = 1",
                pass_fail(hp.gcd(&m) == 1),
                format!("h+ = {hp}, gcd(h+, {m}) = {}", hp.gcd(&m)),
                rec.source.tag(),
            ),
            None => match (l, rec.narrow_is_odd()) {
                (2, Some(odd)) => HypothesisItem::new(
                    "(iii) gcd(h+, l(l-1)) = 1",
                    pass_fail(odd),
                    format!("h+ parity {} suffices for l = 2", if odd { "odd" } else { "even" }),
                    rec.source.tag(),
                ),
                _ => HypothesisItem::new(
                    "(iii) gcd(h+, l(l-1)) = 1",
                    CheckStatus::Unknown,
                    format!("h+ not known; {}", rec.note),
                    rec.source.tag(),
                ),
            },
        },
        None => HypothesisItem::new(
            "(iii) gcd(h+, l(l-1)) = 1",
            CheckStatus::Unknown,
            "no class data".into(),
            "none",
        ),
    };
    items.push(item);
    Ok(HypothesisReport {
        theorem: format!("conductor-prime nonexistence, l = {l}"),
        items,
    })
}

fn two_totally_ramified(k: &Field) -> Result<HypothesisItem> {
    let primes = factor_rational_prime_u64(k, 2)?;
    let ok = primes.len() == 1 && primes[0].e() as usize == k.degree();
    let ef: Vec<String> = primes.iter().map(|p| format!("(e={}, f={})", p.e(), p.f())).collect();
    Ok(HypothesisItem::new(
        "(a) 2 totally ramifies",
        pass_fail(ok),
        format!("primes above 2: {}", ef.join(", ")),
        "computed",
    ))
}

fn totally_real(k: &Field) -> HypothesisItem {
    let r = k.count_real_embeddings();
    HypothesisItem::new(
        "totally real",
        pass_fail(r == k.degree()),
        format!("{r} real embeddings of {}", k.degree()),
        "computed",
    )
}

pub fn check_theorem2_hypotheses(
    k: &Field,
    cd: Option<&ClassDataRecord>,
) -> Result<HypothesisReport> {
    let mut items = vec![totally_real(k), two_totally_ramified(k)?];
    items.push(match cd {
        Some(rec) => match rec.narrow_is_odd() {
            Some(odd) => HypothesisItem::new(
                "(b) odd narrow class number",
                pass_fail(odd),
                match rec.h_plus {
                    Some(hp) => format!("h+ = {hp}"),
                    None => "h+ odd by parity record".into(),
                },
                rec.source.tag(),
            ),
            None => HypothesisItem::new(
                "(b) odd narrow class number",
                CheckStatus::Unknown,
                format!("narrow class number parity not known; {}", rec.note),
                rec.source.tag(),
            ),
        },
        None => HypothesisItem::new(
            "(b) odd narrow class number",
            CheckStatus::Unknown,
            "no class data".into(),
            "none",
        ),
    });
    Ok(HypothesisReport {
        theorem: "asymptotic FLT via odd narrow class number".into(),
        items,
    })
}

/// The r with K = Q(ζ_{2^r})⁺, if K is given by f_r.
pub fn real_cyclotomic_index(k: &Field) -> Option<u32> {
    let d = k.degree();
    if !d.is_power_of_two() {
        return None;
    }
    let r = d.trailing_zeros() + 2;
    let f = real_cyclotomic_poly(r).ok()?;
    (f.as_slice() == k.defining_poly()).then_some(r)
}

/// The scorecard for the real cyclotomic 2-power family, taking the detour
/// through Q(ζ_{2^r}) whose narrow class number equals its odd class number.
pub fn check_theorem3(k: &Field) -> Result<HypothesisReport> {
    let Some(r) = real_cyclotomic_index(k) else {
        return Ok(HypothesisReport {
            theorem: "effective asymptotic FLT over Q(zeta_2^r)+".into(),
            items: vec![HypothesisItem::new(
                "K = Q(zeta_2^r)+",
                CheckStatus::Fail,
                "defining polynomial is not in the real cyclotomic 2-power tower".into(),
                "computed",
            )],
        });
    };
    let mut items = vec![
        HypothesisItem::new("K = Q(zeta_2^r)+", CheckStatus::Pass, format!("r = {r}"), "computed"),
        totally_real(k),
        two_totally_ramified(k)?,
        HypothesisItem::new(
            "class number of K odd",
            CheckStatus::Pass,
            "abelian field of 2-power conductor".into(),
            ClassSource::PaperFact.tag(),
        ),
    ];
    // The narrow class number of K itself is not needed: the argument
    // base-changes to L = Q(zeta_2^r), where narrow and ordinary agree.
    // Its parity is only claimed when it was computed here.
    let rec = registry_lookup_field(k).ok();
    let (status, detail, source) = match &rec {
        Some(rec) if rec.source == ClassSource::ComputedQuadform && rec.narrow_is_odd().is_some() => {
            let odd = rec.narrow_is_odd() == Some(true);
            (pass_fail(odd), if odd { "odd" } else { "even" }.to_string(), rec.source.tag())
        }
        _ => (
            CheckStatus::Unknown,
            "parity not known; not needed for this criterion".to_string(),
            "none",
        ),
    };
    items.push(HypothesisItem::new("narrow class number of K odd", status, detail, source).informational());
    let l = build_cyclotomic(r)?;
    let l_primes = factor_rational_prime_u64(&l, 2)?;
    items.push(HypothesisItem::new(
        "L = Q(zeta_2^r): unique prime above 2",
        pass_fail(l_primes.len() == 1),
        format!("{} prime(s), e = {}", l_primes.len(), l_primes[0].e()),
        "computed",
    ));
    items.push(HypothesisItem::new(
        "L totally complex: narrow class number = class number, odd",
        pass_fail(l.count_real_embeddings() == 0),
        format!("{} real embeddings", l.count_real_embeddings()),
        ClassSource::PaperFact.tag(),
    ));
    items.push(HypothesisItem::new(
        "modularity over K (effective constant)",
        CheckStatus::Pass,
        "K lies in the cyclotomic Z_2-extension of Q; elliptic curves there are modular".into(),
        ClassSource::AssertedLiterature.tag(),
    ));
    Ok(HypothesisReport {
        theorem: "effective asymptotic FLT over Q(zeta_2^r)+".into(),
        items,
    })
}

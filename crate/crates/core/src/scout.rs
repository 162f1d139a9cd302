//! Bounded searches over the models Y² = X(X² + AX + B) for a prescribed
//! conductor, and trace congruences at good primes.

use std::collections::HashMap;
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::curve::WeierstrassModel;
use crate::error::{Error, Result};
use crate::fpx;
use crate::localred::{conductor, tate_reduce, Kodaira};
use crate::nf::{
    factor_rational_prime_u64, Field, FieldExt, PrimeIdeal, DEFAULT_HEIGHT_BOUND,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TorsionFilter {
    #[serde(rename = "any-2-torsion")]
    Any,
    #[serde(rename = "full-2-torsion")]
    Full,
}

impl fmt::Display for TorsionFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TorsionFilter::Any => "any-2-torsion",
            TorsionFilter::Full => "full-2-torsion",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SearchBox {
    pub field: Field,
    /// Bound on every power-basis coordinate of A and B.
    pub height: u64,
    pub torsion_filter: TorsionFilter,
}

impl SearchBox {
    pub fn new(field: Field, height: u64, torsion_filter: TorsionFilter) -> Self {
        SearchBox {
            field,
            height,
            torsion_filter,
        }
    }

    /// (2H + 1)^(2n) coordinate pairs before filtering.
    pub fn model_count(&self) -> u128 {
        (2 * self.height as u128 + 1).pow(2 * self.field.degree() as u32)
    }
}

/// Power-basis integer coordinates of A and B.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoxPoint {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
}

impl BoxPoint {
    pub fn model(&self, k: &Field) -> Result<WeierstrassModel> {
        WeierstrassModel::two_torsion_form(k.from_coords_i64(&self.a), k.from_coords_i64(&self.b))
    }
}

/// Lexicographic odometer over [−H, H]^n.
struct Odometer {
    cur: Vec<i64>,
    h: i64,
    done: bool,
}

impl Odometer {
    fn new(n: usize, h: i64) -> Self {
        Odometer {
            cur: vec![-h; n],
            h,
            done: false,
        }
    }
}

impl Iterator for Odometer {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let mut i = self.cur.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.cur[i] < self.h {
                self.cur[i] += 1;
                break;
            }
            self.cur[i] = -self.h;
        }
        Some(out)
    }
}

/// Machine-integer arithmetic in Z[θ]; every operation reports overflow.
#[derive(Clone, Debug)]
struct IntRing {
    n: usize,
    /// Monic defining polynomial, constant first.
    f: Vec<i128>,
}

impl IntRing {
    fn new(k: &Field) -> Option<Self> {
        let f = k
            .defining_poly()
            .iter()
            .map(|c| c.to_i128())
            .collect::<Option<Vec<_>>>()?;
        Some(IntRing { n: k.degree(), f })
    }

    fn reduce(&self, mut prod: Vec<i128>) -> Option<Vec<i128>> {
        let n = self.n;
        for i in (n..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..n {
                prod[i - n + j] = prod[i - n + j].checked_sub(c.checked_mul(self.f[j])?)?;
            }
            prod[i] = 0;
        }
        prod.truncate(n);
        Some(prod)
    }

    fn mul(&self, x: &[i128], y: &[i128]) -> Option<Vec<i128>> {
        let n = self.n;
        let mut prod = vec![0i128; 2 * n - 1];
        for (i, a) in x.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                prod[i + j] = prod[i + j].checked_add(a.checked_mul(*b)?)?;
            }
        }
        self.reduce(prod)
    }

    fn norm(&self, x: &[i128]) -> Option<i128> {
        match self.n {
            1 => Some(x[0]),
            2 => {
                let (a, b) = (x[0], x[1]);
                let (c0, c1) = (self.f[0], self.f[1]);
                a.checked_mul(a)?
                    .checked_sub(c1.checked_mul(a)?.checked_mul(b)?)?
                    .checked_add(c0.checked_mul(b)?.checked_mul(b)?)
            }
            n => {
                // columns x·θ^j, then a fraction-free determinant
                let mut cols = Vec::with_capacity(n);
                let mut col = x.to_vec();
                for _ in 0..n {
                    cols.push(col.clone());
                    let mut shifted = vec![0i128];
                    shifted.extend_from_slice(&col);
                    col = self.reduce(shifted)?;
                }
                bareiss_i128(cols)
            }
        }
    }
}

fn bareiss_i128(mut m: Vec<Vec<i128>>) -> Option<i128> {
    let n = m.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return Some(0);
            };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j]
                    .checked_mul(m[k][k])?
                    .checked_sub(m[i][k].checked_mul(m[k][j])?)?;
                m[i][j] = v / prev;
            }
        }
        prev = m[k][k];
    }
    Some(sign * m[n - 1][n - 1])
}

/// Quadratic-residue test at a degree-one prime ℓ ∤ disc(f), θ ↦ root.
struct ResidueCheck {
    l: u64,
    root: u64,
    is_square: Vec<bool>,
}

const PREFILTER_PRIME_BOUND: u64 = 200;
const PREFILTER_CHECKS: usize = 16;

fn residue_checks(k: &Field) -> Vec<ResidueCheck> {
    let mut out = Vec::new();
    for l in arith::primes_up_to(PREFILTER_PRIME_BOUND) {
        if l == 2 {
            continue;
        }
        let lb = BigInt::from(l);
        let mut f: Vec<u64> = k
            .defining_poly()
            .iter()
            .map(|c| {
                let r = c % &lb;
                let r = if r.is_negative() { r + &lb } else { r };
                r.to_u64().unwrap()
            })
            .collect();
        fpx::trim(&mut f);
        if fpx::degree(&fpx::gcd(&f, &fpx::derivative(&f, l), l)) != Some(0) {
            continue;
        }
        let mut table = vec![false; l as usize];
        for x in 0..l {
            table[(x * x % l) as usize] = true;
        }
        for root in (0..l).filter(|&x| fpx::eval(&f, x, l) == 0) {
            out.push(ResidueCheck {
                l,
                root,
                is_square: table.clone(),
            });
        }
        if out.len() >= PREFILTER_CHECKS {
            break;
        }
    }
    out
}

impl ResidueCheck {
    /// False when x is a nonzero non-square at this prime.
    fn may_be_square(&self, x: &[i128]) -> bool {
        let l = self.l as i128;
        let mut acc = 0i128;
        for c in x.iter().rev() {
            acc = (acc * self.root as i128 + c.rem_euclid(l)) % l;
        }
        acc == 0 || self.is_square[acc as usize]
    }
}

/// The conductor sought: an exact list of prime powers.
#[derive(Clone, Debug)]
pub struct ConductorGoal {
    factors: Vec<(PrimeIdeal, u32)>,
}

impl ConductorGoal {
    /// Conductor exactly P.
    pub fn prime(p: PrimeIdeal) -> Self {
        ConductorGoal {
            factors: vec![(p, 1)],
        }
    }

    pub fn exact(mut factors: Vec<(PrimeIdeal, u32)>) -> Self {
        factors.retain(|(_, e)| *e > 0);
        factors.sort_by_key(|(p, _)| p.sort_key());
        ConductorGoal { factors }
    }

    /// A rational conductor N, over a field where every p | N has a single
    /// prime above it.
    pub fn rational(k: &Field, n: u64) -> Result<Self> {
        let fac = arith::factor_u64(n, Instant::now() + arith::DEFAULT_FACTOR_BUDGET)?;
        let mut factors = Vec::new();
        for (p, e) in fac {
            let ps = factor_rational_prime_u64(k, p)?;
            if ps.len() != 1 {
                return Err(Error::Invalid(format!("{p} is not inert or totally ramified")));
            }
            factors.push((ps[0].clone(), e));
        }
        Ok(Self::exact(factors))
    }

    pub fn factors(&self) -> &[(PrimeIdeal, u32)] {
        &self.factors
    }

    fn chars(&self) -> Vec<u64> {
        let mut c: Vec<u64> = self.factors.iter().map(|(p, _)| p.residue_char()).collect();
        c.dedup();
        c
    }

    fn exponent_at(&self, p: &PrimeIdeal) -> u32 {
        self.factors
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }
}

impl fmt::Display for ConductorGoal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|(p, e)| format!("{p}^{e}")).collect();
        if parts.is_empty() {
            f.write_str("(1)")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConductorEntry {
    pub prime: String,
    pub p: u64,
    pub f_exponent: u32,
    pub kodaira: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchHit {
    pub point: BoxPoint,
    pub conductor: Vec<ConductorEntry>,
    /// Confirmed by the second, full-factorization pass.
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnresolvedModel {
    pub point: BoxPoint,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchTotals {
    /// Coordinate pairs visited.
    pub enumerated: u64,
    /// Nonsingular models with B ≠ 0 passing the torsion filter.
    pub filtered: u64,
    /// Filtered models whose conductor comparison was decided.
    pub classified: u64,
    pub unresolved: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub field: String,
    pub height: u64,
    pub torsion_filter: TorsionFilter,
    pub target: String,
    pub totals: SearchTotals,
    pub hits: Vec<SearchHit>,
    pub unresolved: Vec<UnresolvedModel>,
    pub wall_clock_ms: u64,
    pub workers: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub jobs: usize,
    /// Per-integer factorization budget.
    pub factor_budget: Duration,
    /// Height bound for exact square roots in the torsion filter.
    pub sqrt_height: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            factor_budget: arith::DEFAULT_FACTOR_BUDGET,
            sqrt_height: DEFAULT_HEIGHT_BOUND,
        }
    }
}

enum Filtered {
    Skip,
    Keep,
    Unresolved(String),
}

enum Classified {
    Rejected,
    Hit(Vec<ConductorEntry>),
}

/// Nonsingularity and torsion filtering on integer coordinates.
struct Prefilter {
    field: Field,
    filter: TorsionFilter,
    ring: Option<IntRing>,
    checks: Vec<ResidueCheck>,
    sqrt_height: u64,
}

/// Shared read-only state for classifying box models.
struct Engine<'a> {
    pre: Prefilter,
    height: u64,
    goal: &'a ConductorGoal,
    goal_chars: Vec<u64>,
    opts: SearchOptions,
}

/// Per-worker cache of prime factorizations.
#[derive(Default)]
struct PrimeCache(HashMap<u64, Vec<PrimeIdeal>>);

impl PrimeCache {
    fn get(&mut self, k: &Field, q: u64) -> Result<&[PrimeIdeal]> {
        if !self.0.contains_key(&q) {
            let ps = factor_rational_prime_u64(k, q)?;
            self.0.insert(q, ps);
        }
        Ok(&self.0[&q])
    }
}

fn to_i128(v: &[i64]) -> Vec<i128> {
    v.iter().map(|&x| x as i128).collect()
}

fn to_big(v: &[i128]) -> Vec<BigInt> {
    v.iter().map(|&c| BigInt::from(c)).collect()
}

fn entry(p: &PrimeIdeal, f_exponent: u32, kodaira: Kodaira) -> ConductorEntry {
    ConductorEntry {
        prime: p.to_string(),
        p: p.residue_char(),
        f_exponent,
        kodaira: kodaira.to_string(),
    }
}

impl Prefilter {
    fn new(bx: &SearchBox, sqrt_height: u64) -> Self {
        Prefilter {
            field: bx.field.clone(),
            filter: bx.torsion_filter,
            ring: IntRing::new(&bx.field),
            checks: residue_checks(&bx.field),
            sqrt_height,
        }
    }

    fn mul(&self, x: &[i128], y: &[i128]) -> Vec<i128> {
        if let Some(r) = self.ring.as_ref().and_then(|r| r.mul(x, y)) {
            return r;
        }
        let k = &self.field;
        let p = &k.from_coords_big(&to_big(x)) * &k.from_coords_big(&to_big(y));
        p.numerators()
            .iter()
            .map(|c| c.to_i128().expect("coordinates fit in 128 bits"))
            .collect()
    }

    fn norm(&self, x: &[i128]) -> BigInt {
        match self.ring.as_ref().and_then(|r| r.norm(x)) {
            Some(v) => BigInt::from(v),
            None => self.field.from_coords_big(&to_big(x)).norm().numer().clone(),
        }
    }

    /// A² − 4B, or None when the model is singular.
    fn disc_part(&self, a: &[i128], b: &[i128]) -> Option<Vec<i128>> {
        let a2 = self.mul(a, a);
        let d: Vec<i128> = a2.iter().zip(b).map(|(x, y)| x - 4 * y).collect();
        (!d.iter().all(|c| *c == 0)).then_some(d)
    }

    fn torsion(&self, d: &[i128]) -> Filtered {
        if self.filter == TorsionFilter::Any {
            return Filtered::Keep;
        }
        if !self.checks.iter().all(|c| c.may_be_square(d)) {
            return Filtered::Skip;
        }
        let nd = self.norm(d);
        if nd.is_negative() || nd.sqrt().pow(2) != nd {
            return Filtered::Skip;
        }
        match self.field.from_coords_big(&to_big(d)).is_square_in_field(self.sqrt_height) {
            Ok(Some(true)) => Filtered::Keep,
            Ok(Some(false)) => Filtered::Skip,
            Ok(None) => Filtered::Unresolved("square test hit its height bound".into()),
            Err(e) => Filtered::Unresolved(e.to_string()),
        }
    }

    /// The filter verdict for one coordinate pair.
    fn admit(&self, a: &[i64], b: &[i64]) -> Option<(Vec<i128>, Filtered)> {
        if b.iter().all(|&x| x == 0) {
            return None;
        }
        let d = self.disc_part(&to_i128(a), &to_i128(b))?;
        let verdict = self.torsion(&d);
        Some((d, verdict))
    }
}

impl<'a> Engine<'a> {
    fn new(bx: &SearchBox, goal: &'a ConductorGoal, opts: SearchOptions) -> Self {
        Engine {
            pre: Prefilter::new(bx, opts.sqrt_height),
            height: bx.height,
            goal_chars: goal.chars(),
            goal,
            opts,
        }
    }

    fn k(&self) -> &Field {
        &self.pre.field
    }

    fn primes_of(&self, n: &BigInt) -> Result<Vec<u64>> {
        let n = n.abs();
        if let Some(v) = n.to_u64() {
            let f = arith::factor_u64(v, Instant::now() + self.opts.factor_budget)?;
            return Ok(f.into_iter().map(|(p, _)| p).collect());
        }
        arith::factor_integer(&n, self.opts.factor_budget)?
            .into_iter()
            .map(|(p, _)| arith::prime_to_u64(&p))
            .collect()
    }

    fn classify(
        &self,
        pt: &BoxPoint,
        a: &[i128],
        b: &[i128],
        d: &[i128],
        cache: &mut PrimeCache,
    ) -> Result<Classified> {
        let nb = self.pre.norm(b);
        let nd = self.pre.norm(d);
        // c4 = 16(A² − 3B)
        let a2 = self.pre.mul(a, a);
        let c: Vec<i128> = a2.iter().zip(b).map(|(x, y)| x - 3 * y).collect();
        let nc = self.pre.norm(&c);

        let mut qs = self.primes_of(&nb)?;
        qs.extend(self.primes_of(&nd)?);
        qs.push(2);
        qs.sort_unstable();
        qs.dedup();
        qs.retain(|q| !self.goal_chars.contains(q));

        // an odd prime dividing Δ but not c4 is multiplicative
        for &q in &qs {
            if q != 2 && !nc.is_zero() && !(&nc % q).is_zero() {
                return Ok(Classified::Rejected);
            }
        }
        let model = pt.model(self.k())?;
        for &q in &qs {
            for prime in cache.get(self.k(), q)? {
                if tate_reduce(&model, prime)?.data.f_exponent > 0 {
                    return Ok(Classified::Rejected);
                }
            }
        }
        let mut found = Vec::new();
        for &q in &self.goal_chars {
            for prime in cache.get(self.k(), q)? {
                let red = tate_reduce(&model, prime)?.data;
                if red.f_exponent != self.goal.exponent_at(prime) {
                    return Ok(Classified::Rejected);
                }
                if red.f_exponent > 0 {
                    found.push(entry(prime, red.f_exponent, red.kodaira));
                }
            }
        }
        Ok(Classified::Hit(found))
    }

    fn run_slice(&self, lead: i64) -> SliceResult {
        let n = self.k().degree();
        let h = self.height as i64;
        let mut out = SliceResult::default();
        let mut cache = PrimeCache::default();
        for rest in Odometer::new(n - 1, h) {
            let mut acoords = vec![lead];
            acoords.extend(rest);
            let a = to_i128(&acoords);
            for bcoords in Odometer::new(n, h) {
                out.totals.enumerated += 1;
                let Some((d, verdict)) = self.pre.admit(&acoords, &bcoords) else {
                    continue;
                };
                let b = to_i128(&bcoords);
                let pt = BoxPoint {
                    a: acoords.clone(),
                    b: bcoords,
                };
                match verdict {
                    Filtered::Skip => continue,
                    Filtered::Unresolved(reason) => {
                        out.totals.unresolved += 1;
                        out.unresolved.push(UnresolvedModel { point: pt, reason });
                        continue;
                    }
                    Filtered::Keep => out.totals.filtered += 1,
                }
                match self.classify(&pt, &a, &b, &d, &mut cache) {
                    Ok(Classified::Rejected) => out.totals.classified += 1,
                    Ok(Classified::Hit(conductor)) => {
                        out.totals.classified += 1;
                        out.hits.push((pt, conductor));
                    }
                    Err(e) => {
                        out.totals.unresolved += 1;
                        out.unresolved.push(UnresolvedModel {
                            point: pt,
                            reason: e.to_string(),
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Default)]
struct SliceResult {
    totals: SearchTotals,
    hits: Vec<(BoxPoint, Vec<ConductorEntry>)>,
    unresolved: Vec<UnresolvedModel>,
}

/// The box models that survive the B ≠ 0, nonsingularity and torsion
/// filters, in lexicographic coordinate order. Models whose square test is
/// inconclusive are dropped.
pub fn enumerate_curves(bx: &SearchBox) -> impl Iterator<Item = BoxPoint> {
    let n = bx.field.degree();
    let h = bx.height as i64;
    let pre = Prefilter::new(bx, DEFAULT_HEIGHT_BOUND);
    Odometer::new(n, h)
        .flat_map(move |acoords| Odometer::new(n, h).map(move |b| (acoords.clone(), b)))
        .filter(move |(a, b)| matches!(pre.admit(a, b), Some((_, Filtered::Keep))))
        .map(|(a, b)| BoxPoint { a, b })
}

/// Independent check of a hit: factor the discriminant norm completely,
/// run Tate at every prime and compare with the goal.
pub fn verify_hit(
    model: &WeierstrassModel,
    goal: &ConductorGoal,
    budget: Duration,
) -> Result<bool> {
    let data = conductor(model, budget)?;
    if data.len() != goal.factors.len() {
        return Ok(false);
    }
    for (d, (p, e)) in data.iter().zip(&goal.factors) {
        if &d.prime != p || d.f_exponent != *e {
            return Ok(false);
        }
        if *e == 1 {
            let min = tate_reduce(model, p)?.minimal_model;
            if p.valuation(&min.invariants().c4) != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Search the box for models with conductor exactly the goal.
pub fn search_conductor_target(
    bx: &SearchBox,
    goal: &ConductorGoal,
    opts: SearchOptions,
) -> Result<SearchReport> {
    let start = Instant::now();
    let engine = Engine::new(bx, goal, opts);
    let h = bx.height as i64;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| Error::Invalid(e.to_string()))?;
    let slices: Vec<SliceResult> = pool.install(|| {
        (-h..=h)
            .into_par_iter()
            .map(|lead| engine.run_slice(lead))
            .collect()
    });

    let mut totals = SearchTotals::default();
    let mut hits = Vec::new();
    let mut unresolved = Vec::new();
    for s in slices {
        totals.enumerated += s.totals.enumerated;
        totals.filtered += s.totals.filtered;
        totals.classified += s.totals.classified;
        totals.unresolved += s.totals.unresolved;
        unresolved.extend(s.unresolved);
        for (point, conductor) in s.hits {
            let model = point.model(&bx.field)?;
            let verified = verify_hit(&model, goal, opts.factor_budget).unwrap_or(false);
            if !verified {
                log::warn!("hit {point:?} failed second-pass verification");
            }
            hits.push(SearchHit {
                point,
                conductor,
                verified,
            });
        }
    }
    Ok(SearchReport {
        field: bx.field.poly_string(),
        height: bx.height,
        torsion_filter: bx.torsion_filter,
        target: goal.to_string(),
        totals,
        hits,
        unresolved,
        wall_clock_ms: start.elapsed().as_millis() as u64,
        workers: opts.jobs.max(1),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceEntry {
    pub prime: String,
    pub norm: u64,
    pub a: i64,
    /// Largest n with a ≡ 1 + N (mod ℓ^n).
    pub n_max: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceScan {
    pub l: u64,
    pub q_bound: u64,
    pub per_prime: Vec<CongruenceEntry>,
    pub global_n_max: u32,
}

fn l_valuation(mut x: i64, l: u64) -> u32 {
    let l = l as i64;
    let mut n = 0;
    while x != 0 && x % l == 0 {
        x /= l;
        n += 1;
    }
    n
}

/// a_q at every good prime of norm at most `q_bound` and the largest n with
/// a_q ≡ 1 + Nq (mod ℓ^n) at all of them.
pub fn trace_congruence_scan(
    e: &WeierstrassModel,
    l: u64,
    q_bound: u64,
) -> Result<CongruenceScan> {
    if !arith::is_prime_u64(l) {
        return Err(Error::NotPrime(BigInt::from(l)));
    }
    let mut per_prime = Vec::new();
    for q in arith::primes_up_to(q_bound) {
        for prime in factor_rational_prime_u64(e.field(), q)? {
            match prime.norm() {
                Some(nq) if nq <= q_bound as u128 => {}
                _ => continue,
            }
            let pc = match e.count_points_at(&prime) {
                Ok(pc) => pc,
                Err(Error::BadReduction) => continue,
                Err(err) => return Err(err),
            };
            let diff = 1 + pc.q as i64 - pc.a;
            per_prime.push(CongruenceEntry {
                prime: prime.to_string(),
                norm: pc.q,
                a: pc.a,
                n_max: l_valuation(diff, l),
            });
        }
    }
    let global_n_max = per_prime
        .iter()
        .map(|c| c.n_max)
        .min()
        .ok_or(Error::NoGoodPrimesInRange { bound: q_bound })?;
    Ok(CongruenceScan {
        l,
        q_bound,
        per_prime,
        global_n_max,
    })
}

/// Smallest n such that no a with |a| <= 2√Nq satisfies a ≡ 1 + Nq (mod ℓ^n).
pub fn hasse_contradiction_level(nq: u64, l: u64) -> u32 {
    assert!(nq >= 2 && l >= 2);
    let bound = (4 * nq as u128).sqrt() as i128;
    let target = 1 + nq as i128;
    let mut m: i128 = 1;
    for n in 1.. {
        m *= l as i128;
        // least a ≥ −bound with a ≡ target (mod m)
        let a = -bound + (target + bound).rem_euclid(m);
        if a > bound {
            return n;
        }
    }
    unreachable!()
}

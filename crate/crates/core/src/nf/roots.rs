//! Global roots of quadratics and cubics over K: roots modulo a prime
//! where the defining polynomial is squarefree, CRT, Newton lifting to a
//! large prime power, and rational reconstruction of the coordinates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::element::FieldElement;
use super::field::{Field, FieldExt};
use super::residue::{ResidueElement, ResidueField};
use crate::arith::{self, inv_mod, mul_mod};
use crate::error::{Error, Result};
use crate::fpx::{self, Poly};

pub const DEFAULT_HEIGHT_BOUND: u64 = 1_000_000;
/// Reconstruction needs p^k > 2·H², and p^k must stay below 2^62.
pub const MAX_HEIGHT_BOUND: u64 = 100_000_000;
const LIFTING_PRIME_SEARCH: u64 = 500;
const LIFTING_PRIMES_KEPT: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NotFoundReason {
    /// Some residue field has no root, so no global root exists.
    ProvedNonSquare,
    /// Roots exist locally but none was reconstructed within the bound.
    HeightBound,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SqrtOutcome {
    Found(FieldElement),
    NotFound(NotFoundReason),
}

impl SqrtOutcome {
    pub fn root(&self) -> Option<&FieldElement> {
        match self {
            SqrtOutcome::Found(y) => Some(y),
            SqrtOutcome::NotFound(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RootSearch {
    pub roots: Vec<FieldElement>,
    /// True when `roots` is provably every root in K.
    pub complete: bool,
}

/// An odd prime p with the defining polynomial squarefree mod p.
pub(crate) struct LiftingPrime {
    p: u64,
    fbar: Poly,
    factors: Vec<ResidueField>,
    idempotents: Vec<Poly>,
    /// p^k, the largest power below 2^62.
    modulus: u64,
    f_mod: Vec<u64>,
}

impl LiftingPrime {
    fn new(k: &Field, p: u64) -> Option<Self> {
        let fbar: Poly = k
            .defining_poly()
            .iter()
            .map(|c| c.mod_floor(&BigInt::from(p)).to_u64().unwrap())
            .collect();
        let fac = fpx::factor(&fbar, p);
        if fac.iter().any(|(_, e)| *e > 1) {
            return None;
        }
        let mut idempotents = Vec::new();
        for (g, _) in &fac {
            let h = fpx::divrem(&fbar, g, p).0;
            let hinv = fpx::inv_modulo(&fpx::rem(&h, g, p), g, p)?;
            idempotents.push(fpx::rem(&fpx::mul(&h, &hinv, p), &fbar, p));
        }
        let mut modulus = p;
        while let Some(next) = modulus.checked_mul(p).filter(|&m| m < 1 << 62) {
            modulus = next;
        }
        let mb = BigInt::from(modulus);
        let f_mod = k
            .defining_poly()
            .iter()
            .map(|c| c.mod_floor(&mb).to_u64().unwrap())
            .collect();
        Some(LiftingPrime {
            p,
            fbar,
            factors: fac.into_iter().map(|(g, _)| ResidueField::new(p, g)).collect(),
            idempotents,
            modulus,
            f_mod,
        })
    }

    fn reduce_rational_mod(&self, q: &BigRational, m: u64) -> Option<u64> {
        let mb = BigInt::from(m);
        let n = q.numer().mod_floor(&mb).to_u64()?;
        let d = q.denom().mod_floor(&mb).to_u64()?;
        Some(mul_mod(n, inv_mod(d, m)?, m))
    }

    /// Image in (Z/m)[t]/(f); None if the denominator is not prime to p.
    fn image(&self, x: &FieldElement, m: u64) -> Option<Vec<u64>> {
        if x.denominator().is_multiple_of(&BigInt::from(self.p)) {
            return None;
        }
        Some(
            x.coords()
                .iter()
                .map(|c| self.reduce_rational_mod(c, m))
                .collect::<Option<Vec<u64>>>()?,
        )
    }

    fn image_mod_p(&self, x: &FieldElement) -> Option<Poly> {
        let mut v = self.image(x, self.p)?;
        fpx::trim(&mut v);
        Some(v)
    }
}

pub(crate) fn lifting_primes(k: &Field) -> &[LiftingPrime] {
    k.lifting_cache().get_or_init(|| {
        let mut cands: Vec<LiftingPrime> = arith::primes_up_to(LIFTING_PRIME_SEARCH)
            .into_iter()
            .filter(|&p| p > 2)
            .filter_map(|p| LiftingPrime::new(k, p))
            .collect();
        cands.sort_by_key(|lp| (lp.factors.len(), lp.p));
        cands.truncate(LIFTING_PRIMES_KEPT);
        cands
    })
}

/// Arithmetic in (Z/m)[t]/(f) for monic f.
struct ModRing<'a> {
    m: u64,
    f: &'a [u64],
}

impl ModRing<'_> {
    fn n(&self) -> usize {
        self.f.len() - 1
    }

    fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| ((*x as u128 + *y as u128) % self.m as u128) as u64).collect()
    }

    fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| ((*x as u128 + (self.m - y) as u128) % self.m as u128) as u64).collect()
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = self.n();
        let m = self.m as u128;
        let mut prod = vec![0u128; 2 * n - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % m;
            }
        }
        for d in (n..2 * n - 1).rev() {
            let top = prod[d];
            if top == 0 {
                continue;
            }
            for i in 0..n {
                let sub = top * self.f[i] as u128 % m;
                prod[d - n + i] = (prod[d - n + i] + m - sub) % m;
            }
        }
        prod.truncate(n);
        prod.into_iter().map(|c| c as u64).collect()
    }

    fn constant(&self, c: u64) -> Vec<u64> {
        let mut v = vec![0; self.n()];
        v[0] = c % self.m;
        v
    }

    fn eval(&self, poly: &[Vec<u64>], x: &[u64]) -> Vec<u64> {
        let mut acc = vec![0; self.n()];
        for c in poly.iter().rev() {
            acc = self.add(&self.mul(&acc, x), c);
        }
        acc
    }
}

fn pad(mut v: Vec<u64>, n: usize) -> Vec<u64> {
    v.resize(n, 0);
    v
}

fn derivative(coeffs: &[FieldElement]) -> Vec<FieldElement> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.scale_int(&BigInt::from(i)))
        .collect()
}

fn eval_k(coeffs: &[FieldElement], x: &FieldElement) -> FieldElement {
    let mut acc = x.field().zero();
    for c in coeffs.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

fn discriminant(c: &[FieldElement]) -> FieldElement {
    match c.len() {
        3 => {
            // X² + bX + c
            &c[1].square() - &c[0].scale_int(&BigInt::from(4))
        }
        4 => {
            let (a, b, cc) = (&c[2], &c[1], &c[0]);
            let t1 = &a.square() * &b.square();
            let t2 = b.pow(3).scale_int(&BigInt::from(4));
            let t3 = (&a.pow(3) * cc).scale_int(&BigInt::from(4));
            let t4 = cc.square().scale_int(&BigInt::from(27));
            let t5 = (&(a * b) * cc).scale_int(&BigInt::from(18));
            &(&(&(&t1 - &t2) - &t3) - &t4) + &t5
        }
        _ => unreachable!(),
    }
}

enum LocalRoots {
    /// Some factor has no root.
    None,
    Roots(Vec<Vec<ResidueElement>>),
}

fn local_roots(lp: &LiftingPrime, monic: &[FieldElement], disc: &FieldElement) -> Option<LocalRoots> {
    let dbar = lp.image_mod_p(disc)?;
    let cbar: Vec<Poly> = monic
        .iter()
        .map(|c| lp.image_mod_p(c))
        .collect::<Option<_>>()?;
    let mut out = Vec::new();
    for rf in &lp.factors {
        if rf.reduce(&dbar).is_empty() {
            return None;
        }
        let poly: Vec<ResidueElement> = cbar.iter().map(|c| rf.reduce(c)).collect();
        let roots = rf.roots(&poly);
        if roots.is_empty() {
            return Some(LocalRoots::None);
        }
        out.push(roots);
    }
    Some(LocalRoots::Roots(out))
}

/// All roots in K of a monic-izable polynomial of degree 2 or 3
/// (coefficients constant first), with numerators and denominators of
/// coordinates bounded by `height_bound`.
pub fn roots_in_field(coeffs: &[FieldElement], height_bound: u64) -> Result<RootSearch> {
    let mut coeffs = coeffs.to_vec();
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    let k = coeffs
        .first()
        .ok_or(Error::Invalid("empty polynomial".into()))?
        .field()
        .clone();
    let lead_inv = coeffs.last().unwrap().inv()?;
    let monic: Vec<FieldElement> = coeffs.iter().map(|c| c * &lead_inv).collect();
    match monic.len() {
        1 => {
            return Ok(RootSearch {
                roots: Vec::new(),
                complete: true,
            })
        }
        2 => {
            return Ok(RootSearch {
                roots: vec![-&monic[0]],
                complete: true,
            })
        }
        3 | 4 => {}
        d => return Err(Error::Invalid(format!("root search supports degree <= 3, got {}", d - 1))),
    }
    let disc = discriminant(&monic);
    if disc.is_zero() {
        return Err(Error::Invalid("polynomial has a repeated root".into()));
    }
    let height = height_bound.clamp(1, MAX_HEIGHT_BOUND) as u128;
    let lps = lifting_primes(&k);
    // Prefer the prime with the fewest local roots; the smallest local
    // count over all usable primes bounds the number of roots in K.
    let mut chosen: Option<(&LiftingPrime, Vec<Vec<ResidueElement>>)> = None;
    let mut bound = usize::MAX;
    for lp in lps {
        match local_roots(lp, &monic, &disc) {
            None => continue,
            Some(LocalRoots::None) => {
                return Ok(RootSearch {
                    roots: Vec::new(),
                    complete: true,
                })
            }
            Some(LocalRoots::Roots(r)) => {
                let here = r.iter().map(Vec::len).min().unwrap();
                let combos = |r: &[Vec<ResidueElement>]| r.iter().map(Vec::len).product::<usize>();
                let better = match &chosen {
                    None => true,
                    Some((_, old)) => here < bound || (here == bound && combos(&r) < combos(old)),
                };
                bound = bound.min(here);
                if better {
                    chosen = Some((lp, r));
                }
            }
        }
    }
    let Some((lp, local)) = chosen else {
        return Ok(RootSearch {
            roots: Vec::new(),
            complete: false,
        });
    };
    let max_roots = bound;
    let n = k.degree();
    let ring = ModRing {
        m: lp.modulus,
        f: &lp.f_mod,
    };
    let pm: Vec<Vec<u64>> = monic
        .iter()
        .map(|c| lp.image(c, lp.modulus).unwrap())
        .collect();
    let dpm: Vec<Vec<u64>> = derivative(&monic)
        .iter()
        .map(|c| lp.image(c, lp.modulus).unwrap())
        .collect();
    let dp_bar: Vec<Poly> = derivative(&monic)
        .iter()
        .map(|c| lp.image_mod_p(c).unwrap())
        .collect();

    let mut found: Vec<FieldElement> = Vec::new();
    let mut idx = vec![0usize; local.len()];
    'combos: loop {
        // CRT-combine one root per factor into F_p[t]/(f̄)
        let mut r0: Poly = Vec::new();
        for (i, &j) in idx.iter().enumerate() {
            let term = fpx::mul(&lp.idempotents[i], &local[i][j], lp.p);
            r0 = fpx::add(&r0, &term, lp.p);
        }
        r0 = fpx::rem(&r0, &lp.fbar, lp.p);
        let dval = dp_bar
            .iter()
            .rev()
            .fold(Vec::new(), |acc, c| fpx::add(&fpx::mulmod(&acc, &r0, &lp.fbar, lp.p), c, lp.p));
        if let Some(dinv) = fpx::inv_modulo(&dval, &lp.fbar, lp.p) {
            if let Some(y) = lift_and_reconstruct(&k, &ring, &pm, &dpm, pad(r0, n), pad(dinv, n), height)
            {
                if eval_k(&monic, &y).is_zero() && !found.contains(&y) {
                    found.push(y);
                    if found.len() == max_roots {
                        break 'combos;
                    }
                }
            }
        }
        // next index tuple
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                break 'combos;
            }
            idx[pos] += 1;
            if idx[pos] < local[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
    let mut complete = found.len() == max_roots;
    if !complete && monic.len() == 4 && !found.is_empty() {
        // deflate by a known root and settle the quadratic cofactor
        let r = found[0].clone();
        let b1 = &monic[2] + &r;
        let b0 = &monic[1] + &(&b1 * &r);
        let rest = roots_in_field(&[b0, b1, k.one()], height_bound)?;
        for y in rest.roots {
            if !found.contains(&y) {
                found.push(y);
            }
        }
        complete = rest.complete;
    }
    found.sort_by_key(|y| y.to_string());
    Ok(RootSearch {
        roots: found,
        complete,
    })
}

fn lift_and_reconstruct(
    k: &Field,
    ring: &ModRing,
    pm: &[Vec<u64>],
    dpm: &[Vec<u64>],
    mut r: Vec<u64>,
    mut d: Vec<u64>,
    height: u128,
) -> Option<FieldElement> {
    let two = ring.constant(2);
    for _ in 0..64 {
        let val = ring.eval(pm, &r);
        if val.iter().all(|&c| c == 0) {
            break;
        }
        r = ring.sub(&r, &ring.mul(&val, &d));
        let dv = ring.eval(dpm, &r);
        d = ring.mul(&d, &ring.sub(&two, &ring.mul(&dv, &d)));
    }
    if !ring.eval(pm, &r).iter().all(|&c| c == 0) {
        return None;
    }
    let coords: Vec<BigRational> = r
        .iter()
        .map(|&c| {
            arith::rational_reconstruct(c as u128, ring.m as u128, height)
                .map(|(a, b)| BigRational::new(BigInt::from(a), BigInt::from(b)))
        })
        .collect::<Option<_>>()?;
    k.from_rationals(coords).ok()
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    Some(BigRational::new(
        arith::exact_sqrt(q.numer())?,
        arith::exact_sqrt(q.denom())?,
    ))
}

/// In a quadratic field a root y of y² = x satisfies y = (x + N(y))/Tr(y)
/// with N(y)² = N(x) and Tr(y)² = Tr(x) + 2N(y). Returns None when no root
/// has nonzero trace.
fn quadratic_sqrt(x: &FieldElement) -> Option<FieldElement> {
    let k = x.field();
    let (norm, trace) = x.norm_and_trace();
    let n = rational_sqrt(&norm)?;
    for s in [n.clone(), -n] {
        let Some(t) = rational_sqrt(&(&trace + &s * BigRational::from_integer(2.into()))) else {
            continue;
        };
        if t.is_zero() {
            continue;
        }
        let y = (x + &k.from_rational(s)).checked_div(&k.from_rational(t)).ok()?;
        if &y.square() == x {
            return Some(y);
        }
    }
    None
}

/// A square root of x in K, if one exists with coordinates of height at
/// most `height_bound`.
pub fn sqrt_in_field(x: &FieldElement, height_bound: u64) -> Result<SqrtOutcome> {
    if x.is_zero() {
        return Ok(SqrtOutcome::Found(x.clone()));
    }
    let k = x.field();
    if let Some(q) = x.as_rational() {
        if k.degree() == 1 {
            return Ok(
                match (arith::exact_sqrt(q.numer()), arith::exact_sqrt(q.denom())) {
                    (Some(a), Some(b)) => SqrtOutcome::Found(k.from_rational(BigRational::new(a, b))),
                    _ => SqrtOutcome::NotFound(NotFoundReason::ProvedNonSquare),
                },
            );
        }
    }
    if !arith::is_rational_square(&x.norm()) {
        return Ok(SqrtOutcome::NotFound(NotFoundReason::ProvedNonSquare));
    }
    if k.degree() == 2 {
        if let Some(y) = quadratic_sqrt(x) {
            return Ok(SqrtOutcome::Found(y));
        }
    }
    let poly = [-x, k.zero(), k.one()];
    let search = roots_in_field(&poly, height_bound)?;
    Ok(match search.roots.into_iter().next() {
        Some(y) => SqrtOutcome::Found(y),
        None if search.complete => SqrtOutcome::NotFound(NotFoundReason::ProvedNonSquare),
        None => SqrtOutcome::NotFound(NotFoundReason::HeightBound),
    })
}

/// Residue images of x at the lifting primes, for fast square prefilters:
/// returns (p, residue fields) pairs.
pub fn lifting_residue_fields(k: &Field) -> Vec<(u64, Vec<ResidueField>)> {
    lifting_primes(k)
        .iter()
        .map(|lp| (lp.p, lp.factors.clone()))
        .collect()
}

impl FieldElement {
    pub fn is_square_in_field(&self, height_bound: u64) -> Result<Option<bool>> {
        Ok(match sqrt_in_field(self, height_bound)? {
            SqrtOutcome::Found(_) => Some(true),
            SqrtOutcome::NotFound(NotFoundReason::ProvedNonSquare) => Some(false),
            SqrtOutcome::NotFound(NotFoundReason::HeightBound) => None,
        })
    }
}

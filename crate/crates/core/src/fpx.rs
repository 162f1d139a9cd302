//! Dense univariate polynomials over a prime field F_p, coefficients low
//! degree first, stored as `Vec<u64>` without trailing zeros.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{inv_mod, mul_mod};

pub type Poly = Vec<u64>;

pub fn trim(a: &mut Poly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub fn degree(a: &[u64]) -> Option<usize> {
    if a.is_empty() {
        None
    } else {
        Some(a.len() - 1)
    }
}

pub fn from_i64(coeffs: &[i64], p: u64) -> Poly {
    let mut v: Poly = coeffs
        .iter()
        .map(|&c| c.rem_euclid(p as i64) as u64)
        .collect();
    trim(&mut v);
    v
}

pub fn add(a: &[u64], b: &[u64], p: u64) -> Poly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out.push((x + y) % p);
    }
    trim(&mut out);
    out
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out.push((x + p - y) % p);
    }
    trim(&mut out);
    out
}

pub fn scale(a: &[u64], c: u64, p: u64) -> Poly {
    let mut out: Poly = a.iter().map(|&x| mul_mod(x, c, p)).collect();
    trim(&mut out);
    out
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    trim(&mut out);
    out
}

/// Quotient and remainder; `b` must be nonzero.
pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (Poly, Poly) {
    assert!(!b.is_empty(), "polynomial division by zero");
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p).expect("leading coefficient invertible");
    let mut r: Poly = a.to_vec();
    trim(&mut r);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![0u64; r.len() - db];
    while r.len() > db {
        let k = r.len() - 1 - db;
        let c = mul_mod(*r.last().unwrap(), lead_inv, p);
        q[k] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[k + j] = (r[k + j] + p - mul_mod(c, bj, p)) % p;
        }
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

pub fn rem(a: &[u64], b: &[u64], p: u64) -> Poly {
    divrem(a, b, p).1
}

pub fn monic(a: &[u64], p: u64) -> Poly {
    match a.last() {
        None => Vec::new(),
        Some(&l) => scale(a, inv_mod(l, p).unwrap(), p),
    }
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    monic(&x, p)
}

/// Extended gcd: returns (g, s, t) with s·a + t·b = g, g monic.
pub fn xgcd(a: &[u64], b: &[u64], p: u64) -> (Poly, Poly, Poly) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    trim(&mut r0);
    trim(&mut r1);
    let (mut s0, mut s1): (Poly, Poly) = (vec![1], Vec::new());
    let (mut t0, mut t1): (Poly, Poly) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p);
        r0 = std::mem::replace(&mut r1, r);
        let s2 = sub(&s0, &mul(&q, &s1, p), p);
        s0 = std::mem::replace(&mut s1, s2);
        let t2 = sub(&t0, &mul(&q, &t1, p), p);
        t0 = std::mem::replace(&mut t1, t2);
    }
    match r0.last() {
        None => (r0, s0, t0),
        Some(&l) => {
            let li = inv_mod(l, p).unwrap();
            (scale(&r0, li, p), scale(&s0, li, p), scale(&t0, li, p))
        }
    }
}

/// Inverse of `a` modulo `m`, when coprime.
pub fn inv_modulo(a: &[u64], m: &[u64], p: u64) -> Option<Poly> {
    let (g, s, _) = xgcd(a, m, p);
    (g == vec![1]).then(|| rem(&s, m, p))
}

pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Poly {
    rem(&mul(a, b, p), m, p)
}

pub fn powmod(a: &[u64], e: &BigUint, m: &[u64], p: u64) -> Poly {
    let mut acc: Poly = rem(&[1], m, p);
    let base = rem(a, m, p);
    for i in (0..e.bits()).rev() {
        acc = mulmod(&acc, &acc, m, p);
        if e.bit(i) {
            acc = mulmod(&acc, &base, m, p);
        }
    }
    acc
}

pub fn derivative(a: &[u64], p: u64) -> Poly {
    let mut out: Poly = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
        .collect();
    trim(&mut out);
    out
}

pub fn eval(a: &[u64], x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
}

/// Square-free decomposition: pairs (squarefree factor, multiplicity).
/// `f` must be monic.
pub fn squarefree_decomposition(f: &[u64], p: u64) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    sff_rec(f, p, 1, &mut out);
    out
}

fn sff_rec(f: &[u64], p: u64, mult: u32, out: &mut Vec<(Poly, u32)>) {
    if f.len() <= 1 {
        return;
    }
    let d = derivative(f, p);
    if d.is_empty() {
        sff_rec(&pth_root(f, p), p, mult * p as u32, out);
        return;
    }
    let mut c = gcd(f, &d, p);
    let mut w = divrem(f, &c, p).0;
    let mut i = 1;
    while w.len() > 1 {
        let y = gcd(&w, &c, p);
        let fac = divrem(&w, &y, p).0;
        if fac.len() > 1 {
            out.push((monic(&fac, p), i * mult));
        }
        i += 1;
        c = divrem(&c, &y, p).0;
        w = y;
    }
    if c.len() > 1 {
        sff_rec(&pth_root(&c, p), p, mult * p as u32, out);
    }
}

/// For a polynomial in x^p over F_p, return the p-th root.
fn pth_root(f: &[u64], p: u64) -> Poly {
    f.iter().step_by(p as usize).copied().collect()
}

/// Distinct-degree factorization of a squarefree monic polynomial.
fn distinct_degree(f: &[u64], p: u64) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let mut rest = f.to_vec();
    let x: Poly = vec![0, 1];
    let mut h = rem(&x, &rest, p);
    let pe = BigUint::from(p);
    let mut d = 0;
    while rest.len() > 1 {
        d += 1;
        if 2 * d > rest.len() - 1 {
            out.push((rest.clone(), rest.len() - 1));
            break;
        }
        h = powmod(&h, &pe, &rest, p);
        let g = gcd(&sub(&h, &x, p), &rest, p);
        if g.len() > 1 {
            out.push((g.clone(), d));
            rest = divrem(&rest, &g, p).0;
            h = rem(&h, &rest, p);
        }
    }
    out
}

/// Equal-degree splitting (Cantor-Zassenhaus; trace map in characteristic 2).
fn equal_degree(f: &[u64], d: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let n = f.len() - 1;
    if n == d {
        return vec![f.to_vec()];
    }
    loop {
        let mut a: Poly = (0..n).map(|_| rng.gen_range(0..p)).collect();
        trim(&mut a);
        if a.len() <= 1 {
            continue;
        }
        let b = if p == 2 {
            let mut acc = a.clone();
            let mut t = a.clone();
            for _ in 1..d {
                t = mulmod(&t, &t, f, p);
                acc = add(&acc, &t, p);
            }
            acc
        } else {
            let e = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
            sub(&powmod(&a, &e, f, p), &[1], p)
        };
        let g = gcd(&b, f, p);
        if g.len() > 1 && g.len() < f.len() {
            let other = divrem(f, &g, p).0;
            let mut out = equal_degree(&g, d, p, rng);
            out.extend(equal_degree(&monic(&other, p), d, p, rng));
            return out;
        }
    }
}

/// Complete factorization of a monic polynomial into monic irreducibles
/// with multiplicities, sorted by (degree, coefficients).
pub fn factor(f: &[u64], p: u64) -> Vec<(Poly, u32)> {
    let f = monic(f, p);
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b72_6175_73);
    let mut out = Vec::new();
    for (sf, mult) in squarefree_decomposition(&f, p) {
        for (block, d) in distinct_degree(&sf, p) {
            for g in equal_degree(&block, d, p, &mut rng) {
                out.push((g, mult));
            }
        }
    }
    out.sort_by(|(a, _), (b, _)| a.len().cmp(&b.len()).then_with(|| a.iter().rev().cmp(b.iter().rev())));
    out
}

pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    let f = monic(f, p);
    let fac = factor(&f, p);
    fac.len() == 1 && fac[0].1 == 1 && fac[0].0.len() == f.len()
}

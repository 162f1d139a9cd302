//! Rational-integer utilities: primality, factorization with a time budget,
//! modular arithmetic on machine words and rational reconstruction.

use std::time::{Duration, Instant};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Trial division bound used before switching to Pollard rho.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

/// Default wall-clock budget for factoring a single integer.
pub const DEFAULT_FACTOR_BUDGET: Duration = Duration::from_secs(10);

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    if t < 0 {
        t += m as i128;
    }
    Some(t as u64)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Probable-prime test for arbitrary integers (deterministic below 2^64).
pub fn is_prime(n: &BigInt) -> bool {
    if n.sign() != Sign::Plus {
        return false;
    }
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let one = BigInt::one();
    let n_minus_1 = n - &one;
    let mut d = n_minus_1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let a = BigInt::from(a);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &b)| b.then_some(k as u64))
        .collect()
}

fn small_primes() -> &'static [u64] {
    use std::sync::OnceLock;
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_DIVISION_BOUND))
}

/// p-adic valuation of a nonzero integer.
pub fn val_p(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    if let Some(small) = n.abs().to_u64() {
        let mut k = 0;
        let mut m = small;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        return k;
    }
    let pb = BigInt::from(p);
    let mut k = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return k;
        }
        m = q;
        k += 1;
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Brent's variant of Pollard rho on a 64-bit composite.
fn rho_u64(n: u64, deadline: Instant) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    for c in 1..u64::MAX {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g, mut r, mut q) = (2u64, 2u64, 1u64, 1u64, 1u64);
        let mut ys = 2u64;
        let m = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += m;
            }
            r *= 2;
            if Instant::now() > deadline {
                return None;
            }
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
    }
    None
}

fn rho_big(n: &BigInt, deadline: Instant) -> Option<BigInt> {
    if n.is_even() {
        return Some(BigInt::from(2));
    }
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut x = BigInt::from(2);
        let mut y = BigInt::from(2);
        let mut d = BigInt::one();
        let mut steps = 0u64;
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            d = (&x - &y).abs().gcd(n);
            steps += 1;
            if steps % 256 == 0 && Instant::now() > deadline {
                return None;
            }
        }
        if &d != n {
            return Some(d);
        }
        c += 1;
    }
}

fn split_composite(n: BigInt, deadline: Instant, out: &mut Vec<BigInt>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if is_prime(&n) {
        out.push(n);
        return Ok(());
    }
    let factor = match n.to_u64() {
        Some(small) => rho_u64(small, deadline).map(BigInt::from),
        None => rho_big(&n, deadline),
    };
    match factor {
        Some(d) => {
            let other = &n / &d;
            split_composite(d, deadline, out)?;
            split_composite(other, deadline, out)
        }
        None => Err(Error::FactorizationTimeout { cofactor: n }),
    }
}

/// Factor a nonzero integer into primes with multiplicity (sign dropped),
/// by trial division to [`TRIAL_DIVISION_BOUND`] then Pollard rho under
/// the given wall-clock budget.
pub fn factor_integer(n: &BigInt, budget: Duration) -> Result<Vec<(BigInt, u32)>> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    let deadline = Instant::now() + budget;
    let mut m = n.abs();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    if let Some(small) = m.to_u64() {
        return factor_u64(small, deadline).map(|v| {
            v.into_iter()
                .map(|(p, k)| (BigInt::from(p), k))
                .collect()
        });
    }
    for (i, &p) in small_primes().iter().enumerate() {
        let pb = BigInt::from(p);
        if &pb * &pb > m {
            break;
        }
        let mut k = 0;
        loop {
            let (q, r) = m.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            m = q;
            k += 1;
        }
        if k > 0 {
            out.push((pb, k));
        }
        if m.is_one() || (i % 512 == 511 && is_prime(&m)) {
            break;
        }
        if let Some(small) = m.to_u64() {
            for (q, k) in factor_u64(small, deadline)? {
                out.push((BigInt::from(q), k));
            }
            m = BigInt::one();
            break;
        }
    }
    let mut rest = Vec::new();
    split_composite(m, deadline, &mut rest)?;
    rest.sort();
    for q in rest {
        match out.last_mut() {
            Some((last, k)) if *last == q => *k += 1,
            _ => out.push((q, 1)),
        }
    }
    out.sort();
    merge_equal(&mut out);
    Ok(out)
}

fn merge_equal(v: &mut Vec<(BigInt, u32)>) {
    let mut merged: Vec<(BigInt, u32)> = Vec::with_capacity(v.len());
    for (p, k) in v.drain(..) {
        match merged.last_mut() {
            Some((q, j)) if *q == p => *j += k,
            _ => merged.push((p, k)),
        }
    }
    *v = merged;
}

/// Factor a 64-bit integer; trial division by small primes, then rho.
pub fn factor_u64(mut n: u64, deadline: Instant) -> Result<Vec<(u64, u32)>> {
    let mut out = Vec::new();
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    for &p in small_primes() {
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        if p > 1000 && is_prime_u64(n) {
            break;
        }
    }
    if n > 1 {
        let mut stack = vec![n];
        let mut primes = Vec::new();
        while let Some(m) = stack.pop() {
            if m == 1 {
                continue;
            }
            if is_prime_u64(m) {
                primes.push(m);
                continue;
            }
            match rho_u64(m, deadline) {
                Some(d) => {
                    stack.push(d);
                    stack.push(m / d);
                }
                None => {
                    return Err(Error::FactorizationTimeout {
                        cofactor: BigInt::from(m),
                    })
                }
            }
        }
        primes.sort_unstable();
        for q in primes {
            match out.last_mut() {
                Some((last, k)) if *last == q => *k += 1,
                _ => out.push((q, 1)),
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Distinct prime divisors of a nonzero rational's numerator and denominator.
pub fn prime_support(x: &BigRational, budget: Duration) -> Result<Vec<BigInt>> {
    let mut ps: Vec<BigInt> = factor_integer(x.numer(), budget)?
        .into_iter()
        .map(|(p, _)| p)
        .collect();
    if !x.denom().is_one() {
        ps.extend(factor_integer(x.denom(), budget)?.into_iter().map(|(p, _)| p));
    }
    ps.sort();
    ps.dedup();
    Ok(ps)
}

/// Find `a/b` with |a| <= bound and 0 < b <= bound and `a ≡ c·b (mod m)`.
/// Requires `m > 2·bound²` for uniqueness.
pub fn rational_reconstruct(c: u128, m: u128, bound: u128) -> Option<(i128, u128)> {
    let c = c % m;
    let (mut r0, mut r1) = (m as i128, c as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 as u128 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.unsigned_abs() > bound {
        return None;
    }
    let (num, den) = if t1 < 0 { (-r1, (-t1) as u128) } else { (r1, t1 as u128) };
    if gcd_u128(num.unsigned_abs(), den) != 1 {
        return None;
    }
    Some((num, den))
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Integer square root test; returns the root when `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Square test for rationals.
pub fn is_rational_square(x: &BigRational) -> bool {
    exact_sqrt(x.numer()).is_some() && exact_sqrt(x.denom()).is_some()
}

/// Render a rational as `"num/den"`, or `"num"` when integral.
pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Convert a positive prime to `u64`, rejecting composites and overflow.
pub fn prime_to_u64(p: &BigInt) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p.clone()));
    }
    match p.to_u64() {
        Some(v) if v < (1 << 62) => Ok(v),
        _ => Err(Error::PrimeTooLarge(p.clone())),
    }
}

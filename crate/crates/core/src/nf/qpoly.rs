//! Polynomials over Q, used for Sturm chains.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub type QPoly = Vec<BigRational>;

fn trim(a: &mut QPoly) {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
}

pub fn derivative(a: &[BigRational]) -> QPoly {
    let mut out: QPoly = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(i.into()))
        .collect();
    trim(&mut out);
    out
}

pub fn rem(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let mut r: QPoly = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() > db {
        let k = r.len() - 1 - db;
        let c = r.last().unwrap() / lead;
        for (j, bj) in b.iter().enumerate() {
            r[k + j] = &r[k + j] - &c * bj;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

/// Sturm sequence f, f', -rem(...), ... ending at a nonzero constant.
pub fn sturm_chain(f: &[BigRational]) -> Vec<QPoly> {
    let mut chain = vec![f.to_vec(), derivative(f)];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            break;
        }
        let r: QPoly = rem(&chain[n - 2], &chain[n - 1])
            .into_iter()
            .map(|c| -c)
            .collect();
        if r.is_empty() {
            break;
        }
        chain.push(r);
    }
    chain
}

fn sign_changes(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn sign_at_infinity(p: &[BigRational], negative: bool) -> i32 {
    let lead = p.last().expect("nonzero polynomial");
    let mut s = if lead.is_positive() { 1 } else { -1 };
    if negative && (p.len() - 1) % 2 == 1 {
        s = -s;
    }
    s
}

/// Number of distinct real roots of a nonzero polynomial.
pub fn count_real_roots(f: &[BigRational]) -> usize {
    let chain = sturm_chain(f);
    let minus = sign_changes(chain.iter().map(|p| sign_at_infinity(p, true)));
    let plus = sign_changes(chain.iter().map(|p| sign_at_infinity(p, false)));
    minus - plus
}

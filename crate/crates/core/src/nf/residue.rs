//! Finite fields F_p[t]/(g) realized as residue fields of prime ideals.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fpx::{self, Poly};

/// Element of a residue field: a reduced polynomial of degree < f.
pub type ResidueElement = Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueField {
    p: u64,
    modulus: Poly,
}

impl ResidueField {
    /// `modulus` must be monic and irreducible over F_p.
    pub fn new(p: u64, modulus: Poly) -> Self {
        debug_assert!(modulus.len() >= 2 && *modulus.last().unwrap() == 1);
        ResidueField { p, modulus }
    }

    pub fn prime_field(p: u64) -> Self {
        ResidueField::new(p, vec![0, 1])
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// p^f, if it fits in a u128.
    pub fn size(&self) -> Option<u128> {
        (self.p as u128).checked_pow(self.degree() as u32)
    }

    pub fn order_big(&self) -> BigUint {
        BigUint::from(self.p).pow(self.degree() as u32)
    }

    pub fn zero(&self) -> ResidueElement {
        Vec::new()
    }

    pub fn one(&self) -> ResidueElement {
        vec![1]
    }

    pub fn from_u64(&self, c: u64) -> ResidueElement {
        let mut v = vec![c % self.p];
        fpx::trim(&mut v);
        v
    }

    pub fn from_i64(&self, c: i64) -> ResidueElement {
        self.from_u64(c.rem_euclid(self.p as i64) as u64)
    }

    pub fn reduce(&self, a: &[u64]) -> ResidueElement {
        fpx::rem(a, &self.modulus, self.p)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> ResidueElement {
        fpx::add(a, b, self.p)
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> ResidueElement {
        fpx::sub(a, b, self.p)
    }

    pub fn neg(&self, a: &[u64]) -> ResidueElement {
        fpx::sub(&[], a, self.p)
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> ResidueElement {
        fpx::mulmod(a, b, &self.modulus, self.p)
    }

    pub fn scale(&self, a: &[u64], c: u64) -> ResidueElement {
        fpx::scale(a, c % self.p, self.p)
    }

    pub fn inv(&self, a: &[u64]) -> Option<ResidueElement> {
        if a.is_empty() {
            return None;
        }
        fpx::inv_modulo(a, &self.modulus, self.p)
    }

    pub fn pow(&self, a: &[u64], e: &BigUint) -> ResidueElement {
        fpx::powmod(a, e, &self.modulus, self.p)
    }

    pub fn pow_u64(&self, a: &[u64], e: u64) -> ResidueElement {
        self.pow(a, &BigUint::from(e))
    }

    fn frobenius(&self, a: &[u64]) -> ResidueElement {
        self.pow_u64(a, self.p)
    }

    /// The inverse of Frobenius: the unique p-th root.
    pub fn pth_root(&self, a: &[u64]) -> ResidueElement {
        let mut x = a.to_vec();
        for _ in 1..self.degree() {
            x = self.frobenius(&x);
        }
        x
    }

    /// Absolute trace to F_p.
    pub fn trace(&self, a: &[u64]) -> u64 {
        let mut acc = a.to_vec();
        let mut x = a.to_vec();
        for _ in 1..self.degree() {
            x = self.frobenius(&x);
            acc = self.add(&acc, &x);
        }
        debug_assert!(acc.len() <= 1);
        acc.first().copied().unwrap_or(0)
    }

    pub fn is_square(&self, a: &[u64]) -> bool {
        if a.is_empty() || self.p == 2 {
            return true;
        }
        let e = (self.order_big() - 1u32) >> 1;
        self.pow(a, &e) == vec![1]
    }

    fn non_residue(&self) -> ResidueElement {
        let mut rng = ChaCha8Rng::seed_from_u64(self.p ^ 0x5eed);
        loop {
            let mut c: Poly = (0..self.degree()).map(|_| rng.gen_range(0..self.p)).collect();
            fpx::trim(&mut c);
            if !c.is_empty() && !self.is_square(&c) {
                return c;
            }
        }
    }

    /// A square root, when one exists (Tonelli-Shanks; Frobenius in char 2).
    pub fn sqrt(&self, a: &[u64]) -> Option<ResidueElement> {
        if a.is_empty() {
            return Some(Vec::new());
        }
        if self.p == 2 {
            return Some(self.pth_root(a));
        }
        if !self.is_square(a) {
            return None;
        }
        let q1 = self.order_big() - 1u32;
        let s = q1.trailing_zeros().unwrap_or(0);
        let odd = &q1 >> s;
        let z = self.non_residue();
        let mut m = s;
        let mut c = self.pow(&z, &odd);
        let mut t = self.pow(a, &odd);
        let mut r = self.pow(a, &((&odd + 1u32) >> 1));
        let one = self.one();
        while t != one {
            let mut i = 0;
            let mut tt = t.clone();
            while tt != one {
                tt = self.mul(&tt, &tt);
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = self.mul(&b, &b);
            }
            m = i;
            c = self.mul(&b, &b);
            t = self.mul(&t, &c);
            r = self.mul(&r, &b);
        }
        debug_assert_eq!(self.mul(&r, &r), self.reduce(a));
        Some(r)
    }

    /// Whether a·X² + b·X + c has a root.
    pub fn quadratic_has_root(&self, a: &[u64], b: &[u64], c: &[u64]) -> bool {
        if a.is_empty() {
            return !b.is_empty() || c.is_empty();
        }
        if self.p == 2 {
            if b.is_empty() {
                return true;
            }
            // X = (b/a)·Z turns it into Z² + Z = ac/b²
            let binv = self.inv(b).unwrap();
            let d = self.mul(&self.mul(a, c), &self.mul(&binv, &binv));
            return self.trace(&d) == 0;
        }
        let disc = self.sub(&self.mul(b, b), &self.scale(&self.mul(a, c), 4));
        self.is_square(&disc)
    }

    /// A solution of Z² + Z = d in characteristic 2, when Tr(d) = 0.
    pub fn artin_schreier_root(&self, d: &[u64]) -> Option<ResidueElement> {
        assert_eq!(self.p, 2);
        if self.trace(d) != 0 {
            return None;
        }
        let f = self.degree();
        // any element of trace 1
        let delta = (0..f)
            .map(|k| {
                let mut v = vec![0; k + 1];
                v[k] = 1;
                v
            })
            .find(|v| self.trace(v) == 1)
            .expect("trace form is nonzero");
        let mut dpow = vec![d.to_vec()];
        let mut epow = vec![delta];
        for i in 1..f {
            dpow.push(self.mul(&dpow[i - 1], &dpow[i - 1]));
            epow.push(self.mul(&epow[i - 1], &epow[i - 1]));
        }
        let mut z = self.zero();
        for i in 0..f.saturating_sub(1) {
            let mut inner = self.zero();
            for e in &epow[i + 1..f] {
                inner = self.add(&inner, e);
            }
            z = self.add(&z, &self.mul(&inner, &dpow[i]));
        }
        let check = self.add(&self.mul(&z, &z), &z);
        debug_assert_eq!(check, self.reduce(d));
        Some(z)
    }

    /// Element with the given base-p digit index (enumeration order).
    pub fn element_from_index(&self, mut i: u128) -> ResidueElement {
        let mut v = Vec::with_capacity(self.degree());
        for _ in 0..self.degree() {
            v.push((i % self.p as u128) as u64);
            i /= self.p as u128;
        }
        fpx::trim(&mut v);
        v
    }

    /// All elements in index order; size must fit in memory-scale loops.
    pub fn elements(&self) -> impl Iterator<Item = ResidueElement> + '_ {
        let n = self.size().expect("residue field too large to enumerate");
        (0..n).map(move |i| self.element_from_index(i))
    }

    /// Distinct roots of a polynomial with residue-field coefficients
    /// (constant first). Uses gcd with X^q - X and random splitting.
    pub fn roots(&self, poly: &[ResidueElement]) -> Vec<ResidueElement> {
        let mut f = rp_trim(poly.to_vec());
        if f.len() <= 1 {
            return Vec::new();
        }
        f = self.rp_monic(&f);
        if self.p == 2 {
            if let Some(n) = self.size().filter(|&n| n <= 1 << 20) {
                return (0..n)
                    .map(|i| self.element_from_index(i))
                    .filter(|x| self.rp_eval(&f, x).is_empty())
                    .collect();
            }
        }
        let x = vec![Vec::new(), vec![1]];
        let xq = self.rp_powmod(&x, &self.order_big(), &f);
        let mut g = self.rp_gcd(&self.rp_sub(&xq, &x), &f);
        let mut out = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0x726f_6f74);
        self.split_linear(&mut g, &mut out, &mut rng);
        out.sort();
        out
    }

    fn split_linear(&self, g: &mut Vec<ResidueElement>, out: &mut Vec<ResidueElement>, rng: &mut ChaCha8Rng) {
        match g.len() {
            0 | 1 => return,
            2 => {
                let g = self.rp_monic(g);
                out.push(self.neg(&g[0]));
                return;
            }
            _ => {}
        }
        let e = (self.order_big() - 1u32) >> 1;
        loop {
            let mut a: Poly = (0..self.degree()).map(|_| rng.gen_range(0..self.p)).collect();
            fpx::trim(&mut a);
            let lin = vec![a, vec![1]];
            let h = self.rp_powmod(&lin, &e, g);
            let h1 = self.rp_sub(&h, &[vec![1]]);
            let d = self.rp_gcd(&h1, g);
            if d.len() > 1 && d.len() < g.len() {
                let mut other = self.rp_divrem(g, &d).0;
                let mut d = d;
                self.split_linear(&mut d, out, rng);
                self.split_linear(&mut other, out, rng);
                return;
            }
        }
    }

    // polynomials over the residue field, coefficient lists constant first

    pub fn rp_eval(&self, f: &[ResidueElement], x: &[u64]) -> ResidueElement {
        f.iter()
            .rev()
            .fold(Vec::new(), |acc, c| self.add(&self.mul(&acc, x), c))
    }

    fn rp_monic(&self, f: &[ResidueElement]) -> Vec<ResidueElement> {
        let inv = self.inv(f.last().unwrap()).unwrap();
        f.iter().map(|c| self.mul(c, &inv)).collect()
    }

    fn rp_sub(&self, a: &[ResidueElement], b: &[ResidueElement]) -> Vec<ResidueElement> {
        let n = a.len().max(b.len());
        let empty = Vec::new();
        let out = (0..n)
            .map(|i| self.sub(a.get(i).unwrap_or(&empty), b.get(i).unwrap_or(&empty)))
            .collect();
        rp_trim(out)
    }

    fn rp_mul(&self, a: &[ResidueElement], b: &[ResidueElement]) -> Vec<ResidueElement> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Vec::new(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.add(&out[i + j], &self.mul(x, y));
            }
        }
        rp_trim(out)
    }

    fn rp_divrem(
        &self,
        a: &[ResidueElement],
        b: &[ResidueElement],
    ) -> (Vec<ResidueElement>, Vec<ResidueElement>) {
        let db = b.len() - 1;
        let linv = self.inv(&b[db]).unwrap();
        let mut r = rp_trim(a.to_vec());
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![Vec::new(); r.len() - db];
        while r.len() > db {
            let k = r.len() - 1 - db;
            let c = self.mul(r.last().unwrap(), &linv);
            for (j, bj) in b.iter().enumerate() {
                r[k + j] = self.sub(&r[k + j], &self.mul(&c, bj));
            }
            q[k] = c;
            r = rp_trim(r);
        }
        (rp_trim(q), r)
    }

    fn rp_gcd(&self, a: &[ResidueElement], b: &[ResidueElement]) -> Vec<ResidueElement> {
        let (mut x, mut y) = (rp_trim(a.to_vec()), rp_trim(b.to_vec()));
        while !y.is_empty() {
            let r = self.rp_divrem(&x, &y).1;
            x = y;
            y = r;
        }
        if x.is_empty() {
            x
        } else {
            self.rp_monic(&x)
        }
    }

    fn rp_powmod(
        &self,
        a: &[ResidueElement],
        e: &BigUint,
        m: &[ResidueElement],
    ) -> Vec<ResidueElement> {
        let base = self.rp_divrem(a, m).1;
        let mut acc = self.rp_divrem(&[vec![1]], m).1;
        for i in (0..e.bits()).rev() {
            acc = self.rp_divrem(&self.rp_mul(&acc, &acc), m).1;
            if e.bit(i) {
                acc = self.rp_divrem(&self.rp_mul(&acc, &base), m).1;
            }
        }
        acc
    }

    /// Number of F_q-points on y² + h(x)y = g(x) above a fixed x, given
    /// h(x) and g(x) evaluated in the residue field.
    pub(crate) fn count_y(&self, hx: &[u64], gx: &[u64]) -> u64 {
        if self.p == 2 {
            if hx.is_empty() {
                return 1;
            }
            // y = h·z: z² + z = g/h²
            let hinv = self.inv(hx).unwrap();
            let d = self.mul(gx, &self.mul(&hinv, &hinv));
            return if self.trace(&d) == 0 { 2 } else { 0 };
        }
        // (2y + h)² = h² + 4g
        let disc = self.add(&self.mul(hx, hx), &self.scale(gx, 4));
        if disc.is_empty() {
            1
        } else if self.is_square(&disc) {
            2
        } else {
            0
        }
    }
}

fn rp_trim(mut a: Vec<ResidueElement>) -> Vec<ResidueElement> {
    while a.last().is_some_and(|c| c.is_empty()) {
        a.pop();
    }
    a
}

/// u64 value of a prime-field element.
pub fn scalar(a: &[u64]) -> u64 {
    a.first().copied().unwrap_or(0)
}

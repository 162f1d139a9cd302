use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::element::FieldElement;
use super::field::{Field, FieldExt};
use super::residue::{ResidueElement, ResidueField};
use crate::arith::{self, inv_mod, val_p};
use crate::error::{Error, Result};
use crate::fpx::{self, Poly};

/// A valuation value: an integer or +infinity (the valuation of zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// The finite value; panics on +infinity.
    pub fn unwrap(self) -> i64 {
        self.finite().expect("valuation of zero")
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "+inf"),
        }
    }
}

impl PartialEq<i64> for Valuation {
    fn eq(&self, other: &i64) -> bool {
        *self == Valuation::Finite(*other)
    }
}

impl PartialOrd<i64> for Valuation {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.cmp(&Valuation::Finite(*other)))
    }
}

/// A prime ideal P = (p, g(θ)) of a p-maximal equation order.
#[derive(Clone)]
pub struct PrimeIdeal {
    field: Field,
    p: u64,
    e: u32,
    f: u32,
    residue: ResidueField,
    uniformizer: FieldElement,
    uniformizer_inv: FieldElement,
    /// v_P(beta) = e - 1 and v_Q(beta) >= e_Q at the other primes above p,
    /// so x ↦ x·beta/p lowers v_P by one and keeps integrality.
    beta: FieldElement,
    /// Unit at P with v_Q >= e_Q at the other primes above p.
    away: Option<FieldElement>,
    index: usize,
}

impl fmt::Debug for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree() == 1 {
            return write!(f, "({})", self.p);
        }
        let g = self.residue.modulus();
        let terms: Vec<String> = g
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".into(),
                (1, c) => format!("{c}*t"),
                (i, 1) => format!("t^{i}"),
                (i, c) => format!("{c}*t^{i}"),
            })
            .collect();
        write!(f, "({}, {})", self.p, terms.join(" + "))
    }
}

/// Serialized as a summary: p, e, f and the residue polynomial.
impl Serialize for PrimeIdeal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PrimeIdeal", 5)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("e", &self.e)?;
        st.serialize_field("f", &self.f)?;
        st.serialize_field("residue_poly", self.residue.modulus())?;
        st.serialize_field("label", &self.to_string())?;
        st.end()
    }
}

impl PartialEq for PrimeIdeal {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.p == other.p && self.residue == other.residue
    }
}
impl Eq for PrimeIdeal {}

impl PrimeIdeal {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn residue_char(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    /// Position among the primes above p in the canonical ordering.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn residue_field(&self) -> &ResidueField {
        &self.residue
    }

    /// The factor of the defining polynomial mod p that cuts out P.
    pub fn residue_poly(&self) -> &[u64] {
        self.residue.modulus()
    }

    pub fn uniformizer(&self) -> &FieldElement {
        &self.uniformizer
    }

    pub fn uniformizer_inv(&self) -> &FieldElement {
        &self.uniformizer_inv
    }

    /// Absolute norm p^f (None if it overflows u128).
    pub fn norm(&self) -> Option<u128> {
        self.residue.size()
    }

    /// Canonical ordering key: residue characteristic, residue degree,
    /// then residue polynomial coefficients (leading first).
    pub fn sort_key(&self) -> (u64, u32, Vec<u64>) {
        (self.p, self.f, self.residue.modulus().iter().rev().copied().collect())
    }

    fn sole(&self) -> bool {
        self.away.is_none()
    }

    /// π^k for any integer k.
    pub fn uniformizer_pow(&self, k: i64) -> FieldElement {
        if k >= 0 {
            self.uniformizer.pow(k as u32)
        } else {
            self.uniformizer_inv.pow((-k) as u32)
        }
    }

    /// Valuation at P; +infinity for zero.
    pub fn valuation(&self, x: &FieldElement) -> Valuation {
        assert!(x.same_field(&self.uniformizer), "element and prime in different fields");
        if x.is_zero() {
            return Valuation::Infinite;
        }
        let e = self.e as i64;
        let den_val = val_p(x.denominator(), self.p) as i64;
        if let Some(q) = x.as_rational() {
            return Valuation::Finite(
                e * (val_p(q.numer(), self.p) as i64 - val_p(q.denom(), self.p) as i64),
            );
        }
        if self.sole() {
            let num = FieldElement::from_parts(
                self.field.clone(),
                x.numerators().to_vec(),
                BigInt::one(),
            );
            let nv = val_p(num.norm().numer(), self.p) as i64;
            return Valuation::Finite(nv / self.f as i64 - e * den_val);
        }
        Valuation::Finite(self.integral_valuation(x.numerators()) - e * den_val)
    }

    /// Valuation by repeated division: strips p-content, then applies
    /// y ↦ y·β/p while y stays in P.
    pub fn valuation_by_division(&self, x: &FieldElement) -> Valuation {
        if x.is_zero() {
            return Valuation::Infinite;
        }
        let den_val = val_p(x.denominator(), self.p) as i64;
        Valuation::Finite(self.integral_valuation(x.numerators()) - self.e as i64 * den_val)
    }

    fn integral_valuation(&self, num: &[BigInt]) -> i64 {
        let pb = BigInt::from(self.p);
        let content = num.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let c = val_p(&content, self.p);
        let mut y: Vec<BigInt> = if c == 0 {
            num.to_vec()
        } else {
            let pc = num_traits::pow(pb.clone(), c as usize);
            num.iter().map(|v| v / &pc).collect()
        };
        let mut v = self.e as i64 * c as i64;
        loop {
            if !self.reduce_integral(&y, &BigInt::one()).is_empty() {
                return v;
            }
            v += 1;
            let prod = FieldElement::from_parts(self.field.clone(), y, BigInt::one()) * &self.beta;
            debug_assert!(prod.denominator().is_one());
            y = prod
                .numerators()
                .iter()
                .map(|c| {
                    let (q, r) = c.div_rem(&pb);
                    debug_assert!(r.is_zero(), "beta step left the order");
                    q
                })
                .collect();
        }
    }

    /// Reduction of num/den (den prime to p) into the residue field.
    fn reduce_integral(&self, num: &[BigInt], den: &BigInt) -> ResidueElement {
        let pb = BigInt::from(self.p);
        let dinv = inv_mod(den.mod_floor(&pb).to_u64().unwrap(), self.p)
            .expect("denominator prime to p");
        let mut poly: Poly = num
            .iter()
            .map(|c| arith::mul_mod(c.mod_floor(&pb).to_u64().unwrap(), dinv, self.p))
            .collect();
        fpx::trim(&mut poly);
        self.residue.reduce(&poly)
    }

    /// Reduction map on elements with v_P(x) >= 0.
    pub fn reduce(&self, x: &FieldElement) -> Result<ResidueElement> {
        let k = val_p(x.denominator(), self.p);
        if k == 0 {
            return Ok(self.reduce_integral(x.numerators(), x.denominator()));
        }
        if self.valuation(x) < 0 {
            return Err(Error::NotIntegralAtPrime);
        }
        match &self.away {
            None => {
                // a unique prime above p: nonnegative valuation means p-integral
                Ok(self.reduce_integral(x.numerators(), x.denominator()))
            }
            Some(a) => {
                let ak = a.pow(k);
                let y = x * &ak;
                debug_assert_eq!(val_p(y.denominator(), self.p), 0);
                let ry = self.reduce_integral(y.numerators(), y.denominator());
                let ra = self.reduce_integral(ak.numerators(), ak.denominator());
                Ok(self.residue.mul(&ry, &self.residue.inv(&ra).unwrap()))
            }
        }
    }

    /// Whether v_P(x) > 0 (zero counts as divisible).
    pub fn divides(&self, x: &FieldElement) -> bool {
        self.valuation(x) > 0
    }

    /// An integral lift of a residue-field element.
    pub fn lift(&self, r: &[u64]) -> FieldElement {
        let n = self.field.degree();
        let mut coords = vec![0i64; n];
        for (i, &c) in r.iter().enumerate() {
            coords[i] = c as i64;
        }
        if n == 1 {
            // θ is a rational integer; residue poly is t - θ mod p
            return self.field.from_int(coords[0]);
        }
        self.field.from_coords_i64(&coords)
    }

    /// First `n` π-adic digits of x (v_P(x) >= 0): x ≡ Σ lift(d_i)·π^i mod P^n.
    pub fn digits(&self, x: &FieldElement, n: usize) -> Result<Vec<ResidueElement>> {
        let mut y = x.clone();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let d = self.reduce(&y)?;
            y = &(&y - &self.lift(&d)) * &self.uniformizer_inv;
            out.push(d);
        }
        Ok(out)
    }
}

fn lift_poly(g: &[u64]) -> Vec<BigInt> {
    g.iter().map(|&c| BigInt::from(c)).collect()
}

fn zpoly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn reduce_zpoly(a: &[BigInt], p: u64) -> Poly {
    let pb = BigInt::from(p);
    let mut v: Poly = a.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect();
    fpx::trim(&mut v);
    v
}

fn elem_from_zpoly(k: &Field, a: &[BigInt]) -> FieldElement {
    let mut v = a.to_vec();
    super::element::reduce_in_place(k.defining_poly(), &mut v);
    FieldElement::from_parts(k.clone(), v, BigInt::one())
}

/// Factor the rational prime p in K. Requires the power basis to be
/// p-maximal, which is checked with Dedekind's criterion.
pub fn factor_rational_prime(k: &Field, p: &BigInt) -> Result<Vec<PrimeIdeal>> {
    if !p.is_positive() || !arith::is_prime(p) {
        return Err(Error::NotPrime(p.clone()));
    }
    let p = arith::prime_to_u64(p)?;
    let f = k.defining_poly();
    let fbar = reduce_zpoly(f, p);
    let factors = fpx::factor(&fbar, p);

    // Dedekind: with G = Π g_i, H = f̄/Ḡ (lifted), F = (f - G·H)/p,
    // Z[θ] is p-maximal iff gcd(F̄, Ḡ, H̄) = 1.
    let gbar = factors
        .iter()
        .fold(vec![1u64], |acc, (g, _)| fpx::mul(&acc, g, p));
    let hbar = fpx::divrem(&fbar, &gbar, p).0;
    let big_g = factors
        .iter()
        .fold(vec![BigInt::one()], |acc, (g, _)| zpoly_mul(&acc, &lift_poly(g)));
    let gh = zpoly_mul(&big_g, &lift_poly(&hbar));
    let pb = BigInt::from(p);
    let diff: Vec<BigInt> = (0..f.len().max(gh.len()))
        .map(|i| {
            let a = f.get(i).cloned().unwrap_or_default();
            let b = gh.get(i).cloned().unwrap_or_default();
            let d = a - b;
            debug_assert!(d.is_multiple_of(&pb));
            d / &pb
        })
        .collect();
    let fbig = reduce_zpoly(&diff, p);
    let common = fpx::gcd(&fpx::gcd(&fbig, &gbar, p), &hbar, p);
    if common.len() > 1 {
        return Err(Error::NotPMaximal { p });
    }

    let n = k.degree();
    let single = factors.len() == 1;
    let mut out = Vec::with_capacity(factors.len());
    for (i, (g, e)) in factors.iter().enumerate() {
        let residue = ResidueField::new(p, g.clone());
        let gi = lift_poly(g);
        let uniformizer = if *e >= 2 {
            elem_from_zpoly(k, &gi)
        } else {
            k.from_int(p as i64)
        };
        let uniformizer_inv = uniformizer.inv()?;
        let cofactor = fpx::divrem(&fbar, g, p).0;
        let beta = elem_from_zpoly(k, &lift_poly(&cofactor));
        let away = (!single).then(|| {
            let mut a = k.one();
            for (j, (gj, ej)) in factors.iter().enumerate() {
                if j != i {
                    a = &a * &elem_from_zpoly(k, &lift_poly(gj)).pow(*ej);
                }
            }
            a
        });
        out.push(PrimeIdeal {
            field: k.clone(),
            p,
            e: *e,
            f: (g.len() - 1) as u32,
            residue,
            uniformizer,
            uniformizer_inv,
            beta,
            away,
            index: i,
        });
    }
    out.sort_by_key(|q| q.sort_key());
    for (i, q) in out.iter_mut().enumerate() {
        q.index = i;
    }
    let total: u32 = out.iter().map(|q| q.e * q.f).sum();
    assert_eq!(total as usize, n, "Σ e·f must equal the degree");
    for q in &out {
        let pe = k.from_int(p as i64);
        if q.valuation_by_division(&q.uniformizer) != 1
            || q.valuation_by_division(&pe) != q.e as i64
        {
            return Err(Error::NotPMaximal { p });
        }
    }
    Ok(out)
}

pub fn factor_rational_prime_u64(k: &Field, p: u64) -> Result<Vec<PrimeIdeal>> {
    factor_rational_prime(k, &BigInt::from(p))
}

/// Primes above p dividing x.
pub fn primes_dividing(k: &Field, p: u64, x: &FieldElement) -> Result<Vec<PrimeIdeal>> {
    Ok(factor_rational_prime_u64(k, p)?
        .into_iter()
        .filter(|q| q.valuation(x) != 0)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::super::field::make_field_i64;
    use super::*;

    #[test]
    fn splitting_in_q_sqrt2() {
        let k = make_field_i64(&[-2, 0, 1]).unwrap();
        let p2 = factor_rational_prime_u64(&k, 2).unwrap();
        assert_eq!(p2.len(), 1);
        assert_eq!((p2[0].e(), p2[0].f()), (2, 1));
        let p7 = factor_rational_prime_u64(&k, 7).unwrap();
        assert_eq!(p7.len(), 2);
        assert!(p7.iter().all(|q| q.e() == 1 && q.f() == 1));
        let p3 = factor_rational_prime_u64(&k, 3).unwrap();
        assert_eq!((p3.len(), p3[0].f()), (1, 2));
    }

    #[test]
    fn non_monogenic_cubic_rejected_at_two() {
        let k = make_field_i64(&[-8, -2, -1, 1]).unwrap();
        assert_eq!(
            factor_rational_prime_u64(&k, 2).unwrap_err(),
            Error::NotPMaximal { p: 2 }
        );
        assert!(factor_rational_prime_u64(&k, 3).is_ok());
    }

    #[test]
    fn valuations_at_two() {
        let k = make_field_i64(&[-2, 0, 1]).unwrap();
        let p = &factor_rational_prime_u64(&k, 2).unwrap()[0];
        assert_eq!(p.valuation(&k.from_int(2)), 2);
        assert_eq!(p.valuation(&k.zero()), Valuation::Infinite);
        assert_eq!(p.valuation(&k.from_coords_i64(&[0, 16])), 9);
        assert_eq!(p.valuation_by_division(&k.from_coords_i64(&[0, 16])), 9);
        let half = k.from_rational(num_rational::BigRational::new(1.into(), 2.into()));
        assert_eq!(p.valuation(&half), -2);
        assert_eq!(p.valuation(p.uniformizer()), 1);
    }

    #[test]
    fn split_prime_valuations_and_reduction() {
        let k = make_field_i64(&[-2, 0, 1]).unwrap();
        let ps = factor_rational_prime_u64(&k, 7).unwrap();
        // 16√2 - 1 has norm -511 = -7·73: exactly one prime above 7 divides it
        let x = k.from_coords_i64(&[-1, 16]);
        let vals: Vec<i64> = ps.iter().map(|q| q.valuation(&x).unwrap()).collect();
        assert_eq!(vals.iter().sum::<i64>(), 1);
        for q in &ps {
            assert_eq!(q.valuation(&x), q.valuation_by_division(&x));
            let y = x.inv().unwrap();
            assert_eq!(q.valuation(&y).unwrap(), -q.valuation(&x).unwrap());
        }
        // (√2)/7 · 7 reduces to θ
        let z = &k.generator() * &k.from_int(7).inv().unwrap();
        let q = &ps[0];
        let w = &z * &q.uniformizer_pow(1);
        let r = q.reduce(&w).unwrap();
        assert_eq!(r, q.reduce(&k.generator()).unwrap());
    }

    #[test]
    fn digits_reconstruct() {
        let k = make_field_i64(&[2, 0, -4, 0, 1]).unwrap();
        let p = &factor_rational_prime_u64(&k, 2).unwrap()[0];
        assert_eq!(p.e(), 4);
        let x = k.from_coords_i64(&[3, 5, -7, 2]);
        let d = p.digits(&x, 9).unwrap();
        let mut acc = k.zero();
        for (i, di) in d.iter().enumerate() {
            acc = &acc + &(&p.lift(di) * &p.uniformizer_pow(i as i64));
        }
        assert!(p.valuation(&(&x - &acc)) >= 9);
    }
}

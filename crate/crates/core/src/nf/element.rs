use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::field::{Field, NumberField};
use crate::arith::format_rational;
use crate::error::{Error, Result};

/// An element of a number field in power-basis coordinates, stored as an
/// integer numerator vector over a common positive denominator.
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    num: Vec<BigInt>,
    den: BigInt,
}

impl FieldElement {
    pub(crate) fn from_parts(field: Field, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        debug_assert_eq!(num.len(), field.degree());
        debug_assert!(!den.is_zero());
        if den.is_negative() {
            den = -den;
            for c in num.iter_mut() {
                *c = -std::mem::take(c);
            }
        }
        if !den.is_one() {
            let g = num.iter().fold(den.clone(), |acc, c| acc.gcd(c));
            if !g.is_one() {
                for c in num.iter_mut() {
                    *c = &*c / &g;
                }
                den = &den / &g;
            }
        }
        FieldElement { field, num, den }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn same_field(&self, other: &FieldElement) -> bool {
        Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    /// Power-basis coordinates as exact rationals.
    pub fn coords(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    /// The element as a rational number, when it lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.field.degree() == 1 {
            return Some(BigRational::new(self.num[0].clone(), self.den.clone()));
        }
        self.num[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| BigRational::new(self.num[0].clone(), self.den.clone()))
    }

    fn check(&self, other: &FieldElement) {
        assert!(self.same_field(other), "elements belong to different fields");
    }

    /// Numerator polynomial product reduced modulo the defining polynomial.
    fn mul_reduce(field: &NumberField, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let n = field.degree();
        if n == 1 {
            return vec![&a[0] * &b[0]];
        }
        let mut prod = vec![BigInt::zero(); 2 * n - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        reduce_in_place(field.defining_poly(), &mut prod);
        prod
    }

    pub fn square(&self) -> FieldElement {
        self * self
    }

    pub fn pow(&self, mut e: u32) -> FieldElement {
        let mut acc = self.field.one_elem();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }

    pub fn pow_i(&self, e: i64) -> Result<FieldElement> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            Ok(self.inv()?.pow((-e) as u32))
        }
    }

    pub fn scale_int(&self, k: &BigInt) -> FieldElement {
        FieldElement::from_parts(
            self.field.clone(),
            self.num.iter().map(|c| c * k).collect(),
            self.den.clone(),
        )
    }

    pub fn div_int(&self, k: &BigInt) -> FieldElement {
        assert!(!k.is_zero(), "division by zero");
        FieldElement::from_parts(self.field.clone(), self.num.clone(), &self.den * k)
    }

    /// Columns of the multiplication-by-numerator matrix: column j holds
    /// the coordinates of num·θ^j.
    pub(crate) fn numerator_matrix(&self) -> Vec<Vec<BigInt>> {
        let n = self.field.degree();
        let f = self.field.defining_poly();
        let mut cols = Vec::with_capacity(n);
        let mut col = self.num.clone();
        for _ in 0..n {
            cols.push(col.clone());
            // multiply by θ: shift up and reduce the overflow coefficient
            let top = col.pop().unwrap();
            col.insert(0, BigInt::zero());
            if !top.is_zero() {
                for (i, c) in col.iter_mut().enumerate() {
                    *c -= &top * &f[i];
                }
            }
        }
        cols
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.field.degree();
        if n == 1 {
            return Ok(FieldElement::from_parts(
                self.field.clone(),
                vec![self.den.clone()],
                self.num[0].clone(),
            ));
        }
        // Solve M·y = den·e_0 where M is the multiplication matrix of num.
        let cols = self.numerator_matrix();
        let mut m: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..n)
                    .map(|j| BigRational::from_integer(cols[j][i].clone()))
                    .collect();
                row.push(if i == 0 {
                    BigRational::from_integer(self.den.clone())
                } else {
                    BigRational::zero()
                });
                row
            })
            .collect();
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !m[r][col].is_zero())
                .expect("multiplication matrix of a nonzero element is invertible");
            m.swap(col, piv);
            let inv = m[col][col].recip();
            for k in col..=n {
                m[col][k] = &m[col][k] * &inv;
            }
            for r in 0..n {
                if r != col && !m[r][col].is_zero() {
                    let factor = m[r][col].clone();
                    for k in col..=n {
                        let t = &factor * &m[col][k];
                        m[r][k] = &m[r][k] - t;
                    }
                }
            }
        }
        let coords = m.into_iter().map(|row| row[n].clone()).collect();
        use super::field::FieldExt;
        self.field.from_rationals(coords)
    }

    pub fn checked_div(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other);
        Ok(self * &other.inv()?)
    }

    /// Trace of multiplication-by-self.
    pub fn trace(&self) -> BigRational {
        let s = self.field.power_traces();
        let t = self
            .num
            .iter()
            .zip(s)
            .fold(BigInt::zero(), |acc, (c, sk)| acc + c * sk);
        BigRational::new(t, self.den.clone())
    }

    /// Norm: determinant of multiplication-by-self.
    pub fn norm(&self) -> BigRational {
        let n = self.field.degree();
        let det = if n == 1 {
            self.num[0].clone()
        } else if n == 2 {
            // det [[a, -c0 b], [b, a - c1 b]]
            let f = self.field.defining_poly();
            let (a, b) = (&self.num[0], &self.num[1]);
            a * (a - &f[1] * b) + &f[0] * b * b
        } else {
            bareiss_det(self.numerator_matrix())
        };
        BigRational::new(det, num_traits::pow(self.den.clone(), n))
    }

    pub fn norm_and_trace(&self) -> (BigRational, BigRational) {
        (self.norm(), self.trace())
    }

    /// Characteristic polynomial of multiplication-by-self, monic, constant
    /// term first, from traces of powers via Newton's identities.
    pub fn charpoly(&self) -> Vec<BigRational> {
        let n = self.field.degree();
        let mut p = Vec::with_capacity(n);
        let mut power = self.clone();
        for _ in 0..n {
            p.push(power.trace());
            power = &power * self;
        }
        // e_k with k·e_k = Σ_{i=1..k} (-1)^{i-1} e_{k-i} p_i
        let mut e = vec![BigRational::one()];
        for k in 1..=n {
            let mut acc = BigRational::zero();
            for i in 1..=k {
                let term = &e[k - i] * &p[i - 1];
                if i % 2 == 1 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            e.push(acc / BigRational::from_integer(BigInt::from(k)));
        }
        // X^n - e1 X^{n-1} + e2 X^{n-2} - ...
        let mut out = vec![BigRational::zero(); n + 1];
        for (k, ek) in e.into_iter().enumerate() {
            out[n - k] = if k % 2 == 0 { ek } else { -ek };
        }
        out
    }

    /// Integral over Z: characteristic polynomial has integer coefficients.
    pub fn is_integral(&self) -> bool {
        self.den.is_one() || self.charpoly().iter().all(|c| c.is_integer())
    }
}

/// Reduce a polynomial (constant first) modulo a monic integer polynomial.
pub(crate) fn reduce_in_place(f: &[BigInt], prod: &mut Vec<BigInt>) {
    let n = f.len() - 1;
    while prod.len() > n {
        let top = prod.pop().unwrap();
        if top.is_zero() {
            continue;
        }
        let k = prod.len() - n;
        for i in 0..n {
            if !f[i].is_zero() {
                prod[k + i] -= &top * &f[i];
            }
        }
    }
    while prod.len() < n {
        prod.push(BigInt::zero());
    }
}

/// Fraction-free Gaussian elimination; input given as columns.
pub(crate) fn bareiss_det(cols: Vec<Vec<BigInt>>) -> BigInt {
    let n = cols.len();
    let mut m: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

impl NumberField {
    pub(crate) fn one_elem(self: &Arc<Self>) -> FieldElement {
        let mut v = vec![BigInt::zero(); self.degree()];
        v[0] = BigInt::one();
        FieldElement::from_parts(self.clone(), v, BigInt::one())
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_field(other) && self.den == other.den && self.num == other.num
    }
}
impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

/// Serialized as the power-basis coordinate list, each an exact
/// rational string.
impl serde::Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let coords = self.coords();
        let mut seq = s.serialize_seq(Some(coords.len()))?;
        for c in &coords {
            seq.serialize_element(&format_rational(c))?;
        }
        seq.end()
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords = self.coords();
        if coords.len() == 1 {
            return write!(f, "{}", format_rational(&coords[0]));
        }
        let parts: Vec<String> = coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format_rational(c),
                1 => format!("({})*t", format_rational(c)),
                _ => format!("({})*t^{i}", format_rational(c)),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &'a FieldElement) -> FieldElement {
        self.check(rhs);
        if self.den == rhs.den {
            let num = self.num.iter().zip(&rhs.num).map(|(a, b)| a + b).collect();
            return FieldElement::from_parts(self.field.clone(), num, self.den.clone());
        }
        let num = self
            .num
            .iter()
            .zip(&rhs.num)
            .map(|(a, b)| a * &rhs.den + b * &self.den)
            .collect();
        FieldElement::from_parts(self.field.clone(), num, &self.den * &rhs.den)
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &'a FieldElement) -> FieldElement {
        self.check(rhs);
        if self.den == rhs.den {
            let num = self.num.iter().zip(&rhs.num).map(|(a, b)| a - b).collect();
            return FieldElement::from_parts(self.field.clone(), num, self.den.clone());
        }
        let num = self
            .num
            .iter()
            .zip(&rhs.num)
            .map(|(a, b)| a * &rhs.den - b * &self.den)
            .collect();
        FieldElement::from_parts(self.field.clone(), num, &self.den * &rhs.den)
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &'a FieldElement) -> FieldElement {
        self.check(rhs);
        let num = FieldElement::mul_reduce(&self.field, &self.num, &rhs.num);
        FieldElement::from_parts(self.field.clone(), num, &self.den * &rhs.den)
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &'a FieldElement) -> FieldElement {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Norm and trace of an element.
pub fn norm_and_trace(x: &FieldElement) -> (BigRational, BigRational) {
    x.norm_and_trace()
}

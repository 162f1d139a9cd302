use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::element::FieldElement;
use super::qpoly;
use super::roots::LiftingPrime;
use crate::arith::{self, primes_up_to};
use crate::error::{Error, Result};
use crate::fpx;

/// Primes tried for a mod-p irreducibility certificate.
pub const CERTIFICATE_PRIME_BOUND: u64 = 200;
/// Largest |shift| tried when looking for a shifted Eisenstein certificate.
const EISENSTEIN_SHIFT_BOUND: i64 = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IrreducibilityCertificate {
    DegreeOne,
    /// The defining polynomial is irreducible modulo `p`.
    ModP { p: u64 },
    /// `f(x + shift)` is Eisenstein at `p`.
    Eisenstein { p: u64, shift: i64 },
}

/// A number field Q(θ) given by a monic integral defining polynomial.
pub struct NumberField {
    poly: Vec<BigInt>,
    certificate: IrreducibilityCertificate,
    /// Tr(θ^k) for 0 <= k < degree.
    power_traces: Vec<BigInt>,
    lifting: OnceLock<Vec<LiftingPrime>>,
}

pub type Field = Arc<NumberField>;

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({})", self.poly_string())
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.poly == other.poly
    }
}
impl Eq for NumberField {}

/// Build a field from a monic integral polynomial (constant term first),
/// certifying irreducibility.
pub fn make_field(defining_poly: &[BigInt]) -> Result<Field> {
    let mut poly = defining_poly.to_vec();
    while poly.len() > 1 && poly.last().is_some_and(|c| c.is_zero()) {
        poly.pop();
    }
    if poly.len() < 2 || !poly.last().unwrap().is_one() {
        return Err(Error::NotMonic);
    }
    let certificate = certify_irreducible(&poly)?;
    let power_traces = newton_power_sums(&poly);
    Ok(Arc::new(NumberField {
        poly,
        certificate,
        power_traces,
        lifting: OnceLock::new(),
    }))
}

pub fn make_field_i64(defining_poly: &[i64]) -> Result<Field> {
    let v: Vec<BigInt> = defining_poly.iter().map(|&c| BigInt::from(c)).collect();
    make_field(&v)
}

/// The rational field, defined by x.
pub fn rationals() -> Field {
    make_field_i64(&[0, 1]).expect("x is irreducible")
}

fn is_eisenstein(poly: &[BigInt], p: u64) -> bool {
    let pb = BigInt::from(p);
    let n = poly.len() - 1;
    poly[..n].iter().all(|c| c.is_multiple_of(&pb)) && !poly[0].is_multiple_of(&(&pb * &pb))
}

/// f(x + s) by Taylor shift.
pub fn shift_poly(poly: &[BigInt], s: i64) -> Vec<BigInt> {
    let mut out = poly.to_vec();
    let s = BigInt::from(s);
    let n = out.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = &out[j + 1] * &s;
            out[j] += t;
        }
    }
    out
}

fn eisenstein_primes(poly: &[BigInt]) -> Vec<u64> {
    let n = poly.len() - 1;
    let g = poly[..n].iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return Vec::new();
    }
    let mut out = Vec::new();
    if let Ok(fac) = arith::factor_integer(&g, arith::DEFAULT_FACTOR_BUDGET) {
        for (p, _) in fac {
            if let Some(p) = p.to_u64() {
                out.push(p);
            }
        }
    }
    out
}

fn reduce_mod_p(poly: &[BigInt], p: u64) -> fpx::Poly {
    let pb = BigInt::from(p);
    let mut v: fpx::Poly = poly
        .iter()
        .map(|c| c.mod_floor(&pb).to_u64().unwrap())
        .collect();
    fpx::trim(&mut v);
    v
}

fn certify_irreducible(poly: &[BigInt]) -> Result<IrreducibilityCertificate> {
    if poly.len() == 2 {
        return Ok(IrreducibilityCertificate::DegreeOne);
    }
    if let Some(root) = integer_root(poly) {
        return Err(Error::Reducible {
            factor: vec![-root, BigInt::one()],
        });
    }
    for p in eisenstein_primes(poly) {
        if is_eisenstein(poly, p) {
            return Ok(IrreducibilityCertificate::Eisenstein { p, shift: 0 });
        }
    }
    for p in primes_up_to(CERTIFICATE_PRIME_BOUND) {
        if fpx::is_irreducible(&reduce_mod_p(poly, p), p) {
            return Ok(IrreducibilityCertificate::ModP { p });
        }
    }
    for s in (1..=EISENSTEIN_SHIFT_BOUND).flat_map(|k| [k, -k]) {
        let shifted = shift_poly(poly, s);
        for p in eisenstein_primes(&shifted) {
            if is_eisenstein(&shifted, p) {
                return Ok(IrreducibilityCertificate::Eisenstein { p, shift: s });
            }
        }
    }
    Err(Error::CannotCertify {
        bound: CERTIFICATE_PRIME_BOUND,
    })
}

/// An integer root of a monic integral polynomial, if any.
fn integer_root(poly: &[BigInt]) -> Option<BigInt> {
    let eval = |x: &BigInt| {
        poly.iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    };
    if poly[0].is_zero() {
        return Some(BigInt::zero());
    }
    let fac = arith::factor_integer(&poly[0], arith::DEFAULT_FACTOR_BUDGET).ok()?;
    let mut divisors = vec![BigInt::one()];
    for (p, k) in fac {
        let mut next = Vec::new();
        for d in &divisors {
            let mut pk = BigInt::one();
            for _ in 0..=k {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divisors = next;
        if divisors.len() > 100_000 {
            return None;
        }
    }
    divisors
        .into_iter()
        .flat_map(|d| [d.clone(), -d])
        .find(|d| eval(d).is_zero())
}

/// Power sums s_k = Tr(θ^k), k < n, by Newton's identities.
fn newton_power_sums(poly: &[BigInt]) -> Vec<BigInt> {
    let n = poly.len() - 1;
    // x^n + c_{n-1} x^{n-1} + ... + c_0; e-coefficients a_i = c_{n-i}
    let a = |i: usize| &poly[n - i];
    let mut s = vec![BigInt::from(n)];
    for k in 1..n {
        let mut acc = BigInt::from(k) * a(k);
        for i in 1..k {
            acc += a(i) * &s[k - i];
        }
        s.push(-acc);
    }
    s
}

impl NumberField {
    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    /// Monic defining polynomial, constant term first.
    pub fn defining_poly(&self) -> &[BigInt] {
        &self.poly
    }

    pub fn certificate(&self) -> &IrreducibilityCertificate {
        &self.certificate
    }

    pub(crate) fn power_traces(&self) -> &[BigInt] {
        &self.power_traces
    }

    pub(crate) fn lifting_cache(&self) -> &OnceLock<Vec<LiftingPrime>> {
        &self.lifting
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    /// Re-run the check named by the certificate.
    pub fn verify_certificate(&self) -> bool {
        match &self.certificate {
            IrreducibilityCertificate::DegreeOne => self.degree() == 1,
            IrreducibilityCertificate::ModP { p } => {
                fpx::is_irreducible(&reduce_mod_p(&self.poly, *p), *p)
            }
            IrreducibilityCertificate::Eisenstein { p, shift } => {
                is_eisenstein(&shift_poly(&self.poly, *shift), *p)
            }
        }
    }

    /// Number of real embeddings, via a Sturm chain on the defining polynomial.
    pub fn count_real_embeddings(&self) -> usize {
        let f: Vec<BigRational> = self
            .poly
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        qpoly::count_real_roots(&f)
    }

    pub fn is_totally_real(&self) -> bool {
        self.count_real_embeddings() == self.degree()
    }

    pub fn poly_string(&self) -> String {
        let n = self.degree();
        let mut parts = Vec::new();
        for (i, c) in self.poly.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            let mag = c.abs();
            let body = if i > 0 && mag.is_one() {
                mono
            } else if i == 0 {
                mag.to_string()
            } else {
                format!("{mag}*{mono}")
            };
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == n {
                parts.push(body);
            } else {
                parts.push(format!("{sign} {body}"));
            }
        }
        parts.join(" ")
    }
}

/// Convenience constructors that need the shared handle.
pub trait FieldExt {
    fn zero(&self) -> FieldElement;
    fn one(&self) -> FieldElement;
    fn generator(&self) -> FieldElement;
    fn from_int(&self, n: i64) -> FieldElement;
    fn from_bigint(&self, n: BigInt) -> FieldElement;
    fn from_rational(&self, q: BigRational) -> FieldElement;
    fn from_coords_i64(&self, coords: &[i64]) -> FieldElement;
    fn from_coords_big(&self, coords: &[BigInt]) -> FieldElement;
    fn from_rationals(&self, coords: Vec<BigRational>) -> Result<FieldElement>;
}

impl FieldExt for Field {
    fn zero(&self) -> FieldElement {
        FieldElement::from_parts(self.clone(), vec![BigInt::zero(); self.degree()], BigInt::one())
    }
    fn one(&self) -> FieldElement {
        self.from_int(1)
    }
    fn generator(&self) -> FieldElement {
        if self.degree() == 1 {
            // θ is the root of x + c_0
            return self.from_bigint(-self.poly[0].clone());
        }
        let mut v = vec![BigInt::zero(); self.degree()];
        v[1] = BigInt::one();
        FieldElement::from_parts(self.clone(), v, BigInt::one())
    }
    fn from_int(&self, n: i64) -> FieldElement {
        self.from_bigint(BigInt::from(n))
    }
    fn from_bigint(&self, n: BigInt) -> FieldElement {
        let mut v = vec![BigInt::zero(); self.degree()];
        v[0] = n;
        FieldElement::from_parts(self.clone(), v, BigInt::one())
    }
    fn from_rational(&self, q: BigRational) -> FieldElement {
        let mut v = vec![BigInt::zero(); self.degree()];
        let (n, d) = q.into();
        v[0] = n;
        FieldElement::from_parts(self.clone(), v, d)
    }
    fn from_coords_i64(&self, coords: &[i64]) -> FieldElement {
        assert_eq!(coords.len(), self.degree(), "coordinate count must equal degree");
        FieldElement::from_parts(
            self.clone(),
            coords.iter().map(|&c| BigInt::from(c)).collect(),
            BigInt::one(),
        )
    }
    fn from_coords_big(&self, coords: &[BigInt]) -> FieldElement {
        assert_eq!(coords.len(), self.degree(), "coordinate count must equal degree");
        FieldElement::from_parts(self.clone(), coords.to_vec(), BigInt::one())
    }
    fn from_rationals(&self, coords: Vec<BigRational>) -> Result<FieldElement> {
        if coords.len() != self.degree() {
            return Err(Error::Invalid(format!(
                "expected {} coordinates, got {}",
                self.degree(),
                coords.len()
            )));
        }
        let den = coords
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coords
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        Ok(FieldElement::from_parts(self.clone(), num, den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificates() {
        let k = make_field_i64(&[-2, 0, 1]).unwrap();
        assert_eq!(k.degree(), 2);
        assert_eq!(
            *k.certificate(),
            IrreducibilityCertificate::Eisenstein { p: 2, shift: 0 }
        );
        let k = make_field_i64(&[2, 0, -4, 0, 1]).unwrap();
        assert_eq!(
            *k.certificate(),
            IrreducibilityCertificate::Eisenstein { p: 2, shift: 0 }
        );
        assert!(k.verify_certificate());
        assert!(matches!(
            make_field_i64(&[-1, 0, 1]),
            Err(Error::Reducible { .. })
        ));
        assert_eq!(*rationals().certificate(), IrreducibilityCertificate::DegreeOne);
        // x^4 + 1 is reducible mod every prime; (x+1)^4 + 1 is Eisenstein at 2
        let k = make_field_i64(&[1, 0, 0, 0, 1]).unwrap();
        assert_eq!(
            *k.certificate(),
            IrreducibilityCertificate::Eisenstein { p: 2, shift: 1 }
        );
        assert!(k.verify_certificate());
        assert!(matches!(make_field_i64(&[1, 2]), Err(Error::NotMonic)));
    }

    #[test]
    fn cubic_certified_mod_p() {
        let k = make_field_i64(&[-8, -2, -1, 1]).unwrap();
        assert!(matches!(k.certificate(), IrreducibilityCertificate::ModP { .. }));
        assert!(k.verify_certificate());
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(make_field_i64(&[-2, 0, 1]).unwrap().count_real_embeddings(), 2);
        assert_eq!(make_field_i64(&[1, 0, 1]).unwrap().count_real_embeddings(), 0);
        assert_eq!(
            make_field_i64(&[2, 0, -4, 0, 1]).unwrap().count_real_embeddings(),
            4
        );
        assert_eq!(make_field_i64(&[-2, 0, 0, 1]).unwrap().count_real_embeddings(), 1);
    }

    #[test]
    fn quartic_is_minimal_polynomial_of_two_cos_pi_over_8() {
        let x = 2.0 * (std::f64::consts::PI / 8.0).cos();
        let v = x.powi(4) - 4.0 * x * x + 2.0;
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn power_traces_match_roots() {
        // x^2 - 2: roots ±√2, Tr(1) = 2, Tr(θ) = 0
        let k = make_field_i64(&[-2, 0, 1]).unwrap();
        assert_eq!(k.power_traces(), &[BigInt::from(2), BigInt::from(0)]);
        // x^3 - x^2 - 2x - 8: Tr θ = 1, Tr θ^2 = 1 + 4 = 5
        let k = make_field_i64(&[-8, -2, -1, 1]).unwrap();
        assert_eq!(
            k.power_traces(),
            &[BigInt::from(3), BigInt::from(1), BigInt::from(5)]
        );
    }
}

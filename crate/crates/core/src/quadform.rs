//! Indefinite binary quadratic forms and narrow class numbers of real
//! quadratic fields by counting cycles of reduced forms.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith;
use crate::error::{Error, Result};

/// The form a·x² + b·xy + c·y².
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl QuadForm {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        QuadForm {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        }
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    /// 0 < b < √D and √D − b < 2|a| < √D + b, decided with integer arithmetic.
    pub fn is_reduced(&self) -> bool {
        let d = self.discriminant();
        let b = &self.b;
        let two_a = BigInt::from(2) * self.a.abs();
        if !b.is_positive() || b * b >= d {
            return false;
        }
        let lo = &two_a + b;
        if lo.clone() * &lo <= d {
            return false;
        }
        let hi = &two_a - b;
        !hi.is_positive() || &hi * &hi < d
    }

    /// One reduction step ρ(a, b, c) = (c, b', (b'² − D)/4c) with
    /// b' ≡ −b (mod 2c): in the window (√D − 2|c|, √D) when |c| < √D,
    /// otherwise in (−|c|, |c|].
    pub fn rho(&self) -> QuadForm {
        let d = self.discriminant();
        let s = d.sqrt();
        let c = &self.c;
        let two_c = BigInt::from(2) * c.abs();
        let b_new = if c.abs() <= s {
            &s - (&s + &self.b).mod_floor(&two_c)
        } else {
            // representative of −b mod 2|c| in (−|c|, |c|]
            let mut r = (-&self.b).mod_floor(&two_c);
            if r > c.abs() {
                r -= &two_c;
            }
            r
        };
        let c_new = (&b_new * &b_new - &d) / (BigInt::from(4) * c);
        QuadForm {
            a: c.clone(),
            b: b_new,
            c: c_new,
        }
    }

    /// Apply ρ until reduced; None if the step cap is exceeded.
    pub fn reduce(&self, max_steps: usize) -> Option<(QuadForm, usize)> {
        let mut f = self.clone();
        for steps in 0..=max_steps {
            if f.is_reduced() {
                return Some((f, steps));
            }
            f = f.rho();
        }
        None
    }
}

pub fn is_fundamental_discriminant(d: &BigInt) -> bool {
    let four = BigInt::from(4);
    let squarefree = |m: &BigInt| -> bool {
        match arith::factor_integer(m, arith::DEFAULT_FACTOR_BUDGET) {
            Ok(f) => f.iter().all(|(_, e)| *e == 1),
            Err(_) => false,
        }
    };
    if d <= &BigInt::one() {
        return false;
    }
    if d.mod_floor(&four) == BigInt::one() {
        return squarefree(d);
    }
    if d.mod_floor(&four).is_zero() {
        let m = d / &four;
        let r = m.mod_floor(&four);
        return (r == BigInt::from(2) || r == BigInt::from(3)) && squarefree(&m);
    }
    false
}

/// Order in which reduced forms are enumerated; the cycle count must not
/// depend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnumerationOrder {
    ByB,
    ByA,
}

/// All reduced forms of discriminant D.
pub fn reduced_forms(d: &BigInt, order: EnumerationOrder) -> Vec<QuadForm> {
    let s = d.sqrt();
    let four = BigInt::from(4);
    let mut out = Vec::new();
    let push_if = |a: BigInt, b: &BigInt, out: &mut Vec<QuadForm>| {
        let num = b * b - d;
        let den = &four * &a;
        if num.is_multiple_of(&den) {
            let f = QuadForm::new(a, b.clone(), &num / &den);
            if f.is_reduced() {
                out.push(f);
            }
        }
    };
    // 2|a| < √D + b < 2√D, so |a| <= s
    match order {
        EnumerationOrder::ByB => {
            let mut b = BigInt::one();
            while b <= s {
                let mut a = BigInt::one();
                while a <= s {
                    push_if(a.clone(), &b, &mut out);
                    push_if(-a.clone(), &b, &mut out);
                    a += 1;
                }
                b += 1;
            }
        }
        EnumerationOrder::ByA => {
            let mut a = s.clone();
            while a.is_positive() {
                for sign in [-1, 1] {
                    let mut b = s.clone();
                    while b.is_positive() {
                        push_if(&a * sign, &b, &mut out);
                        b -= 1;
                    }
                }
                a -= 1;
            }
        }
    }
    out
}

/// Number of ρ-cycles among the reduced forms.
pub fn count_cycles(forms: &[QuadForm]) -> usize {
    let set: HashSet<&QuadForm> = forms.iter().collect();
    let mut seen: HashSet<QuadForm> = HashSet::new();
    let mut cycles = 0;
    for f in forms {
        if seen.contains(f) {
            continue;
        }
        cycles += 1;
        let mut g = f.clone();
        loop {
            seen.insert(g.clone());
            g = g.rho();
            debug_assert!(set.contains(&g), "ρ left the reduced set");
            if &g == f {
                break;
            }
        }
    }
    cycles
}

pub fn narrow_class_number_with_order(d: &BigInt, order: EnumerationOrder) -> Result<u64> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d.clone()));
    }
    Ok(count_cycles(&reduced_forms(d, order)) as u64)
}

/// h⁺ of Q(√D) for a positive fundamental discriminant D.
pub fn narrow_class_number_real_quadratic(d: &BigInt) -> Result<u64> {
    narrow_class_number_with_order(d, EnumerationOrder::ByB)
}

/// Fundamental discriminant of Q(√m) for squarefree m > 1.
pub fn fundamental_discriminant_of(m: i64) -> i64 {
    if m.rem_euclid(4) == 1 {
        m
    } else {
        4 * m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_values() {
        for (d, h) in [(5, 1), (8, 1), (12, 2), (13, 1), (40, 2)] {
            let d = BigInt::from(d);
            assert_eq!(narrow_class_number_real_quadratic(&d).unwrap(), h);
            assert_eq!(narrow_class_number_with_order(&d, EnumerationOrder::ByA).unwrap(), h);
        }
    }

    #[test]
    fn rejects_non_fundamental() {
        for d in [9, 16, 20, 1, 0, -4, 7] {
            assert!(matches!(
                narrow_class_number_real_quadratic(&BigInt::from(d)),
                Err(Error::NotFundamental(_))
            ));
        }
    }

    #[test]
    fn rho_permutes_reduced_forms() {
        for d in [5, 8, 12, 13, 21, 24, 28, 40, 60, 85, 145, 229] {
            let d = BigInt::from(d);
            let forms = reduced_forms(&d, EnumerationOrder::ByB);
            let images: HashSet<QuadForm> = forms.iter().map(QuadForm::rho).collect();
            assert_eq!(images.len(), forms.len());
            assert!(images.iter().all(QuadForm::is_reduced));
        }
    }

    #[test]
    fn discriminant_12_cycle() {
        let f = QuadForm::new(1, 2, -2);
        assert!(f.is_reduced());
        assert_eq!(f.rho(), QuadForm::new(-2, 2, 1));
        assert_eq!(f.rho().rho(), f);
    }
}

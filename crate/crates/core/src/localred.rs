//! Local reduction at a prime ideal: Tate's algorithm, the conductor and
//! the split/nonsplit test for multiplicative reduction.

use std::fmt;
use std::time::Duration;

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use crate::arith;
use crate::curve::WeierstrassModel;
use crate::error::{Error, Result};
use crate::nf::{
    factor_rational_prime, is_local_square, FieldElement, FieldExt, PrimeIdeal, Valuation,
};

/// Kodaira symbol of the special fibre.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kodaira {
    I0,
    In(u32),
    II,
    III,
    IV,
    I0Star,
    InStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl Kodaira {
    pub fn is_multiplicative(self) -> bool {
        matches!(self, Kodaira::In(_))
    }

    pub fn is_good(self) -> bool {
        self == Kodaira::I0
    }
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I0 => write!(f, "I0"),
            Kodaira::In(n) => write!(f, "I{n}"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::I0Star => write!(f, "I0*"),
            Kodaira::InStar(n) => write!(f, "I{n}*"),
            Kodaira::IVStar => write!(f, "IV*"),
            Kodaira::IIIStar => write!(f, "III*"),
            Kodaira::IIStar => write!(f, "II*"),
        }
    }
}

impl Serialize for Kodaira {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitState {
    Split,
    Nonsplit,
    #[serde(rename = "n/a")]
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionData {
    pub prime: PrimeIdeal,
    pub kodaira: Kodaira,
    /// Exponent of P in the conductor.
    pub f_exponent: u32,
    /// v_P of the minimal discriminant.
    pub vdelta_min: u32,
    pub multiplicative_split: SplitState,
}

#[derive(Clone, Debug)]
pub struct TateResult {
    pub data: ReductionData,
    /// A model minimal at P (integral at P).
    pub minimal_model: WeierstrassModel,
}

struct Local<'a> {
    p: &'a PrimeIdeal,
    pi: FieldElement,
    pi_inv: FieldElement,
}

impl Local<'_> {
    fn v(&self, x: &FieldElement) -> Valuation {
        self.p.valuation(x)
    }

    fn vi(&self, x: &FieldElement) -> i64 {
        self.v(x).finite().unwrap_or(i64::MAX)
    }

    fn divides(&self, x: &FieldElement) -> bool {
        self.v(x) > 0
    }

    /// A small representative of x modulo P.
    fn small(&self, x: &FieldElement) -> Result<FieldElement> {
        Ok(self.p.lift(&self.p.reduce(x)?))
    }

    fn sqrt(&self, x: &FieldElement) -> Result<FieldElement> {
        let r = self.p.reduce(x)?;
        let k = self.p.residue_field();
        let s = k.sqrt(&r).ok_or_else(|| Error::Invalid("residue square root".into()))?;
        Ok(self.p.lift(&s))
    }

    fn cbrt_char3(&self, x: &FieldElement) -> Result<FieldElement> {
        let r = self.p.reduce(x)?;
        Ok(self.p.lift(&self.p.residue_field().pth_root(&r)))
    }

    fn div_pi(&self, x: &FieldElement, k: u32) -> FieldElement {
        x * &self.pi_inv.pow(k)
    }
}

fn move_by(e: &mut [FieldElement; 5], r: &FieldElement, s: &FieldElement, t: &FieldElement) {
    let k = e[0].field().clone();
    *e = crate::curve::transform_coefficients(e, &k.one(), r, s, t)
        .expect("unit scaling is invertible");
}

/// Tate's algorithm at P: Kodaira symbol, conductor exponent, minimal
/// discriminant valuation and a P-minimal model.
pub fn tate_reduce(curve: &WeierstrassModel, p: &PrimeIdeal) -> Result<TateResult> {
    let k = curve.field().clone();
    if !p.field().eq(&k) {
        return Err(Error::FieldMismatch);
    }
    let loc = Local {
        p,
        pi: p.uniformizer().clone(),
        pi_inv: p.uniformizer_inv().clone(),
    };
    let ch = p.residue_char();
    let zero = k.zero();
    let half = k.from_int(2).inv()?;

    let mut a = curve.a_invariants().clone();
    // make the model integral at P
    let weights = [1i64, 2, 3, 4, 6];
    let mut shift = 0i64;
    for (ai, w) in a.iter().zip(weights) {
        if let Valuation::Finite(v) = loc.v(ai) {
            if v < 0 {
                shift = shift.max((-v + w - 1) / w);
            }
        }
    }
    if shift > 0 {
        for (ai, w) in a.iter_mut().zip(weights) {
            *ai = &*ai * &p.uniformizer_pow(shift * w);
        }
    }

    let (kodaira, fexp, vd) = loop {
        let inv = WeierstrassModel::new(a.clone())?.invariants();
        let vd = loc.vi(&inv.discriminant);
        if vd == 0 {
            break (Kodaira::I0, 0, 0);
        }

        // move the singular point to (0, 0)
        let (r, t) = match ch {
            2 => {
                if loc.divides(&inv.b2) {
                    let r = loc.sqrt(&a[3])?;
                    let rhs = &(&(&r.pow(3) + &(&a[1] * &r.square())) + &(&a[3] * &r)) + &a[4];
                    (r, loc.sqrt(&rhs)?)
                } else {
                    let a1i = a[0].inv()?;
                    let r = loc.small(&(&a1i * &a[2]))?;
                    let t = loc.small(&(&a1i * &(&a[3] + &r.square())))?;
                    (r, t)
                }
            }
            3 => {
                let r = if loc.divides(&inv.b2) {
                    loc.cbrt_char3(&-&inv.b6)?
                } else {
                    loc.small(&-&(&inv.b4 * &inv.b2.inv()?))?
                };
                let t = loc.small(&(&(&a[0] * &r) + &a[2]))?;
                (r, t)
            }
            _ => {
                let twelve = k.from_int(12);
                let r = if loc.divides(&inv.c4) {
                    loc.small(&-&(&inv.b2 * &twelve.inv()?))?
                } else {
                    let num = &inv.c6 + &(&inv.b2 * &inv.c4);
                    loc.small(&-&(&num * &(&twelve * &inv.c4).inv()?))?
                };
                let t = loc.small(&-&(&(&(&a[0] * &r) + &a[2]) * &half))?;
                (r, t)
            }
        };
        move_by(&mut a, &r, &zero, &t);
        let inv = WeierstrassModel::new(a.clone())?.invariants();
        debug_assert!(loc.divides(&a[2]) && loc.divides(&a[3]) && loc.divides(&a[4]));

        if !loc.divides(&inv.c4) {
            let n = vd as u32;
            break (Kodaira::In(n), 1, vd);
        }
        if loc.vi(&a[4]) < 2 {
            break (Kodaira::II, vd, vd);
        }
        if loc.vi(&inv.b8) < 3 {
            break (Kodaira::III, vd - 1, vd);
        }
        if loc.vi(&inv.b6) < 3 {
            break (Kodaira::IV, vd - 2, vd);
        }

        // arrange π | a1, a2 and π² | a3, a4 and π³ | a6
        let (s, t) = match ch {
            2 => {
                let s = loc.sqrt(&a[1])?;
                let t = &loc.pi * &loc.sqrt(&loc.div_pi(&a[4], 2))?;
                (s, t)
            }
            3 => (a[0].clone(), a[2].clone()),
            _ => (-&(&a[0] * &half), -&(&a[2] * &half)),
        };
        move_by(&mut a, &zero, &s, &t);

        let b = loc.div_pi(&a[1], 1);
        let c = loc.div_pi(&a[3], 2);
        let d = loc.div_pi(&a[4], 3);
        let int = |n: i64| k.from_int(n);
        let w = &(&(&(&(&int(27) * &d.square()) - &(&b.square() * &c.square()))
            + &(&int(4) * &(&b.pow(3) * &d)))
            - &(&int(18) * &(&(&b * &c) * &d)))
            + &(&int(4) * &c.pow(3));
        let x = &(&int(3) * &c) - &b.square();
        let sw = if !loc.divides(&w) {
            1
        } else if !loc.divides(&x) {
            2
        } else {
            3
        };

        if sw == 1 {
            break (Kodaira::I0Star, vd - 4, vd);
        }
        if sw == 2 {
            // move the double root of the cubic to 0
            let r = match ch {
                2 => loc.sqrt(&c)?,
                3 => loc.small(&(&c * &b.inv()?))?,
                _ => {
                    let num = &(&b * &c) - &(&int(9) * &d);
                    loc.small(&(&num * &(&int(2) * &x).inv()?))?
                }
            };
            let r = &loc.pi * &r;
            move_by(&mut a, &r, &zero, &zero);
            let (mut ix, mut iy) = (3u32, 3u32);
            let mut mx = loc.pi.square();
            let mut my = mx.clone();
            loop {
                let a3t = &a[2] * &my.inv()?;
                let a6t = &a[4] * &(&mx * &my).inv()?;
                if !loc.divides(&(&a3t.square() + &(&int(4) * &a6t))) {
                    break;
                }
                let t = if ch == 2 {
                    &my * &loc.sqrt(&a6t)?
                } else {
                    &my * &loc.small(&-&(&a3t * &half))?
                };
                move_by(&mut a, &zero, &zero, &t);
                my = &my * &loc.pi;
                iy += 1;
                let a2t = loc.div_pi(&a[1], 1);
                let a4t = &a[3] * &(&loc.pi * &mx).inv()?;
                let a6t = &a[4] * &(&mx * &my).inv()?;
                if !loc.divides(&(&a4t.square() - &(&int(4) * &(&a6t * &a2t)))) {
                    break;
                }
                let r = if ch == 2 {
                    &mx * &loc.sqrt(&(&a6t * &a2t.inv()?))?
                } else {
                    &mx * &loc.small(&-&(&a4t * &(&int(2) * &a2t).inv()?))?
                };
                move_by(&mut a, &r, &zero, &zero);
                mx = &mx * &loc.pi;
                ix += 1;
            }
            let m = ix + iy - 5;
            break (Kodaira::InStar(m), vd - m as i64 - 4, vd);
        }

        // triple root
        let r = match ch {
            2 => b.clone(),
            3 => loc.cbrt_char3(&-&d)?,
            _ => loc.small(&-&(&b * &int(3).inv()?))?,
        };
        let r = &loc.pi * &r;
        move_by(&mut a, &r, &zero, &zero);
        let a3t = loc.div_pi(&a[2], 2);
        let a6t = loc.div_pi(&a[4], 4);
        if !loc.divides(&(&a3t.square() + &(&int(4) * &a6t))) {
            break (Kodaira::IVStar, vd - 6, vd);
        }
        let t = if ch == 2 {
            -&(&loc.pi.square() * &loc.sqrt(&a6t)?)
        } else {
            &loc.pi.square() * &loc.small(&-&(&a3t * &half))?
        };
        move_by(&mut a, &zero, &zero, &t);
        if loc.vi(&a[3]) < 4 {
            break (Kodaira::IIIStar, vd - 7, vd);
        }
        if loc.vi(&a[4]) < 6 {
            break (Kodaira::IIStar, vd - 8, vd);
        }
        // not minimal: scale down and start again
        for (i, w) in weights.iter().enumerate() {
            a[i] = loc.div_pi(&a[i], *w as u32);
        }
    };

    let minimal_model = WeierstrassModel::new(a)?;
    let split = if kodaira.is_multiplicative() {
        split_from_invariants(&minimal_model, p)?
    } else {
        SplitState::NotApplicable
    };
    Ok(TateResult {
        data: ReductionData {
            prime: p.clone(),
            kodaira,
            f_exponent: fexp as u32,
            vdelta_min: vd as u32,
            multiplicative_split: split,
        },
        minimal_model,
    })
}

/// Multiplicative reduction is split iff −c4/c6 is a square in K_P.
fn split_from_invariants(e: &WeierstrassModel, p: &PrimeIdeal) -> Result<SplitState> {
    let inv = e.invariants();
    let ratio = -&inv.c4.checked_div(&inv.c6)?;
    Ok(if is_local_square(&ratio, p)?.is_square {
        SplitState::Split
    } else {
        SplitState::Nonsplit
    })
}

/// Split/nonsplit for multiplicative reduction at P; errors otherwise.
pub fn split_multiplicative_test(e: &WeierstrassModel, p: &PrimeIdeal) -> Result<SplitState> {
    let red = tate_reduce(e, p)?;
    if !red.data.kodaira.is_multiplicative() {
        return Err(Error::NotMultiplicative);
    }
    Ok(red.data.multiplicative_split)
}

/// Split/nonsplit read off the tangent directions at the node: on a
/// P-minimal model with the node at (0, 0) the tangents are the roots of
/// T² + a1·T − a2 over the residue field.
pub fn split_by_node_tangents(e: &WeierstrassModel, p: &PrimeIdeal) -> Result<SplitState> {
    let red = tate_reduce(e, p)?;
    if !red.data.kodaira.is_multiplicative() {
        return Err(Error::NotMultiplicative);
    }
    let k = p.residue_field();
    let a: Vec<_> = red
        .minimal_model
        .a_invariants()
        .iter()
        .map(|x| p.reduce(x))
        .collect::<Result<_>>()?;
    // singular point of the reduction
    let node = k
        .elements()
        .flat_map(|x| k.elements().map(move |y| (x.clone(), y)))
        .find(|(x, y)| {
            // partial derivatives vanish and the point is on the curve
            let fx = k.sub(
                &k.mul(&a[0], y),
                &k.add(
                    &k.add(&k.scale(&k.mul(x, x), 3), &k.scale(&k.mul(&a[1], x), 2)),
                    &a[3],
                ),
            );
            let fy = k.add(&k.add(&k.scale(y, 2), &k.mul(&a[0], x)), &a[2]);
            let lhs = k.add(&k.mul(y, y), &k.add(&k.mul(&k.mul(&a[0], x), y), &k.mul(&a[2], y)));
            let rhs = k.add(
                &k.mul(&k.add(&k.mul(&k.add(x, &a[1]), x), &a[3]), x),
                &a[4],
            );
            fx.is_empty() && fy.is_empty() && k.sub(&lhs, &rhs).is_empty()
        })
        .ok_or_else(|| Error::Invalid("no singular point found".into()))?;
    let (x0, _) = node;
    // tangent cone at (x0, y0): (Y)² + a1·X·Y − (3x0 + a2)·X²
    let c = k.neg(&k.add(&k.scale(&x0, 3), &a[1]));
    Ok(if k.quadratic_has_root(&k.one(), &a[0], &c) {
        SplitState::Split
    } else {
        SplitState::Nonsplit
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialType {
    PotentiallyGood,
    PotentiallyMultiplicative,
}

/// Potentially multiplicative iff v_P(j) < 0.
pub fn potential_type_via_j(e: &WeierstrassModel, p: &PrimeIdeal) -> (PotentialType, Valuation) {
    let v = p.valuation(&e.j_invariant());
    let kind = if v < 0 {
        PotentialType::PotentiallyMultiplicative
    } else {
        PotentialType::PotentiallyGood
    };
    (kind, v)
}

/// Rational primes that may divide the conductor: those dividing the
/// norm of the discriminant or a denominator of the model.
pub fn candidate_rational_primes(e: &WeierstrassModel, budget: Duration) -> Result<Vec<BigInt>> {
    let nd = e.discriminant().norm();
    let mut out = arith::prime_support(&nd, budget)?;
    for ai in e.a_invariants() {
        if !num_traits::One::is_one(ai.denominator()) {
            out.extend(arith::factor_integer(ai.denominator(), budget)?.into_iter().map(|(q, _)| q));
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Reduction data at every prime of bad reduction, in canonical prime order.
pub fn conductor(e: &WeierstrassModel, budget: Duration) -> Result<Vec<ReductionData>> {
    let mut out = Vec::new();
    for q in candidate_rational_primes(e, budget)? {
        for prime in factor_rational_prime(e.field(), &q)? {
            let red = tate_reduce(e, &prime)?;
            if red.data.f_exponent > 0 {
                out.push(red.data);
            }
        }
    }
    out.sort_by_key(|d| d.prime.sort_key());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nf::{factor_rational_prime_u64, make_field_i64, rationals};

    fn at(e: &WeierstrassModel, p: u64) -> ReductionData {
        let ps = factor_rational_prime_u64(e.field(), p).unwrap();
        tate_reduce(e, &ps[0]).unwrap().data
    }

    #[test]
    fn eleven_a() {
        let q = rationals();
        let e = WeierstrassModel::from_i64(&q, [0, -1, 1, -10, -20]).unwrap();
        let d = at(&e, 11);
        assert_eq!(d.kodaira, Kodaira::In(5));
        assert_eq!(d.f_exponent, 1);
        assert_eq!(d.multiplicative_split, SplitState::Split);
        assert_eq!(at(&e, 3).kodaira, Kodaira::I0);
    }

    #[test]
    fn legendre_conductor() {
        let q = rationals();
        let e = WeierstrassModel::from_i64(&q, [0, 2, 0, -3, 0]).unwrap();
        let n: Vec<_> = conductor(&e, Duration::from_secs(5))
            .unwrap()
            .iter()
            .map(|d| (d.prime.residue_char(), d.f_exponent))
            .collect();
        assert_eq!(n, vec![(2, 3), (3, 1)]);
    }

    #[test]
    fn nonminimal_scaled_model() {
        let q = rationals();
        let e = WeierstrassModel::from_i64(&q, [0, -1, 1, -10, -20]).unwrap();
        let u = q.from_int(5).inv().unwrap();
        let z = q.zero();
        let big = e.transform(&u, &z, &z, &z).unwrap();
        let d = at(&big, 5);
        assert_eq!((d.kodaira, d.f_exponent, d.vdelta_min), (Kodaira::I0, 0, 0));
        let small = e.transform(&q.from_int(7), &z, &z, &z).unwrap();
        assert_eq!(at(&small, 7).kodaira, Kodaira::I0);
    }

    #[test]
    fn tangents_agree_with_invariants() {
        let k = make_field_i64(&[-2, 0, 1]).unwrap();
        let q = rationals();
        for (f, a) in [
            (&q, [0, -1, 1, -10, -20]),
            (&q, [1, 0, 1, 4, -6]),
            (&q, [1, 1, 1, -10, -10]),
            (&k, [1, 0, 1, 4, -6]),
            (&k, [0, -1, 1, -10, -20]),
        ] {
            let e = WeierstrassModel::from_i64(f, a).unwrap();
            for d in conductor(&e, Duration::from_secs(5)).unwrap() {
                if d.kodaira.is_multiplicative() {
                    assert_eq!(
                        split_by_node_tangents(&e, &d.prime).unwrap(),
                        d.multiplicative_split,
                        "{a:?} at {}",
                        d.prime
                    );
                }
            }
        }
    }
}

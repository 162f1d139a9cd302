//! Long Weierstrass models over a number field.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localred::{self, Kodaira};
use crate::nf::{roots_in_field, Field, FieldElement, FieldExt, PrimeIdeal};

/// y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6.
#[derive(Clone, PartialEq)]
pub struct WeierstrassModel {
    field: Field,
    a: [FieldElement; 5],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveInvariants {
    pub b2: FieldElement,
    pub b4: FieldElement,
    pub b6: FieldElement,
    pub b8: FieldElement,
    pub c4: FieldElement,
    pub c6: FieldElement,
    pub discriminant: FieldElement,
    pub j: FieldElement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwoTorsion {
    Trivial,
    Z2,
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoTorsionReport {
    pub structure: TwoTorsion,
    /// x-coordinates of the nontrivial 2-torsion points found.
    pub roots: Vec<FieldElement>,
    /// False when the root search hit its height bound, in which case
    /// `structure` is only a lower bound.
    pub conclusive: bool,
}

impl fmt::Debug for WeierstrassModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}, {}, {}, {}]",
            self.a[0], self.a[1], self.a[2], self.a[3], self.a[4]
        )
    }
}

/// Serialized as the list [a1, a2, a3, a4, a6].
impl Serialize for WeierstrassModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.a.serialize(s)
    }
}

fn b_invariants(a: &[FieldElement; 5]) -> [FieldElement; 4] {
    let [a1, a2, a3, a4, a6] = a;
    let two = BigInt::from(2);
    let four = BigInt::from(4);
    let b2 = &a1.square() + &a2.scale_int(&four);
    let b4 = &a4.scale_int(&two) + &(a1 * a3);
    let b6 = &a3.square() + &a6.scale_int(&four);
    let b8 = &(&(&(&(&a1.square() * a6) + &(a2 * a6).scale_int(&four)) - &(&(a1 * a3) * a4))
        + &(a2 * &a3.square()))
        - &a4.square();
    [b2, b4, b6, b8]
}

fn c_and_delta(b: &[FieldElement; 4]) -> (FieldElement, FieldElement, FieldElement) {
    let [b2, b4, b6, b8] = b;
    let c4 = &b2.square() - &b4.scale_int(&BigInt::from(24));
    let c6 = &(&(-&b2.pow(3)) + &(b2 * b4).scale_int(&BigInt::from(36)))
        - &b6.scale_int(&BigInt::from(216));
    let delta = &(&(&(-&(&b2.square() * b8)) - &b4.pow(3).scale_int(&BigInt::from(8)))
        - &b6.square().scale_int(&BigInt::from(27)))
        + &(&(b2 * b4) * b6).scale_int(&BigInt::from(9));
    (c4, c6, delta)
}

/// Discriminant of a model given by its a-invariants.
pub fn discriminant_of(a: &[FieldElement; 5]) -> FieldElement {
    c_and_delta(&b_invariants(a)).2
}

impl WeierstrassModel {
    /// Build a model; errors if the discriminant vanishes.
    pub fn new(a: [FieldElement; 5]) -> Result<Self> {
        let field = a[0].field().clone();
        if a.iter().any(|x| !x.same_field(&a[0])) {
            return Err(Error::FieldMismatch);
        }
        if discriminant_of(&a).is_zero() {
            return Err(Error::Singular);
        }
        Ok(WeierstrassModel { field, a })
    }

    pub fn from_i64(k: &Field, a: [i64; 5]) -> Result<Self> {
        Self::new(a.map(|c| k.from_int(c)))
    }

    /// y² = x³ + A·x² + B·x.
    pub fn two_torsion_form(a2: FieldElement, a4: FieldElement) -> Result<Self> {
        let k = a2.field().clone();
        Self::new([k.zero(), a2, k.zero(), a4, k.zero()])
    }

    /// y² = (x − e1)(x − e2)(x − e3).
    pub fn split_form(e1: &FieldElement, e2: &FieldElement, e3: &FieldElement) -> Result<Self> {
        let k = e1.field().clone();
        let a2 = -&(&(e1 + e2) + e3);
        let a4 = &(&(e1 * e2) + &(e1 * e3)) + &(e2 * e3);
        let a6 = -&(&(e1 * e2) * e3);
        Self::new([k.zero(), a2, k.zero(), a4, a6])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// [a1, a2, a3, a4, a6].
    pub fn a_invariants(&self) -> &[FieldElement; 5] {
        &self.a
    }

    pub fn a1(&self) -> &FieldElement {
        &self.a[0]
    }
    pub fn a2(&self) -> &FieldElement {
        &self.a[1]
    }
    pub fn a3(&self) -> &FieldElement {
        &self.a[2]
    }
    pub fn a4(&self) -> &FieldElement {
        &self.a[3]
    }
    pub fn a6(&self) -> &FieldElement {
        &self.a[4]
    }

    pub fn invariants(&self) -> CurveInvariants {
        let b = b_invariants(&self.a);
        let (c4, c6, discriminant) = c_and_delta(&b);
        let j = c4
            .pow(3)
            .checked_div(&discriminant)
            .expect("model is nonsingular");
        let [b2, b4, b6, b8] = b;
        CurveInvariants {
            b2,
            b4,
            b6,
            b8,
            c4,
            c6,
            discriminant,
            j,
        }
    }

    pub fn discriminant(&self) -> FieldElement {
        discriminant_of(&self.a)
    }

    pub fn j_invariant(&self) -> FieldElement {
        self.invariants().j
    }

    /// The model in coordinates x = u²x' + r, y = u³y' + s·u²x' + t.
    pub fn transform(
        &self,
        u: &FieldElement,
        r: &FieldElement,
        s: &FieldElement,
        t: &FieldElement,
    ) -> Result<Self> {
        let a = transform_coefficients(&self.a, u, r, s, t)?;
        Ok(WeierstrassModel {
            field: self.field.clone(),
            a,
        })
    }

    /// The twist d·y² = x³ + (b2/4)x² + (b4/2)x + b6/4, as a short model
    /// with a1 = a3 = 0.
    pub fn quadratic_twist(&self, d: &FieldElement) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::ZeroTwist);
        }
        let [b2, b4, b6, _] = b_invariants(&self.a);
        let k = &self.field;
        let quarter = k.from_int(4).inv()?;
        let half = k.from_int(2).inv()?;
        let a2 = &(d * &b2) * &quarter;
        let a4 = &(&d.square() * &b4) * &half;
        let a6 = &(&d.pow(3) * &b6) * &quarter;
        Self::new([k.zero(), a2, k.zero(), a4, a6])
    }

    /// 4x³ + b2·x² + 2b4·x + b6, coefficients constant first.
    pub fn two_division_polynomial(&self) -> [FieldElement; 4] {
        let [b2, b4, b6, _] = b_invariants(&self.a);
        [b6, b4.scale_int(&BigInt::from(2)), b2, self.field.from_int(4)]
    }

    pub fn two_torsion_structure(&self, height_bound: u64) -> Result<TwoTorsionReport> {
        let search = roots_in_field(&self.two_division_polynomial(), height_bound)?;
        let structure = match search.roots.len() {
            0 => TwoTorsion::Trivial,
            1 => TwoTorsion::Z2,
            _ => TwoTorsion::Full,
        };
        Ok(TwoTorsionReport {
            structure,
            conclusive: search.complete || structure == TwoTorsion::Full,
            roots: search.roots,
        })
    }

    /// Number of points of the reduction at P, and a_P = N(P) + 1 − #E.
    pub fn count_points_at(&self, p: &PrimeIdeal) -> Result<PointCount> {
        count_points_at(self, p)
    }
}

pub(crate) fn transform_coefficients(
    a: &[FieldElement; 5],
    u: &FieldElement,
    r: &FieldElement,
    s: &FieldElement,
    t: &FieldElement,
) -> Result<[FieldElement; 5]> {
    let [a1, a2, a3, a4, a6] = a;
    let two = BigInt::from(2);
    let three = BigInt::from(3);
    let ui = u.inv()?;
    let ui2 = ui.square();
    let ui3 = &ui2 * &ui;
    let ui4 = ui2.square();
    let ui6 = ui3.square();
    let n1 = a1 + &s.scale_int(&two);
    let n2 = &(&(a2 - &(s * a1)) + &r.scale_int(&three)) - &s.square();
    let n3 = &(a3 + &(r * a1)) + &t.scale_int(&two);
    let n4 = &(&(&(&(a4 - &(s * a3)) + &(r * a2).scale_int(&two)) - &(&(t + &(r * s)) * a1))
        + &r.square().scale_int(&three))
        - &(s * t).scale_int(&two);
    let n6 = &(&(&(&(&(a6 + &(r * a4)) + &(&r.square() * a2)) + &r.pow(3)) - &(t * a3))
        - &t.square())
        - &(&(r * t) * a1);
    Ok([&n1 * &ui, &n2 * &ui2, &n3 * &ui3, &n4 * &ui4, &n6 * &ui6])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointCount {
    /// Size of the residue field.
    pub q: u64,
    /// Projective points on the reduced curve.
    pub points: u64,
    pub a: i64,
}

/// Residue fields larger than this are not enumerated.
pub const POINT_COUNT_LIMIT: u128 = 1_000_000;

pub fn count_points_at(e: &WeierstrassModel, p: &PrimeIdeal) -> Result<PointCount> {
    let q = p.residue_field().size().unwrap_or(u128::MAX);
    if q > POINT_COUNT_LIMIT {
        return Err(Error::ResidueFieldTooLarge {
            size: q,
            limit: POINT_COUNT_LIMIT,
        });
    }
    let red = localred::tate_reduce(e, p)?;
    if red.data.kodaira != Kodaira::I0 {
        return Err(Error::BadReduction);
    }
    let k = p.residue_field();
    let ab: Vec<_> = red
        .minimal_model
        .a_invariants()
        .iter()
        .map(|x| p.reduce(x))
        .collect::<Result<_>>()?;
    let [a1, a2, a3, a4, a6] = [&ab[0], &ab[1], &ab[2], &ab[3], &ab[4]];
    let mut count: u64 = 1;
    for x in k.elements() {
        let h = k.add(&k.mul(a1, &x), a3);
        let g = k.add(&k.mul(&k.add(&k.mul(&k.add(&x, a2), &x), a4), &x), a6);
        count += k.count_y(&h, &g);
    }
    let q = q as u64;
    let a = q as i64 + 1 - count as i64;
    assert!(
        (a as i128) * (a as i128) <= 4 * q as i128,
        "Hasse bound violated: a = {a}, q = {q}"
    );
    Ok(PointCount {
        q,
        points: count,
        a,
    })
}

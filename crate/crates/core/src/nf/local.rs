//! Squares in completions K_P.

use serde::Serialize;

use super::element::FieldElement;
use super::field::FieldExt;
use super::prime::{PrimeIdeal, Valuation};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct LocalSquare {
    pub is_square: bool,
    /// w with w² ≡ x mod P^precision, when x is a square.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<FieldElement>,
    pub precision: i64,
}

impl LocalSquare {
    fn no(v: i64) -> Self {
        LocalSquare {
            is_square: false,
            witness: None,
            precision: v,
        }
    }
}

/// Decide whether x is a square in the completion at P.
///
/// Odd residue characteristic: parity of v(x) plus a residue-field Euler
/// test. Residue characteristic 2: successive approximation of the unit
/// part; a unit that is a square modulo P^{2e+1} is a square.
pub fn is_local_square(x: &FieldElement, p: &PrimeIdeal) -> Result<LocalSquare> {
    let v = match p.valuation(x) {
        Valuation::Infinite => return Err(Error::ZeroInput),
        Valuation::Finite(v) => v,
    };
    if v % 2 != 0 {
        return Ok(LocalSquare::no(v));
    }
    let k = p.residue_field();
    let half = p.uniformizer_pow(v / 2);
    let u = x * &p.uniformizer_pow(-v);
    let ru = p.reduce(&u)?;
    let s0 = match k.sqrt(&ru) {
        Some(s) => s,
        None => return Ok(LocalSquare::no(v)),
    };
    if p.residue_char() != 2 {
        return Ok(LocalSquare {
            is_square: true,
            witness: Some(&p.lift(&s0) * &half),
            precision: v + 1,
        });
    }

    let e = p.e() as i64;
    let field = x.field();
    let one = field.one();
    let mut w = p.lift(&s0);
    let mut cur = &u * &w.square().inv()?;
    loop {
        let kv = match p.valuation(&(&cur - &one)) {
            Valuation::Infinite => break,
            Valuation::Finite(kv) => kv,
        };
        if kv > 2 * e {
            break;
        }
        let z = &(&cur - &one) * &p.uniformizer_pow(-kv);
        let rz = p.reduce(&z)?;
        if kv < 2 * e {
            if kv % 2 != 0 {
                return Ok(LocalSquare::no(v));
            }
            // divide out (1 + s·π^{k/2})², which agrees with 1 + s²π^k mod P^{k+1}
            let s = k.sqrt(&rz).expect("every element is a square in characteristic 2");
            let corr = &one + &(&p.lift(&s) * &p.uniformizer_pow(kv / 2));
            cur = &cur * &corr.square().inv()?;
            w = &w * &corr;
        } else {
            // cur = 1 + 4c with c a unit: square iff y² + y ≡ c is solvable
            let four = field.from_int(4);
            let c = &(&cur - &one) * &four.inv()?;
            let rc = p.reduce(&c)?;
            match k.artin_schreier_root(&rc) {
                None => return Ok(LocalSquare::no(v)),
                Some(y) => {
                    let corr = &one + &(&field.from_int(2) * &p.lift(&y));
                    cur = &cur * &corr.square().inv()?;
                    w = &w * &corr;
                }
            }
        }
    }
    Ok(LocalSquare {
        is_square: true,
        witness: Some(&w * &half),
        precision: v + 2 * e + 1,
    })
}

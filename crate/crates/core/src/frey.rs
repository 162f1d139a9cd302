//! Fermat solutions and the Frey curve Y² = X(X − a^p)(X + b^p).

use std::time::Duration;

use serde::Serialize;

use crate::arith;
use crate::curve::{TwoTorsion, WeierstrassModel};
use crate::error::{Error, Result};
use crate::localred::{candidate_rational_primes, potential_type_via_j, PotentialType};
use crate::nf::{factor_rational_prime, FieldElement, FieldExt, PrimeIdeal, Valuation};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FermatWitness {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
    pub p: u64,
    pub trivial: bool,
}

/// Check a^p + b^p + c^p = 0 for integral a, b, c and an odd prime p.
pub fn check_solution(
    a: &FieldElement,
    b: &FieldElement,
    c: &FieldElement,
    p: u64,
) -> Result<FermatWitness> {
    if p < 3 || !arith::is_prime_u64(p) {
        return Err(Error::BadExponent(p));
    }
    if !a.same_field(b) || !a.same_field(c) {
        return Err(Error::FieldMismatch);
    }
    if ![a, b, c].iter().all(|x| x.is_integral()) {
        return Err(Error::NonIntegralInput);
    }
    let e = u32::try_from(p).map_err(|_| Error::BadExponent(p))?;
    if !(&(&a.pow(e) + &b.pow(e)) + &c.pow(e)).is_zero() {
        return Err(Error::NotASolution);
    }
    Ok(FermatWitness {
        trivial: a.is_zero() || b.is_zero() || c.is_zero(),
        a: a.clone(),
        b: b.clone(),
        c: c.clone(),
        p,
    })
}

pub fn frey_curve(w: &FermatWitness) -> Result<WeierstrassModel> {
    if w.trivial {
        return Err(Error::TrivialWitness);
    }
    let e = w.p as u32;
    let k = w.a.field();
    WeierstrassModel::split_form(&k.zero(), &w.a.pow(e), &-&w.b.pow(e))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrimeJValuation {
    pub prime: PrimeIdeal,
    pub v_j: Valuation,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FreyPropertyReport {
    /// (i) full 2-torsion.
    pub full_two_torsion: bool,
    /// (ii) potentially good away from P; failing primes listed.
    pub potentially_good_away: bool,
    pub away_primes: Vec<PrimeJValuation>,
    /// (iii) potentially multiplicative at P.
    pub potentially_multiplicative_at_p: bool,
    pub v_j_at_p: Valuation,
}

impl FreyPropertyReport {
    pub fn all_pass(&self) -> bool {
        self.full_two_torsion && self.potentially_good_away && self.potentially_multiplicative_at_p
    }
}

pub fn property_check(
    e: &WeierstrassModel,
    p: &PrimeIdeal,
    budget: Duration,
) -> Result<FreyPropertyReport> {
    let tt = e.two_torsion_structure(crate::nf::DEFAULT_HEIGHT_BOUND)?;
    let mut away_primes = Vec::new();
    for q in candidate_rational_primes(e, budget)? {
        for prime in factor_rational_prime(e.field(), &q)? {
            if &prime == p {
                continue;
            }
            let (_, v_j) = potential_type_via_j(e, &prime);
            away_primes.push(PrimeJValuation { prime, v_j });
        }
    }
    away_primes.sort_by_key(|x| x.prime.sort_key());
    let (kind, v_j_at_p) = potential_type_via_j(e, p);
    Ok(FreyPropertyReport {
        full_two_torsion: tt.structure == TwoTorsion::Full,
        potentially_good_away: away_primes.iter().all(|x| x.v_j >= 0),
        away_primes,
        potentially_multiplicative_at_p: kind == PotentialType::PotentiallyMultiplicative,
        v_j_at_p,
    })
}

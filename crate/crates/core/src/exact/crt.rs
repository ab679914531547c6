//! Cosets of Z[1/Q] cut out by p-adic ball constraints.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::padic::{mod_inverse, padic_valuation, prime_power, split_power, Valuation};
use super::prime::Prime;
use super::Rational;
use crate::error::{Error, Result};

/// The condition v_p(gamma - residue) >= -exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Congruence {
    pub prime: Prime,
    pub exponent: i64,
    pub residue: Rational,
}

impl Congruence {
    pub fn new(prime: Prime, exponent: i64, residue: Rational) -> Self {
        Congruence { prime, exponent, residue }
    }

    pub fn holds(&self, gamma: &Rational) -> bool {
        padic_valuation(&(gamma - &self.residue), self.prime) >= Valuation::Finite(-self.exponent)
    }
}

/// The solution set `offset + step * Z` of a congruence system, `offset` in [0, step).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coset {
    pub offset: Rational,
    pub step: Rational,
}

/// Solves the system over Z[1/Q], Q being the primes that carry a constraint.
///
/// Repeated primes are intersected; disjoint balls at one prime give
/// `InconsistentConstraints`. With distinct primes a solution always exists.
pub fn crt_coset(constraints: &[Congruence]) -> Result<Coset> {
    // prime -> (tightest exponent, residue)
    let mut merged: BTreeMap<Prime, (i64, Rational)> = BTreeMap::new();
    for c in constraints {
        match merged.get_mut(&c.prime) {
            None => {
                merged.insert(c.prime, (c.exponent, c.residue.clone()));
            }
            Some((h, r)) => {
                let loose = (*h).max(c.exponent);
                if padic_valuation(&(&*r - &c.residue), c.prime) < Valuation::Finite(-loose) {
                    return Err(Error::InconsistentConstraints);
                }
                if c.exponent < *h {
                    *h = c.exponent;
                    *r = c.residue.clone();
                }
            }
        }
    }

    let mut step = Rational::one();
    // Integer system g = target (mod modulus) for g = scale * gamma.
    let mut locals = Vec::with_capacity(merged.len());
    let mut scale = BigInt::one();
    for (&p, (h, r)) in &merged {
        let e = -*h;
        step *= prime_power(p, e);
        let local = local_representative(r, p, e);
        let v_local = padic_valuation(&local, p).finite().unwrap_or(e);
        let k = 0.max(-e).max(-v_local);
        scale *= p.to_bigint().pow(k as u32);
        locals.push((p, e, k, local));
    }

    let mut acc = BigInt::zero();
    let mut acc_mod = BigInt::one();
    for (p, e, k, local) in locals {
        let modulus = p.to_bigint().pow((e + k) as u32);
        let target = local * Rational::from_integer(scale.clone());
        debug_assert!(target.is_integer());
        let target = target.to_integer().mod_floor(&modulus);
        // acc + acc_mod * s = target (mod modulus)
        let diff = (&target - &acc).mod_floor(&modulus);
        let s = if modulus.is_one() {
            BigInt::zero()
        } else {
            (diff * mod_inverse(&acc_mod, &modulus)).mod_floor(&modulus)
        };
        acc += &acc_mod * s;
        acc_mod *= modulus;
    }

    let gamma0 = Rational::new(acc, scale);
    let offset = &gamma0 - &step * (&gamma0 / &step).floor();
    Ok(Coset { offset, step })
}

/// An element of Z[1/p] congruent to `r` modulo p^e Z_p.
fn local_representative(r: &Rational, p: Prime, e: i64) -> Rational {
    let v = match padic_valuation(r, p) {
        Valuation::Infinite => return Rational::zero(),
        Valuation::Finite(v) if v >= e => return Rational::zero(),
        Valuation::Finite(v) => v,
    };
    let (_, u) = split_power(r.numer(), p);
    let (_, w) = split_power(r.denom(), p);
    let modulus = p.to_bigint().pow((e - v) as u32);
    let unit = (u * mod_inverse(&w, &modulus)).mod_floor(&modulus);
    Rational::from_integer(unit) * prime_power(p, v)
}

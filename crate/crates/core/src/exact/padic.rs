//! p-adic valuations, absolute values and fractional parts of rationals.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::prime::{Prime, PrimeSet};
use super::Rational;
use crate::error::{Error, Result};

/// The p-adic valuation of a rational; zero has valuation `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
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
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// Splits a nonzero integer as p^v * rest with p not dividing rest.
pub(crate) fn split_power(n: &BigInt, p: Prime) -> (i64, BigInt) {
    debug_assert!(!n.is_zero());
    let p = p.to_bigint();
    let mut v = 0;
    let mut rest = n.clone();
    loop {
        let (q, r) = rest.div_rem(&p);
        if !r.is_zero() {
            return (v, rest);
        }
        rest = q;
        v += 1;
    }
}

pub fn padic_valuation(x: &Rational, p: Prime) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let (vn, _) = split_power(x.numer(), p);
    let (vd, _) = split_power(x.denom(), p);
    Valuation::Finite(vn - vd)
}

/// p^e as a rational, for any sign of `e`.
pub fn prime_power(p: Prime, e: i64) -> Rational {
    let base = p.to_bigint().pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from_integer(base)
    } else {
        Rational::new(BigInt::one(), base)
    }
}

pub fn padic_abs(x: &Rational, p: Prime) -> Rational {
    match padic_valuation(x, p) {
        Valuation::Infinite => Rational::zero(),
        Valuation::Finite(v) => prime_power(p, -v),
    }
}

/// Inverse of `a` modulo `m` (gcd(a, m) = 1), in [0, m).
pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let eg = a.mod_floor(m).extended_gcd(m);
    debug_assert!(eg.gcd.is_one());
    eg.x.mod_floor(m)
}

/// The p-adic fractional part: the negative-power tail of the p-adic expansion.
///
/// Writing x = u / (p^k w) with p not dividing w, the tail is t / p^k where
/// t = u * w^-1 mod p^k.
pub fn padic_fractional_part(x: &Rational, p: Prime) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    let (k, w) = split_power(x.denom(), p);
    if k == 0 {
        return Rational::zero();
    }
    let modulus = p.to_bigint().pow(k as u32);
    let t = (x.numer() * mod_inverse(&w, &modulus)).mod_floor(&modulus);
    Rational::new(t, modulus)
}

/// |r|_inf times the product of |r|_p over `primes`.
pub fn weil_product(r: &Rational, primes: &PrimeSet) -> Result<Rational> {
    if r.is_zero() {
        return Err(Error::ZeroInput);
    }
    Ok(primes
        .iter()
        .fold(r.abs(), |acc, p| acc * padic_abs(r, p)))
}

/// True iff the denominator of `x` has no prime factor outside `primes`.
pub fn is_supported_on(x: &Rational, primes: &PrimeSet) -> bool {
    let mut d = x.denom().clone();
    for p in primes.iter() {
        if d.is_one() {
            break;
        }
        d = split_power(&d, p).1;
    }
    d.is_one()
}

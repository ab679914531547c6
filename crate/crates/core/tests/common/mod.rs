//! Seeded generators shared by the integration tests.

#![allow(dead_code)]

use brs_core::exact::prime_power;
use brs_core::{rat, AdeleVector, ExactReal, GammaElement, Prime, PrimeSet, Rational};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(values: &[u64]) -> PrimeSet {
    PrimeSet::new(values.iter().copied()).unwrap()
}

pub fn worked_alpha() -> AdeleVector {
    AdeleVector::from_pairs(ExactReal::sqrt(2), &[(2, rat(1, 2))]).unwrap()
}

pub const PRIME_SETS: &[&[u64]] = &[&[2], &[3], &[2, 3], &[2, 5], &[3, 7], &[5]];

pub fn prime_set(r: &mut TestRng) -> PrimeSet {
    q(PRIME_SETS.choose(r).unwrap())
}

/// A rational whose p-adic size at each prime of `primes` is at most p^max_exp,
/// times a unit built from small primes outside the set.
pub fn local_rational(r: &mut TestRng, primes: &PrimeSet, max_exp: i64) -> Rational {
    let num: i64 = r.gen_range(-30..=30);
    let mut den = Rational::from_integer(BigInt::from(*[1i64, 1, 1, 7, 11].choose(r).unwrap()));
    if primes.contains(Prime::new(7).unwrap()) || primes.contains(Prime::new(11).unwrap()) {
        den = Rational::from_integer(BigInt::from(1));
    }
    for p in primes.iter() {
        den *= prime_power(p, r.gen_range(0..=max_exp));
    }
    Rational::from_integer(BigInt::from(num)) / den
}

/// a + b sqrt d over c with b != 0, so the rotation is minimal.
pub fn irrational(r: &mut TestRng) -> ExactReal {
    let d = *[2u64, 3, 5, 6, 7, 10].choose(r).unwrap();
    let a = r.gen_range(-5..=5);
    let b = *[-3i64, -2, -1, 1, 2, 3].choose(r).unwrap();
    let c = r.gen_range(1..=4);
    ExactReal::from_parts(a, b, c, d).unwrap()
}

pub fn minimal_alpha(r: &mut TestRng, primes: &PrimeSet, max_exp: i64) -> AdeleVector {
    let padic = primes.iter().map(|_| local_rational(r, primes, max_exp)).collect();
    AdeleVector::new(primes.clone(), irrational(r), padic).unwrap()
}

/// k / prod p^e with e <= max_exp and k nonzero.
pub fn nonzero_gamma(r: &mut TestRng, primes: &PrimeSet, max_k: i64, max_exp: i64) -> GammaElement {
    let mut k = 0;
    while k == 0 {
        k = r.gen_range(-max_k..=max_k);
    }
    let mut g = Rational::from_integer(BigInt::from(k));
    for p in primes.iter() {
        g *= prime_power(p, -r.gen_range(0..=max_exp));
    }
    GammaElement::new(g, primes).unwrap()
}

/// A point of A_Q with small coordinates, not necessarily reduced.
pub fn adele(r: &mut TestRng, primes: &PrimeSet, field: u64) -> AdeleVector {
    let a = r.gen_range(-9..=9);
    let b = r.gen_range(-4..=4);
    let c = r.gen_range(1..=6);
    let real = ExactReal::from_parts(a, b, c, field).unwrap();
    let padic = primes.iter().map(|_| local_rational(r, primes, 3)).collect();
    AdeleVector::new(primes.clone(), real, padic).unwrap()
}

pub fn rational_point(r: &mut TestRng, primes: &PrimeSet) -> Rational {
    local_rational(r, primes, 3) + rat(r.gen_range(-3..=3), 1)
}

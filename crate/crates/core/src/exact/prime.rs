use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};

/// A rational prime, checked on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(value: u64) -> Result<Self> {
        if is_prime(value) {
            Ok(Prime(value))
        } else {
            Err(Error::NotPrime(value))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut k = 3u64;
    while k.saturating_mul(k) <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 2;
    }
    true
}

/// A finite, strictly increasing set of primes. The empty set is the circle case.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PrimeSet(Vec<Prime>);

impl PrimeSet {
    pub fn empty() -> Self {
        PrimeSet(Vec::new())
    }

    /// Builds the set from arbitrary values; duplicates collapse.
    pub fn new<I: IntoIterator<Item = u64>>(values: I) -> Result<Self> {
        let mut primes = values
            .into_iter()
            .map(Prime::new)
            .collect::<Result<Vec<_>>>()?;
        primes.sort_unstable();
        primes.dedup();
        Ok(PrimeSet(primes))
    }

    pub fn from_primes<I: IntoIterator<Item = Prime>>(primes: I) -> Self {
        let mut primes: Vec<Prime> = primes.into_iter().collect();
        primes.sort_unstable();
        primes.dedup();
        PrimeSet(primes)
    }

    #[inline]
    pub fn as_slice(&self) -> &[Prime] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Prime> + '_ {
        self.0.iter().copied()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: Prime) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn index_of(&self, p: Prime) -> Option<usize> {
        self.0.binary_search(&p).ok()
    }

    pub fn is_subset(&self, other: &PrimeSet) -> bool {
        self.iter().all(|p| other.contains(p))
    }

    pub fn union(&self, other: &PrimeSet) -> PrimeSet {
        PrimeSet::from_primes(self.iter().chain(other.iter()))
    }

    pub fn difference(&self, other: &PrimeSet) -> PrimeSet {
        PrimeSet(self.iter().filter(|&p| !other.contains(p)).collect())
    }

    /// p1 * p2 * ... * pk (1 for the empty set).
    pub fn product(&self) -> BigInt {
        self.iter().map(Prime::to_bigint).product()
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

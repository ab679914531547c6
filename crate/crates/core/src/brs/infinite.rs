//! Reduction of an infinite prime set to the finitely many primes that matter.
//!
//! Outside a finite set Q' the coordinates of alpha are p-adic integers and
//! gamma is p-integral, so the construction over Q' times prod Z_p works for Q.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::boxes::{AdelicBox, PAdicBall, WeightedBox, WeightedBoxSet};
use crate::error::{Error, Result};
use crate::exact::{padic_valuation, ExactReal, Prime, PrimeSet, Rational, Valuation};
use crate::solenoid::AdeleVector;

/// An adele over a conceptually infinite prime set, stored by its finite support.
///
/// Coordinates outside `support` are 0 when `integral_elsewhere` holds; without
/// that flag they are unknown and the reduction refuses to run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseAdele {
    pub real: ExactReal,
    pub support: BTreeMap<Prime, Rational>,
    pub integral_elsewhere: bool,
}

impl SparseAdele {
    pub fn new(real: ExactReal, support: &[(u64, Rational)], integral_elsewhere: bool) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (p, x) in support {
            if map.insert(Prime::new(*p)?, x.clone()).is_some() {
                return Err(Error::Parse(format!("prime {p} listed twice")));
            }
        }
        Ok(SparseAdele { real, support: map, integral_elsewhere })
    }

    pub fn coordinate(&self, p: Prime) -> Rational {
        self.support.get(&p).cloned().unwrap_or_default()
    }

    /// The finite-Q adele over `primes`.
    pub fn project(&self, primes: &PrimeSet) -> AdeleVector {
        let padic = primes.iter().map(|p| self.coordinate(p)).collect();
        AdeleVector::new(primes.clone(), self.real.clone(), padic).expect("one coordinate per prime")
    }
}

/// Prime factors of a positive integer, by trial division.
fn prime_factors(n: &BigInt) -> Result<Vec<u64>> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut k = 2u64;
    while !n.is_one() {
        let kb = BigInt::from(k);
        if &kb * &kb > n {
            let last = u64::try_from(&n).map_err(|_| Error::Overflow(n.to_string()))?;
            out.push(last);
            break;
        }
        if n.is_multiple_of(&kb) {
            out.push(k);
            while n.is_multiple_of(&kb) {
                n /= &kb;
            }
        }
        k += if k == 2 { 1 } else { 2 };
    }
    Ok(out)
}

/// Q' = { p : |alpha_p|_p > 1 } together with the primes dividing the denominator of gamma.
pub fn reduce_to_finite(alpha: &SparseAdele, gamma: &Rational) -> Result<PrimeSet> {
    if !alpha.integral_elsewhere {
        return Err(Error::UnsupportedCoordinate(
            "coordinates outside the declared support are not known to be integral".into(),
        ));
    }
    let mut primes: Vec<Prime> = alpha
        .support
        .iter()
        .filter(|(p, x)| padic_valuation(x, **p) < Valuation::Finite(0))
        .map(|(p, _)| *p)
        .collect();
    for f in prime_factors(gamma.denom())? {
        primes.push(Prime::new(f)?);
    }
    Ok(PrimeSet::from_primes(primes))
}

/// The same multiset over a larger prime set: every box gains a Z_p factor at each new prime.
pub fn extend_box_set(set: &WeightedBoxSet, primes: &PrimeSet) -> Result<WeightedBoxSet> {
    if !set.primes().is_subset(primes) {
        return Err(Error::PrimeSetMismatch(set.primes().to_string(), primes.to_string()));
    }
    let extra = primes.difference(set.primes());
    let terms = set
        .terms()
        .iter()
        .map(|t| {
            let mut balls = t.region.balls().to_vec();
            balls.extend(extra.iter().map(PAdicBall::integers));
            Ok(WeightedBox {
                region: AdelicBox::new(t.region.lo().clone(), t.region.hi().clone(), balls)?,
                weight: t.weight,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    WeightedBoxSet::new(primes.clone(), terms, set.claimed_volume().clone(), set.certificate().clone())
}
